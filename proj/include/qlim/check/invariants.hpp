#ifndef QLIM_CHECK_INVARIANTS_HPP
#define QLIM_CHECK_INVARIANTS_HPP

#include <qlim/check/oracles.hpp>
#include <qlim/convergence.hpp>
#include <qlim/experiments.hpp>
#include <qlim/measure.hpp>
#include <qlim/report.hpp>
#include <qlim/spectra.hpp>
#include <qlim/toeplitz.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qlim::check {

struct PropertyResult {
    std::string name;
    bool passed = true;
    std::size_t cases = 0;
    std::string detail;  // first failing case, if any
};

inline constexpr double value_tolerance = 1e-12;

using Rng = std::mt19937_64;

namespace detail {

/// Accumulates pass/fail over many cases, keeping the first failure message.
class Tally {
public:
    explicit Tally(std::string name) { result_.name = std::move(name); }

    void expect(bool ok, const std::string& what = {})
    {
        ++result_.cases;
        if (!ok && result_.passed) {
            result_.passed = false;
            result_.detail = what;
        }
    }

    PropertyResult take() { return std::move(result_); }

private:
    PropertyResult result_;
};

inline std::string describe(double a, double b)
{
    std::ostringstream s;
    s.precision(17);
    s << a << " vs " << b;
    return s.str();
}

/// Random sample tuple with deliberate ties: values drawn from a small
/// lattice so repeated atoms are common.
inline std::vector<double> random_tuple(Rng& rng)
{
    std::uniform_int_distribution<int> len(1, 40);
    std::uniform_int_distribution<int> lattice(-20, 20);
    std::uniform_real_distribution<double> scale(0.01, 3.0);
    const double s = scale(rng);
    std::vector<double> out(static_cast<std::size_t>(len(rng)));
    for (double& v : out) {
        v = s * lattice(rng);
    }
    return out;
}

inline DenseMatrix random_hermitian(Rng& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = u(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex z{u(rng), u(rng)};
            a(i, j) = z;
            a(j, i) = std::conj(z);
        }
    }
    return a;
}

inline DenseMatrix random_matrix(Rng& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = Complex{u(rng), u(rng)};
        }
    }
    return a;
}

/// Random finitely supported coefficient map with bandwidth <= band per level.
inline CoefficientMap random_coefficients(Rng& rng, std::size_t levels, int band, bool conjugate_symmetric)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> idx(-band, band);
    CoefficientMap m;
    const int count = 1 + static_cast<int>(rng() % 5);
    for (int c = 0; c < count; ++c) {
        MultiIndex j(levels);
        for (auto& v : j) {
            v = idx(rng);
        }
        Complex z{u(rng), u(rng)};
        if (conjugate_symmetric) {
            MultiIndex neg(levels);
            std::transform(j.begin(), j.end(), neg.begin(), [](int v) { return -v; });
            if (neg == j) {
                z = z.real();
            }
            m[neg] = std::conj(z);
        }
        m[j] = z;
    }
    return m;
}

} // namespace detail

/// Distribution/quantile duality on random discrete measures and on the
/// arcsine and uniform laws.
inline std::vector<PropertyResult> measure_invariants(Rng& rng, std::size_t trials)
{
    using detail::Tally;
    Tally atoms("measure.empirical_atoms");
    Tally right_cont("measure.cdf_right_continuous");
    Tally left_cont("measure.quantile_left_continuous");
    Tally galois_a("measure.galois_a: Q(F(v)) <= v");
    Tally galois_b("measure.galois_b: F(Q(u)) >= u");
    Tally galois_c("measure.galois_c: Q(u) <= v iff u <= F(v)");
    Tally pushforward("measure.quantile_distribution_is_cdf");
    Tally boundary("measure.boundary_behavior");
    Tally identity("measure.quantile_identity_at_nodes");
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t t = 0; t < trials; ++t) {
        auto tuple = detail::random_tuple(rng);
        const auto m = empirical_from_samples(tuple);
        std::sort(tuple.begin(), tuple.end());
        const auto vals = m.values();
        const auto d = m.total();

        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < m.atom_count(); ++i) {
            sum += m.multiplicities()[i];
            atoms.expect(i == 0 || vals[i - 1] < vals[i], "atoms not strictly increasing");
        }
        atoms.expect(sum == d && d == tuple.size(), "multiplicities do not sum to the sample count");

        for (std::size_t j = 1; j <= d; ++j) {
            const double p = static_cast<double>(j) / static_cast<double>(d);
            identity.expect(m.quantile(p) == tuple[j - 1], detail::describe(m.quantile(p), tuple[j - 1]));
        }

        const auto [alpha, beta] = support_bounds(m);
        boundary.expect(m.cdf(alpha - 1.0) == 0.0 && m.cdf(std::nextafter(alpha, -1e300)) == 0.0, "F below support");
        boundary.expect(m.cdf(beta) == 1.0 && m.cdf(beta + 1.0) == 1.0, "F at support max");
        boundary.expect(m.quantile(0.0) == alpha && m.quantile(1.0) == beta, "Q at 0 and 1");
        boundary.expect(m.cdf(alpha) > 0.0, "F at least atom");

        for (std::size_t i = 0; i < m.atom_count(); ++i) {
            const double gap = i + 1 < m.atom_count() ? vals[i + 1] - vals[i] : 1.0;
            right_cont.expect(m.cdf(vals[i]) == m.cdf(vals[i] + 0.5 * gap), "F jumps right of an atom");
        }

        // Probe points: atoms, midpoints, and random values around the support.
        std::vector<double> vs(vals.begin(), vals.end());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            vs.push_back(0.5 * (vals[i] + vals[i + 1]));
        }
        for (int r = 0; r < 8; ++r) {
            vs.push_back(alpha - 1.0 + (beta - alpha + 2.0) * unit(rng));
        }
        std::vector<double> us{0.0, 1.0};
        for (std::size_t j = 1; j <= d; ++j) {
            us.push_back(static_cast<double>(j) / static_cast<double>(d));
        }
        for (int r = 0; r < 16; ++r) {
            us.push_back(unit(rng));
        }

        for (double v : vs) {
            const double f = m.cdf(v);
            if (f > 0.0) {
                galois_a.expect(m.quantile(f) <= v, detail::describe(m.quantile(f), v));
            }
            pushforward.expect(quantile_sublevel_measure(m, v) == f, detail::describe(quantile_sublevel_measure(m, v), f));
            for (double u : us) {
                if (u > 0.0) {
                    galois_c.expect((m.quantile(u) <= v) == (u <= f), "Galois connection broken");
                }
            }
        }
        for (double u : us) {
            galois_b.expect(m.cdf(m.quantile(u)) >= u, detail::describe(m.cdf(m.quantile(u)), u));
            if (u > 0.0) {
                // Q is constant on ((j-1)/d, j/d]; step back within the block.
                const double j = std::ceil(u * static_cast<double>(d));
                const double block_lo = (j - 1.0) / static_cast<double>(d);
                const double inner = block_lo + 0.5 * (u - block_lo);
                if (inner > block_lo && inner < u) {
                    left_cont.expect(m.quantile(inner) == m.quantile(u), "Q not constant on its block");
                }
            }
        }
    }

    std::vector<PropertyResult> out;
    for (Tally* tl : {&atoms, &right_cont, &left_cont, &galois_a, &galois_b, &galois_c, &pushforward, &boundary,
                      &identity}) {
        out.push_back(tl->take());
    }

    // Analytic laws: arcsine and uniform have connected support, so F and Q
    // are mutually inverse on the support.
    for (const auto& law : {arcsine_law(), uniform_law(), uniform_law(-2.0, 3.0)}) {
        Tally t("measure.analytic." + law.name + "[" + detail::describe(law.support_min, law.support_max) + "]");
        const double a = law.support_min;
        const double b = law.support_max;
        t.expect(law.cdf(a - 1e-9) == 0.0 && law.cdf(b) == 1.0, "F boundary");
        t.expect(law.quantile(0.0) == a && law.quantile(1.0) == b, "Q boundary");
        double prev = law.quantile(0.0);
        for (std::size_t k = 0; k <= 1000; ++k) {
            const double u = static_cast<double>(k) / 1000.0;
            const double q = law.quantile(u);
            t.expect(q >= prev, "Q decreasing");
            prev = q;
            t.expect(law.cdf(q) >= u - value_tolerance, "F(Q(u)) < u");
            const double v = a + (b - a) * u;
            const double f = law.cdf(v);
            t.expect(std::abs(law.quantile(f) - v) <= value_tolerance * std::max(1.0, std::abs(v)),
                     "Q(F(v)) != v: " + detail::describe(law.quantile(f), v));
        }
        out.push_back(t.take());
    }
    return out;
}

inline std::vector<PropertyResult> convergence_invariants(Rng& rng, std::size_t trials)
{
    using detail::Tally;
    Tally dominated("convergence.node_le_interval");
    Tally zero_iff("convergence.node_error_zero_iff_equal");
    Tally self_step("convergence.step_quantile_self_error_zero");
    Tally merge("convergence.interval_error_merge_invariant");
    Tally self_sup("convergence.analytic_self_distance_zero");
    Tally trend("convergence.arcsine_sup_distance_decreasing");
    const auto arcsine = arcsine_law();
    const auto q_arcsine = [&](double p) { return arcsine.quantile(p); };

    for (std::size_t t = 0; t < trials; ++t) {
        auto tuple = detail::random_tuple(rng);
        std::sort(tuple.begin(), tuple.end());
        const std::span<const double> view(tuple);
        const auto rep = error_report(view, q_arcsine);
        dominated.expect(rep.node_error <= rep.interval_error, detail::describe(rep.node_error, rep.interval_error));

        const QuantileFunction q_step(empirical_from_samples(tuple));
        self_step.expect(node_error(view, q_step) == 0.0, "sorted tuple differs from its own step quantile");

        const auto blocks = blocks_of(view);
        const auto brep = block_error_report(std::span<const Block>(blocks), q_arcsine);
        merge.expect(std::abs(brep.interval_error - rep.interval_error) <= value_tolerance
                         && std::abs(brep.node_error - rep.node_error) <= value_tolerance,
                     detail::describe(brep.interval_error, rep.interval_error));

        const std::size_t d = tuple.size();
        std::vector<double> exact(d);
        for (std::size_t j = 1; j <= d; ++j) {
            exact[j - 1] = arcsine.quantile(static_cast<double>(j) / static_cast<double>(d));
        }
        zero_iff.expect(node_error(std::span<const double>(exact), q_arcsine) == 0.0, "exact tuple has error");
        auto bumped = exact;
        const std::size_t at = rng() % d;
        bumped[at] += 1e-6;
        if (std::is_sorted(bumped.begin(), bumped.end())) {
            zero_iff.expect(node_error(std::span<const double>(bumped), q_arcsine) > 0.0, "perturbed tuple has no error");
        }
    }

    const std::array<int, 1> one{1};
    for (const auto& law : {arcsine_law(), uniform_law()}) {
        const auto q = [&](double p) { return law.quantile(p); };
        const auto dev = monotone_uniform_check([&](int) { return q; }, q, std::span<const int>(one), 4096);
        self_sup.expect(dev.front() == 0.0, law.name);
    }

    double prev = quantile_sup_distance(QuantileFunction(arcsine_distribution(5).measure()), q_arcsine);
    for (unsigned n : {10U, 15U, 20U, 25U, 30U}) {
        const double cur = quantile_sup_distance(QuantileFunction(arcsine_distribution(n).measure()), q_arcsine);
        trend.expect(cur < prev, "n=" + std::to_string(n) + ": " + detail::describe(cur, prev));
        prev = cur;
    }

    std::vector<PropertyResult> out;
    for (Tally* tl : {&dominated, &zero_iff, &self_step, &merge, &self_sup, &trend}) {
        out.push_back(tl->take());
    }
    return out;
}

inline std::vector<PropertyResult> toeplitz_invariants(Rng& rng, std::size_t trials)
{
    using detail::Tally;
    Tally hermitian("toeplitz.real_symbol_gives_hermitian");
    Tally diagonals("toeplitz.constant_along_diagonals");
    Tally round_trip("toeplitz.fourier_round_trip");
    Tally norm_bound("toeplitz.norm_le_symbol_sup");
    Tally refine("toeplitz.modulus_quantile_grid_refinement");
    constexpr std::size_t eval_grid = 4096;

    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t levels = 1 + rng() % 2;
        const int band = 3;
        const auto sym = SymbolSpec::from_coefficients(levels, detail::random_coefficients(rng, levels, band, true), true);
        std::vector<std::size_t> sizes(levels);
        for (auto& m : sizes) {
            m = 1 + rng() % (levels == 1 ? 12 : 5);
        }
        const auto a = toeplitz_matrix(sym, sizes);
        hermitian.expect(a.is_hermitian(1e-14), "defect " + std::to_string(a.hermitian_defect()));

        const auto general = SymbolSpec::from_coefficients(levels, detail::random_coefficients(rng, levels, band, false));
        const auto g = toeplitz_matrix(general, sizes);
        // Shift by one step in each level: the row/column strides.
        std::size_t stride = 1;
        for (std::size_t l = levels; l-- > 0;) {
            for (std::size_t r = 0; r < g.dim(); ++r) {
                for (std::size_t c = 0; c < g.dim(); ++c) {
                    const std::size_t dr = (r / stride) % sizes[l];
                    const std::size_t dc = (c / stride) % sizes[l];
                    if (dr + 1 < sizes[l] && dc + 1 < sizes[l]) {
                        diagonals.expect(g(r + stride, c + stride) == g(r, c), "entry differs along a diagonal");
                    }
                }
            }
            stride *= sizes[l];
        }

        // Synthesize on a grid and transform back.
        const std::size_t grid = 16;
        SampledGrid samples{grid, {}};
        std::size_t count = 1;
        for (std::size_t l = 0; l < levels; ++l) {
            count *= grid;
        }
        std::vector<double> theta(levels);
        for (std::size_t flat = 0; flat < count; ++flat) {
            std::size_t rest = flat;
            for (std::size_t l = levels; l-- > 0;) {
                theta[l] = 2.0 * std::numbers::pi * static_cast<double>(rest % grid) / grid;
                rest /= grid;
            }
            samples.values.push_back(general.evaluate(theta));
        }
        const auto back = fourier_coefficients(SymbolSpec::from_samples(levels, std::move(samples)), band);
        double worst = 0.0;
        for (const auto& [index, value] : back.symbol.coefficients()) {
            worst = std::max(worst, std::abs(value - general.coefficient(index)));
        }
        round_trip.expect(worst <= value_tolerance, "coefficient error " + std::to_string(worst));

        if (levels == 1) {
            double sup = 0.0;
            for (std::size_t i = 0; i < eval_grid; ++i) {
                const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / eval_grid;
                sup = std::max(sup, std::abs(general.evaluate(std::span<const double>(&th, 1))));
            }
            const double norm = singular_values(g).values.back();
            norm_bound.expect(norm <= sup + 1e-10, detail::describe(norm, sup));
        }
    }

    const auto fine = symbol_modulus_quantile(gapped_product_family(8192), 8192);
    const auto coarse = symbol_modulus_quantile(gapped_product_family(4096), 4096);
    for (std::size_t k = 0; k <= 1000; ++k) {
        const double p = static_cast<double>(k) / 1000.0;
        refine.expect(std::abs(fine(p) - coarse(p)) <= 1e-2, detail::describe(fine(p), coarse(p)));
    }

    std::vector<PropertyResult> out;
    for (Tally* tl : {&hermitian, &diagonals, &round_trip, &norm_bound, &refine}) {
        out.push_back(tl->take());
    }
    return out;
}

inline std::vector<PropertyResult> spectra_invariants(Rng& rng, std::size_t trials)
{
    using detail::Tally;
    Tally conservation("spectra.trace_and_frobenius_conservation");
    Tally gershgorin("spectra.gershgorin_containment");
    Tally oracle2("spectra.closed_form_2x2");
    Tally oracle3("spectra.closed_form_3x3");
    Tally unitary("spectra.row_permutation_invariance");
    Tally ordering("spectra.ascending_output");

    for (std::size_t t = 0; t < trials; ++t) {
        const auto h2 = detail::random_hermitian(rng, 2);
        const auto e2 = hermitian_eigenvalues(h2).values;
        const auto r2 = oracle::hermitian_2x2_roots(h2);
        oracle2.expect(std::abs(e2[0] - r2[0]) <= 1e-10 && std::abs(e2[1] - r2[1]) <= 1e-10,
                       detail::describe(e2[0], r2[0]));

        const auto h3 = detail::random_hermitian(rng, 3);
        const auto e3 = hermitian_eigenvalues(h3).values;
        const auto r3 = oracle::hermitian_3x3_roots(h3);
        bool ok3 = true;
        for (int i = 0; i < 3; ++i) {
            ok3 = ok3 && std::abs(e3[i] - r3[i]) <= 1e-10;
        }
        oracle3.expect(ok3, detail::describe(e3[0], r3[0]));

        if (t % 10 == 0) {
            const std::size_t n = 2 + rng() % 14;
            const auto h = detail::random_hermitian(rng, n);
            const auto s = hermitian_eigenvalues(h);
            double sum = 0.0;
            double sq = 0.0;
            for (double v : s.values) {
                sum += v;
                sq += v * v;
            }
            const double fro = h.frobenius_norm();
            const double tol = 1e-9 * static_cast<double>(n) * std::max(fro, 1.0);
            conservation.expect(std::abs(sum - h.trace().real()) <= tol, "trace");
            conservation.expect(std::abs(sq - fro * fro) <= tol * std::max(fro, 1.0), "frobenius (eig)");
            ordering.expect(std::is_sorted(s.values.begin(), s.values.end()), "eigenvalues unsorted");

            for (double lambda : s.values) {
                bool inside = false;
                for (std::size_t i = 0; i < n && !inside; ++i) {
                    double radius = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j != i) {
                            radius += std::abs(h(i, j));
                        }
                    }
                    inside = std::abs(lambda - h(i, i).real()) <= radius + 1e-10;
                }
                gershgorin.expect(inside, "eigenvalue outside all discs");
            }

            const auto g = detail::random_matrix(rng, n);
            const auto sv = singular_values(g).values;
            const auto sv_perm = singular_values(g.rows_reversed()).values;
            double worst = 0.0;
            double sq_sv = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max(worst, std::abs(sv[i] - sv_perm[i]));
                sq_sv += sv[i] * sv[i];
            }
            unitary.expect(worst <= 1e-10, "singular values moved by " + std::to_string(worst));
            const double gf = g.frobenius_norm();
            conservation.expect(std::abs(sq_sv - gf * gf) <= 1e-9 * static_cast<double>(n) * gf * gf, "frobenius (sv)");
            ordering.expect(std::is_sorted(sv.begin(), sv.end()) && sv.front() >= 0.0, "singular values unsorted");
        }
    }

    std::vector<PropertyResult> out;
    for (Tally* tl : {&conservation, &gershgorin, &oracle2, &oracle3, &unitary, &ordering}) {
        out.push_back(tl->take());
    }
    return out;
}

/// Weyl table as printed, except n = 256 where the print is taken to be a
/// misplaced exponent (5.6e-2 for 5.6e-3).
struct WeylReference {
    std::uint64_t n;
    const char* printed;
    const char* expected;
};

inline constexpr std::array<WeylReference, 6> weyl_table{{
    {32, "4.6e-02", "4.6e-02"},
    {64, "2.6e-02", "2.6e-02"},
    {128, "1.1e-02", "1.1e-02"},
    {256, "5.6e-02", "5.6e-03"},
    {512, "3.3e-03", "3.3e-03"},
    {1024, "2.4e-03", "2.4e-03"},
}};

inline constexpr std::array<std::pair<unsigned, double>, 6> sine_law_table{{
    {5, 0.300}, {10, 0.209}, {15, 0.164}, {20, 0.144}, {25, 0.126}, {30, 0.116},
}};

inline std::vector<PropertyResult> experiment_invariants(Rng& rng, std::size_t max_brute_force_n)
{
    (void)rng;
    using detail::Tally;
    Tally oracle("experiments.walk_counts_match_enumeration");
    Tally total("experiments.walk_counts_sum_to_2^n");
    Tally sine_trend("experiments.sine_law_non_increasing");
    Tally weyl("experiments.weyl_table_printed_precision");
    Tally riemann("experiments.riemann_pushforward_monotone");
    Tally frobenius("experiments.toeplitz_frobenius_identity");

    for (unsigned n = 1; n <= max_brute_force_n; ++n) {
        const auto table = arcsine_distribution(n);
        oracle.expect(table.counts == oracle::walk_counts_brute_force(n), "n=" + std::to_string(n));
    }
    for (unsigned n = 1; n <= max_walk_length; ++n) {
        total.expect(arcsine_distribution(n).total() == (std::uint64_t{1} << n), "n=" + std::to_string(n));
    }

    double prev = 1.0;
    for (const auto& [n, printed] : sine_law_table) {
        const double e = sine_law_error(n).node_error;
        sine_trend.expect(e <= prev, "n=" + std::to_string(n));
        prev = e;
    }

    for (const auto& ref : weyl_table) {
        const auto got = format_sci2(weyl_sequence_error(ref.n).node_error);
        weyl.expect(got == ref.expected, "n=" + std::to_string(ref.n) + ": " + got);
    }

    // X is increasing on [0,1], so the quantile of its Lebesgue pushforward is X.
    const std::function<double(double)> x = arcsine_cdf;
    double last = 1.0;
    for (std::uint64_t d = 128; d <= 4096; d *= 2) {
        const double e = riemann_compare(x, 0.0, 1.0, d, arcsine_cdf);
        riemann.expect(e <= last + 1e-12, "d=" + std::to_string(d));
        last = e;
    }

    const std::array<std::size_t, 2> sizes{16, 32};
    const auto study = toeplitz_product_experiment(gapped_product_family(), sizes, 4096, false);
    for (const auto& row : study.rows) {
        const double fro2 = row.frobenius_norm * row.frobenius_norm;
        frobenius.expect(row.frobenius_defect <= 1e-9 * static_cast<double>(row.row.n) * std::max(1.0, fro2),
                         "n=" + std::to_string(row.row.n));
    }

    std::vector<PropertyResult> out;
    for (Tally* tl : {&oracle, &total, &sine_trend, &weyl, &riemann, &frobenius}) {
        out.push_back(tl->take());
    }
    return out;
}

struct SuiteOptions {
    std::uint64_t seed = 20151102;
    std::size_t trials = 200;
    unsigned max_brute_force_n = 12;
};

/// Every module's property checks, driven by one seeded generator.
inline std::vector<PropertyResult> run_invariant_suite(const SuiteOptions& opt = {})
{
    Rng rng(opt.seed);
    std::vector<PropertyResult> all;
    auto append = [&all](std::vector<PropertyResult> part) {
        for (auto& r : part) {
            all.push_back(std::move(r));
        }
    };
    append(measure_invariants(rng, opt.trials));
    append(convergence_invariants(rng, opt.trials));
    append(toeplitz_invariants(rng, std::max<std::size_t>(1, opt.trials / 4)));
    append(spectra_invariants(rng, opt.trials));
    append(experiment_invariants(rng, opt.max_brute_force_n));
    return all;
}

} // namespace qlim::check

#endif // QLIM_CHECK_INVARIANTS_HPP
