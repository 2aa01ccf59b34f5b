#ifndef QLIM_EXPERIMENTS_HPP
#define QLIM_EXPERIMENTS_HPP

#include <qlim/convergence.hpp>
#include <qlim/measure.hpp>
#include <qlim/spectra.hpp>
#include <qlim/toeplitz.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace qlim {

/// One row of an experiment table.
struct ExperimentRow {
    std::uint64_t n = 0;
    double node_error = 0.0;
    double interval_error = 0.0;
    std::int64_t runtime_ms = 0;
};

namespace detail {

class Stopwatch {
public:
    std::int64_t elapsed_ms() const
    {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace detail

// ---------------------------------------------------------------------------
// Sine law for random walks

inline constexpr unsigned max_walk_length = 62;

/// Exact distribution of G_n(w) = #{k : w_1 + ... + w_k > 0} / n over all
/// 2^n sign sequences w. counts[j] is the number of walks with G_n = j/n.
struct WalkDistributionTable {
    unsigned n = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const
    {
        std::uint64_t s = 0;
        for (auto c : counts) {
            s += c;
        }
        return s;
    }

    /// Atoms j/n with the nonzero counts as multiplicities.
    DiscreteMeasure measure() const
    {
        std::vector<double> values;
        std::vector<std::uint64_t> mult;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            if (counts[j] > 0) {
                values.push_back(static_cast<double>(j) / n);
                mult.push_back(counts[j]);
            }
        }
        return DiscreteMeasure(std::move(values), std::move(mult));
    }

    /// The sorted tuple alpha^(n) as runs of equal values.
    std::vector<Block> blocks() const
    {
        std::vector<Block> out;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            if (counts[j] > 0) {
                out.push_back({static_cast<double>(j) / n, counts[j]});
            }
        }
        return out;
    }
};

/// Dynamic programming over (partial sum s, positive count c). A step that
/// lands on s > 0 increments c; s = 0 counts as non-positive.
inline WalkDistributionTable arcsine_distribution(unsigned n)
{
    if (n < 1) {
        throw std::invalid_argument("walk length must be at least 1");
    }
    if (n > max_walk_length) {
        throw std::overflow_error("count overflow");
    }
    // ways[s + n][c]
    const std::size_t sums = 2 * n + 1;
    const std::size_t positives = n + 1;
    std::vector<std::uint64_t> ways(sums * positives, 0);
    std::vector<std::uint64_t> next(sums * positives, 0);
    auto at = [positives](std::vector<std::uint64_t>& w, std::size_t s, std::size_t c) -> std::uint64_t& {
        return w[s * positives + c];
    };
    at(ways, n, 0) = 1;
    for (unsigned k = 0; k < n; ++k) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t s = n - k; s <= n + k; ++s) {
            for (std::size_t c = 0; c <= k; ++c) {
                const std::uint64_t w = at(ways, s, c);
                if (w == 0) {
                    continue;
                }
                for (std::size_t s2 : {s - 1, s + 1}) {
                    const std::size_t c2 = s2 > n ? c + 1 : c;
                    at(next, s2, c2) += w;
                }
            }
        }
        std::swap(ways, next);
    }
    WalkDistributionTable table{n, std::vector<std::uint64_t>(positives, 0)};
    for (std::size_t s = 0; s < sums; ++s) {
        for (std::size_t c = 0; c < positives; ++c) {
            table.counts[c] += at(ways, s, c);
        }
    }
    return table;
}

/// Sine-law limit quantile, sin^2(pi p / 2).
inline double sine_law_quantile(double p)
{
    const double s = std::sin(std::numbers::pi * p / 2.0);
    return s * s;
}

/// max_j |alpha^(n)_j - sin^2(pi j / 2^{n+1})| over all 2^n sorted walk values,
/// evaluated on the n+1 count blocks only.
inline ExperimentRow sine_law_error(unsigned n)
{
    detail::Stopwatch clock;
    const auto table = arcsine_distribution(n);
    const auto blocks = table.blocks();
    const auto report = block_error_report(std::span<const Block>(blocks), sine_law_quantile);
    return {n, report.node_error, report.interval_error, clock.elapsed_ms()};
}

// ---------------------------------------------------------------------------
// Asymptotically distributed sequences

/// Sorts beta_1..beta_n and returns its errors against q_ref at nodes j/n.
template <UnitIntervalMap Q>
ErrorReport asymptotic_sequence_report(const std::function<double(std::uint64_t)>& beta, std::uint64_t n,
                                       const Q& q_ref)
{
    if (n == 0) {
        throw std::invalid_argument("sequence length must be positive");
    }
    std::vector<double> tuple(n);
    for (std::uint64_t j = 1; j <= n; ++j) {
        tuple[j - 1] = beta(j);
    }
    std::sort(tuple.begin(), tuple.end());
    return error_report(std::span<const double>(tuple), q_ref);
}

template <UnitIntervalMap Q>
double asymptotic_sequence_error(const std::function<double(std::uint64_t)>& beta, std::uint64_t n, const Q& q_ref)
{
    return asymptotic_sequence_report(beta, n, q_ref).node_error;
}

/// Fractional part of j * sqrt(2).
inline double weyl_term(std::uint64_t j)
{
    const double x = static_cast<double>(j) * std::numbers::sqrt2;
    return x - std::floor(x);
}

inline ExperimentRow weyl_sequence_error(std::uint64_t n)
{
    detail::Stopwatch clock;
    const auto report = asymptotic_sequence_report(weyl_term, n, [](double p) { return p; });
    return {n, report.node_error, report.interval_error, clock.elapsed_ms()};
}

struct WeylBound {
    double worst_ratio = 0.0;  // max_n eps^(n) * n / ln(n)
    std::uint64_t worst_n = 0;
};

/// Scans n = 2..n_max, inserting each new term into the sorted prefix.
inline WeylBound weyl_bound_scan(std::uint64_t n_max)
{
    if (n_max < 2) {
        throw std::invalid_argument("scan needs n_max >= 2");
    }
    std::vector<double> sorted;
    sorted.reserve(n_max);
    sorted.push_back(weyl_term(1));
    WeylBound out;
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        const double b = weyl_term(n);
        sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), b), b);
        double eps = 0.0;
        const auto dn = static_cast<double>(n);
        for (std::uint64_t j = 1; j <= n; ++j) {
            eps = std::max(eps, std::abs(sorted[j - 1] - static_cast<double>(j) / dn));
        }
        const double ratio = eps * dn / std::log(dn);
        if (ratio > out.worst_ratio) {
            out.worst_ratio = ratio;
            out.worst_n = n;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Riemann sampling

/// Values of X at the midpoints of the canonical d-partition of [lo, hi],
/// sorted ascending, compared against q_ref at the nodes j/d.
template <UnitIntervalMap Q>
ErrorReport riemann_report(const std::function<double(double)>& x, double lo, double hi, std::uint64_t d,
                           const Q& q_ref)
{
    if (d == 0) {
        throw std::invalid_argument("partition size must be positive");
    }
    if (!(lo < hi)) {
        throw std::invalid_argument("interval must have lo < hi");
    }
    std::vector<double> v(d);
    const double width = (hi - lo) / static_cast<double>(d);
    for (std::uint64_t j = 0; j < d; ++j) {
        v[j] = x(lo + (static_cast<double>(j) + 0.5) * width);
    }
    std::stable_sort(v.begin(), v.end());
    return error_report(std::span<const double>(v), q_ref);
}

template <UnitIntervalMap Q>
double riemann_compare(const std::function<double(double)>& x, double lo, double hi, std::uint64_t d, const Q& q_ref)
{
    return riemann_report(x, lo, hi, d, q_ref).node_error;
}

/// (2/pi) asin(sqrt v) on [0,1].
inline double arcsine_cdf(double v)
{
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(v));
}

// ---------------------------------------------------------------------------
// Sums of products of Toeplitz matrices

/// Range and norm hypotheses for the singular-value approximation: the
/// essential range of X must be a segment [0, beta] and ||B_n|| <= beta.
struct SupportHypothesis {
    double beta = 0.0;       // max of sampled X
    double range_min = 0.0;  // min of sampled X
    double max_gap = 0.0;    // largest gap between consecutive sorted samples
    bool range_is_segment = false;
};

inline constexpr double range_gap_tolerance = 1e-2;

inline SupportHypothesis check_support_hypothesis(std::span<const double> sorted_samples)
{
    if (sorted_samples.empty()) {
        throw std::invalid_argument("no samples");
    }
    SupportHypothesis h;
    h.range_min = sorted_samples.front();
    h.beta = sorted_samples.back();
    for (std::size_t i = 1; i < sorted_samples.size(); ++i) {
        h.max_gap = std::max(h.max_gap, sorted_samples[i] - sorted_samples[i - 1]);
    }
    const double tol = range_gap_tolerance * std::max(h.beta, 1e-300);
    h.range_is_segment = h.beta > 0.0 && h.range_min <= tol && h.max_gap <= tol;
    return h;
}

inline bool norm_within(double norm, double beta)
{
    return norm <= beta * (1.0 + 1e-10) + 1e-12;
}

struct ToeplitzRow {
    ExperimentRow row;
    double norm = 0.0;               // largest singular value of B_n
    double frobenius_norm = 0.0;     // ||B_n||_F
    double frobenius_defect = 0.0;   // |sum s_j^2 - ||B_n||_F^2|
    double solver_residual = 0.0;
    bool norm_ok = false;
    bool hypothesis_ok = false;      // range is [0, beta] and norm_ok
    std::vector<double> singular_values;
};

struct ToeplitzStudy {
    SupportHypothesis support;
    std::vector<ToeplitzRow> rows;
};

/// Singular values of B_n for each n in the schedule against the grid
/// quantile of X. For k-level expressions every level has size n.
inline ToeplitzStudy toeplitz_product_experiment(const MatrixExpr& expr, std::span<const std::size_t> size_schedule,
                                                 std::size_t quantile_grid, bool parallel = true)
{
    if (size_schedule.empty()) {
        throw std::invalid_argument("size schedule is empty");
    }
    auto samples = symbol_modulus_samples(expr, quantile_grid);
    std::sort(samples.begin(), samples.end());
    ToeplitzStudy study;
    study.support = check_support_hypothesis(samples);
    const QuantileFunction q_lim(empirical_from_samples(samples));

    auto run_one = [&](std::size_t n) {
        detail::Stopwatch clock;
        const std::vector<std::size_t> sizes(expr.levels(), n);
        const DenseMatrix b = evaluate_expr(expr, sizes);
        Spectrum s = singular_values(b);
        const auto report = error_report(std::span<const double>(s.values), q_lim);
        ToeplitzRow row;
        row.norm = s.values.back();
        double sum_sq = 0.0;
        for (double v : s.values) {
            sum_sq += v * v;
        }
        const double fro = b.frobenius_norm();
        row.frobenius_norm = fro;
        row.frobenius_defect = std::abs(sum_sq - fro * fro);
        row.solver_residual = s.residual;
        row.norm_ok = norm_within(row.norm, study.support.beta);
        row.hypothesis_ok = row.norm_ok && study.support.range_is_segment;
        row.singular_values = std::move(s.values);
        row.row = {b.dim(), report.node_error, report.interval_error, clock.elapsed_ms()};
        return row;
    };

    if (parallel) {
        std::vector<std::future<ToeplitzRow>> pending;
        for (std::size_t n : size_schedule) {
            pending.push_back(std::async(std::launch::async, run_one, n));
        }
        for (auto& f : pending) {
            study.rows.push_back(f.get());
        }
    } else {
        for (std::size_t n : size_schedule) {
            study.rows.push_back(run_one(n));
        }
    }
    return study;
}

} // namespace qlim

#endif // QLIM_EXPERIMENTS_HPP
