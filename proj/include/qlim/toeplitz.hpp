#ifndef QLIM_TOEPLITZ_HPP
#define QLIM_TOEPLITZ_HPP

#include <qlim/dense_matrix.hpp>
#include <qlim/measure.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace qlim {

/// Index into Z^k.
using MultiIndex = std::vector<int>;
using CoefficientMap = std::map<MultiIndex, Complex>;

/// Values of a symbol on the uniform grid^k partition of T^k, row-major with
/// the last dimension fastest. Sample (i_1,...,i_k) sits at angles 2*pi*i_l/grid.
struct SampledGrid {
    std::size_t grid = 0;
    std::vector<Complex> values;
};

/// A function on the k-torus, given by finitely many Fourier coefficients or
/// by uniform grid samples.
class SymbolSpec {
public:
    static SymbolSpec from_coefficients(std::size_t levels, CoefficientMap coeffs, bool real_valued = false)
    {
        if (levels == 0) {
            throw std::invalid_argument("symbol needs at least one level");
        }
        for (const auto& [index, value] : coeffs) {
            if (index.size() != levels) {
                throw std::invalid_argument("coefficient index has wrong level count");
            }
            if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
                throw std::invalid_argument("non-finite coefficient");
            }
        }
        SymbolSpec s(levels, std::move(coeffs), real_valued);
        if (real_valued) {
            s.check_conjugate_symmetry();
        }
        return s;
    }

    static SymbolSpec from_samples(std::size_t levels, SampledGrid samples, bool real_valued = false)
    {
        if (levels == 0) {
            throw std::invalid_argument("symbol needs at least one level");
        }
        if (samples.grid == 0) {
            throw std::invalid_argument("grid size must be positive");
        }
        std::size_t expected = 1;
        for (std::size_t l = 0; l < levels; ++l) {
            expected *= samples.grid;
        }
        if (samples.values.size() != expected) {
            throw std::invalid_argument("sample count does not match grid^levels");
        }
        for (const Complex& z : samples.values) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw std::invalid_argument("non-finite sample");
            }
            if (real_valued && z.imag() != 0.0) {
                throw std::invalid_argument("symbol not real-valued");
            }
        }
        return SymbolSpec(levels, std::move(samples), real_valued);
    }

    std::size_t levels() const noexcept { return levels_; }
    bool real_valued() const noexcept { return real_valued_; }
    bool is_sampled() const noexcept { return std::holds_alternative<SampledGrid>(rep_); }
    const CoefficientMap& coefficients() const { return std::get<CoefficientMap>(rep_); }
    const SampledGrid& samples() const { return std::get<SampledGrid>(rep_); }

    Complex coefficient(const MultiIndex& j) const
    {
        const auto& m = coefficients();
        const auto it = m.find(j);
        return it == m.end() ? Complex{} : it->second;
    }

    /// Value at angles theta (one per level). Sampled symbols use the nearest
    /// grid sample.
    Complex evaluate(std::span<const double> theta) const
    {
        if (theta.size() != levels_) {
            throw std::invalid_argument("angle count does not match levels");
        }
        if (const auto* g = std::get_if<SampledGrid>(&rep_)) {
            std::size_t flat = 0;
            const auto n = static_cast<double>(g->grid);
            for (double t : theta) {
                const double pos = std::round(t * n / (2.0 * std::numbers::pi));
                auto idx = static_cast<long long>(pos) % static_cast<long long>(g->grid);
                if (idx < 0) {
                    idx += static_cast<long long>(g->grid);
                }
                flat = flat * g->grid + static_cast<std::size_t>(idx);
            }
            return g->values[flat];
        }
        Complex sum{};
        for (const auto& [index, value] : coefficients()) {
            double phase = 0.0;
            for (std::size_t l = 0; l < levels_; ++l) {
                phase += index[l] * theta[l];
            }
            sum += value * std::polar(1.0, phase);
        }
        return sum;
    }

private:
    SymbolSpec(std::size_t levels, std::variant<CoefficientMap, SampledGrid> rep, bool real_valued)
        : levels_(levels), rep_(std::move(rep)), real_valued_(real_valued)
    {
    }

    void check_conjugate_symmetry() const
    {
        const auto& m = coefficients();
        double scale = 1.0;
        for (const auto& [index, value] : m) {
            scale = std::max(scale, std::abs(value));
        }
        for (const auto& [index, value] : m) {
            MultiIndex neg(index.size());
            std::transform(index.begin(), index.end(), neg.begin(), [](int v) { return -v; });
            if (std::abs(coefficient(neg) - std::conj(value)) > 1e-12 * scale) {
                throw std::invalid_argument("symbol not real-valued: coefficients lack conjugate symmetry");
            }
        }
    }

    std::size_t levels_;
    std::variant<CoefficientMap, SampledGrid> rep_;
    bool real_valued_;
};

inline constexpr std::size_t default_fourier_cutoff = 64;
inline constexpr double tail_energy_threshold = 1e-10;

struct FourierCoefficients {
    SymbolSpec symbol;          // coefficient map, max|j_l| <= cutoff
    double tail_fraction = 0.0; // energy outside the cutoff box / total energy
    bool tail_flagged() const noexcept { return tail_fraction > tail_energy_threshold; }
};

/// Fourier coefficients a_j = (2 pi)^-k * integral of a e^{-i j.theta}, by the
/// uniform-grid rule, for every j with max|j_l| <= cutoff.
///
/// The transform is separable: one axis at a time, each pass shrinking that
/// axis from grid to 2*cutoff+1 frequencies.
inline FourierCoefficients fourier_coefficients(const SymbolSpec& sym, std::size_t cutoff = default_fourier_cutoff)
{
    if (!sym.is_sampled()) {
        throw std::invalid_argument("symbol is not sampled");
    }
    const auto& g = sym.samples();
    const std::size_t n = g.grid;
    if (n < 2 * cutoff + 1) {
        throw std::invalid_argument("aliasing risk");
    }
    const std::size_t k = sym.levels();
    const std::size_t width = 2 * cutoff + 1;

    std::vector<Complex> twiddle(n);
    for (std::size_t m = 0; m < n; ++m) {
        twiddle[m] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
    }

    std::vector<std::size_t> shape(k, n);
    std::vector<Complex> data = g.values;
    for (std::size_t axis = 0; axis < k; ++axis) {
        std::size_t outer = 1;
        std::size_t inner = 1;
        for (std::size_t l = 0; l < axis; ++l) {
            outer *= shape[l];
        }
        for (std::size_t l = axis + 1; l < k; ++l) {
            inner *= shape[l];
        }
        std::vector<Complex> next(outer * width * inner);
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t f = 0; f < width; ++f) {
                const long long freq = static_cast<long long>(f) - static_cast<long long>(cutoff);
                const std::size_t step = static_cast<std::size_t>((freq % static_cast<long long>(n) + static_cast<long long>(n))
                                                                  % static_cast<long long>(n));
                for (std::size_t i = 0; i < inner; ++i) {
                    Complex acc{};
                    std::size_t phase = 0;
                    for (std::size_t t = 0; t < n; ++t) {
                        acc += data[(o * n + t) * inner + i] * twiddle[phase];
                        phase += step;
                        if (phase >= n) {
                            phase -= n;
                        }
                    }
                    next[(o * width + f) * inner + i] = acc / static_cast<double>(n);
                }
            }
        }
        data = std::move(next);
        shape[axis] = width;
    }

    double total = 0.0;
    for (const Complex& z : g.values) {
        total += std::norm(z);
    }
    total /= static_cast<double>(g.values.size());

    CoefficientMap coeffs;
    double kept = 0.0;
    for (std::size_t flat = 0; flat < data.size(); ++flat) {
        MultiIndex index(k);
        std::size_t rest = flat;
        for (std::size_t l = k; l-- > 0;) {
            index[l] = static_cast<int>(rest % width) - static_cast<int>(cutoff);
            rest /= width;
        }
        kept += std::norm(data[flat]);
        coeffs.emplace(std::move(index), data[flat]);
    }
    const double tail = total > 0.0 ? std::max(0.0, total - kept) / total : 0.0;

    // Conjugate symmetry of the grid rule is exact only up to roundoff, so the
    // real-valued flag is not carried over.
    return {SymbolSpec::from_coefficients(k, std::move(coeffs)), tail};
}

namespace detail {

inline std::size_t checked_order(std::span<const std::size_t> sizes)
{
    std::size_t d = 1;
    for (std::size_t m : sizes) {
        if (m == 0) {
            throw std::invalid_argument("sizes must be positive");
        }
        if (d > std::numeric_limits<std::size_t>::max() / m) {
            throw std::length_error("matrix too large");
        }
        d *= m;
    }
    if (d > max_dense_dim()) {
        throw std::length_error("matrix too large");
    }
    return d;
}

} // namespace detail

/// k-level Toeplitz matrix T(a) with entry a_{i-j} at multi-indexed position
/// (i_1..i_k),(j_1..j_k); multi-indices linearize row-major, last level fastest.
inline DenseMatrix toeplitz_matrix(const SymbolSpec& coeffs, std::span<const std::size_t> sizes)
{
    if (coeffs.is_sampled()) {
        throw std::invalid_argument("toeplitz_matrix needs a coefficient map");
    }
    const std::size_t k = coeffs.levels();
    if (sizes.size() != k) {
        throw std::invalid_argument("size tuple does not match symbol levels");
    }
    const std::size_t d = detail::checked_order(sizes);

    // Dense table of a_j over the difference box prod_l [-(m_l-1), m_l-1].
    std::vector<std::size_t> span_width(k);
    std::size_t table_size = 1;
    for (std::size_t l = 0; l < k; ++l) {
        span_width[l] = 2 * sizes[l] - 1;
        table_size *= span_width[l];
    }
    std::vector<Complex> table(table_size);
    for (const auto& [index, value] : coeffs.coefficients()) {
        std::size_t flat = 0;
        bool inside = true;
        for (std::size_t l = 0; l < k; ++l) {
            const long long shifted = index[l] + static_cast<long long>(sizes[l]) - 1;
            if (shifted < 0 || shifted >= static_cast<long long>(span_width[l])) {
                inside = false;
                break;
            }
            flat = flat * span_width[l] + static_cast<std::size_t>(shifted);
        }
        if (inside) {
            table[flat] = value;
        }
    }

    std::vector<std::size_t> digits(d * k);
    for (std::size_t r = 0; r < d; ++r) {
        std::size_t rest = r;
        for (std::size_t l = k; l-- > 0;) {
            digits[r * k + l] = rest % sizes[l];
            rest /= sizes[l];
        }
    }

    DenseMatrix out(d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            std::size_t flat = 0;
            for (std::size_t l = 0; l < k; ++l) {
                flat = flat * span_width[l] + (digits[r * k + l] + sizes[l] - 1 - digits[c * k + l]);
            }
            out(r, c) = table[flat];
        }
    }
    return out;
}

inline DenseMatrix toeplitz_matrix(const SymbolSpec& coeffs, std::initializer_list<std::size_t> sizes)
{
    return toeplitz_matrix(coeffs, std::span<const std::size_t>(sizes.begin(), sizes.size()));
}

/// Formal sum of products of Toeplitz factors, sum_p prod_q T(a^(p,q)).
class MatrixExpr {
public:
    using Product = std::vector<SymbolSpec>;

    explicit MatrixExpr(std::vector<Product> terms) : terms_(std::move(terms))
    {
        if (terms_.empty()) {
            throw std::invalid_argument("expression needs at least one term");
        }
        for (const auto& product : terms_) {
            if (product.empty()) {
                throw std::invalid_argument("product needs at least one factor");
            }
            for (const auto& f : product) {
                if (f.levels() != terms_.front().front().levels()) {
                    throw std::invalid_argument("factors disagree on level count");
                }
            }
        }
    }

    static MatrixExpr single(SymbolSpec s) { return MatrixExpr({Product{std::move(s)}}); }

    const std::vector<Product>& terms() const noexcept { return terms_; }
    std::size_t levels() const noexcept { return terms_.front().front().levels(); }

    /// |sum_p prod_q a^(p,q)(theta)|.
    double modulus(std::span<const double> theta) const
    {
        Complex sum{};
        for (const auto& product : terms_) {
            Complex prod{1.0, 0.0};
            for (const auto& f : product) {
                prod *= f.evaluate(theta);
            }
            sum += prod;
        }
        return std::abs(sum);
    }

private:
    std::vector<Product> terms_;
};

/// B = sum_p prod_q T(a^(p,q)), products left to right. Sampled factors are
/// converted with the smallest cutoff that fills the matrix, max(m_l) - 1.
inline DenseMatrix evaluate_expr(const MatrixExpr& expr, std::span<const std::size_t> sizes)
{
    detail::checked_order(sizes);
    const std::size_t cutoff = *std::max_element(sizes.begin(), sizes.end()) - 1;
    auto factor_matrix = [&](const SymbolSpec& s) {
        if (s.is_sampled()) {
            return toeplitz_matrix(fourier_coefficients(s, cutoff).symbol, sizes);
        }
        return toeplitz_matrix(s, sizes);
    };

    DenseMatrix sum;
    bool first_term = true;
    for (const auto& product : expr.terms()) {
        DenseMatrix acc = factor_matrix(product.front());
        for (std::size_t q = 1; q < product.size(); ++q) {
            acc = acc * factor_matrix(product[q]);
        }
        if (first_term) {
            sum = std::move(acc);
            first_term = false;
        } else {
            sum += acc;
        }
    }
    return sum;
}

inline DenseMatrix evaluate_expr(const MatrixExpr& expr, std::initializer_list<std::size_t> sizes)
{
    return evaluate_expr(expr, std::span<const std::size_t>(sizes.begin(), sizes.size()));
}

inline constexpr std::size_t min_quantile_grid = 256;

/// |X| on the uniform grid^k partition of T^k, in grid order.
inline std::vector<double> symbol_modulus_samples(const MatrixExpr& expr, std::size_t grid)
{
    if (grid < min_quantile_grid) {
        throw std::invalid_argument("grid below resolution floor (256)");
    }
    const std::size_t k = expr.levels();
    std::size_t count = 1;
    for (std::size_t l = 0; l < k; ++l) {
        count *= grid;
    }
    std::vector<double> out(count);
    std::vector<double> theta(k);
    for (std::size_t flat = 0; flat < count; ++flat) {
        std::size_t rest = flat;
        for (std::size_t l = k; l-- > 0;) {
            theta[l] = 2.0 * std::numbers::pi * static_cast<double>(rest % grid) / static_cast<double>(grid);
            rest /= grid;
        }
        out[flat] = expr.modulus(theta);
    }
    return out;
}

/// Step quantile of X = |sum prod a^(p,q)| sampled on the grid; converges
/// uniformly to Q_X when X is Riemann integrable with connected range.
inline QuantileFunction symbol_modulus_quantile(const MatrixExpr& expr, std::size_t grid)
{
    const auto samples = symbol_modulus_samples(expr, grid);
    return QuantileFunction(empirical_from_samples(samples));
}

// Named symbols used by experiments and tests.

/// e^{i s theta} for a single integer shift s.
inline SymbolSpec shift_symbol(int s)
{
    return SymbolSpec::from_coefficients(1, {{{s}, Complex{1.0, 0.0}}});
}

/// 2 - 2cos(theta): a_0 = 2, a_{+-1} = -1.
inline SymbolSpec laplacian_symbol()
{
    return SymbolSpec::from_coefficients(1, {{{-1}, -1.0}, {{0}, 2.0}, {{1}, -1.0}}, true);
}

inline SymbolSpec constant_symbol(Complex c, std::size_t levels = 1)
{
    return SymbolSpec::from_coefficients(levels, {{MultiIndex(levels, 0), c}}, c.imag() == 0.0);
}

/// Two real factors whose ranges both have gaps while their product,
/// (1 + cos theta)/2, is continuous with range [0, 1].
///
/// a1 equals 0.8 on the arcs where (1 + cos theta)/2 lies in (0.5, 0.6) and 1
/// elsewhere; a2 = (1 + cos theta)/(2 a1). So range(a1) = {0.8, 1} and
/// range(a2) = [0, 0.5] u [0.6, 1]. Both factors are bounded by 1 and peak
/// together at theta = 0.
inline MatrixExpr gapped_product_family(std::size_t grid = 4096)
{
    constexpr double low_factor = 0.8;
    constexpr double gap_lo = 0.5;
    constexpr double gap_hi = 0.6;
    SampledGrid a1{grid, std::vector<Complex>(grid)};
    SampledGrid a2{grid, std::vector<Complex>(grid)};
    for (std::size_t i = 0; i < grid; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid);
        const double x = (1.0 + std::cos(theta)) / 2.0;
        const double f = (x > gap_lo && x < gap_hi) ? low_factor : 1.0;
        a1.values[i] = f;
        a2.values[i] = x / f;
    }
    return MatrixExpr({{SymbolSpec::from_samples(1, std::move(a1), true),
                        SymbolSpec::from_samples(1, std::move(a2), true)}});
}

} // namespace qlim

#endif // QLIM_TOEPLITZ_HPP
