#ifndef QLIM_MEASURE_HPP
#define QLIM_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qlim {

/// Finite probability measure on the real line with rational atom masses.
///
/// Atoms are stored ascending with integer multiplicities; the mass of atom i
/// is multiplicity(i) / total(). Cumulative counts are kept as exact integers
/// so that the distribution and quantile functions never accumulate
/// floating-point mass.
class DiscreteMeasure {
public:
    /// Builds a measure from ascending distinct values and positive counts.
    DiscreteMeasure(std::vector<double> values, std::vector<std::uint64_t> multiplicities)
        : values_(std::move(values)), multiplicities_(std::move(multiplicities))
    {
        if (values_.empty()) {
            throw std::invalid_argument("empty sample set");
        }
        if (values_.size() != multiplicities_.size()) {
            throw std::invalid_argument("values and multiplicities differ in length");
        }
        cumulative_.reserve(values_.size());
        std::uint64_t running = 0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw std::invalid_argument("non-finite sample");
            }
            if (i > 0 && !(values_[i - 1] < values_[i])) {
                throw std::invalid_argument("atoms not strictly increasing");
            }
            if (multiplicities_[i] == 0) {
                throw std::invalid_argument("zero multiplicity");
            }
            running += multiplicities_[i];
            cumulative_.push_back(running);
        }
    }

    std::span<const double> values() const noexcept { return values_; }
    std::span<const std::uint64_t> multiplicities() const noexcept { return multiplicities_; }
    /// cumulative()[i] is the number of samples with value <= values()[i].
    std::span<const std::uint64_t> cumulative() const noexcept { return cumulative_; }
    std::uint64_t total() const noexcept { return cumulative_.back(); }
    std::size_t atom_count() const noexcept { return values_.size(); }

    double mass(std::size_t i) const
    {
        return static_cast<double>(multiplicities_.at(i)) / static_cast<double>(total());
    }

    double cdf(double v) const
    {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("non-finite value");
        }
        const auto it = std::upper_bound(values_.begin(), values_.end(), v);
        if (it == values_.begin()) {
            return 0.0;
        }
        const auto k = static_cast<std::size_t>(it - values_.begin()) - 1;
        return fraction(cumulative_[k]);
    }

    /// Left-continuous generalized inverse, min{v : cdf(v) >= p}, with
    /// quantile(0) pinned to the least atom.
    double quantile(double p) const
    {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::out_of_range("probability out of range");
        }
        return values_[quantile_index(p)];
    }

    /// Index of the atom returned by quantile(p).
    std::size_t quantile_index(double p) const
    {
        if (p <= 0.0) {
            return 0;
        }
        // fraction() is monotone in the count, so the comparison below agrees
        // with cdf() exactly and nodes p = j/total land on the right atom.
        const auto it = std::partition_point(cumulative_.begin(), cumulative_.end(),
                                             [&](std::uint64_t c) { return fraction(c) < p; });
        return static_cast<std::size_t>(it - cumulative_.begin());
    }

    double support_min() const noexcept { return values_.front(); }
    double support_max() const noexcept { return values_.back(); }

    friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

private:
    double fraction(std::uint64_t count) const noexcept
    {
        return static_cast<double>(count) / static_cast<double>(cumulative_.back());
    }

    std::vector<double> values_;
    std::vector<std::uint64_t> multiplicities_;
    std::vector<std::uint64_t> cumulative_;
};

/// Normalized counting measure of a sample tuple. Equal values merge into one atom.
inline DiscreteMeasure empirical_from_samples(std::span<const double> samples)
{
    if (samples.empty()) {
        throw std::invalid_argument("empty sample set");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    for (double s : sorted) {
        if (!std::isfinite(s)) {
            throw std::invalid_argument("non-finite sample");
        }
    }
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> values;
    std::vector<std::uint64_t> counts;
    for (double s : sorted) {
        if (values.empty() || values.back() != s) {
            values.push_back(s);
            counts.push_back(1);
        } else {
            ++counts.back();
        }
    }
    return DiscreteMeasure(std::move(values), std::move(counts));
}

/// A continuous limit law given by closed-form distribution and quantile
/// functions on a bounded support [support_min, support_max].
///
/// The two callbacks are independent; their consistency is a tested property,
/// not something the type enforces. Evaluation clamps to the support so that
/// the boundary rules hold regardless of what the callbacks do outside it.
struct AnalyticDistribution {
    std::string name;
    std::function<double(double)> cdf_fn;
    std::function<double(double)> quantile_fn;
    double support_min = 0.0;
    double support_max = 1.0;

    double cdf(double v) const
    {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("non-finite value");
        }
        if (v < support_min) {
            return 0.0;
        }
        if (v >= support_max) {
            return 1.0;
        }
        return std::clamp(cdf_fn(v), 0.0, 1.0);
    }

    double quantile(double p) const
    {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::out_of_range("probability out of range");
        }
        if (p == 0.0) {
            return support_min;
        }
        if (p == 1.0) {
            return support_max;
        }
        return std::clamp(quantile_fn(p), support_min, support_max);
    }
};

/// Arcsine law on [0,1]: F(v) = (2/pi) asin(sqrt v), Q(p) = sin^2(pi p / 2).
inline AnalyticDistribution arcsine_law()
{
    return AnalyticDistribution{
        "arcsine",
        [](double v) { return 2.0 / std::numbers::pi * std::asin(std::sqrt(v)); },
        [](double p) {
            const double s = std::sin(std::numbers::pi * p / 2.0);
            return s * s;
        },
        0.0,
        1.0,
    };
}

inline AnalyticDistribution uniform_law(double lo = 0.0, double hi = 1.0)
{
    if (!(lo < hi)) {
        throw std::invalid_argument("uniform law needs lo < hi");
    }
    return AnalyticDistribution{
        "uniform",
        [lo, hi](double v) { return (v - lo) / (hi - lo); },
        [lo, hi](double p) { return lo + p * (hi - lo); },
        lo,
        hi,
    };
}

/// Point mass at c, as an analytic distribution (constant quantile).
inline AnalyticDistribution point_mass_law(double c)
{
    return AnalyticDistribution{
        "point",
        [c](double v) { return v < c ? 0.0 : 1.0; },
        [c](double) { return c; },
        c,
        c,
    };
}

enum class QuantileKind { step, analytic };

/// Quantile function of either a discrete measure (a left-continuous step
/// function) or an analytic law. Callable as q(p) for p in [0,1].
class QuantileFunction {
public:
    explicit QuantileFunction(DiscreteMeasure m) : source_(std::move(m)) {}
    explicit QuantileFunction(AnalyticDistribution d) : source_(std::move(d)) {}

    QuantileKind kind() const noexcept
    {
        return std::holds_alternative<DiscreteMeasure>(source_) ? QuantileKind::step
                                                                : QuantileKind::analytic;
    }

    double operator()(double p) const
    {
        return std::visit([p](const auto& s) { return s.quantile(p); }, source_);
    }

    const DiscreteMeasure& measure() const { return std::get<DiscreteMeasure>(source_); }
    const AnalyticDistribution& distribution() const { return std::get<AnalyticDistribution>(source_); }

private:
    std::variant<DiscreteMeasure, AnalyticDistribution> source_;
};

inline double cdf_eval(const DiscreteMeasure& m, double v) { return m.cdf(v); }
inline double cdf_eval(const AnalyticDistribution& m, double v) { return m.cdf(v); }
inline double quantile_eval(const DiscreteMeasure& m, double p) { return m.quantile(p); }
inline double quantile_eval(const AnalyticDistribution& m, double p) { return m.quantile(p); }

struct SupportBounds {
    double alpha;
    double beta;
};

inline SupportBounds support_bounds(const DiscreteMeasure& m) { return {m.support_min(), m.support_max()}; }
inline SupportBounds support_bounds(const AnalyticDistribution& m) { return {m.support_min, m.support_max}; }

/// Lebesgue measure of {u in [0,1] : Q(u) <= v}, read off the jump sites of
/// the step quantile. Equals cdf(v) (the distribution of Q is F).
inline double quantile_sublevel_measure(const DiscreteMeasure& m, double v)
{
    // Q(u) <= v exactly on [0, c/total] where c counts atoms <= v; Q(0) is the
    // least atom, so the set is {0} (measure zero) when v is below it.
    const auto vals = m.values();
    const auto k = static_cast<std::size_t>(std::upper_bound(vals.begin(), vals.end(), v) - vals.begin());
    if (k == 0) {
        return 0.0;
    }
    return static_cast<double>(m.cumulative()[k - 1]) / static_cast<double>(m.total());
}

} // namespace qlim

#endif // QLIM_MEASURE_HPP
