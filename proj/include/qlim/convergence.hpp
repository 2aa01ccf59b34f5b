#ifndef QLIM_CONVERGENCE_HPP
#define QLIM_CONVERGENCE_HPP

#include <qlim/measure.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qlim {

template <class F>
concept UnitIntervalMap = std::regular_invocable<const F&, double>
    && std::convertible_to<std::invoke_result_t<const F&, double>, double>;

/// Node and interval deviations of an ascending tuple from a limit quantile.
struct ErrorReport {
    double node_error = 0.0;      // max_j |alpha_j - Q(j/d)|
    double interval_error = 0.0;  // max_j sup_{u in [(j-1)/d, j/d]} |alpha_j - Q(u)|
    std::uint64_t argmax_index = 1;  // 1-based j attaining node_error
};

/// A run of equal consecutive entries of an ascending tuple.
struct Block {
    double value;
    std::uint64_t count;
};

inline constexpr std::size_t default_grid_refinement = 4;

namespace detail {

inline void require_ascending(std::span<const double> tuple)
{
    if (tuple.empty()) {
        throw std::invalid_argument("empty tuple");
    }
    for (std::size_t j = 1; j < tuple.size(); ++j) {
        if (tuple[j] < tuple[j - 1]) {
            throw std::invalid_argument("tuple not ascending");
        }
    }
}

// sup of |value - q(u)| over u in [lo, hi], sampled at the endpoints and at
// `refinement` interior points. Exact at the endpoints for monotone q.
template <UnitIntervalMap Q>
double segment_sup(double value, const Q& q, double lo, double hi, std::size_t refinement)
{
    double worst = std::max(std::abs(value - q(lo)), std::abs(value - q(hi)));
    for (std::size_t r = 1; r <= refinement; ++r) {
        const double u = lo + (hi - lo) * static_cast<double>(r) / static_cast<double>(refinement + 1);
        worst = std::max(worst, std::abs(value - q(u)));
    }
    return worst;
}

inline double node(std::uint64_t j, std::uint64_t d)
{
    return static_cast<double>(j) / static_cast<double>(d);
}

} // namespace detail

/// Compresses an ascending tuple into runs of equal values.
inline std::vector<Block> blocks_of(std::span<const double> sorted_tuple)
{
    detail::require_ascending(sorted_tuple);
    std::vector<Block> out;
    for (double v : sorted_tuple) {
        if (out.empty() || out.back().value != v) {
            out.push_back({v, 1});
        } else {
            ++out.back().count;
        }
    }
    return out;
}

inline std::vector<Block> blocks_of(const DiscreteMeasure& m)
{
    std::vector<Block> out;
    out.reserve(m.atom_count());
    for (std::size_t i = 0; i < m.atom_count(); ++i) {
        out.push_back({m.values()[i], m.multiplicities()[i]});
    }
    return out;
}

/// Errors of a block-compressed tuple against a monotone limit quantile.
///
/// Within a block the tuple is constant and q is monotone, so the node
/// maximum sits at the block's first or last index and the interval supremum
/// at the block's outer endpoints. The cost is O(#blocks), independent of d.
template <UnitIntervalMap Q>
ErrorReport block_error_report(std::span<const Block> blocks, const Q& q,
                               std::size_t grid_refinement = default_grid_refinement)
{
    if (blocks.empty()) {
        throw std::invalid_argument("empty tuple");
    }
    std::uint64_t d = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].count == 0) {
            throw std::invalid_argument("empty block");
        }
        if (b > 0 && blocks[b].value < blocks[b - 1].value) {
            throw std::invalid_argument("tuple not ascending");
        }
        d += blocks[b].count;
    }

    ErrorReport report;
    std::uint64_t start = 0;
    for (const Block& blk : blocks) {
        const std::uint64_t first = start + 1;
        const std::uint64_t last = start + blk.count;
        for (std::uint64_t j : {first, last}) {
            const double dev = std::abs(blk.value - q(detail::node(j, d)));
            if (dev > report.node_error) {
                report.node_error = dev;
                report.argmax_index = j;
            }
        }
        const double lo = detail::node(start, d);
        const double hi = detail::node(last, d);
        report.interval_error = std::max(report.interval_error,
                                         detail::segment_sup(blk.value, q, lo, hi, grid_refinement));
        start = last;
    }
    return report;
}

/// Node and interval errors of an ascending tuple, evaluated entry by entry.
template <UnitIntervalMap Q>
ErrorReport error_report(std::span<const double> sorted_tuple, const Q& q,
                         std::size_t grid_refinement = default_grid_refinement)
{
    detail::require_ascending(sorted_tuple);
    const auto d = static_cast<std::uint64_t>(sorted_tuple.size());
    ErrorReport report;
    for (std::uint64_t j = 1; j <= d; ++j) {
        const double a = sorted_tuple[j - 1];
        const double dev = std::abs(a - q(detail::node(j, d)));
        if (dev > report.node_error) {
            report.node_error = dev;
            report.argmax_index = j;
        }
        report.interval_error = std::max(
            report.interval_error,
            detail::segment_sup(a, q, detail::node(j - 1, d), detail::node(j, d), grid_refinement));
    }
    return report;
}

template <UnitIntervalMap Q>
double node_error(std::span<const double> sorted_tuple, const Q& q)
{
    return error_report(sorted_tuple, q, 0).node_error;
}

template <UnitIntervalMap Q>
double interval_error(std::span<const double> sorted_tuple, const Q& q,
                      std::size_t grid_refinement = default_grid_refinement)
{
    if (grid_refinement == 0) {
        throw std::invalid_argument("refinement must be positive");
    }
    return error_report(sorted_tuple, q, grid_refinement).interval_error;
}

/// sup over p in [0,1] of |q_step(p) - q_lim(p)|.
///
/// q_step is constant on every block ((j-1)/d, j/d] and at p = 0 takes the
/// value of the first block, so the supremum is the closed-block interval
/// error of the step function's atoms.
template <UnitIntervalMap Q>
double quantile_sup_distance(const QuantileFunction& q_step, const Q& q_lim,
                             std::size_t grid_refinement = default_grid_refinement)
{
    if (grid_refinement == 0) {
        throw std::invalid_argument("refinement must be positive");
    }
    if (q_step.kind() != QuantileKind::step) {
        throw std::invalid_argument("expected a step quantile");
    }
    const auto blocks = blocks_of(q_step.measure());
    return block_error_report(std::span<const Block>(blocks), q_lim, grid_refinement).interval_error;
}

/// Probed sup-deviation of each member of a monotone family from g.
///
/// `family(n)` returns the n-th map; it is probed on {0, 1/probe_grid, ..., 1}.
/// The result is the raw deviation sequence; deciding whether it tends to
/// zero is left to the caller.
template <class Family, UnitIntervalMap G>
std::vector<double> monotone_uniform_check(const Family& family, const G& g,
                                           std::span<const int> index_list, std::size_t probe_grid)
{
    if (probe_grid == 0) {
        throw std::invalid_argument("probe grid must be positive");
    }
    std::vector<double> out;
    out.reserve(index_list.size());
    for (int n : index_list) {
        const auto f = family(n);
        double worst = 0.0;
        for (std::size_t k = 0; k <= probe_grid; ++k) {
            const double p = static_cast<double>(k) / static_cast<double>(probe_grid);
            worst = std::max(worst, std::abs(f(p) - g(p)));
        }
        out.push_back(worst);
    }
    return out;
}

struct ProbeTrace {
    double probe = 0.0;
    std::vector<double> deviations;
    bool converged = false;  // last deviation below tolerance
};

struct PortmanteauReport {
    std::vector<ProbeTrace> cdf_traces;       // |F_n(v) - F(v)|
    std::vector<ProbeTrace> quantile_traces;  // |Q_n(p) - Q(p)|
    double tolerance = 1e-3;

    bool cdf_converged() const
    {
        return std::all_of(cdf_traces.begin(), cdf_traces.end(), [](const ProbeTrace& t) { return t.converged; });
    }
    bool quantile_converged() const
    {
        return std::all_of(quantile_traces.begin(), quantile_traces.end(),
                           [](const ProbeTrace& t) { return t.converged; });
    }
    /// Distribution-function and quantile criteria agree on the probes.
    bool consistent() const { return cdf_converged() == quantile_converged(); }
};

inline constexpr double default_convergence_tolerance = 1e-3;

/// Deviation sequences of F_n and Q_n from the limit at fixed probes.
///
/// v probes must be continuity points of F and p probes continuity points of
/// Q; only p = 0 and p = 1 are rejected here.
inline PortmanteauReport portmanteau_check(std::span<const DiscreteMeasure> m_seq,
                                           const AnalyticDistribution& limit,
                                           std::span<const double> v_probes,
                                           std::span<const double> p_probes,
                                           double tolerance = default_convergence_tolerance)
{
    for (double p : p_probes) {
        if (!(p > 0.0 && p < 1.0)) {
            throw std::out_of_range("probe outside (0,1)");
        }
    }
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    PortmanteauReport report;
    report.tolerance = tolerance;
    auto trace = [&](double probe, auto&& deviation) {
        ProbeTrace t;
        t.probe = probe;
        for (const auto& m : m_seq) {
            t.deviations.push_back(deviation(m));
        }
        t.converged = !t.deviations.empty() && t.deviations.back() < tolerance;
        return t;
    };
    for (double v : v_probes) {
        const double target = limit.cdf(v);
        report.cdf_traces.push_back(trace(v, [&](const DiscreteMeasure& m) { return std::abs(m.cdf(v) - target); }));
    }
    for (double p : p_probes) {
        const double target = limit.quantile(p);
        report.quantile_traces.push_back(
            trace(p, [&](const DiscreteMeasure& m) { return std::abs(m.quantile(p) - target); }));
    }
    return report;
}

} // namespace qlim

#endif // QLIM_CONVERGENCE_HPP
