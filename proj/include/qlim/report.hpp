#ifndef QLIM_REPORT_HPP
#define QLIM_REPORT_HPP

#include <qlim/convergence.hpp>
#include <qlim/experiments.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlim {

/// Output file could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_sig(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// "2.6e-02"-style, two significant digits.
inline std::string format_sci2(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1e", v);
    return buf;
}

inline std::string format_fixed3(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

inline const char* csv_header = "n,node_error,interval_error,runtime_ms";

/// CSV text for a result table; values carry 6 significant digits.
inline std::string format_csv(std::span<const ExperimentRow> rows, bool include_timing = true)
{
    if (rows.empty()) {
        throw std::invalid_argument("no rows to emit");
    }
    std::string out = csv_header;
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.n);
        out += ',';
        out += format_sig(r.node_error);
        out += ',';
        out += format_sig(r.interval_error);
        out += ',';
        out += std::to_string(include_timing ? r.runtime_ms : 0);
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
    f << text;
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
}

inline void emit_csv(std::span<const ExperimentRow> rows, const std::filesystem::path& path,
                     bool include_timing = true)
{
    write_text_file(path, format_csv(rows, include_timing));
}

// ---------------------------------------------------------------------------
// SVG scatter plots

struct PlotPoint {
    double x;
    double y;
};

/// A marker (count == 1) or a horizontal segment standing for `count`
/// consecutive points with the same ordinate.
struct PlotRun {
    double x0;
    double x1;
    double y;
    std::uint64_t count;
};

inline constexpr std::size_t max_plotted_points = 4096;
inline constexpr std::size_t curve_samples = 512;

/// Points as markers, or, above 4096 points, adjacent equal-y points glued
/// into segments.
inline std::vector<PlotRun> runs_from_points(std::span<const PlotPoint> points)
{
    std::vector<PlotRun> out;
    const bool merge = points.size() > max_plotted_points;
    for (const auto& p : points) {
        if (merge && !out.empty() && out.back().y == p.y) {
            out.back().x1 = p.x;
            ++out.back().count;
        } else {
            out.push_back({p.x, p.x, p.y, 1});
        }
    }
    return out;
}

/// The points (j/d, alpha_j) of a block-compressed ascending tuple.
inline std::vector<PlotRun> runs_from_blocks(std::span<const Block> blocks)
{
    std::uint64_t d = 0;
    for (const auto& b : blocks) {
        d += b.count;
    }
    std::vector<PlotRun> out;
    const auto dd = static_cast<double>(d);
    std::uint64_t start = 0;
    for (const auto& b : blocks) {
        if (d > max_plotted_points) {
            out.push_back({static_cast<double>(start + 1) / dd, static_cast<double>(start + b.count) / dd, b.value,
                           b.count});
        } else {
            for (std::uint64_t j = start + 1; j <= start + b.count; ++j) {
                out.push_back({static_cast<double>(j) / dd, static_cast<double>(j) / dd, b.value, 1});
            }
        }
        start += b.count;
    }
    return out;
}

inline std::size_t segment_count(std::span<const PlotRun> runs)
{
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const PlotRun& r) { return r.count > 1; }));
}

inline std::string render_svg(std::span<const PlotRun> runs, const std::function<double(double)>* curve,
                              const std::string& title = {})
{
    if (runs.empty()) {
        throw std::invalid_argument("no points to plot");
    }
    constexpr double width = 480.0;
    constexpr double height = 360.0;
    constexpr double margin = 40.0;

    std::vector<PlotPoint> curve_pts;
    if (curve != nullptr) {
        for (std::size_t k = 0; k < curve_samples; ++k) {
            const double x = static_cast<double>(k) / static_cast<double>(curve_samples - 1);
            curve_pts.push_back({x, (*curve)(x)});
        }
    }
    double y_lo = runs.front().y;
    double y_hi = runs.front().y;
    for (const auto& r : runs) {
        y_lo = std::min(y_lo, r.y);
        y_hi = std::max(y_hi, r.y);
    }
    for (const auto& p : curve_pts) {
        y_lo = std::min(y_lo, p.y);
        y_hi = std::max(y_hi, p.y);
    }
    if (y_hi - y_lo < 1e-12) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto sx = [&](double x) { return format_sig(margin + x * (width - 2 * margin)); };
    auto sy = [&](double y) { return format_sig(height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    if (!title.empty()) {
        svg << "<title>" << title << "</title>\n";
    }
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
        << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(y_lo) << "\" x2=\"" << sx(1) << "\" y2=\"" << sy(y_lo)
        << "\"/>\n"
        << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(y_lo) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(y_hi)
        << "\"/>\n"
        << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"10\">\n"
        << "<text x=\"" << sx(0) << "\" y=\"" << format_sig(height - margin + 14) << "\">0</text>\n"
        << "<text x=\"" << sx(1) << "\" y=\"" << format_sig(height - margin + 14) << "\">1</text>\n"
        << "<text x=\"4\" y=\"" << sy(y_lo + pad) << "\">" << format_sig(y_lo + pad, 3) << "</text>\n"
        << "<text x=\"4\" y=\"" << sy(y_hi - pad) << "\">" << format_sig(y_hi - pad, 3) << "</text>\n"
        << "</g>\n";
    if (!curve_pts.empty()) {
        svg << "<polyline class=\"curve\" fill=\"none\" stroke=\"gray\" stroke-width=\"1\" points=\"";
        for (std::size_t k = 0; k < curve_pts.size(); ++k) {
            svg << (k ? " " : "") << sx(curve_pts[k].x) << ',' << sy(curve_pts[k].y);
        }
        svg << "\"/>\n";
    }
    svg << "<g fill=\"blue\" stroke=\"blue\" stroke-width=\"2\">\n";
    for (const auto& r : runs) {
        if (r.count > 1) {
            svg << "<line class=\"segment\" x1=\"" << sx(r.x0) << "\" y1=\"" << sy(r.y) << "\" x2=\"" << sx(r.x1)
                << "\" y2=\"" << sy(r.y) << "\"/>\n";
        } else {
            svg << "<circle class=\"point\" cx=\"" << sx(r.x0) << "\" cy=\"" << sy(r.y) << "\" r=\"2\"/>\n";
        }
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

inline void emit_svg_scatter(std::span<const PlotPoint> points, std::optional<std::function<double(double)>> curve,
                             const std::filesystem::path& path, const std::string& title = {})
{
    const auto runs = runs_from_points(points);
    write_text_file(path, render_svg(runs, curve ? &*curve : nullptr, title));
}

inline void emit_svg_runs(std::span<const PlotRun> runs, std::optional<std::function<double(double)>> curve,
                          const std::filesystem::path& path, const std::string& title = {})
{
    write_text_file(path, render_svg(runs, curve ? &*curve : nullptr, title));
}

} // namespace qlim

#endif // QLIM_REPORT_HPP
