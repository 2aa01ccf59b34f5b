#ifndef QLIM_CLI_HPP
#define QLIM_CLI_HPP

#include <qlim/check/invariants.hpp>
#include <qlim/convergence.hpp>
#include <qlim/experiments.hpp>
#include <qlim/measure.hpp>
#include <qlim/report.hpp>
#include <qlim/spectra.hpp>
#include <qlim/symbol_io.hpp>
#include <qlim/toeplitz.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qlim::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_invariant_failure = 1,
    exit_input_error = 2,
    exit_no_convergence = 3,
};

enum class OutputFormat { csv, svg, both };

struct RunConfig {
    std::string command;  // quantile | toeplitz | arcsine | weyl | riemann | check
    std::vector<std::uint64_t> sizes;
    std::optional<std::filesystem::path> symbol_file;
    std::optional<std::filesystem::path> output_dir;
    OutputFormat format = OutputFormat::csv;
    double tolerance = default_convergence_tolerance;
    std::size_t quantile_grid = 4096;
    bool paper_format = false;
    bool timing = false;
    std::uint64_t seed = check::SuiteOptions{}.seed;
    std::size_t trials = check::SuiteOptions{}.trials;
    std::uint64_t scan_max = 10000;
    std::string riemann_reference = "self";  // self | identity
    std::optional<std::string> measure_literal;
    std::optional<std::filesystem::path> measure_file;
    std::string law = "arcsine";  // arcsine | uniform, when no measure is given
};

/// Thrown for unusable command lines and configs; maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_value_list(const std::string& text, char sep)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto first = item.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item.substr(first), &used));
            if (item.find_first_not_of(" \t\r", first + used) != std::string::npos) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + item + "'");
        }
    }
    return out;
}

inline void validate(const RunConfig& cfg)
{
    static const std::vector<std::string> commands{"quantile", "toeplitz", "arcsine", "weyl", "riemann", "check"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end()) {
        throw ConfigError("unknown command '" + cfg.command + "'");
    }
    if (!(cfg.tolerance > 0.0)) {
        throw ConfigError("tolerance must be positive");
    }
    for (auto n : cfg.sizes) {
        if (n == 0) {
            throw ConfigError("sizes must be positive");
        }
    }
    if (cfg.command == "toeplitz" && !cfg.symbol_file) {
        throw ConfigError("toeplitz needs --symbol-file");
    }
    if (cfg.format != OutputFormat::csv && !cfg.output_dir) {
        throw ConfigError("svg output needs --out");
    }
    if (cfg.riemann_reference != "self" && cfg.riemann_reference != "identity") {
        throw ConfigError("--reference must be self or identity");
    }
}

/// --help was given; carries the formatted usage text.
struct HelpRequested {
    std::string text;
};

/// Parses `qlim <command> [options]`. Throws HelpRequested for --help,
/// CLI::ParseError for malformed flags and ConfigError for semantic problems.
inline RunConfig parse_command_line(int argc, const char* const* argv)
{
    RunConfig cfg;
    CLI::App app{"Uniform quantile approximation experiments", "qlim"};
    app.require_subcommand(1, 1);

    std::string sizes_text;
    std::string format_text = "csv";
    std::string symbol_file;
    std::string out_dir;
    std::string measure_file;
    std::string measure_literal;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--sizes", sizes_text, "Comma-separated size schedule");
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--format", format_text, "csv | svg | both")->check(CLI::IsMember({"csv", "svg", "both"}));
        sub->add_option("--grid", cfg.quantile_grid, "Quantile / dump grid");
        sub->add_option("--tolerance", cfg.tolerance, "Convergence tolerance");
        sub->add_flag("--paper-format", cfg.paper_format, "Also print a compact n, eps table with published rounding");
        sub->add_flag("--timing", cfg.timing, "Record measured runtimes in the CSV");
        sub->add_option("--seed", cfg.seed, "Seed for randomized checks");
        sub->add_option("--symbol-file", symbol_file, "Symbol-spec JSON document");
    };

    auto* quantile = app.add_subcommand("quantile", "Evaluate a quantile function on a grid");
    common(quantile);
    quantile->add_option("--measure", measure_literal, "Comma-separated sample values");
    quantile->add_option("--measure-file", measure_file, "Sample values, one per line");
    quantile->add_option("--law", cfg.law, "arcsine | uniform (when no samples are given)")
        ->check(CLI::IsMember({"arcsine", "uniform"}));

    auto* toeplitz = app.add_subcommand("toeplitz", "Singular values of sums of products of Toeplitz matrices");
    common(toeplitz);

    auto* arcsine = app.add_subcommand("arcsine", "Sine law for random walks");
    common(arcsine);

    auto* weyl = app.add_subcommand("weyl", "Weyl sequence frac(j sqrt 2)");
    common(weyl);
    weyl->add_option("--scan-max", cfg.scan_max, "Upper end of the eps(n) n/ln(n) scan");

    auto* riemann = app.add_subcommand("riemann", "Sorted Riemann samples of the arcsine CDF");
    common(riemann);
    riemann->add_option("--reference", cfg.riemann_reference, "self (pushforward quantile) | identity");

    auto* check = app.add_subcommand("check", "Run the invariant suite");
    common(check);
    check->add_option("--trials", cfg.trials, "Randomized cases per property");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw HelpRequested{subs.empty() ? app.help() : subs.front()->help()};
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (!sizes_text.empty()) {
        for (double v : parse_value_list(sizes_text, ',')) {
            if (v < 1.0 || v != std::floor(v)) {
                throw ConfigError("sizes must be positive integers");
            }
            cfg.sizes.push_back(static_cast<std::uint64_t>(v));
        }
    }
    cfg.format = format_text == "svg" ? OutputFormat::svg : format_text == "both" ? OutputFormat::both : OutputFormat::csv;
    if (!symbol_file.empty()) {
        cfg.symbol_file = symbol_file;
    }
    if (!out_dir.empty()) {
        cfg.output_dir = out_dir;
    }
    if (!measure_file.empty()) {
        cfg.measure_file = measure_file;
    }
    if (!measure_literal.empty()) {
        cfg.measure_literal = measure_literal;
    }
    validate(cfg);
    return cfg;
}

namespace detail {

inline bool wants_csv(const RunConfig& c) { return c.format != OutputFormat::svg; }
inline bool wants_svg(const RunConfig& c) { return c.format != OutputFormat::csv; }

inline std::vector<std::uint64_t> schedule_or(const RunConfig& c, std::vector<std::uint64_t> fallback)
{
    return c.sizes.empty() ? std::move(fallback) : c.sizes;
}

inline void write_rows(const RunConfig& cfg, std::span<const ExperimentRow> rows, std::ostream& out)
{
    if (!wants_csv(cfg)) {
        return;
    }
    if (cfg.output_dir) {
        emit_csv(rows, *cfg.output_dir / (cfg.command + ".csv"), cfg.timing);
    } else {
        out << format_csv(rows, cfg.timing);
    }
}

inline std::filesystem::path svg_path(const RunConfig& cfg, std::uint64_t n)
{
    return *cfg.output_dir / (cfg.command + "_n" + std::to_string(n) + ".svg");
}

inline int run_arcsine(const RunConfig& cfg, std::ostream& out)
{
    std::vector<ExperimentRow> rows;
    for (auto n : schedule_or(cfg, {5, 10, 15, 20, 25, 30})) {
        if (n > max_walk_length) {
            throw ConfigError("walk length above 62: count overflow");
        }
        rows.push_back(sine_law_error(static_cast<unsigned>(n)));
        if (wants_svg(cfg)) {
            const auto blocks = arcsine_distribution(static_cast<unsigned>(n)).blocks();
            emit_svg_runs(runs_from_blocks(blocks), std::function<double(double)>(sine_law_quantile),
                          svg_path(cfg, n), "sine law, n = " + std::to_string(n));
        }
    }
    write_rows(cfg, rows, out);
    if (cfg.paper_format) {
        out << "n\teps\n";
        for (const auto& r : rows) {
            out << r.n << '\t' << format_fixed3(r.node_error) << '\n';
        }
    }
    return exit_ok;
}

inline int run_weyl(const RunConfig& cfg, std::ostream& out)
{
    std::vector<ExperimentRow> rows;
    for (auto n : schedule_or(cfg, {32, 64, 128, 256, 512, 1024})) {
        rows.push_back(weyl_sequence_error(n));
        if (wants_svg(cfg)) {
            std::vector<PlotPoint> pts;
            std::vector<double> sorted(n);
            for (std::uint64_t j = 1; j <= n; ++j) {
                sorted[j - 1] = weyl_term(j);
            }
            std::sort(sorted.begin(), sorted.end());
            for (std::uint64_t j = 1; j <= n; ++j) {
                pts.push_back({static_cast<double>(j) / static_cast<double>(n), sorted[j - 1]});
            }
            emit_svg_scatter(pts, std::function<double(double)>([](double p) { return p; }), svg_path(cfg, n),
                             "Weyl sequence, n = " + std::to_string(n));
        }
    }
    write_rows(cfg, rows, out);
    if (cfg.paper_format) {
        out << "n\teps\n";
        for (const auto& r : rows) {
            out << r.n << '\t' << format_sci2(r.node_error) << '\n';
        }
    }
    if (cfg.scan_max >= 2) {
        const auto bound = weyl_bound_scan(cfg.scan_max);
        std::ostringstream line;
        line << "weyl_bound n_max=" << cfg.scan_max << " worst_ratio=" << format_sig(bound.worst_ratio)
             << " at_n=" << bound.worst_n << " le_0.7=" << (bound.worst_ratio <= 0.7 ? "yes" : "no") << '\n';
        if (cfg.output_dir) {
            write_text_file(*cfg.output_dir / "weyl_bound.txt", line.str());
        }
        // Keep stdout a clean CSV when the table goes there.
        if (cfg.output_dir || !wants_csv(cfg) || cfg.paper_format) {
            out << line.str();
        }
    }
    return exit_ok;
}

inline int run_riemann(const RunConfig& cfg, std::ostream& out)
{
    const std::function<double(double)> x = arcsine_cdf;
    const bool identity = cfg.riemann_reference == "identity";
    std::vector<ExperimentRow> rows;
    for (auto d : schedule_or(cfg, {128, 256, 512, 1024, 2048, 4096})) {
        qlim::detail::Stopwatch clock;
        const auto rep = identity ? riemann_report(x, 0.0, 1.0, d, [](double p) { return p; })
                                  : riemann_report(x, 0.0, 1.0, d, arcsine_cdf);
        rows.push_back({d, rep.node_error, rep.interval_error, clock.elapsed_ms()});
    }
    write_rows(cfg, rows, out);
    if (cfg.paper_format) {
        out << "d\terror\n";
        for (const auto& r : rows) {
            out << r.n << '\t' << format_sci2(r.node_error) << '\n';
        }
    }
    return exit_ok;
}

inline int run_toeplitz(const RunConfig& cfg, std::ostream& out)
{
    const MatrixExpr expr = load_symbol_spec(*cfg.symbol_file);
    const auto schedule = schedule_or(cfg, {32, 64, 128, 256});
    const std::vector<std::size_t> sizes(schedule.begin(), schedule.end());
    const auto study = toeplitz_product_experiment(expr, sizes, cfg.quantile_grid);

    std::vector<ExperimentRow> rows;
    std::ostringstream hyp;
    hyp << "n,norm,beta,range_min,max_gap,range_is_segment,norm_le_beta,hypothesis\n";
    for (const auto& r : study.rows) {
        rows.push_back(r.row);
        hyp << r.row.n << ',' << format_sig(r.norm) << ',' << format_sig(study.support.beta) << ','
            << format_sig(study.support.range_min) << ',' << format_sig(study.support.max_gap) << ','
            << (study.support.range_is_segment ? "pass" : "fail") << ',' << (r.norm_ok ? "pass" : "fail") << ','
            << (r.hypothesis_ok ? "pass" : "fail") << '\n';
    }
    write_rows(cfg, rows, out);
    if (cfg.output_dir) {
        write_text_file(*cfg.output_dir / "toeplitz_hypothesis.csv", hyp.str());
        out << hyp.str();
    } else if (!wants_csv(cfg) || cfg.paper_format) {
        out << hyp.str();
    }
    if (cfg.paper_format) {
        out << "n\teps\n";
        for (const auto& r : rows) {
            out << r.n << '\t' << format_sci2(r.node_error) << '\n';
        }
    }
    if (wants_svg(cfg)) {
        const auto q = symbol_modulus_quantile(expr, cfg.quantile_grid);
        for (const auto& r : study.rows) {
            std::vector<PlotPoint> pts;
            const auto d = static_cast<double>(r.singular_values.size());
            for (std::size_t j = 0; j < r.singular_values.size(); ++j) {
                pts.push_back({static_cast<double>(j + 1) / d, r.singular_values[j]});
            }
            emit_svg_scatter(pts, std::function<double(double)>([&q](double p) { return q(p); }),
                             svg_path(cfg, r.row.n), "singular values, n = " + std::to_string(r.row.n));
        }
    }
    return exit_ok;
}

inline std::vector<double> load_measure_file(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot read measure file " + path.string());
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_value_list(buf.str(), '\n');
}

inline int run_quantile(const RunConfig& cfg, std::ostream& out)
{
    std::optional<QuantileFunction> q;
    if (cfg.measure_literal || cfg.measure_file) {
        const auto samples = cfg.measure_literal ? parse_value_list(*cfg.measure_literal, ',')
                                                 : load_measure_file(*cfg.measure_file);
        try {
            q.emplace(empirical_from_samples(samples));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        q.emplace(cfg.law == "uniform" ? uniform_law() : arcsine_law());
    }
    if (cfg.quantile_grid == 0) {
        throw ConfigError("grid must be positive");
    }
    std::string text = "p,quantile\n";
    for (std::size_t k = 0; k <= cfg.quantile_grid; ++k) {
        const double p = static_cast<double>(k) / static_cast<double>(cfg.quantile_grid);
        text += format_sig(p, 17) + ',' + format_sig((*q)(p), 17) + '\n';
    }
    if (cfg.output_dir) {
        if (wants_csv(cfg)) {
            write_text_file(*cfg.output_dir / "quantile.csv", text);
        }
        if (wants_svg(cfg)) {
            std::vector<PlotPoint> pts;
            for (std::size_t k = 1; k <= cfg.quantile_grid; ++k) {
                const double p = static_cast<double>(k) / static_cast<double>(cfg.quantile_grid);
                pts.push_back({p, (*q)(p)});
            }
            emit_svg_scatter(pts, std::nullopt, *cfg.output_dir / "quantile.svg", "quantile function");
        }
    } else {
        out << text;
    }
    return exit_ok;
}

inline int run_check(const RunConfig& cfg, std::ostream& out)
{
    check::SuiteOptions opt;
    opt.seed = cfg.seed;
    opt.trials = cfg.trials;
    const auto results = check::run_invariant_suite(opt);
    std::ostringstream report;
    report << "seed " << cfg.seed << '\n';
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        report << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases)";
        if (!r.passed) {
            report << ": " << r.detail;
        }
        report << '\n';
    }
    report << (all ? "all properties passed" : "some properties FAILED") << '\n';
    out << report.str();
    if (cfg.output_dir) {
        write_text_file(*cfg.output_dir / "check.txt", report.str());
    }
    return all ? exit_ok : exit_invariant_failure;
}

} // namespace detail

/// Executes one command. Returns the process exit status; diagnostics go to err.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        validate(cfg);
        if (cfg.output_dir) {
            std::error_code ec;
            std::filesystem::create_directories(*cfg.output_dir, ec);
            if (ec) {
                throw IoError("cannot create " + cfg.output_dir->string() + ": " + ec.message());
            }
        }
        if (cfg.command == "arcsine") {
            return detail::run_arcsine(cfg, out);
        }
        if (cfg.command == "weyl") {
            return detail::run_weyl(cfg, out);
        }
        if (cfg.command == "riemann") {
            return detail::run_riemann(cfg, out);
        }
        if (cfg.command == "toeplitz") {
            return detail::run_toeplitz(cfg, out);
        }
        if (cfg.command == "quantile") {
            return detail::run_quantile(cfg, out);
        }
        return detail::run_check(cfg, out);
    } catch (const NoConvergence& e) {
        err << "qlim: solver failed: " << e.what() << '\n';
        return exit_no_convergence;
    } catch (const ParseError& e) {
        err << "qlim: " << e.what() << '\n';
        return exit_input_error;
    } catch (const IoError& e) {
        err << "qlim: " << e.what() << '\n';
        return exit_input_error;
    } catch (const ConfigError& e) {
        err << "qlim: " << e.what() << '\n';
        return exit_input_error;
    } catch (const std::exception& e) {
        err << "qlim: " << e.what() << '\n';
        return exit_input_error;
    }
}

/// Full entry point: parse, run, map parse failures to exit status 2.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    try {
        cfg = parse_command_line(argc, argv);
    } catch (const HelpRequested& h) {
        out << h.text;
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "qlim: " << e.what() << '\n';
        return exit_input_error;
    } catch (const ConfigError& e) {
        err << "qlim: " << e.what() << '\n';
        return exit_input_error;
    }
    return run(cfg, out, err);
}

} // namespace qlim::cli

#endif // QLIM_CLI_HPP
