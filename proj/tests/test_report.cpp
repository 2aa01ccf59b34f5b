#include <qlim/experiments.hpp>
#include <qlim/report.hpp>
#include <qlim/symbol_io.hpp>

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using Catch::Approx;
using namespace qlim;

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

} // namespace

TEST_CASE("number formatting", "[report]")
{
    CHECK(format_sig(0.1234567891) == "0.123457");
    CHECK(format_sig(2.0) == "2");
    CHECK(format_sci2(0.0055694) == "5.6e-03");
    CHECK(format_sci2(0.026) == "2.6e-02");
    CHECK(format_fixed3(0.29976) == "0.300");
}

TEST_CASE("csv layout and determinism", "[report]")
{
    const std::vector<ExperimentRow> rows{{5, 0.3, 0.31, 12}, {10, 0.2, 0.25, 3}};
    const auto a = format_csv(rows, false);
    CHECK(a == "n,node_error,interval_error,runtime_ms\n5,0.3,0.31,0\n10,0.2,0.25,0\n");
    CHECK(a == format_csv(rows, false));
    CHECK(format_csv(rows, true).find("5,0.3,0.31,12\n") != std::string::npos);
    CHECK_THROWS(format_csv(std::vector<ExperimentRow>{}));
}

TEST_CASE("csv written to disk matches the formatted text", "[report]")
{
    const auto dir = std::filesystem::temp_directory_path() / "qlim_report_test";
    std::filesystem::create_directories(dir);
    const std::vector<ExperimentRow> rows{sine_law_error(5), sine_law_error(10)};
    emit_csv(rows, dir / "rows.csv", false);
    std::ifstream f(dir / "rows.csv");
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == format_csv(rows, false));
    CHECK_THROWS_AS(write_text_file(dir / "missing" / "x" / "rows.csv", "x"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("block plots use one segment per block past the point limit", "[report]")
{
    const auto blocks = arcsine_distribution(30).blocks();
    const auto runs = runs_from_blocks(blocks);
    CHECK(runs.size() == 31);
    CHECK(segment_count(runs) == 31);
    const std::function<double(double)> curve = sine_law_quantile;
    const auto svg = render_svg(runs, &curve, "n = 30");
    CHECK(occurrences(svg, "class=\"segment\"") == 31);
    CHECK(occurrences(svg, "class=\"point\"") == 0);
    CHECK(occurrences(svg, "class=\"curve\"") == 1);
}

TEST_CASE("small tuples plot as markers", "[report]")
{
    const auto runs = runs_from_blocks(arcsine_distribution(5).blocks());
    CHECK(runs.size() == 32);
    CHECK(segment_count(runs) == 0);
    const auto svg = render_svg(runs, nullptr);
    CHECK(occurrences(svg, "class=\"point\"") == 32);
    CHECK(occurrences(svg, "class=\"curve\"") == 0);
}

TEST_CASE("dense scatter merges equal ordinates", "[report]")
{
    std::vector<PlotPoint> pts;
    for (int i = 0; i < 5000; ++i) {
        pts.push_back({i / 5000.0, static_cast<double>(i / 1000)});
    }
    const auto runs = runs_from_points(pts);
    CHECK(runs.size() == 5);
    CHECK(segment_count(runs) == 5);
}

TEST_CASE("symbol file round trip", "[report]")
{
    const auto expr = gapped_product_family(512);
    const auto text = expr_to_json(expr);
    const auto back = parse_symbol_spec(text);
    REQUIRE(back.terms().size() == 1);
    REQUIRE(back.terms().front().size() == 2);
    const auto& s = back.terms().front()[1].samples();
    const auto& t = expr.terms().front()[1].samples();
    REQUIRE(s.values.size() == t.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(s.values[i].real() == t.values[i].real());
    }
    CHECK(expr_to_json(back) == text);
}

TEST_CASE("single symbol documents", "[report]")
{
    const auto expr = parse_symbol_spec(R"({
        "levels": 1,
        "representation": "coefficients",
        "coefficients": [{"index": [-1], "re": -1}, {"index": [0], "re": 2}, {"index": [1], "re": -1}]
    })");
    const auto t = evaluate_expr(expr, {3});
    CHECK(t(0, 0) == Complex{2.0, 0.0});
    CHECK(t(1, 0) == Complex{-1.0, 0.0});

    const auto sampled = parse_symbol_spec(R"({
        "levels": 1, "representation": "sampled", "grid": 4,
        "values": [1, [0, 1], {"re": -1, "im": 0}, [0, -1]]
    })");
    CHECK(sampled.terms().front().front().samples().values[1] == Complex{0.0, 1.0});
}

TEST_CASE("malformed symbol documents", "[report]")
{
    CHECK_THROWS_AS(parse_symbol_spec("{"), ParseError);
    CHECK_THROWS_AS(parse_symbol_spec(R"({"levels": 1})"), ParseError);
    CHECK_THROWS_AS(parse_symbol_spec(R"({"levels": 1, "representation": "sampled", "grid": 4, "values": [1]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_symbol_spec(R"({"levels": 1, "symbols": {"a": {"representation": "coefficients",
        "coefficients": []}}, "expr": {"sum": [{"product": ["b"]}]}})"),
                    ParseError);
    CHECK_THROWS_AS(load_symbol_spec("/nonexistent/symbol.json"), ParseError);
}

TEST_CASE("shipped data files", "[report]")
{
    const std::filesystem::path data = QLIM_DATA_DIR;
    const auto gapped = load_symbol_spec(data / "gapped_product.json");
    CHECK(expr_to_json(gapped) == expr_to_json(gapped_product_family()));
    const auto lap = load_symbol_spec(data / "laplacian.json");
    CHECK(expr_to_json(lap) == expr_to_json(MatrixExpr::single(laplacian_symbol())));
    const auto sp = load_symbol_spec(data / "shift_product.json");
    CHECK(expr_to_json(sp) == expr_to_json(MatrixExpr({{shift_symbol(1), shift_symbol(-1)}})));
}
