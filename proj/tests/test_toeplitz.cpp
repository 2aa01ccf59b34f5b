#include <qlim/spectra.hpp>
#include <qlim/toeplitz.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

using Catch::Approx;
using namespace qlim;

namespace {

SymbolSpec sample_1d(std::size_t n, const std::function<Complex(double)>& a, bool real = false)
{
    SampledGrid g{n, std::vector<Complex>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        g.values[i] = a(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
    return SymbolSpec::from_samples(1, std::move(g), real);
}

double max_entry_diff(const DenseMatrix& a, const DenseMatrix& b)
{
    REQUIRE(a.dim() == b.dim());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("fourier coefficients of the unimodular symbol", "[toeplitz]")
{
    const auto sym = sample_1d(16, [](double t) { return std::polar(1.0, t); });
    const auto fc = fourier_coefficients(sym, 4);
    for (int j = -4; j <= 4; ++j) {
        const double expected = j == 1 ? 1.0 : 0.0;
        CHECK(std::abs(fc.symbol.coefficient({j}) - Complex{expected, 0.0}) < 1e-14);
    }
    CHECK_FALSE(fc.tail_flagged());
}

TEST_CASE("fourier coefficients of the laplacian symbol", "[toeplitz]")
{
    const auto sym = sample_1d(16, [](double t) { return Complex{2.0 - 2.0 * std::cos(t), 0.0}; }, true);
    const auto fc = fourier_coefficients(sym, 2);
    CHECK(std::abs(fc.symbol.coefficient({0}) - 2.0) < 1e-14);
    CHECK(std::abs(fc.symbol.coefficient({1}) + 1.0) < 1e-14);
    CHECK(std::abs(fc.symbol.coefficient({-1}) + 1.0) < 1e-14);
    CHECK(std::abs(fc.symbol.coefficient({2})) < 1e-14);
    CHECK(std::abs(fc.symbol.coefficient({-2})) < 1e-14);
}

TEST_CASE("fourier coefficients of a two level constant", "[toeplitz]")
{
    SampledGrid g{8, std::vector<Complex>(64, Complex{1.0, 0.0})};
    const auto sym = SymbolSpec::from_samples(2, std::move(g), true);
    const auto fc = fourier_coefficients(sym, 2);
    for (int i = -2; i <= 2; ++i) {
        for (int j = -2; j <= 2; ++j) {
            const double expected = (i == 0 && j == 0) ? 1.0 : 0.0;
            CHECK(std::abs(fc.symbol.coefficient({i, j}) - expected) < 1e-14);
        }
    }
}

TEST_CASE("fourier coefficients reject small grids and coefficient maps", "[toeplitz]")
{
    const auto sym = sample_1d(8, [](double) { return Complex{1.0, 0.0}; });
    CHECK_THROWS_WITH(fourier_coefficients(sym, 4), Catch::Matchers::ContainsSubstring("aliasing risk"));
    CHECK_THROWS(fourier_coefficients(laplacian_symbol(), 2));
}

TEST_CASE("fourier tail flag fires for a discontinuous symbol", "[toeplitz]")
{
    const auto sym = sample_1d(512, [](double t) { return Complex{t < std::numbers::pi ? 1.0 : 0.0, 0.0}; });
    CHECK(fourier_coefficients(sym, 8).tail_flagged());
}

TEST_CASE("toeplitz matrix placements", "[toeplitz]")
{
    const auto shift = toeplitz_matrix(shift_symbol(1), {3});
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const double expected = (i == j + 1) ? 1.0 : 0.0;
            CHECK(shift(i, j) == Complex{expected, 0.0});
        }
    }

    const auto lap = toeplitz_matrix(laplacian_symbol(), {3});
    CHECK(lap(0, 0) == Complex{2.0, 0.0});
    CHECK(lap(0, 1) == Complex{-1.0, 0.0});
    CHECK(lap(1, 0) == Complex{-1.0, 0.0});
    CHECK(lap(0, 2) == Complex{0.0, 0.0});
    CHECK(lap.is_hermitian(1e-14));

    const auto id = toeplitz_matrix(constant_symbol(1.0, 2), {2, 2});
    CHECK(max_entry_diff(id, DenseMatrix::identity(4)) == 0.0);
}

TEST_CASE("two level toeplitz uses last level fastest", "[toeplitz]")
{
    const auto sym = SymbolSpec::from_coefficients(2, {{{0, 1}, Complex{1.0, 0.0}}});
    const auto t = toeplitz_matrix(sym, {2, 3});
    REQUIRE(t.dim() == 6);
    // (i1,i2) -> 3*i1 + i2; nonzero where i1 == j1 and i2 == j2 + 1.
    for (std::size_t r = 0; r < 6; ++r) {
        for (std::size_t c = 0; c < 6; ++c) {
            const bool hit = (r / 3 == c / 3) && (r % 3 == c % 3 + 1);
            CHECK(t(r, c) == Complex{hit ? 1.0 : 0.0, 0.0});
        }
    }
}

TEST_CASE("toeplitz size limit", "[toeplitz]")
{
    CHECK_THROWS_AS(toeplitz_matrix(constant_symbol(1.0, 2), {100, 100}), std::length_error);
}

TEST_CASE("expression evaluation", "[toeplitz]")
{
    const auto single = evaluate_expr(MatrixExpr::single(laplacian_symbol()), {5});
    CHECK(max_entry_diff(single, toeplitz_matrix(laplacian_symbol(), {5})) == 0.0);

    const MatrixExpr twice({{constant_symbol(1.0)}, {constant_symbol(1.0)}});
    const auto two = evaluate_expr(twice, {4});
    auto expected = DenseMatrix::identity(4);
    expected += DenseMatrix::identity(4);
    CHECK(max_entry_diff(two, expected) == 0.0);
}

TEST_CASE("shift times its adjoint zeroes the first diagonal entry", "[toeplitz]")
{
    const MatrixExpr prod({{shift_symbol(1), shift_symbol(-1)}});
    const auto b = evaluate_expr(prod, {3});
    CHECK(max_entry_diff(b, DenseMatrix::diagonal({0.0, 1.0, 1.0})) == 0.0);
}

TEST_CASE("sampled factors agree with their coefficient form", "[toeplitz]")
{
    const auto sampled = sample_1d(256, [](double t) { return Complex{2.0 - 2.0 * std::cos(t), 0.0}; }, true);
    const auto a = evaluate_expr(MatrixExpr::single(sampled), {8});
    const auto b = toeplitz_matrix(laplacian_symbol(), {8});
    CHECK(max_entry_diff(a, b) < 1e-12);
}

TEST_CASE("symbol modulus quantiles", "[toeplitz]")
{
    const auto c = symbol_modulus_quantile(MatrixExpr::single(constant_symbol(0.75)), 256);
    for (double p : {0.0, 0.3, 1.0}) {
        CHECK(c(p) == Approx(0.75));
    }
    const auto u = symbol_modulus_quantile(MatrixExpr::single(shift_symbol(1)), 256);
    for (double p : {0.0, 0.5, 1.0}) {
        CHECK(u(p) == Approx(1.0).margin(1e-12));
    }
    const auto lap = symbol_modulus_quantile(MatrixExpr::single(laplacian_symbol()), 1024);
    CHECK(lap(0.5) == Approx(2.0).margin(1e-2));
    CHECK_THROWS(symbol_modulus_samples(MatrixExpr::single(laplacian_symbol()), 128));
}

TEST_CASE("gapped product family has gapped factors and a connected product", "[toeplitz]")
{
    const auto expr = gapped_product_family(4096);
    REQUIRE(expr.terms().size() == 1);
    REQUIRE(expr.terms().front().size() == 2);
    for (const auto& f : expr.terms().front()) {
        std::vector<double> v;
        for (const auto& z : f.samples().values) {
            v.push_back(z.real());
        }
        std::sort(v.begin(), v.end());
        double gap = 0.0;
        for (std::size_t i = 1; i < v.size(); ++i) {
            gap = std::max(gap, v[i] - v[i - 1]);
        }
        CHECK(gap >= 0.09);
    }
    auto x = symbol_modulus_samples(expr, 4096);
    std::sort(x.begin(), x.end());
    double gap = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        gap = std::max(gap, x[i] - x[i - 1]);
    }
    CHECK(gap < 1e-2);
    CHECK(x.front() == Approx(0.0).margin(1e-6));
    CHECK(x.back() == Approx(1.0));
}

TEST_CASE("operator norm bounded by the symbol supremum", "[toeplitz]")
{
    const auto expr = gapped_product_family(4096);
    const auto b = evaluate_expr(expr, {32});
    const auto s = singular_values(b);
    CHECK(s.values.back() <= 1.0 + 1e-10);
}

TEST_CASE("symbol construction errors", "[toeplitz]")
{
    CHECK_THROWS(SymbolSpec::from_coefficients(1, {{{1}, Complex{1.0, 0.0}}}, true));
    CHECK_THROWS(SymbolSpec::from_coefficients(1, {{{1, 0}, Complex{1.0, 0.0}}}));
    CHECK_THROWS(SymbolSpec::from_samples(1, SampledGrid{4, std::vector<Complex>(3)}));
    CHECK_THROWS(SymbolSpec::from_samples(1, SampledGrid{2, {Complex{0.0, 1.0}, Complex{}}}, true));
    CHECK_THROWS(MatrixExpr({}));
}
