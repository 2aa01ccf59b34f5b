#include <qlim/check/oracles.hpp>
#include <qlim/spectra.hpp>
#include <qlim/toeplitz.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using Catch::Approx;
using namespace qlim;

namespace {

DenseMatrix random_hermitian(std::mt19937_64& rng, std::size_t n)
{
    std::normal_distribution<double> g;
    DenseMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = g(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            a(i, j) = Complex{g(rng), g(rng)};
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

} // namespace

TEST_CASE("laplacian tridiagonal eigenvalues", "[spectra]")
{
    const auto s = hermitian_eigenvalues(toeplitz_matrix(laplacian_symbol(), {3}));
    REQUIRE(s.values.size() == 3);
    CHECK(s.values[0] == Approx(2.0 - std::sqrt(2.0)).margin(1e-12));
    CHECK(s.values[1] == Approx(2.0).margin(1e-12));
    CHECK(s.values[2] == Approx(2.0 + std::sqrt(2.0)).margin(1e-12));
    CHECK(s.kind == SpectrumKind::eigenvalues);
}

TEST_CASE("laplacian eigenvalues at larger size match the closed form", "[spectra]")
{
    const std::size_t n = 40;
    const auto s = hermitian_eigenvalues(toeplitz_matrix(laplacian_symbol(), {n}));
    for (std::size_t k = 1; k <= n; ++k) {
        const double expected = 2.0 - 2.0 * std::cos(std::numbers::pi * static_cast<double>(k) / (n + 1.0));
        CHECK(s.values[k - 1] == Approx(expected).margin(1e-10));
    }
}

TEST_CASE("trivial eigenvalue cases", "[spectra]")
{
    const auto id = hermitian_eigenvalues(DenseMatrix::identity(5));
    for (double v : id.values) {
        CHECK(v == Approx(1.0));
    }
    const auto d = hermitian_eigenvalues(DenseMatrix::diagonal({3.0, 1.0, 2.0}));
    CHECK(d.values == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("non Hermitian input is rejected", "[spectra]")
{
    DenseMatrix a(2);
    a(0, 1) = 1.0;
    CHECK_THROWS_WITH(hermitian_eigenvalues(a), Catch::Matchers::ContainsSubstring("not Hermitian"));
}

TEST_CASE("singular value examples", "[spectra]")
{
    const auto shift = singular_values(toeplitz_matrix(shift_symbol(1), {3}));
    CHECK(shift.kind == SpectrumKind::singular_values);
    CHECK(shift.values[0] == Approx(0.0).margin(1e-12));
    CHECK(shift.values[1] == Approx(1.0));
    CHECK(shift.values[2] == Approx(1.0));

    const auto pd = singular_values(DenseMatrix::diagonal({1.0, 2.0, 3.0}));
    CHECK(pd.values[0] == Approx(1.0));
    CHECK(pd.values[1] == Approx(2.0));
    CHECK(pd.values[2] == Approx(3.0));

    DenseMatrix nil(2);
    nil(0, 1) = 2.0;
    const auto s = singular_values(nil);
    CHECK(s.values[0] == Approx(0.0).margin(1e-12));
    CHECK(s.values[1] == Approx(2.0));
}

TEST_CASE("closed form oracles on random small Hermitian matrices", "[spectra]")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a2 = random_hermitian(rng, 2);
        const auto r2 = oracle::hermitian_2x2_roots(a2);
        const auto s2 = hermitian_eigenvalues(a2);
        CHECK(s2.values[0] == Approx(r2[0]).margin(1e-10));
        CHECK(s2.values[1] == Approx(r2[1]).margin(1e-10));

        const auto a3 = random_hermitian(rng, 3);
        const auto r3 = oracle::hermitian_3x3_roots(a3);
        const auto s3 = hermitian_eigenvalues(a3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(s3.values[i] == Approx(r3[i]).margin(1e-10));
        }
    }
}

TEST_CASE("trace and Frobenius conservation", "[spectra]")
{
    std::mt19937_64 rng(3);
    for (std::size_t n : {4U, 9U, 17U, 33U}) {
        const auto a = random_hermitian(rng, n);
        const auto s = hermitian_eigenvalues(a);
        double sum = 0.0;
        double sq = 0.0;
        for (double v : s.values) {
            sum += v;
            sq += v * v;
        }
        const double fro = a.frobenius_norm();
        CHECK(std::abs(sum - a.trace().real()) <= 1e-9 * static_cast<double>(n) * fro);
        CHECK(std::abs(sq - fro * fro) <= 1e-9 * static_cast<double>(n) * fro * fro);
        CHECK(std::is_sorted(s.values.begin(), s.values.end()));
    }
}

TEST_CASE("singular values survive a row permutation", "[spectra]")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    DenseMatrix a(12);
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j) {
            a(i, j) = Complex{g(rng), g(rng)};
        }
    }
    const auto s = singular_values(a);
    const auto t = singular_values(a.rows_reversed());
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(s.values[i] == Approx(t.values[i]).margin(1e-10));
    }
}

TEST_CASE("non-finite input is rejected", "[spectra]")
{
    DenseMatrix a(2);
    a(0, 0) = std::nan("");
    CHECK_THROWS(singular_values(a));
    CHECK_THROWS(hermitian_eigenvalues(a));
}
