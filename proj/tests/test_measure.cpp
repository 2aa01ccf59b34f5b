#include <qlim/measure.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using Catch::Approx;
using namespace qlim;

namespace {

DiscreteMeasure eight_point_measure()
{
    const std::vector<double> tuple{-1.0, -0.5, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0};
    return empirical_from_samples(tuple);
}

} // namespace

TEST_CASE("empirical measure collapses ties into atoms", "[measure]")
{
    const auto m = eight_point_measure();
    REQUIRE(m.atom_count() == 5);
    REQUIRE(m.total() == 8);
    CHECK(m.mass(3) == Approx(2.0 / 8.0));
    CHECK(m.mass(4) == Approx(3.0 / 8.0));
    CHECK(m.support_min() == -1.0);
    CHECK(m.support_max() == 1.0);
}

TEST_CASE("cdf of the eight point measure", "[measure]")
{
    const auto m = eight_point_measure();
    CHECK(m.cdf(-2.0) == 0.0);
    CHECK(m.cdf(0.0) == Approx(3.0 / 8.0));
    CHECK(m.cdf(0.25) == Approx(3.0 / 8.0));
    CHECK(m.cdf(0.5) == Approx(5.0 / 8.0));
    CHECK(m.cdf(1.0) == 1.0);
    CHECK(m.cdf(7.0) == 1.0);
}

TEST_CASE("quantile at j/d reproduces the sorted tuple", "[measure]")
{
    const std::vector<double> tuple{-1.0, -0.5, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0};
    const auto m = eight_point_measure();
    for (std::size_t j = 1; j <= tuple.size(); ++j) {
        CHECK(m.quantile(static_cast<double>(j) / 8.0) == tuple[j - 1]);
    }
    CHECK(m.quantile(0.0) == -1.0);
}

TEST_CASE("quantile is left continuous at cdf jumps", "[measure]")
{
    const auto m = eight_point_measure();
    CHECK(m.quantile(3.0 / 8.0) == 0.0);
    CHECK(m.quantile(3.0 / 8.0 + 1e-12) == 0.5);
    CHECK(m.quantile(5.0 / 8.0) == 0.5);
    CHECK(m.quantile(5.0 / 8.0 + 1e-12) == 1.0);
}

TEST_CASE("quantile identity on random tuples with ties", "[measure]")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> len(1, 40);
    std::uniform_int_distribution<int> lattice(-5, 5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> tuple(static_cast<std::size_t>(len(rng)));
        for (double& v : tuple) {
            v = 0.25 * lattice(rng);
        }
        std::sort(tuple.begin(), tuple.end());
        const auto m = empirical_from_samples(tuple);
        const double d = static_cast<double>(tuple.size());
        for (std::size_t j = 1; j <= tuple.size(); ++j) {
            REQUIRE(m.quantile(static_cast<double>(j) / d) == tuple[j - 1]);
        }
    }
}

TEST_CASE("galois relations hold on a grid", "[measure]")
{
    const auto m = eight_point_measure();
    for (int i = 1; i <= 64; ++i) {
        const double u = i / 64.0;
        CHECK(m.cdf(m.quantile(u)) >= u - 1e-15);
        for (int k = -10; k <= 10; ++k) {
            const double v = 0.15 * k;
            CHECK((m.quantile(u) <= v) == (u <= m.cdf(v)));
        }
    }
    for (int k = -10; k <= 10; ++k) {
        const double v = 0.15 * k;
        if (v >= m.support_min()) {
            CHECK(m.quantile(m.cdf(v)) <= v);
        }
    }
}

TEST_CASE("measure of the quantile sublevel set equals the cdf", "[measure]")
{
    const auto m = eight_point_measure();
    for (int k = -10; k <= 10; ++k) {
        const double v = 0.15 * k;
        CHECK(quantile_sublevel_measure(m, v) == Approx(m.cdf(v)));
    }
}

TEST_CASE("invalid measure inputs are rejected", "[measure]")
{
    const std::vector<double> empty;
    CHECK_THROWS_AS(empirical_from_samples(empty), std::invalid_argument);
    const std::vector<double> bad{0.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(empirical_from_samples(bad), std::invalid_argument);
    const auto m = eight_point_measure();
    CHECK_THROWS_AS(m.quantile(-0.1), std::out_of_range);
    CHECK_THROWS_AS(m.quantile(1.5), std::out_of_range);
    CHECK_THROWS(m.cdf(std::numeric_limits<double>::quiet_NaN()));
    CHECK_THROWS(m.quantile(std::numeric_limits<double>::quiet_NaN()));
}

TEST_CASE("arcsine law cdf and quantile are inverse", "[measure]")
{
    const auto law = arcsine_law();
    CHECK(law.support_min == 0.0);
    CHECK(law.support_max == 1.0);
    CHECK(law.cdf(0.5) == Approx(0.5));
    CHECK(law.quantile(0.5) == Approx(0.5));
    for (int i = 1; i < 100; ++i) {
        const double p = i / 100.0;
        CHECK(law.cdf(law.quantile(p)) == Approx(p).margin(1e-12));
        CHECK(law.quantile(p) == Approx(std::pow(std::sin(std::numbers::pi * p / 2.0), 2)).margin(1e-12));
    }
    CHECK(law.cdf(-1.0) == 0.0);
    CHECK(law.cdf(2.0) == 1.0);
}

TEST_CASE("uniform and point mass laws", "[measure]")
{
    const auto u = uniform_law(-2.0, 3.0);
    CHECK(u.cdf(0.5) == Approx(0.5));
    CHECK(u.quantile(0.2) == Approx(-1.0));
    CHECK_THROWS_AS(uniform_law(1.0, 1.0), std::invalid_argument);
    const auto c = point_mass_law(0.7);
    CHECK(c.cdf(0.69) == 0.0);
    CHECK(c.cdf(0.7) == 1.0);
    CHECK(c.quantile(0.3) == 0.7);
}

TEST_CASE("quantile function wraps either kind", "[measure]")
{
    const QuantileFunction step(eight_point_measure());
    const QuantileFunction smooth(arcsine_law());
    CHECK(step.kind() == QuantileKind::step);
    CHECK(smooth.kind() == QuantileKind::analytic);
    CHECK(step(0.5) == 0.5);
    CHECK(smooth(0.5) == Approx(0.5));
    CHECK_THROWS(smooth.measure());
    const auto sb = support_bounds(step.measure());
    CHECK(sb.alpha == -1.0);
    CHECK(sb.beta == 1.0);
}
