#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clqg/rng.hpp"
#include "clqg/stats.hpp"

using namespace clqg;

TEST_CASE("moments and median", "[stats]") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    REQUIRE(stats::mean(v) == Catch::Approx(2.5));
    REQUIRE(stats::variance(v) == Catch::Approx(5.0 / 3.0));
    REQUIRE(stats::median(v) == Catch::Approx(2.5));
    REQUIRE(stats::median({3.0, 1.0, 2.0}) == Catch::Approx(2.0));
}

TEST_CASE("linear fit recovers an exact line", "[stats]") {
    std::vector<double> x{0, 1, 2, 3, 4}, y;
    for (double xi : x) y.push_back(2.5 * xi - 1.0);
    const auto f = stats::linear_fit(x, y);
    REQUIRE(f.slope == Catch::Approx(2.5).margin(1e-12));
    REQUIRE(f.intercept == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("spearman on monotone data", "[stats]") {
    std::vector<double> x{1, 2, 3, 4, 5}, inc{2, 9, 11, 30, 31}, dec{5, 4, 3, 1, 0};
    REQUIRE(stats::spearman_rho(x, inc) == Catch::Approx(1.0));
    REQUIRE(stats::spearman_rho(x, dec) == Catch::Approx(-1.0));
}

TEST_CASE("two-sample KS accepts equal laws and rejects separated ones", "[stats]") {
    rng::Rng r(77ULL);
    std::vector<double> a, b, c;
    for (int i = 0; i < 4000; ++i) {
        a.push_back(r.gaussian());
        b.push_back(r.gaussian());
        c.push_back(r.gaussian() + 0.5);
    }
    REQUIRE(stats::ks_two_sample(a, b).p_value > 0.01);
    REQUIRE(stats::ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("chi-square tail values", "[stats]") {
    REQUIRE(stats::chi2_sf(0.0, 3.0) == Catch::Approx(1.0));
    // classic 5% critical value of chi2_1
    REQUIRE(stats::chi2_sf(3.841458820694124, 1.0) == Catch::Approx(0.05).margin(1e-6));
    // gammq(1/2, x) = erfc(sqrt(x))
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0})
        REQUIRE(stats::gammq(0.5, x) == Catch::Approx(std::erfc(std::sqrt(x))).epsilon(1e-10));
}
