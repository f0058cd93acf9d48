#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clqg/gauge.hpp"
#include "support/quadrature_oracle.hpp"

using namespace clqg;
using gauge::GaugeTriple;
using gauge::IntegralClass;
using gauge::ParametricPsi;
using gauge::TabulatedPsi;

namespace {

GaugeTriple parametric(double theta, double c = 1.0, double scale = 1.0) {
    return GaugeTriple(ParametricPsi{theta, c}, scale);
}

TabulatedPsi tabulate(double (*f)(double), double t_lo, double t_hi, int n) {
    TabulatedPsi tab;
    for (int i = 0; i < n; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (n - 1));
        tab.t.push_back(t);
        tab.psi.push_back(f(t));
    }
    return tab;
}

} // namespace

TEST_CASE("eval_gamma matches direct substitution", "[gauge]") {
    const auto g = parametric(2.0, 1.5, 1.0);
    REQUIRE(gauge::eval_gamma(g, 0.0) ==
            Catch::Approx(1.5 * std::pow(std::log(2.0), -2.0)).epsilon(1e-12));

    // doubling gamma_scale doubles gamma at every t
    const auto g2 = g.with_gamma_scale(2.0);
    for (double t : {0.0, 0.5, 3.0, 100.0, 1e5})
        REQUIRE(gauge::eval_gamma(g2, t) == Catch::Approx(2.0 * gauge::eval_gamma(g, t)));

    // theta = 1, c = 1, t = e - 1: log(1+t) = 1, gamma = sqrt(e)
    const auto g1 = parametric(1.0);
    REQUIRE(gauge::eval_gamma(g1, std::exp(1.0) - 1.0) ==
            Catch::Approx(std::sqrt(std::exp(1.0))).epsilon(1e-12));

    REQUIRE_THROWS_AS(gauge::eval_gamma(g, -0.5), gauge::DomainError);
}

TEST_CASE("eval_phi against the independent quadrature oracle", "[gauge]") {
    const auto g = parametric(2.0);
    const double r = std::exp(-1.0);
    const double phi = gauge::eval_phi(g, r);
    const double oracle = clqg_test::improper_integral(
        [&](double t) { return std::exp(-std::sqrt(1.0 + t) *
                                        std::pow(std::log1p(t), -2.0)); },
        std::log(1.0 / r));
    REQUIRE(phi == Catch::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("eval_phi oracle agreement on a (theta, r) grid", "[gauge]") {
    for (double theta : {0.5, 0.8, 1.2, 1.5, 2.0}) {
        const auto g = parametric(theta);
        for (double r : {0.05, 0.4}) {
            const double phi = gauge::eval_phi(g, r);
            const double oracle = clqg_test::improper_integral(
                [&](double t) { return std::exp(-gauge::eval_gamma(g, t)); }, std::log(1.0 / r));
            REQUIRE(phi == Catch::Approx(oracle).epsilon(1e-5));
        }
    }
}

TEST_CASE("constant-slope gamma fixture integrates in closed form", "[gauge]") {
    // gamma(t) = t gives phi(r) = integral_{log 1/r}^inf e^{-t} dt = r.
    for (double r : {std::exp(-1.0), 0.2, 0.05}) {
        const double phi = gauge::phi_from_gamma([](double t) { return t; }, std::log(1.0 / r));
        REQUIRE(std::abs(phi - r) <= 1e-6 * r);
    }
}

TEST_CASE("phi is monotone in r and in the gamma scale", "[gauge]") {
    const auto g = parametric(2.0);
    REQUIRE(gauge::eval_phi(g, 0.1) < gauge::eval_phi(g, 0.2));

    double prev = 0.0;
    for (double r : {0.01, 0.05, 0.1, 0.3, 0.6, 0.9}) {
        const double phi = gauge::eval_phi(g, r);
        REQUIRE(phi > prev);
        prev = phi;
    }

    const auto g2 = g.with_gamma_scale(2.0);
    for (double r : {0.02, 0.1, 0.5, 0.9})
        REQUIRE(gauge::eval_phi(g2, r) <= gauge::eval_phi(g, r));
}

TEST_CASE("phi vanishes along r down to 0", "[gauge]") {
    const auto g = parametric(0.5);
    const double big = gauge::eval_phi(g, 0.5);
    const double small = gauge::eval_phi(g, 1e-100);
    REQUIRE(small < big);
    REQUIRE(small < 0.2 * big);
}

TEST_CASE("Motoo integral classification", "[gauge]") {
    REQUIRE(gauge::classify_I_psi(parametric(0.5)) == IntegralClass::Divergent);
    REQUIRE(gauge::classify_I_psi(parametric(1.0)) == IntegralClass::Divergent);
    REQUIRE(gauge::classify_I_psi(parametric(2.0)) == IntegralClass::Convergent);

    // invariance under positive rescaling of psi
    REQUIRE(gauge::classify_I_psi(parametric(0.5, 2.0)) == IntegralClass::Divergent);
    REQUIRE(gauge::classify_I_psi(parametric(2.0, 2.0)) == IntegralClass::Convergent);

    // tabulated psi(t) = 1/(1+t): integral of dt/(t(1+t)) converges
    const GaugeTriple tab(tabulate([](double t) { return 1.0 / (1.0 + t); }, 1e-3, 1e6, 600),
                          1.0, 0.0, /*force_accept=*/true);
    REQUIRE(gauge::classify_I_psi(tab) == IntegralClass::Convergent);

    // a short table cannot decide
    const GaugeTriple shorttab(
        tabulate([](double t) { return std::pow(std::log1p(t), -0.5); }, 1.0, 50.0, 40), 1.0, 0.0,
        true);
    REQUIRE(gauge::classify_I_psi(shorttab) == IntegralClass::Inconclusive);
}

TEST_CASE("validation rejects inadmissible gauges", "[gauge]") {
    // increasing psi
    TabulatedPsi inc;
    inc.t = {1.0, 10.0, 100.0, 1e4, 1e6};
    inc.psi = {1.0, 1.1, 1.2, 1.3, 1.4};
    REQUIRE_THROWS_AS(GaugeTriple(inc), gauge::GaugeNotValidated);

    // psi = 1/sqrt(1+t) keeps gamma flat; rejected unless forced
    auto flat = tabulate([](double t) { return 1.0 / std::sqrt(1.0 + t); }, 1e-3, 1e6, 400);
    REQUIRE_THROWS_AS(GaugeTriple(flat), gauge::GaugeNotValidated);
    const GaugeTriple forced(flat, 1.0, 0.0, /*force_accept=*/true);
    REQUIRE(forced.validated());

    // a gamma this close to zero cannot be truncated within the cap
    const GaugeTriple slow(ParametricPsi{1.0, 1.0}, 1e-8, 0.0, /*force_accept=*/true);
    REQUIRE_THROWS_AS(gauge::eval_phi(slow, 0.5), gauge::TailNotConvergent);
}

TEST_CASE("eval_phi argument checks", "[gauge]") {
    const auto g = parametric(2.0);
    REQUIRE_THROWS_AS(gauge::eval_phi(g, 0.0), gauge::DomainError);
    REQUIRE_THROWS_AS(gauge::eval_phi(g, 1.0), gauge::DomainError);
}

TEST_CASE("power gauge basics", "[gauge]") {
    gauge::PowerGauge p{1.5};
    REQUIRE(p.phi(0.0) == 0.0);
    REQUIRE(p.phi(0.25) == Catch::Approx(std::pow(0.25, 1.5)));
    REQUIRE(p.phi(0.1) < p.phi(0.2));
}
