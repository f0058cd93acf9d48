#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clqg/gff.hpp"
#include "clqg/stats.hpp"

using namespace clqg;
using lattice::Point;
using lattice::Shape;

namespace {

const lattice::LatticeDomain& box16() {
    static const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 19);
    return dom;
}

const gff::GreenOperator& green16() {
    static const auto G = gff::green(box16(), gff::GreenKind::Dense);
    return G;
}

} // namespace

TEST_CASE("samplers are deterministic in the seed", "[sampler]") {
    const auto& dom = box16();
    const auto a = gff::sample(dom, green16(), 42);
    const auto b = gff::sample(dom, green16(), 42);
    REQUIRE(a.values == b.values);
    const auto c = gff::sample_spectral(dom, 42);
    const auto d = gff::sample_spectral(dom, 42);
    REQUIRE(c.values == d.values);
    REQUIRE(gff::sample(dom, green16(), 43).values != a.values);
}

TEST_CASE("exact sampler variance tracks G on the diagonal", "[sampler]") {
    const auto& dom = box16();
    const auto center = static_cast<std::size_t>(
        dom.site_index(dom.x_lo + dom.width / 2, dom.y_lo + dom.height / 2));
    const int n = 4000;
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i)
        vals[static_cast<std::size_t>(i)] =
            gff::sample(dom, green16(), rng::derive_seed(7, static_cast<std::uint64_t>(i)))
                .values[center];
    const double var = stats::variance(vals);
    REQUIRE(std::abs(stats::mean(vals)) < 4.0 * std::sqrt(green16().diag(center) / n));
    REQUIRE(var == Catch::Approx(green16().diag(center)).epsilon(0.10));
}

TEST_CASE("spectral and exact samplers share their law", "[sampler]") {
    const auto& dom = box16();
    const int n = 4000;
    rng::Rng pick(3023ULL);
    std::vector<std::size_t> probes;
    for (int i = 0; i < 6; ++i)
        probes.push_back(static_cast<std::size_t>(pick.uniform() * dom.size()));

    std::vector<std::vector<double>> ex(probes.size()), sp(probes.size());
    for (int i = 0; i < n; ++i) {
        const auto fe = gff::sample(dom, green16(), rng::derive_seed(100, i));
        const auto fs = gff::sample_spectral(dom, rng::derive_seed(200, i));
        for (std::size_t p = 0; p < probes.size(); ++p) {
            ex[p].push_back(fe.values[probes[p]]);
            sp[p].push_back(fs.values[probes[p]]);
        }
    }
    for (std::size_t p = 0; p < probes.size(); ++p) {
        REQUIRE(stats::ks_two_sample(ex[p], sp[p]).p_value > 0.01);
        // variances within 4 empirical standard errors
        const double ve = stats::variance(ex[p]), vs = stats::variance(sp[p]);
        const double se = ve * std::sqrt(2.0 / n) * std::sqrt(2.0);
        REQUIRE(std::abs(ve - vs) <= 4.0 * se);
    }
}

TEST_CASE("two independent spectral samples add their variances", "[sampler]") {
    const auto& dom = box16();
    const auto center = static_cast<std::size_t>(
        dom.site_index(dom.x_lo + dom.width / 2, dom.y_lo + dom.height / 2));
    const int n = 4000;
    std::vector<double> sums(n);
    for (int i = 0; i < n; ++i) {
        const auto a = gff::sample_spectral(dom, rng::derive_seed(300, i));
        const auto b = gff::sample_spectral(dom, rng::derive_seed(400, i));
        sums[static_cast<std::size_t>(i)] = a.values[center] + b.values[center];
    }
    REQUIRE(stats::variance(sums) == Catch::Approx(2.0 * green16().diag(center)).epsilon(0.12));
}

TEST_CASE("conditioning pins the root exactly", "[sampler]") {
    const auto& dom = box16();
    rng::Rng pick(11ULL);
    for (int rep = 0; rep < 20; ++rep) {
        const auto ridx = static_cast<std::size_t>(pick.uniform() * dom.size());
        const Point root = dom.sites[ridx];
        const double a = -5.0 + 10.0 * pick.uniform();
        const auto f = gff::condition_root(dom, &green16(), root, a,
                                           rng::derive_seed(500, static_cast<std::uint64_t>(rep)));
        REQUIRE(f.at(root) == a);
        REQUIRE(f.provenance.conditioning.has_value());
    }
}

TEST_CASE("conditional mean and variance match the Gaussian formulas", "[sampler]") {
    const auto& dom = box16();
    const auto& G = green16();
    const auto r = static_cast<std::size_t>(
        dom.site_index(dom.x_lo + dom.width / 2, dom.y_lo + dom.height / 2));
    const Point root = dom.sites[r];
    const auto y = static_cast<std::size_t>(dom.site_index(root.x + 1, root.y));

    const double a = 3.0;
    const int n = 10000;
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i)
        vals[static_cast<std::size_t>(i)] =
            gff::condition_root(dom, &G, root, a, rng::derive_seed(600, i)).values[y];

    const double mean_expect = a * G.entry(y, r) / G.entry(r, r);
    const double var_expect = G.entry(y, y) - G.entry(y, r) * G.entry(y, r) / G.entry(r, r);
    REQUIRE(std::abs(stats::mean(vals) - mean_expect) <= 3.0 * std::sqrt(var_expect / n));
    REQUIRE(stats::variance(vals) == Catch::Approx(var_expect).epsilon(0.05));
}

TEST_CASE("filter_max thresholds", "[sampler]") {
    const auto& dom = box16();
    const auto f = gff::sample(dom, green16(), 9);
    REQUIRE(gff::filter_max(f, std::numeric_limits<double>::infinity()));
    const Point root = dom.sites[dom.size() / 2];
    const auto fc = gff::condition_root(dom, &green16(), root, 50.0, 10);
    REQUIRE(!gff::filter_max(fc, 49.0));
}
