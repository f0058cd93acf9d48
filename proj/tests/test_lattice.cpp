#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "clqg/lattice.hpp"

using namespace clqg;
using lattice::Point;
using lattice::Shape;

namespace {

// Brute-force membership oracle for rectangles: the distance formula is
// written out directly in lattice units, independent of Shape's cover
// machinery.
std::set<Point> rect_scan_oracle(double x0, double y0, double w, double h, int N) {
    std::set<Point> out;
    for (int y = -2 * N; y <= 2 * N; ++y)
        for (int x = -2 * N; x <= 2 * N; ++x) {
            const double d = std::min(std::min(x - x0 * N, (x0 + w) * N - x),
                                      std::min(y - y0 * N, (y0 + h) * N - y));
            if (d > 1.0) out.insert(Point{x, y});
        }
    return out;
}

} // namespace

TEST_CASE("unit square discretization matches the scan oracle", "[lattice]") {
    for (int N : {4, 8, 13, 32}) {
        const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), N);
        const auto oracle = rect_scan_oracle(0, 0, 1, 1, N);
        REQUIRE(dom.sites.size() == oracle.size());
        for (const auto& p : dom.sites) REQUIRE(oracle.count(p) == 1);
    }
    // N = 8 explicitly: x, y in {2..6}
    const auto dom8 = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 8);
    REQUIRE(dom8.sites.size() == 25);
    for (const auto& p : dom8.sites) {
        REQUIRE((p.x >= 2 && p.x <= 6));
        REQUIRE((p.y >= 2 && p.y <= 6));
    }
    REQUIRE(dom8.is_rectangle());
}

TEST_CASE("tiny scales give an empty domain", "[lattice]") {
    REQUIRE(rect_scan_oracle(0, 0, 1, 1, 1).empty());
    REQUIRE_THROWS_AS(lattice::discretize(Shape::rectangle(0, 0, 1, 1), 1),
                      lattice::EmptyDomain);
}

TEST_CASE("translation equivariance for integer shifts", "[lattice]") {
    const int N = 16;
    const auto base = lattice::discretize(Shape::rectangle(0, 0, 1, 1), N);
    const auto moved = lattice::discretize(Shape::rectangle(3, -2, 1, 1), N);
    REQUIRE(base.sites.size() == moved.sites.size());
    for (std::size_t i = 0; i < base.sites.size(); ++i) {
        REQUIRE(moved.sites[i].x == base.sites[i].x + 3 * N);
        REQUIRE(moved.sites[i].y == base.sites[i].y - 2 * N);
    }
}

TEST_CASE("L-shaped union discretizes and keeps the 4-neighbor closure", "[lattice]") {
    Shape ell;
    ell.boxes = {lattice::Rect{0, 0, 2, 1}, lattice::Rect{0, 0, 1, 2}};
    const auto dom = lattice::discretize(ell, 12);
    REQUIRE(!dom.is_rectangle());
    REQUIRE(dom.size() > 0);
    // every site neighbor is a site or a boundary vertex
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    std::set<Point> bset(dom.boundary.begin(), dom.boundary.end());
    for (const auto& p : dom.sites)
        for (int d = 0; d < 4; ++d) {
            const Point q{p.x + dx[d], p.y + dy[d]};
            REQUIRE((dom.contains(q.x, q.y) || bset.count(q) == 1));
        }
    // interior of the notch corner must not be a site
    REQUIRE(!dom.contains(12 + 6, 12 + 6));
}

TEST_CASE("delta interior matches a brute-force lattice scan", "[lattice]") {
    const int N = 32;
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), N);
    const auto got = lattice::delta_interior(dom, 0.1);

    std::set<Point> sset(dom.sites.begin(), dom.sites.end());
    std::vector<Point> expect;
    for (const auto& p : dom.sites) {
        int best = 1 << 20;
        for (int y = p.y - 16; y <= p.y + 16; ++y)
            for (int x = p.x - 16; x <= p.x + 16; ++x)
                if (!sset.count(Point{x, y}))
                    best = std::min(best, lattice::chebyshev(p, Point{x, y}));
        if (static_cast<double>(best) > 0.1 * N) expect.push_back(p);
    }
    REQUIRE(got == expect);
}

TEST_CASE("delta interior empties at delta = 1/2 and shrinks with delta", "[lattice]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 32);
    REQUIRE(lattice::delta_interior(dom, 0.5).empty());
    const auto a = lattice::delta_interior(dom, 0.1);
    const auto b = lattice::delta_interior(dom, 0.25);
    REQUIRE(b.size() < a.size());
    std::set<Point> aset(a.begin(), a.end());
    for (const auto& p : b) REQUIRE(aset.count(p) == 1);
}

TEST_CASE("kappa thresholds", "[lattice]") {
    REQUIRE(lattice::kappa_of_delta(0.05) == 3); // e^-3 < 0.05 <= e^-2
    REQUIRE(lattice::kappa_of_delta(0.4) == 1);
    REQUIRE(lattice::kappa_of_delta(0.12) == 3);
    REQUIRE(lattice::kappa_of_delta(0.14) == 2);
}

TEST_CASE("frame depth and shells", "[lattice]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 1000);
    const Point root{500, 500};
    const auto fr = lattice::build_frame(dom, root, 0.05);
    REQUIRE(fr.kappa == 3);
    REQUIRE(fr.n == 4); // 1000 e^-7 < 1 <= 1000 e^-6
    REQUIRE(fr.radius[fr.n] == 0);
    REQUIRE(fr.annulus_sites(fr.n).size() == 1);
    REQUIRE(fr.annulus_sites(fr.n)[0] == root);
}

TEST_CASE("annuli partition the domain", "[lattice]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 64);
    const auto fr = lattice::build_frame(dom, Point{32, 32}, 0.4);
    std::set<Point> seen;
    std::size_t total = 0;
    for (int k = 0; k <= fr.n; ++k) {
        for (const auto& p : fr.annulus_sites(k)) {
            REQUIRE(seen.insert(p).second); // disjoint
            ++total;
        }
    }
    REQUIRE(total == dom.size());
    // nesting
    for (int k = 0; k + 1 <= fr.n; ++k)
        REQUIRE(fr.radius[static_cast<std::size_t>(k) + 1] <=
                fr.radius[static_cast<std::size_t>(k)]);
}

TEST_CASE("roots outside the delta-interior are rejected", "[lattice]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 64);
    REQUIRE_THROWS_AS(lattice::build_frame(dom, Point{3, 32}, 0.4), lattice::RootTooClose);
    REQUIRE_THROWS_AS(lattice::build_frame(dom, Point{-5, -5}, 0.4), lattice::RootTooClose);
}
