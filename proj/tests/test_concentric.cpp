#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "clqg/concentric.hpp"
#include "clqg/stats.hpp"

using namespace clqg;
using lattice::Point;
using lattice::Shape;

namespace {

// Independent harmonic-average oracle: assemble the Dirichlet system on the
// Delta^k box densely and solve it with Eigen.
double harmonic_oracle(const gff::FieldSample& f, const lattice::ConcentricFrame& fr, int k) {
    const int R = fr.radius[static_cast<std::size_t>(k)];
    const int w = 2 * R + 1;
    const int V = w * w;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(V, V);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(V);
    auto id = [&](int dx, int dy) { return (dy + R) * w + (dx + R); };
    for (int dy = -R; dy <= R; ++dy)
        for (int dx = -R; dx <= R; ++dx) {
            const int i = id(dx, dy);
            L(i, i) = 4.0;
            const int ddx[4] = {1, -1, 0, 0}, ddy[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int nx = dx + ddx[d], ny = dy + ddy[d];
                if (std::abs(nx) <= R && std::abs(ny) <= R)
                    L(i, id(nx, ny)) = -1.0;
                else
                    rhs(i) += f.at(Point{fr.root.x + nx, fr.root.y + ny});
            }
        }
    const Eigen::VectorXd u = L.ldlt().solve(rhs);
    return u(id(0, 0));
}

} // namespace

TEST_CASE("spine walk matches the dense harmonic oracle", "[concentric]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 200);
    const auto fr = lattice::build_frame(dom, Point{100, 100}, 0.14);
    REQUIRE(fr.kappa == 2);
    const auto f = gff::sample_spectral(dom, 31);
    const auto S = concentric::spine_walk(f, fr);

    REQUIRE(S[0] == 0.0);
    REQUIRE(S[static_cast<std::size_t>(fr.n)] == f.at(fr.root));
    for (int k = 1; k < fr.n; ++k)
        REQUIRE(S[static_cast<std::size_t>(k)] ==
                Catch::Approx(harmonic_oracle(f, fr, k)).margin(1e-8));
}

TEST_CASE("harmonic average of a constant boundary is the constant", "[concentric]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 100);
    const auto fr = lattice::build_frame(dom, Point{50, 50}, 0.4);
    gff::FieldSample f;
    f.domain = &dom;
    f.values.assign(dom.size(), 2.75);
    const auto S = concentric::spine_walk(f, fr);
    for (int k = 1; k <= fr.n; ++k)
        REQUIRE(S[static_cast<std::size_t>(k)] == Catch::Approx(2.75).margin(1e-9));
}

TEST_CASE("spine walk is linear in the field", "[concentric]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 100);
    const auto fr = lattice::build_frame(dom, Point{50, 50}, 0.4);
    const auto f1 = gff::sample_spectral(dom, 1);
    const auto f2 = gff::sample_spectral(dom, 2);
    gff::FieldSample sum;
    sum.domain = &dom;
    sum.values.resize(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) sum.values[i] = f1.values[i] + f2.values[i];

    const auto S1 = concentric::spine_walk(f1, fr);
    const auto S2 = concentric::spine_walk(f2, fr);
    const auto Ss = concentric::spine_walk(sum, fr);
    for (int k = 0; k <= fr.n; ++k)
        REQUIRE(Ss[static_cast<std::size_t>(k)] ==
                Catch::Approx(S1[static_cast<std::size_t>(k)] + S2[static_cast<std::size_t>(k)])
                    .margin(1e-9));
}

TEST_CASE("step variances: endpoints, growth, 4k law", "[concentric]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 1024);
    const auto fr = lattice::build_frame(dom, Point{512, 512}, 0.4);
    const auto t = concentric::step_variances(nullptr, fr);

    REQUIRE(t[0] == 0.0);
    for (int k = 1; k <= fr.n; ++k)
        REQUIRE(t[static_cast<std::size_t>(k)] > t[static_cast<std::size_t>(k) - 1]);

    // t_n = alpha^2 (G(x0,x0) - 1), the singleton has Green value 1
    const double gxx = fft::green_diag_rect(dom.width, dom.height, 512 - dom.x_lo,
                                            512 - dom.y_lo);
    const double a2 = chaos::alpha_const * chaos::alpha_const;
    REQUIRE(t[static_cast<std::size_t>(fr.n)] == Catch::Approx(a2 * (gxx - 1.0)).epsilon(1e-12));

    for (int k = 2; k <= fr.n - 2; ++k)
        REQUIRE(std::abs(t[static_cast<std::size_t>(k)] - 4.0 * k) <= 3.0);
}

TEST_CASE("hat and tilde walks differ by the documented envelope", "[concentric]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 1024);
    const auto fr = lattice::build_frame(dom, Point{512, 512}, 0.4);
    const auto f = gff::sample_spectral(dom, 12);
    const auto m = chaos::build_measure(f);
    const auto st = concentric::compute_stats(f, m, fr, nullptr, 0.2, 10);

    const double c = 10.0;
    for (int k = 1; k < fr.n; ++k) {
        const double diff = st.S_hat[static_cast<std::size_t>(k)] -
                            st.S_tilde[static_cast<std::size_t>(k)];
        const double env = c * (1.0 + std::log(static_cast<double>(std::min(k, fr.n - k))));
        REQUIRE(diff >= -c);
        REQUIRE(diff <= env);
    }
}

TEST_CASE("Monte Carlo walk variances match the deterministic t_k", "[concentric]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 256);
    const auto fr = lattice::build_frame(dom, Point{128, 128}, 0.4);
    const auto t = concentric::step_variances(nullptr, fr);

    const int n_rep = 1500;
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(fr.n) + 1);
    for (int rep = 0; rep < n_rep; ++rep) {
        const auto f = gff::sample_spectral(dom, rng::derive_seed(7100, rep));
        const auto S = concentric::spine_walk(f, fr);
        for (int k = 1; k <= fr.n; ++k)
            samples[static_cast<std::size_t>(k)].push_back(chaos::alpha_const *
                                                           S[static_cast<std::size_t>(k)]);
    }
    for (int k = 1; k < fr.n; ++k) {
        const double mc = stats::variance(samples[static_cast<std::size_t>(k)]);
        REQUIRE(mc == Catch::Approx(t[static_cast<std::size_t>(k)]).epsilon(0.12));
    }
}

TEST_CASE("xi reconstructs annulus masses exactly", "[concentric]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 128);
    const auto fr = lattice::build_frame(dom, Point{64, 64}, 0.4);
    const auto f = gff::sample_spectral(dom, 8);
    const auto m = chaos::build_measure(f);
    const auto S = concentric::spine_walk(f, fr);

    for (int k = 1; k <= fr.n; ++k) {
        const double mass = chaos::annulus_mass(m, fr, k);
        if (!(mass > 0.0)) continue;
        const double xi = concentric::extract_xi(m, S, fr, k);
        const double rebuilt =
            std::exp(chaos::alpha_const * (S[static_cast<std::size_t>(k)] - m.meta.m_N +
                                           chaos::m_centering(128.0 * std::exp(-k))) +
                     xi);
        REQUIRE(rebuilt == Catch::Approx(mass).epsilon(1e-12));
    }
}

TEST_CASE("xi of the flat field has the closed form", "[concentric]") {
    const auto dom = lattice::discretize(Shape::rectangle(0, 0, 1, 1), 128);
    const auto fr = lattice::build_frame(dom, Point{64, 64}, 0.4);
    gff::FieldSample f;
    f.domain = &dom;
    f.values.assign(dom.size(), 0.0);
    const auto m = chaos::build_measure(f);
    const auto S = concentric::spine_walk(f, fr);

    for (int k = 1; k <= fr.n; ++k) {
        const auto count = fr.annulus_sites(k).size();
        if (count == 0) continue;
        const double expect = std::log(static_cast<double>(count) / std::log(128.0)) -
                              chaos::alpha_const * chaos::m_centering(128.0 * std::exp(-k));
        REQUIRE(concentric::extract_xi(m, S, fr, k) == Catch::Approx(expect).margin(1e-10));
    }
}

TEST_CASE("control variable definition cases", "[concentric]") {
    // all small: K = 0
    std::vector<double> xi{0.0, 0.5, 0.9, 1.0, 0.2};
    REQUIRE(concentric::control_variable(xi, 0.2, 4, 4) == 0);

    // single violation at k = 5 with ell = 10 and deep n: K = 6
    std::vector<double> xi2(11, 0.1);
    xi2[5] = 99.0;
    REQUIRE(concentric::control_variable(xi2, 0.2, 10, 10) == 6);

    // violation at the last checked index forces the proviso
    std::vector<double> xi3(11, 0.1);
    xi3[10] = 99.0;
    REQUIRE(concentric::control_variable(xi3, 0.2, 10, 20) == std::min(10, 20 / 2) + 1);

    REQUIRE_THROWS_AS(concentric::control_variable(xi, 0.3, 4, 4), std::invalid_argument);
}
