#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "clqg/chaos.hpp"
#include "clqg/fft.hpp"
#include "clqg/gff.hpp"
#include "clqg/green.hpp"
#include "clqg/lattice.hpp"

// Spine observables of a field along a concentric frame: the harmonic-
// average random walk S_k, its deterministic variances t_k = Var(alpha S_k),
// the recentered walks S_hat/S_tilde, and the annulus control variables
// Xi_k defined through  log Z_N(A_k) = alpha [S_k - m_N + m_{N e^{-k}}] + Xi_k.

namespace clqg::concentric {

struct EmptyAnnulus : std::runtime_error {
    explicit EmptyAnnulus(const std::string& what) : std::runtime_error(what) {}
};

// S_k = harmonic extension of h|_{boundary of Delta^k} evaluated at the
// root: a Dirichlet solve on the Delta^k box with ring data. S_0 = 0 (the
// field vanishes on the domain boundary), S_n = h(root) exactly.
inline std::vector<double> spine_walk(const gff::FieldSample& field,
                                      const lattice::ConcentricFrame& frame) {
    const auto& dom = *frame.domain;
    if (field.domain != &dom) throw std::invalid_argument("spine_walk: field/frame mismatch");
    const int n = frame.n;
    std::vector<double> S(static_cast<std::size_t>(n) + 1, 0.0);
    S[0] = 0.0;
    S[static_cast<std::size_t>(n)] = field.at(frame.root);

    for (int k = 1; k < n; ++k) {
        const int R = frame.radius[static_cast<std::size_t>(k)];
        const int w = 2 * R + 1;
        std::vector<double> rhs(static_cast<std::size_t>(w) * w, 0.0);
        // Boundary ring contributions fold into the right-hand side.
        auto ring_value = [&](int gx, int gy) -> double {
            const auto i = dom.site_index(gx, gy);
            if (i < 0)
                throw gff::SolverFailure("spine_walk: annulus boundary leaves the domain");
            return field.values[static_cast<std::size_t>(i)];
        };
        for (int d = -R; d <= R; ++d) {
            // left/right walls
            rhs[static_cast<std::size_t>(d + R) * w + 0] += ring_value(frame.root.x - R - 1, frame.root.y + d);
            rhs[static_cast<std::size_t>(d + R) * w + (w - 1)] += ring_value(frame.root.x + R + 1, frame.root.y + d);
            // bottom/top walls
            rhs[0 * static_cast<std::size_t>(w) + (d + R)] += ring_value(frame.root.x + d, frame.root.y - R - 1);
            rhs[static_cast<std::size_t>(w - 1) * w + (d + R)] += ring_value(frame.root.x + d, frame.root.y + R + 1);
        }
        fft::solve_dirichlet(rhs, w, w);
        S[static_cast<std::size_t>(k)] = rhs[static_cast<std::size_t>(R) * w + R];
    }
    return S;
}

// t_k = alpha^2 (G_{D_N}(x0,x0) - G_{Delta^k}(x0,x0)), with t_0 = 0 and
// G_{Delta^n}(x0,x0) = 1 for the singleton. Deterministic: no Monte Carlo.
// `green` may be null for rectangular domains (spectral diagonal is used).
inline std::vector<double> step_variances(const gff::GreenOperator* green,
                                          const lattice::ConcentricFrame& frame) {
    const auto& dom = *frame.domain;
    const double a2 = chaos::alpha_const * chaos::alpha_const;

    double g_domain;
    if (dom.is_rectangle()) {
        g_domain = fft::green_diag_rect(dom.width, dom.height, frame.root.x - dom.x_lo,
                                        frame.root.y - dom.y_lo);
    } else {
        if (!green) throw gff::SolverFailure("step_variances: non-rectangle domain needs green");
        const auto i = dom.site_index(frame.root.x, frame.root.y);
        g_domain = green->diag(static_cast<std::size_t>(i));
    }

    const int n = frame.n;
    std::vector<double> t(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k < n; ++k) {
        const int R = frame.radius[static_cast<std::size_t>(k)];
        const int w = 2 * R + 1;
        const double g_ball = fft::green_diag_rect(w, w, R, R);
        t[static_cast<std::size_t>(k)] = a2 * (g_domain - g_ball);
    }
    t[static_cast<std::size_t>(n)] = a2 * (g_domain - 1.0);
    return t;
}

// b_k = m_N - m_{N e^{-k}}.
inline std::vector<double> centering_gaps(int N, int n) {
    const double m_N = chaos::m_centering(static_cast<double>(N));
    std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k)
        b[static_cast<std::size_t>(k)] = m_N - chaos::m_centering(N * std::exp(-static_cast<double>(k)));
    return b;
}

// Xi_k = log Z_N(A_k) - alpha [S_k - m_N + m_{N e^{-k}}].
inline double extract_xi(const chaos::CriticalMeasure& measure, const std::vector<double>& S,
                         const lattice::ConcentricFrame& frame, int k) {
    const double mass = chaos::annulus_mass(measure, frame, k);
    if (!(mass > 0.0)) throw EmptyAnnulus("extract_xi: annulus has no sites");
    const double m_N = measure.meta.m_N;
    const double m_k = chaos::m_centering(measure.meta.N * std::exp(-static_cast<double>(k)));
    return std::log(mass) -
           chaos::alpha_const * (S[static_cast<std::size_t>(k)] - m_N + m_k);
}

// K(eta, ell): the smallest K in {0..ell} with |Xi_k| <= k^eta for every
// k in {K, ..., ell ^ n}; min{ell, floor(n/2)} + 1 when none qualifies.
// Missing Xi values (NaN) count as violations.
inline int control_variable(const std::vector<double>& xi, double eta, int ell, int n) {
    if (!(eta > 0.0 && eta < 0.25))
        throw std::invalid_argument("control_variable: eta must lie in (0, 1/4)");
    if (ell < 0) throw std::invalid_argument("control_variable: ell must be >= 0");
    const int hi = std::min(ell, n);
    for (int K = 0; K <= ell; ++K) {
        bool ok = true;
        for (int k = std::max(K, 1); k <= hi; ++k) {
            const double v = (k < static_cast<int>(xi.size()))
                                 ? xi[static_cast<std::size_t>(k)]
                                 : std::numeric_limits<double>::quiet_NaN();
            if (!(std::abs(v) <= std::pow(static_cast<double>(k), eta))) {
                ok = false;
                break;
            }
        }
        if (ok) return K;
    }
    return std::min(ell, n / 2) + 1;
}

struct ConcentricStats {
    const lattice::ConcentricFrame* frame = nullptr;
    std::vector<double> S;       // k = 0..n
    std::vector<double> t;       // Var(alpha S_k), deterministic
    std::vector<double> b;       // m_N - m_{N e^{-k}}
    std::vector<double> S_hat;   // -alpha S_k + alpha (t_k/t_n) m_N
    std::vector<double> S_tilde; // -alpha S_k + alpha b_k
    std::vector<double> xi;      // k = 1..n; NaN where the annulus is empty
    int K = 0;
};

inline ConcentricStats compute_stats(const gff::FieldSample& field,
                                     const chaos::CriticalMeasure& measure,
                                     const lattice::ConcentricFrame& frame,
                                     const gff::GreenOperator* green, double eta, int ell) {
    ConcentricStats st;
    st.frame = &frame;
    st.S = spine_walk(field, frame);
    st.t = step_variances(green, frame);
    st.b = centering_gaps(frame.domain->N, frame.n);

    const double m_N = measure.meta.m_N;
    const int n = frame.n;
    st.S_hat.resize(static_cast<std::size_t>(n) + 1);
    st.S_tilde.resize(static_cast<std::size_t>(n) + 1);
    const double t_n = st.t[static_cast<std::size_t>(n)];
    for (int k = 0; k <= n; ++k) {
        const double s = st.S[static_cast<std::size_t>(k)];
        st.S_hat[static_cast<std::size_t>(k)] =
            -chaos::alpha_const * s + chaos::alpha_const * (st.t[static_cast<std::size_t>(k)] / t_n) * m_N;
        st.S_tilde[static_cast<std::size_t>(k)] =
            -chaos::alpha_const * s + chaos::alpha_const * st.b[static_cast<std::size_t>(k)];
    }

    st.xi.assign(static_cast<std::size_t>(n) + 1, std::numeric_limits<double>::quiet_NaN());
    for (int k = 1; k <= n; ++k) {
        try {
            st.xi[static_cast<std::size_t>(k)] = extract_xi(measure, st.S, frame, k);
        } catch (const EmptyAnnulus&) {
            // reported as NaN and skipped
        }
    }
    st.K = control_variable(st.xi, eta, ell, n);
    return st;
}

} // namespace clqg::concentric
