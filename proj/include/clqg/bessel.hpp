#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "clqg/gauge.hpp"
#include "clqg/rng.hpp"
#include "clqg/stats.hpp"

// Bessel(3) processes, Brownian bridges and barrier-conditioned bridges.
// Bessel paths are sampled as the modulus of a 3D Brownian motion built
// from exact Gaussian increments, so grid-point marginals carry no
// discretization error. Barrier checks happen at grid points only.

namespace clqg::bessel {

struct RejectionBudgetExhausted : std::runtime_error {
    RejectionBudgetExhausted(const std::string& what, double acceptance)
        : std::runtime_error(what + " (acceptance estimate " + std::to_string(acceptance) + ")"),
          acceptance_estimate(acceptance) {}
    double acceptance_estimate;
};

enum class PathKind { Brownian, Bessel3, BridgeAboveBarrier };

struct PathSample {
    std::vector<double> grid;   // strictly increasing, grid[0] = 0
    std::vector<double> values; // same length as grid
    PathKind kind = PathKind::Brownian;
    double start = 0.0;    // Bessel3 start
    double barrier = 0.0;  // BridgeAboveBarrier: stays >= -barrier
    double endpoint = 0.0; // bridge endpoint
};

inline std::vector<double> uniform_grid(double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0)) throw std::invalid_argument("uniform_grid: bad arguments");
    const auto m = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    std::vector<double> g(m + 1);
    for (std::size_t i = 0; i <= m; ++i) g[i] = std::min(t_end, static_cast<double>(i) * dt);
    g.back() = t_end;
    return g;
}

inline void check_grid(const std::vector<double>& grid) {
    if (grid.size() < 2 || grid.front() != 0.0)
        throw std::invalid_argument("path grid must start at 0 with >= 2 points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("path grid must be strictly increasing");
}

// Y_t = |B^3_t| started from (start, 0, 0).
inline PathSample sample_bessel3(double start, const std::vector<double>& grid,
                                 std::uint64_t seed) {
    if (start < 0.0) throw std::invalid_argument("sample_bessel3: start must be >= 0");
    check_grid(grid);
    rng::Rng rng(seed);
    PathSample p;
    p.grid = grid;
    p.kind = PathKind::Bessel3;
    p.start = start;
    p.values.resize(grid.size());
    double bx = start, by = 0.0, bz = 0.0;
    p.values[0] = start;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double sd = std::sqrt(grid[i] - grid[i - 1]);
        bx += sd * rng.gaussian();
        by += sd * rng.gaussian();
        bz += sd * rng.gaussian();
        p.values[i] = std::sqrt(bx * bx + by * by + bz * bz);
    }
    return p;
}

inline PathSample sample_brownian(const std::vector<double>& grid, std::uint64_t seed) {
    check_grid(grid);
    rng::Rng rng(seed);
    PathSample p;
    p.grid = grid;
    p.kind = PathKind::Brownian;
    p.values.resize(grid.size());
    p.values[0] = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        p.values[i] = p.values[i - 1] + std::sqrt(grid[i] - grid[i - 1]) * rng.gaussian();
    return p;
}

// Brownian bridge 0 -> endpoint over [0, T]; the endpoint is matched exactly.
inline PathSample sample_bridge(double endpoint, const std::vector<double>& grid,
                                std::uint64_t seed) {
    PathSample p = sample_brownian(grid, seed);
    const double T = p.grid.back();
    const double wT = p.values.back();
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        p.values[i] += (p.grid[i] / T) * (endpoint - wT);
    p.values.back() = endpoint;
    return p;
}

struct ConditionedBridge {
    PathSample path;
    std::uint64_t proposals = 0;
    double acceptance_rate = 0.0;
};

// Rejection sampling of a bridge conditioned to stay >= -v at every grid
// point. Exact in law; fails loudly when the budget runs out.
inline ConditionedBridge sample_bridge_above(double v, double t_end, double endpoint,
                                             const std::vector<double>& grid, std::uint64_t seed,
                                             std::uint64_t max_rejects = 1000000) {
    if (v < 0.0) throw std::invalid_argument("sample_bridge_above: v must be >= 0");
    if (endpoint < -v) throw std::invalid_argument("sample_bridge_above: endpoint below barrier");
    if (std::abs(grid.back() - t_end) > 1e-9 * std::max(1.0, t_end))
        throw std::invalid_argument("sample_bridge_above: grid must end at t_end");
    rng::Rng seeder(seed);
    for (std::uint64_t attempt = 0; attempt < max_rejects; ++attempt) {
        PathSample cand = sample_bridge(endpoint, grid, seeder.next_u64());
        const double lo = *std::min_element(cand.values.begin(), cand.values.end());
        if (lo >= -v) {
            ConditionedBridge out;
            cand.kind = PathKind::BridgeAboveBarrier;
            cand.barrier = v;
            cand.endpoint = endpoint;
            out.path = std::move(cand);
            out.proposals = attempt + 1;
            out.acceptance_rate = 1.0 / static_cast<double>(attempt + 1);
            return out;
        }
    }
    throw RejectionBudgetExhausted("sample_bridge_above: rejection budget exhausted",
                                   0.5 / static_cast<double>(max_rejects));
}

struct MotooReport {
    std::vector<double> horizons;
    std::vector<double> fractions; // stay-above fraction per horizon
    double t_start = 0.0;
    double resolution = 0.0;
    int n_paths = 0;
};

// Fraction of Bessel3-from-0 paths with Y_t >= gamma(t) at every grid point
// of [t_start, T], for each horizon T in t_list (one pass, shared paths, so
// fractions are nonincreasing in T by construction).
inline MotooReport motoo_report(const gauge::GaugeTriple& g, std::vector<double> t_list,
                                double t_start, int n_paths, std::uint64_t seed,
                                double resolution = 0.1, double fine_resolution = 0.01) {
    if (t_list.empty()) throw std::invalid_argument("motoo_report: empty horizon list");
    std::sort(t_list.begin(), t_list.end());
    if (!(t_start > 0.0) || t_start >= t_list.front())
        throw std::invalid_argument("motoo_report: need 0 < t_start < min horizon");

    // Uniform grid at `resolution`, refined near t_start.
    std::vector<double> grid{0.0};
    const double fine_end = std::min(10.0 * t_start, t_list.back());
    double t = 0.0;
    while (t < t_list.back() - 1e-12) {
        const double step = (t >= 0.5 * t_start && t < fine_end) ? fine_resolution : resolution;
        t = std::min(t + step, t_list.back());
        grid.push_back(t);
    }
    for (double horizon : t_list) {
        // horizons must be grid points for the checkpoint logic
        const auto it = std::lower_bound(grid.begin(), grid.end(), horizon - 1e-9);
        if (it == grid.end() || std::abs(*it - horizon) > 1e-6)
            throw std::invalid_argument("motoo_report: horizons must align with the grid");
    }

    std::vector<double> gamma_at(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        gamma_at[i] = grid[i] >= t_start ? g.gamma(grid[i]) : -1.0;

    rng::Rng seeder(seed);
    std::vector<int> survive(t_list.size(), 0);
    for (int path = 0; path < n_paths; ++path) {
        rng::Rng rng(seeder.next_u64());
        double bx = 0.0, by = 0.0, bz = 0.0;
        double violated_at = -1.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double sd = std::sqrt(grid[i] - grid[i - 1]);
            bx += sd * rng.gaussian();
            by += sd * rng.gaussian();
            bz += sd * rng.gaussian();
            if (gamma_at[i] >= 0.0) {
                const double y = std::sqrt(bx * bx + by * by + bz * bz);
                if (y < gamma_at[i]) {
                    violated_at = grid[i];
                    break;
                }
            }
        }
        for (std::size_t h = 0; h < t_list.size(); ++h)
            if (violated_at < 0.0 || violated_at > t_list[h]) ++survive[h];
    }

    MotooReport rep;
    rep.horizons = t_list;
    rep.t_start = t_start;
    rep.resolution = resolution;
    rep.n_paths = n_paths;
    rep.fractions.resize(t_list.size());
    for (std::size_t h = 0; h < t_list.size(); ++h)
        rep.fractions[h] = static_cast<double>(survive[h]) / n_paths;
    return rep;
}

inline double motoo_fraction(const gauge::GaugeTriple& g, double t_horizon, double t_start,
                             int n_paths, std::uint64_t seed) {
    return motoo_report(g, {t_horizon}, t_start, n_paths, seed).fractions[0];
}

struct DominationReport {
    int n_paths = 0;
    std::uint64_t grid_points = 0;
    std::uint64_t order_violations = 0; // Y^v - v <= Y^0 <= Y^v failures
    double max_upper_gap = 0.0;         // max of Y^0 - Y^v (should be <= 0)
    double max_lower_gap = 0.0;         // max of (Y^v - v) - Y^0 (should be <= 0)
    double cdf_margin = 0.0;            // max P(f(Y^v-v) > c) - P(f(Y^0) > c) - 3 SE
    double mean_shifted_endpoint = 0.0; // mean of Y^v_b - v over paths
};

// Coupled Bessel(3) starts 0 and v driven by the same noise, integrated
// with the positivity-preserving drift-implicit Euler step
//   Y_{i+1} = ( (Y_i + dW) + sqrt((Y_i + dW)^2 + 4 dt) ) / 2.
// The step is monotone in Y_i, so the coupling inequality
//   Y^v - v <= Y^0 <= Y^v  must hold pathwise at every grid point.
inline DominationReport domination_check(double v, double horizon, int n_paths, double dt,
                                         std::uint64_t seed) {
    if (v < 0.0) throw std::invalid_argument("domination_check: v must be >= 0");
    const auto grid = uniform_grid(horizon, dt);
    rng::Rng seeder(seed);
    DominationReport rep;
    rep.n_paths = n_paths;

    const double tol = 1e-9;
    std::vector<double> min0(n_paths), minv(n_paths), end0(n_paths), endv(n_paths);
    double end_sum = 0.0;
    for (int p = 0; p < n_paths; ++p) {
        rng::Rng rng(seeder.next_u64());
        double y0 = 0.0, yv = v;
        double m0 = 0.0, mv = 0.0; // running minima of Y^0 and Y^v - v
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double dw = std::sqrt(grid[i] - grid[i - 1]) * rng.gaussian();
            const double step_dt = grid[i] - grid[i - 1];
            const double a0 = y0 + dw, av = yv + dw;
            y0 = 0.5 * (a0 + std::sqrt(a0 * a0 + 4.0 * step_dt));
            yv = 0.5 * (av + std::sqrt(av * av + 4.0 * step_dt));
            ++rep.grid_points;
            rep.max_upper_gap = std::max(rep.max_upper_gap, y0 - yv);
            rep.max_lower_gap = std::max(rep.max_lower_gap, (yv - v) - y0);
            if (y0 - yv > tol || (yv - v) - y0 > tol) ++rep.order_violations;
            m0 = std::min(m0, y0);
            mv = std::min(mv, yv - v);
        }
        min0[p] = m0;
        minv[p] = mv;
        end0[p] = y0;
        endv[p] = yv - v;
        end_sum += yv - v;
    }
    rep.mean_shifted_endpoint = end_sum / n_paths;

    // One-sided CDF domination on upward sets {f > c} for the running
    // minimum and the endpoint.
    const double se = 3.0 / std::sqrt(static_cast<double>(n_paths));
    auto margin = [&](const std::vector<double>& shifted, const std::vector<double>& base) {
        double worst = -1.0;
        for (int i = 0; i <= 20; ++i) {
            const double c = -v + (v + 3.0 * std::sqrt(horizon)) * i / 20.0;
            const auto tail = [&](const std::vector<double>& s) {
                return static_cast<double>(std::count_if(s.begin(), s.end(),
                                                         [&](double x) { return x > c; })) /
                       s.size();
            };
            worst = std::max(worst, tail(shifted) - tail(base) - se);
        }
        return worst;
    };
    rep.cdf_margin = std::max(margin(minv, min0), margin(endv, end0));
    return rep;
}

struct BridgeLimitReport {
    std::vector<double> horizons;
    std::vector<double> p_half;      // KS p-value at s = b/2 per horizon
    std::vector<double> p_end;       // KS p-value at s = b per horizon
    std::vector<double> acceptance;  // bridge acceptance rate per horizon
    int n_paths = 0;
};

// Conditioned-bridge restrictions against the Bessel3-from-v law: for each
// T, sample n_paths accepted bridges (min >= -v, endpoint fixed), compare
// W_{b/2} and W_b with Y_{b/2} - v and Y_b - v by two-sample KS.
inline BridgeLimitReport bridge_to_bessel_check(double v, double b,
                                                const std::vector<double>& t_list, int n_paths,
                                                std::uint64_t seed, double endpoint = 0.0,
                                                double dt = 0.1,
                                                std::uint64_t max_proposals = 20000000) {
    for (double T : t_list)
        if (!(b < T)) throw std::invalid_argument("bridge_to_bessel_check: need b < every T");

    BridgeLimitReport rep;
    rep.horizons = t_list;
    rep.n_paths = n_paths;

    // Bessel reference marginals at b/2 and b.
    rng::Rng seeder(seed);
    std::vector<double> ref_half(n_paths), ref_end(n_paths);
    {
        const std::vector<double> grid{0.0, 0.5 * b, b};
        for (int p = 0; p < n_paths; ++p) {
            const auto y = sample_bessel3(v, grid, seeder.next_u64());
            ref_half[p] = y.values[1] - v;
            ref_end[p] = y.values[2] - v;
        }
    }

    for (double T : t_list) {
        auto grid = uniform_grid(T, dt);
        // make b/2 and b grid points
        grid.push_back(0.5 * b);
        grid.push_back(b);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end(),
                               [](double a, double c) { return std::abs(a - c) < 1e-12; }),
                   grid.end());
        std::size_t i_half = 0, i_end = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::abs(grid[i] - 0.5 * b) < 1e-12) i_half = i;
            if (std::abs(grid[i] - b) < 1e-12) i_end = i;
        }

        std::vector<double> half, end;
        half.reserve(n_paths);
        end.reserve(n_paths);
        std::uint64_t proposals = 0;
        while (half.size() < static_cast<std::size_t>(n_paths)) {
            if (proposals >= max_proposals)
                throw RejectionBudgetExhausted(
                    "bridge_to_bessel_check: proposal budget exhausted",
                    static_cast<double>(half.size()) / static_cast<double>(proposals));
            PathSample cand = sample_bridge(endpoint, grid, seeder.next_u64());
            ++proposals;
            if (*std::min_element(cand.values.begin(), cand.values.end()) >= -v) {
                half.push_back(cand.values[i_half]);
                end.push_back(cand.values[i_end]);
            }
        }
        rep.acceptance.push_back(static_cast<double>(n_paths) / static_cast<double>(proposals));
        rep.p_half.push_back(stats::ks_two_sample(half, ref_half).p_value);
        rep.p_end.push_back(stats::ks_two_sample(end, ref_end).p_value);
    }
    return rep;
}

} // namespace clqg::bessel
