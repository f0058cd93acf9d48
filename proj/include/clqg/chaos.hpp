#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clqg/gff.hpp"
#include "clqg/lattice.hpp"
#include "clqg/rng.hpp"

// The critical chaos measure of a DGFF sample,
//   Z_N = (1/log N) sum_x exp{alpha (h_x - m_N)} delta_{x/N},
// with alpha = 2/sqrt(g), g = 2/pi, and the extremal centering
//   m_N = 2 sqrt(g) log N - (3/4) sqrt(g) log log(N v e).

namespace clqg::chaos {

struct DegenerateMeasure : std::runtime_error {
    explicit DegenerateMeasure(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double g_const = 0.63661977236758134308; // 2/pi
inline const double alpha_const = 2.0 / std::sqrt(g_const); // = sqrt(2 pi)

inline double m_centering(double scale) {
    if (!(scale > 1.0)) throw std::invalid_argument("m_centering: scale must exceed 1");
    const double sg = std::sqrt(g_const);
    const double loglog = std::log(std::log(std::max(scale, std::exp(1.0))));
    return 2.0 * sg * std::log(scale) - 0.75 * sg * loglog;
}

struct MeasureMeta {
    double alpha = alpha_const;
    double g = g_const;
    double m_N = 0.0;
    int N = 0;
};

class CriticalMeasure {
  public:
    const lattice::LatticeDomain* domain = nullptr;
    std::vector<double> weights;
    double total = 0.0;
    MeasureMeta meta;
    gff::Provenance field_provenance;

    double weight_at(const lattice::Point& p) const {
        const auto i = domain->site_index(p.x, p.y);
        if (i < 0) return 0.0;
        return weights[static_cast<std::size_t>(i)];
    }

    const std::vector<double>& prefix() const { return prefix_; }

    void build_prefix() {
        prefix_.resize(weights.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            prefix_[i] = acc;
        }
        total = acc;
        if (!(total > 0.0) || !std::isfinite(total))
            throw DegenerateMeasure("chaos: total mass is zero or not finite");
    }

  private:
    std::vector<double> prefix_;
};

inline CriticalMeasure build_measure(const gff::FieldSample& field) {
    const auto& dom = *field.domain;
    if (dom.N < 3) throw std::invalid_argument("build_measure: N >= 3 required");
    CriticalMeasure m;
    m.domain = &dom;
    m.meta.N = dom.N;
    m.meta.m_N = m_centering(static_cast<double>(dom.N));
    m.field_provenance = field.provenance;
    const double inv_log_n = 1.0 / std::log(static_cast<double>(dom.N));
    m.weights.resize(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i)
        m.weights[i] = std::exp(m.meta.alpha * (field.values[i] - m.meta.m_N)) * inv_log_n;
    m.build_prefix();
    return m;
}

// Mass of the closed ball B^inf(center, r) in scaled coordinates x/N.
inline double ball_mass(const CriticalMeasure& m, double cx, double cy, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("ball_mass: r must be positive");
    const auto& dom = *m.domain;
    const double N = dom.N;
    const int x0 = std::max(dom.x_lo, static_cast<int>(std::floor((cx - r) * N)) - 1);
    const int x1 = std::min(dom.x_lo + dom.width - 1, static_cast<int>(std::ceil((cx + r) * N)) + 1);
    const int y0 = std::max(dom.y_lo, static_cast<int>(std::floor((cy - r) * N)) - 1);
    const int y1 = std::min(dom.y_lo + dom.height - 1, static_cast<int>(std::ceil((cy + r) * N)) + 1);
    double acc = 0.0;
    for (int y = y0; y <= y1; ++y) {
        if (std::abs(y / N - cy) > r) continue;
        for (int x = x0; x <= x1; ++x) {
            if (std::abs(x / N - cx) > r) continue;
            const auto i = dom.site_index(x, y);
            if (i >= 0) acc += m.weights[static_cast<std::size_t>(i)];
        }
    }
    return acc;
}

inline double ball_mass(const CriticalMeasure& m, const lattice::Point& center_site, double r) {
    const double N = m.domain->N;
    return ball_mass(m, center_site.x / N, center_site.y / N, r);
}

// Mass of the annulus Delta^k \ Delta^{k+1} of a concentric frame.
inline double annulus_mass(const CriticalMeasure& m, const lattice::ConcentricFrame& frame,
                           int k) {
    if (k < 1 || k > frame.n) throw lattice::IndexRange("annulus_mass: k must lie in [1, n]");
    double acc = 0.0;
    frame.for_each_annulus_site(k, [&](const lattice::Point& p) { acc += m.weight_at(p); });
    return acc;
}

struct SizeBiasedDraw {
    lattice::Point point;
    gff::Provenance field_ref;
};

// Exact categorical draw: one uniform against the cached cumulative sums.
inline SizeBiasedDraw draw_point(const CriticalMeasure& m, std::uint64_t seed) {
    if (!(m.total > 0.0)) throw DegenerateMeasure("draw_point: total mass must be positive");
    rng::Rng rng(seed);
    const double u = rng.uniform() * m.total;
    const auto& pre = m.prefix();
    const auto it = std::upper_bound(pre.begin(), pre.end(), u);
    const std::size_t i = std::min(static_cast<std::size_t>(it - pre.begin()),
                                   m.weights.size() - 1);
    return SizeBiasedDraw{m.domain->sites[i], m.field_provenance};
}

// t-statistic (m_N - h(X)) / sqrt(log N) of a size-biased point.
inline double near_extremal_statistic(const gff::FieldSample& field, const SizeBiasedDraw& draw) {
    const double m_N = m_centering(static_cast<double>(field.domain->N));
    return (m_N - field.at(draw.point)) / std::sqrt(std::log(static_cast<double>(field.domain->N)));
}

} // namespace clqg::chaos
