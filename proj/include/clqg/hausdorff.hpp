#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "clqg/chaos.hpp"
#include "clqg/gauge.hpp"
#include "clqg/lattice.hpp"
#include "clqg/stats.hpp"

// Hausdorff pre-measure machinery with general gauges. Covers use dyadic
// cells whose diameter is taken in l-infinity (the cell side); the
// Euclidean convention differs by sqrt(2), a constant that none of the
// dichotomy statements feel. Lattice measure queries also use l-infinity
// balls. All cover values are upper bounds: the infimum over covers is not
// certified.

namespace clqg::hausdorff {

struct EmptyGrid : std::runtime_error {
    explicit EmptyGrid(const std::string& what) : std::runtime_error(what) {}
};

// A subset of the plane given as points and/or axis boxes.
struct SetDescriptor {
    std::vector<std::array<double, 2>> points;
    std::vector<lattice::Rect> boxes;
    bool empty() const { return points.empty() && boxes.empty(); }
};

struct Cell {
    std::int64_t ix = 0, iy = 0;
    int level = 0; // side 2^-level
    friend bool operator<(const Cell& a, const Cell& b) {
        if (a.ix != b.ix) return a.ix < b.ix;
        return a.iy < b.iy;
    }
};

struct CoverEstimate {
    double mesh = 0.0;
    int level = 0;       // dyadic level used
    double diameter = 0; // common cell diameter
    double value = 0.0;  // sum of phi(diam) over cells; an upper bound
    std::vector<Cell> cells;
};

namespace detail {

inline int finest_level_for_mesh(double mesh) {
    if (!(mesh > 0.0)) throw std::invalid_argument("premeasure: mesh must be positive");
    int level = 0;
    while (std::pow(2.0, -level) > mesh && level < 48) ++level;
    return level;
}

inline std::set<Cell> dyadic_cells(const SetDescriptor& set, int level) {
    const double scale = std::pow(2.0, level);
    std::set<Cell> cells;
    for (const auto& p : set.points)
        cells.insert(Cell{static_cast<std::int64_t>(std::floor(p[0] * scale)),
                          static_cast<std::int64_t>(std::floor(p[1] * scale)), level});
    for (const auto& b : set.boxes) {
        const auto x0 = static_cast<std::int64_t>(std::floor(b.x0 * scale));
        const auto x1 = static_cast<std::int64_t>(std::ceil(b.x1() * scale)) - 1;
        const auto y0 = static_cast<std::int64_t>(std::floor(b.y0 * scale));
        const auto y1 = static_cast<std::int64_t>(std::ceil(b.y1() * scale)) - 1;
        for (std::int64_t iy = y0; iy <= y1; ++iy)
            for (std::int64_t ix = x0; ix <= x1; ++ix) cells.insert(Cell{ix, iy, level});
    }
    return cells;
}

} // namespace detail

inline double phi_value(const gauge::GaugeTriple& g, double r) { return gauge::eval_phi(g, r); }

// Any other gauge type just needs a phi(r) member (PowerGauge, test gauges).
template <class G>
auto phi_value(const G& g, double r) -> decltype(g.phi(r)) {
    return g.phi(r);
}

// Greedy dyadic cover at the finest level whose cell diameter fits the mesh.
template <class Gauge>
CoverEstimate premeasure_upper(const SetDescriptor& set, const Gauge& g, double mesh) {
    if (set.empty()) throw std::invalid_argument("premeasure: empty set descriptor");
    CoverEstimate est;
    est.mesh = mesh;
    est.level = detail::finest_level_for_mesh(mesh);
    est.diameter = std::pow(2.0, -est.level);
    const auto cells = detail::dyadic_cells(set, est.level);
    est.cells.assign(cells.begin(), cells.end());
    est.value = static_cast<double>(est.cells.size()) * phi_value(g, est.diameter);
    return est;
}

// Box-counting slope of log(count) against log(1/mesh) across dyadic
// levels; an upper-bound-flavored estimate of the Hausdorff dimension,
// clamped to the range spanned by s_grid.
inline double dim_estimate(const SetDescriptor& set, const std::vector<double>& s_grid,
                           int level_lo = 2, int level_hi = 7) {
    if (s_grid.empty()) throw std::invalid_argument("dim_estimate: empty s grid");
    if (level_lo >= level_hi) throw std::invalid_argument("dim_estimate: bad level range");
    std::vector<double> xs, ys;
    for (int level = level_lo; level <= level_hi; ++level) {
        const auto cells = detail::dyadic_cells(set, level);
        xs.push_back(level * std::log(2.0)); // log(1/mesh)
        ys.push_back(std::log(static_cast<double>(cells.size())));
    }
    const double slope = stats::linear_fit(xs, ys).slope;
    const auto [lo, hi] = std::minmax_element(s_grid.begin(), s_grid.end());
    return std::clamp(slope, *lo, *hi);
}

enum class DensityClass { MeasureInfinite, MeasureZeroOnCarrier, Indeterminate };

inline const char* to_string(DensityClass c) {
    switch (c) {
        case DensityClass::MeasureInfinite: return "MeasureInfinite";
        case DensityClass::MeasureZeroOnCarrier: return "MeasureZeroOnCarrier";
        default: return "Indeterminate";
    }
}

struct DensityReport {
    std::vector<lattice::Point> points;
    std::vector<double> ratios; // sup over tested radii of mu(B(x,r))/phi(r)
    DensityClass classification = DensityClass::Indeterminate;
    double t_low = 0.0, t_high = 0.0;
    double fraction_above = 0.0, fraction_below = 0.0;
    std::vector<double> radii;
};

// Rogers-Taylor style one-sided classification: when at least
// `decisive_fraction` of the sampled points exceed t_high the phi-measure of
// any positive-mass set is forced to infinity; when that fraction falls
// below t_low the mass concentrates on a phi-null carrier. The dimensional
// constant c(d) never needs a value with this one-sided logic.
template <class Gauge>
DensityReport rogers_taylor_classify(const chaos::CriticalMeasure& measure,
                                     const std::vector<chaos::SizeBiasedDraw>& draws,
                                     const Gauge& g, const std::vector<double>& radii_grid,
                                     double t_low, double t_high,
                                     double decisive_fraction = 0.9) {
    if (radii_grid.empty()) throw EmptyGrid("rogers_taylor: empty radii grid");
    if (!(t_low < t_high)) throw std::invalid_argument("rogers_taylor: need t_low < t_high");
    for (double r : radii_grid)
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("rogers_taylor: radii must lie in (0,1)");

    DensityReport rep;
    rep.t_low = t_low;
    rep.t_high = t_high;
    rep.radii = radii_grid;

    std::vector<double> phi_at(radii_grid.size());
    for (std::size_t i = 0; i < radii_grid.size(); ++i) phi_at[i] = phi_value(g, radii_grid[i]);

    const double N = measure.domain->N;
    for (const auto& d : draws) {
        double ratio = 0.0;
        for (std::size_t i = 0; i < radii_grid.size(); ++i) {
            const double mass = chaos::ball_mass(measure, d.point.x / N, d.point.y / N,
                                                 radii_grid[i]);
            ratio = std::max(ratio, mass / phi_at[i]);
        }
        rep.points.push_back(d.point);
        rep.ratios.push_back(ratio);
    }

    const double n = static_cast<double>(rep.ratios.size());
    rep.fraction_above =
        std::count_if(rep.ratios.begin(), rep.ratios.end(), [&](double x) { return x > t_high; }) / n;
    rep.fraction_below =
        std::count_if(rep.ratios.begin(), rep.ratios.end(), [&](double x) { return x < t_low; }) / n;
    if (rep.fraction_above >= decisive_fraction)
        rep.classification = DensityClass::MeasureInfinite;
    else if (rep.fraction_below >= decisive_fraction)
        rep.classification = DensityClass::MeasureZeroOnCarrier;
    else
        rep.classification = DensityClass::Indeterminate;
    return rep;
}

struct CarrierResult {
    std::vector<lattice::Point> sites;
    double mass_fraction = 0.0; // retained normalized mass
};

// Finite-scale proxy of the divergence set D_inf: keep the sites whose
// density ratio at the finest grid radius exceeds t.
template <class Gauge>
CarrierResult carrier_extract(const chaos::CriticalMeasure& measure, const Gauge& g, double t,
                              const std::vector<double>& radii_grid) {
    if (radii_grid.empty()) throw EmptyGrid("carrier_extract: empty radii grid");
    const double r = *std::min_element(radii_grid.begin(), radii_grid.end());
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("carrier_extract: radii must lie in (0,1)");
    const double phi_r = phi_value(g, r);
    const double N = measure.domain->N;

    CarrierResult out;
    double kept = 0.0;
    for (std::size_t i = 0; i < measure.domain->size(); ++i) {
        const auto& p = measure.domain->sites[i];
        const double ratio = chaos::ball_mass(measure, p.x / N, p.y / N, r) / phi_r;
        if (ratio > t) {
            out.sites.push_back(p);
            kept += measure.weights[i];
        }
    }
    out.mass_fraction = kept / measure.total;
    return out;
}

} // namespace clqg::hausdorff
