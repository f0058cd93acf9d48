#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "clqg/fft.hpp"
#include "clqg/green.hpp"
#include "clqg/lattice.hpp"
#include "clqg/rng.hpp"

// DGFF samplers. The exact sampler correlates white noise through the
// sparse Cholesky factor of the Dirichlet Laplacian; the spectral sampler
// synthesizes the field in the sine eigenbasis of a rectangle. Both have
// covariance exactly G.

namespace clqg::gff {

enum class SamplerKind { Exact, Spectral };

struct RootConditioning {
    lattice::Point root;
    double a = 0.0;
};

struct Provenance {
    std::uint64_t seed = 0;
    SamplerKind sampler = SamplerKind::Exact;
    std::optional<RootConditioning> conditioning;
};

struct FieldSample {
    const lattice::LatticeDomain* domain = nullptr;
    std::vector<double> values; // aligned with domain->sites
    Provenance provenance;

    double at(const lattice::Point& p) const {
        const auto i = domain->site_index(p.x, p.y);
        if (i < 0) throw std::out_of_range("field: point outside domain");
        return values[static_cast<std::size_t>(i)];
    }
    double max_value() const { return *std::max_element(values.begin(), values.end()); }
};

inline FieldSample sample(const lattice::LatticeDomain& dom, const GreenOperator& green,
                          std::uint64_t seed) {
    rng::Rng rng(seed);
    std::vector<double> xi(dom.size());
    for (auto& v : xi) v = rng.gaussian();
    FieldSample f;
    f.domain = &dom;
    f.values = green.correlate(xi);
    f.provenance = Provenance{seed, SamplerKind::Exact, std::nullopt};
    return f;
}

inline FieldSample sample_spectral(const lattice::LatticeDomain& dom, std::uint64_t seed) {
    if (!dom.is_rectangle())
        throw NotRectangle("sample_spectral: domain sites must fill a rectangle");
    rng::Rng rng(seed);
    FieldSample f;
    f.domain = &dom;
    f.values = fft::sample_rect_field(dom.width, dom.height, rng);
    f.provenance = Provenance{seed, SamplerKind::Spectral, std::nullopt};
    return f;
}

// Fast default: spectral on rectangles, exact elsewhere (needs green).
inline FieldSample sample_auto(const lattice::LatticeDomain& dom, const GreenOperator* green,
                               std::uint64_t seed) {
    if (dom.is_rectangle()) return sample_spectral(dom, seed);
    if (!green) throw SolverFailure("sample_auto: non-rectangle domain needs a green operator");
    return sample(dom, *green, seed);
}

// Condition the field law on h(root) = a:
//   h' = h + (a - h(root)) G(., root) / G(root, root).
// The root value is pinned exactly.
inline FieldSample condition_root(const lattice::LatticeDomain& dom, const GreenOperator* green,
                                  const lattice::Point& root, double a, std::uint64_t seed) {
    const auto ridx = dom.site_index(root.x, root.y);
    if (ridx < 0) throw std::out_of_range("condition_root: root outside domain");
    FieldSample f = sample_auto(dom, green, seed);

    std::vector<double> col;
    if (dom.is_rectangle())
        col = fft::green_column_rect(dom.width, dom.height, root.x - dom.x_lo, root.y - dom.y_lo);
    else
        col = green->column(static_cast<std::size_t>(ridx));

    const double gxx = col[static_cast<std::size_t>(ridx)];
    const double shift = (a - f.values[static_cast<std::size_t>(ridx)]) / gxx;
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += shift * col[i];
    f.values[static_cast<std::size_t>(ridx)] = a;
    f.provenance.conditioning = RootConditioning{root, a};
    return f;
}

// True iff max over sites <= cap.
inline bool filter_max(const FieldSample& field, double cap) {
    return field.max_value() <= cap;
}

} // namespace clqg::gff
