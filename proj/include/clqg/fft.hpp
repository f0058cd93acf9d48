#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "clqg/rng.hpp"

// Discrete-sine-transform machinery for rectangular Dirichlet problems.
// The Dirichlet Laplacian L = 4I - A on a W x H grid diagonalizes in the
// sine basis with eigenvalues lambda_{jk} = 4 - 2cos(pi j/(W+1)) -
// 2cos(pi k/(H+1)); the walk Green operator is G = 4 L^{-1}.
//
// Plans use FFTW_ESTIMATE: plan selection is then deterministic, which keeps
// experiment outputs byte-identical across runs.

namespace clqg::fft {

class Dst2D {
  public:
    Dst2D(int width, int height) : w_(width), h_(height) {
        buf_ = fftw_alloc_real(static_cast<std::size_t>(w_) * h_);
        if (!buf_) throw std::bad_alloc();
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_r2r_2d(h_, w_, buf_, buf_, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
        if (!plan_) throw std::runtime_error("fftw plan creation failed");
    }
    ~Dst2D() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }
    Dst2D(const Dst2D&) = delete;
    Dst2D& operator=(const Dst2D&) = delete;

    int width() const { return w_; }
    int height() const { return h_; }
    double* data() { return buf_; }

    // In-place unnormalized DST-I in both dimensions. Applying it twice
    // multiplies by 4 (W+1)(H+1).
    void execute() { fftw_execute(plan_); }

    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

  private:
    int w_, h_;
    double* buf_;
    fftw_plan plan_;
};

// Per-thread transform cache keyed by grid size.
inline Dst2D& cached_dst(int width, int height) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<Dst2D>> cache;
    auto& slot = cache[{width, height}];
    if (!slot) slot = std::make_unique<Dst2D>(width, height);
    return *slot;
}

inline double laplacian_eigenvalue(int j, int width, int k, int height) {
    const double cj = std::cos(M_PI * j / (width + 1.0));
    const double ck = std::cos(M_PI * k / (height + 1.0));
    return 4.0 - 2.0 * cj - 2.0 * ck;
}

// Solve L u = b on the W x H grid (row-major, b[iy*W + ix]), Dirichlet walls.
inline void solve_dirichlet(std::vector<double>& b, int width, int height) {
    if (b.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("solve_dirichlet: size mismatch");
    auto& dst = cached_dst(width, height);
    double* a = dst.data();
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = b[i];
    dst.execute();
    for (int k = 1; k <= height; ++k) {
        const double ck = std::cos(M_PI * k / (height + 1.0));
        for (int j = 1; j <= width; ++j) {
            const double lam = 4.0 - 2.0 * std::cos(M_PI * j / (width + 1.0)) - 2.0 * ck;
            a[static_cast<std::size_t>(k - 1) * width + (j - 1)] /= lam;
        }
    }
    dst.execute();
    const double norm = 1.0 / (4.0 * (width + 1.0) * (height + 1.0));
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i] * norm;
}

// Sample the DGFF on the W x H rectangle: h = sum_modes xi sqrt(mu) u_mode
// with mu = 4/lambda, evaluated with a single transform.
inline std::vector<double> sample_rect_field(int width, int height, rng::Rng& rng) {
    auto& dst = cached_dst(width, height);
    double* a = dst.data();
    const double scale = 1.0 / (2.0 * std::sqrt((width + 1.0) * (height + 1.0)));
    for (int k = 1; k <= height; ++k) {
        const double ck = std::cos(M_PI * k / (height + 1.0));
        for (int j = 1; j <= width; ++j) {
            const double lam = 4.0 - 2.0 * std::cos(M_PI * j / (width + 1.0)) - 2.0 * ck;
            a[static_cast<std::size_t>(k - 1) * width + (j - 1)] =
                rng.gaussian() * std::sqrt(4.0 / lam) * scale;
        }
    }
    dst.execute();
    return std::vector<double>(a, a + static_cast<std::size_t>(width) * height);
}

// Walk Green function diagonal G(x,x) on the rectangle, exact mode sum.
inline double green_diag_rect(int width, int height, int ix, int iy) {
    double acc = 0.0;
    const double fx = M_PI * (ix + 1.0) / (width + 1.0);
    const double fy = M_PI * (iy + 1.0) / (height + 1.0);
    for (int k = 1; k <= height; ++k) {
        const double ck = std::cos(M_PI * k / (height + 1.0));
        const double sy = std::sin(fy * k);
        const double sy2 = sy * sy;
        for (int j = 1; j <= width; ++j) {
            const double lam = 4.0 - 2.0 * std::cos(M_PI * j / (width + 1.0)) - 2.0 * ck;
            const double sx = std::sin(fx * j);
            acc += (4.0 / lam) * sx * sx * sy2;
        }
    }
    return acc * 4.0 / ((width + 1.0) * (height + 1.0));
}

// Column G(., y0) = 4 L^{-1} e_{y0} via one Dirichlet solve.
inline std::vector<double> green_column_rect(int width, int height, int ix, int iy) {
    std::vector<double> b(static_cast<std::size_t>(width) * height, 0.0);
    b[static_cast<std::size_t>(iy) * width + ix] = 4.0;
    solve_dirichlet(b, width, height);
    return b;
}

} // namespace clqg::fft
