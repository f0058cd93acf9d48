#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Lattice discretization of planar domains and the concentric annulus
// geometry around a root site. Distances are l-infinity throughout.

namespace clqg::lattice {

struct EmptyDomain : std::runtime_error {
    explicit EmptyDomain(const std::string& what) : std::runtime_error(what) {}
};
struct RootTooClose : std::runtime_error {
    explicit RootTooClose(const std::string& what) : std::runtime_error(what) {}
};
struct IndexRange : std::runtime_error {
    explicit IndexRange(const std::string& what) : std::runtime_error(what) {}
};

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(const Point& a, const Point& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

inline int chebyshev(const Point& a, const Point& b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

struct Rect {
    double x0 = 0.0, y0 = 0.0, w = 1.0, h = 1.0;
    double x1() const { return x0 + w; }
    double y1() const { return y0 + h; }
};

// A continuum domain: the interior of a finite union of closed axis-aligned
// rectangles (a single Rect covers the plain-rectangle case).
struct Shape {
    std::vector<Rect> boxes;

    static Shape rectangle(double x0, double y0, double w, double h) {
        if (!(w > 0.0) || !(h > 0.0)) throw std::invalid_argument("shape: degenerate rectangle");
        return Shape{{Rect{x0, y0, w, h}}};
    }

    Shape shifted(double dx, double dy) const {
        Shape s = *this;
        for (auto& b : s.boxes) {
            b.x0 += dx;
            b.y0 += dy;
        }
        return s;
    }

    Shape scaled(double factor) const {
        Shape s = *this;
        for (auto& b : s.boxes) {
            b.x0 *= factor;
            b.y0 *= factor;
            b.w *= factor;
            b.h *= factor;
        }
        return s;
    }

    // Is the closed square [px-rho, px+rho] x [py-rho, py+rho] contained in
    // the closed union? Checked exactly by x-strip decomposition.
    bool covers_square(double px, double py, double rho) const {
        const double qx0 = px - rho, qx1 = px + rho;
        const double qy0 = py - rho, qy1 = py + rho;
        std::vector<double> cuts{qx0, qx1};
        for (const auto& b : boxes) {
            if (b.x0 > qx0 && b.x0 < qx1) cuts.push_back(b.x0);
            if (b.x1() > qx0 && b.x1() < qx1) cuts.push_back(b.x1());
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double sx0 = cuts[i], sx1 = cuts[i + 1];
            // Rectangles spanning this strip must cover [qy0, qy1] in y.
            std::vector<std::pair<double, double>> iv;
            for (const auto& b : boxes)
                if (b.x0 <= sx0 && b.x1() >= sx1) iv.emplace_back(b.y0, b.y1());
            std::sort(iv.begin(), iv.end());
            double reach = qy0;
            for (const auto& [lo, hi] : iv) {
                if (lo > reach) break;
                reach = std::max(reach, hi);
            }
            if (reach < qy1) return false;
        }
        return true;
    }

    // l-infinity distance from p to the complement of the domain interior.
    // The optimum aligns with a rectangle edge coordinate in some axis, so
    // candidate radii are enumerated and the transition bracketed.
    double dist_to_complement(double px, double py) const {
        if (!covers_square(px, py, 0.0)) return 0.0;
        std::vector<double> cand{0.0};
        for (const auto& b : boxes) {
            for (double e : {b.x0, b.x1()}) cand.push_back(std::abs(px - e));
            for (double e : {b.y0, b.y1()}) cand.push_back(std::abs(py - e));
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        double best = 0.0;
        for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
            const double mid = 0.5 * (cand[i] + cand[i + 1]);
            if (covers_square(px, py, mid))
                best = cand[i + 1];
            else
                break;
        }
        return best;
    }

    void bounding_box(double& x0, double& y0, double& x1, double& y1) const {
        if (boxes.empty()) throw std::invalid_argument("shape: no boxes");
        x0 = y0 = std::numeric_limits<double>::infinity();
        x1 = y1 = -std::numeric_limits<double>::infinity();
        for (const auto& b : boxes) {
            x0 = std::min(x0, b.x0);
            y0 = std::min(y0, b.y0);
            x1 = std::max(x1, b.x1());
            y1 = std::max(y1, b.y1());
        }
    }
};

// D_N = {x in Z^2 : dist(x/N, D^c) > 1/N} with its exterior vertex boundary.
class LatticeDomain {
  public:
    Shape shape;
    int N = 1;
    std::vector<Point> sites;    // row-major order (y, then x)
    std::vector<Point> boundary; // 4-neighbors of sites that are not sites

    int x_lo = 0, y_lo = 0, width = 0, height = 0; // bounding box of sites

    bool contains(int x, int y) const { return site_index(x, y) >= 0; }

    // Index into sites, or -1.
    std::int64_t site_index(int x, int y) const {
        const int ix = x - x_lo, iy = y - y_lo;
        if (ix < 0 || iy < 0 || ix >= width || iy >= height) return -1;
        return index_[static_cast<std::size_t>(iy) * width + ix];
    }

    std::size_t size() const { return sites.size(); }

    // True when the sites fill their bounding box (fast solvers apply).
    bool is_rectangle() const { return is_rectangle_; }

    void finalize() {
        if (sites.empty()) throw EmptyDomain("lattice: no site satisfies the discretization rule");
        std::sort(sites.begin(), sites.end());
        int x0 = sites[0].x, x1 = sites[0].x, y0 = sites[0].y, y1 = sites[0].y;
        for (const auto& p : sites) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        x_lo = x0;
        y_lo = y0;
        width = x1 - x0 + 1;
        height = y1 - y0 + 1;
        index_.assign(static_cast<std::size_t>(width) * height, -1);
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const auto& p = sites[i];
            index_[static_cast<std::size_t>(p.y - y_lo) * width + (p.x - x_lo)] =
                static_cast<std::int64_t>(i);
        }
        is_rectangle_ = sites.size() == static_cast<std::size_t>(width) * height;

        boundary.clear();
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(width + 2) * (height + 2), 0);
        auto mark = [&](int x, int y) -> bool {
            const std::size_t k =
                static_cast<std::size_t>(y - y_lo + 1) * (width + 2) + (x - x_lo + 1);
            if (seen[k]) return false;
            seen[k] = 1;
            return true;
        };
        for (const auto& p : sites) {
            const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int nx = p.x + dx[d], ny = p.y + dy[d];
                if (!contains(nx, ny) && mark(nx, ny)) boundary.push_back(Point{nx, ny});
            }
        }
        std::sort(boundary.begin(), boundary.end());
    }

    // Chebyshev distance from every site to the lattice complement Z^2 \ D_N,
    // via multi-source king-move BFS over the padded bounding box.
    std::vector<int> complement_distance() const {
        const int W = width + 2, H = height + 2;
        std::vector<int> dist(static_cast<std::size_t>(W) * H, -1);
        std::deque<std::pair<int, int>> q;
        for (int iy = 0; iy < H; ++iy)
            for (int ix = 0; ix < W; ++ix) {
                const bool site =
                    ix >= 1 && iy >= 1 && ix <= width && iy <= height &&
                    index_[static_cast<std::size_t>(iy - 1) * width + (ix - 1)] >= 0;
                if (!site) {
                    dist[static_cast<std::size_t>(iy) * W + ix] = 0;
                    q.emplace_back(ix, iy);
                }
            }
        while (!q.empty()) {
            const auto [cx, cy] = q.front();
            q.pop_front();
            const int d = dist[static_cast<std::size_t>(cy) * W + cx];
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
                    auto& dn = dist[static_cast<std::size_t>(ny) * W + nx];
                    if (dn < 0) {
                        dn = d + 1;
                        q.emplace_back(nx, ny);
                    }
                }
        }
        std::vector<int> out(sites.size());
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const auto& p = sites[i];
            out[i] = dist[static_cast<std::size_t>(p.y - y_lo + 1) * (width + 2) +
                          (p.x - x_lo + 1)];
        }
        return out;
    }

  private:
    std::vector<std::int64_t> index_;
    bool is_rectangle_ = false;
};

inline LatticeDomain discretize(const Shape& shape, int N) {
    if (N < 1) throw std::invalid_argument("discretize: N must be >= 1");
    LatticeDomain dom;
    dom.shape = shape;
    dom.N = N;
    double bx0, by0, bx1, by1;
    shape.bounding_box(bx0, by0, bx1, by1);
    const int gx0 = static_cast<int>(std::floor(bx0 * N)) - 2;
    const int gx1 = static_cast<int>(std::ceil(bx1 * N)) + 2;
    const int gy0 = static_cast<int>(std::floor(by0 * N)) - 2;
    const int gy1 = static_cast<int>(std::ceil(by1 * N)) + 2;
    // The membership rule dist(x/N, D^c) > 1/N is evaluated in lattice
    // units, where integer-corner shapes make the boundary ties exact.
    const Shape big = shape.scaled(static_cast<double>(N));
    for (int y = gy0; y <= gy1; ++y)
        for (int x = gx0; x <= gx1; ++x)
            if (big.dist_to_complement(static_cast<double>(x), static_cast<double>(y)) > 1.0)
                dom.sites.push_back(Point{x, y});
    dom.finalize();
    return dom;
}

// D_N^delta = {x in D_N : dist(x, D_N^c) > delta*N}.
inline std::vector<Point> delta_interior(const LatticeDomain& dom, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("delta_interior: delta must lie in (0,1)");
    const auto dist = dom.complement_distance();
    std::vector<Point> out;
    for (std::size_t i = 0; i < dom.sites.size(); ++i)
        if (static_cast<double>(dist[i]) > delta * dom.N) out.push_back(dom.sites[i]);
    return out;
}

// kappa(delta) = inf{k in N : e^{-k} < delta}.
inline int kappa_of_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("kappa_of_delta: delta must lie in (0,1)");
    int k = 0;
    while (std::exp(static_cast<double>(-k)) >= delta) ++k;
    return k;
}

// Concentric annuli Delta^k around a root: Delta^0 = D_N,
// Delta^k = {x : dist(root,x) < N e^{-kappa-k}} for 0 < k < n,
// Delta^n = {root}, Delta^{n+1} = empty.
class ConcentricFrame {
  public:
    const LatticeDomain* domain = nullptr;
    Point root;
    double delta = 0.0;
    int kappa = 0;
    int n = 0;
    std::vector<int> radius; // radius[k] = max Chebyshev offset in Delta^k, k = 0..n+1

    // Largest k with x in Delta^k, or -1 if x is outside Delta^0.
    int shell_of(const Point& p) const {
        if (domain->site_index(p.x, p.y) < 0) return -1;
        const int d = chebyshev(p, root);
        int k = 0;
        while (k + 1 <= n + 1 && d <= radius[k + 1]) ++k;
        return k;
    }

    // Membership in Delta^k.
    bool in_shell(const Point& p, int k) const {
        if (k <= 0) return domain->site_index(p.x, p.y) >= 0;
        return chebyshev(p, root) <= radius[static_cast<std::size_t>(k)];
    }

    // Visit the annulus Delta^k \ Delta^{k+1}.
    template <class F>
    void for_each_annulus_site(int k, F&& f) const {
        if (k < 0 || k > n) throw IndexRange("annulus index out of range");
        const int r_out = radius[static_cast<std::size_t>(k)];
        const int r_in = radius[static_cast<std::size_t>(k) + 1];
        if (k == 0) {
            for (const auto& p : domain->sites)
                if (chebyshev(p, root) > r_in) f(p);
            return;
        }
        for (int dy = -r_out; dy <= r_out; ++dy)
            for (int dx = -r_out; dx <= r_out; ++dx) {
                if (std::max(std::abs(dx), std::abs(dy)) <= r_in) continue;
                const Point p{root.x + dx, root.y + dy};
                if (domain->site_index(p.x, p.y) >= 0) f(p);
            }
    }

    std::vector<Point> annulus_sites(int k) const {
        std::vector<Point> out;
        for_each_annulus_site(k, [&](const Point& p) { out.push_back(p); });
        return out;
    }
};

inline ConcentricFrame build_frame(const LatticeDomain& dom, const Point& root, double delta) {
    ConcentricFrame fr;
    fr.domain = &dom;
    fr.root = root;
    fr.delta = delta;
    fr.kappa = kappa_of_delta(delta);

    const std::int64_t root_idx = dom.site_index(root.x, root.y);
    if (root_idx < 0) throw RootTooClose("build_frame: root is not a domain site");
    {
        const auto dist = dom.complement_distance();
        if (!(static_cast<double>(dist[static_cast<std::size_t>(root_idx)]) > delta * dom.N))
            throw RootTooClose("build_frame: root outside the delta-interior");
    }

    const double N = dom.N;
    int n = 0;
    while (N * std::exp(static_cast<double>(-fr.kappa - n)) >= 1.0) ++n;
    fr.n = n;
    const double logN = std::log(N);
    if (!(n >= logN - fr.kappa - 2.0 && n <= logN + 2.0))
        throw std::logic_error("build_frame: n out of the admissible window");

    fr.radius.assign(static_cast<std::size_t>(n) + 2, 0);
    fr.radius[0] = std::numeric_limits<int>::max() / 2;
    for (int k = 1; k < n; ++k) {
        const double r = N * std::exp(static_cast<double>(-fr.kappa - k));
        fr.radius[static_cast<std::size_t>(k)] = static_cast<int>(std::ceil(r)) - 1;
    }
    fr.radius[static_cast<std::size_t>(n)] = 0;      // Delta^n = {root}
    fr.radius[static_cast<std::size_t>(n) + 1] = -1; // Delta^{n+1} = empty
    for (int k = 1; k < n; ++k)
        if (fr.radius[static_cast<std::size_t>(k) + 1] > fr.radius[static_cast<std::size_t>(k)])
            throw std::logic_error("build_frame: annuli are not nested");

    // Delta^1 must sit inside the domain.
    const int r1 = fr.radius[1];
    for (int dy = -r1; dy <= r1; ++dy)
        for (int dx = -r1; dx <= r1; ++dx)
            if (dom.site_index(root.x + dx, root.y + dy) < 0)
                throw RootTooClose("build_frame: Delta^1 leaves the domain");
    return fr;
}

} // namespace clqg::lattice
