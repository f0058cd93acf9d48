#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "clqg/fft.hpp"
#include "clqg/lattice.hpp"

// Dirichlet Green operator of the simple random walk (step 1/4 per
// neighbor, killed on exit): G = 4 L^{-1} for the graph Laplacian
// L = 4I - A on the domain sites. G(x,y) is the expected number of visits
// to y for the walk started at x.

namespace clqg::gff {

struct CapExceeded : std::runtime_error {
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};
struct NotRectangle : std::runtime_error {
    explicit NotRectangle(const std::string& what) : std::runtime_error(what) {}
};
struct SolverFailure : std::runtime_error {
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

enum class GreenKind { Dense, Factored, Spectral };

inline Eigen::SparseMatrix<double> dirichlet_laplacian(const lattice::LatticeDomain& dom) {
    const auto V = static_cast<Eigen::Index>(dom.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(V) * 5);
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (Eigen::Index i = 0; i < V; ++i) {
        const auto& p = dom.sites[static_cast<std::size_t>(i)];
        trip.emplace_back(i, i, 4.0);
        for (int d = 0; d < 4; ++d) {
            const auto j = dom.site_index(p.x + dx[d], p.y + dy[d]);
            if (j >= 0) trip.emplace_back(i, static_cast<Eigen::Index>(j), -1.0);
        }
    }
    Eigen::SparseMatrix<double> L(V, V);
    L.setFromTriplets(trip.begin(), trip.end());
    L.makeCompressed();
    return L;
}

class GreenOperator {
  public:
    GreenOperator(const lattice::LatticeDomain& dom, GreenKind kind,
                  std::size_t dense_cap = 20000)
        : dom_(&dom), kind_(kind) {
        switch (kind_) {
            case GreenKind::Spectral:
                if (!dom.is_rectangle())
                    throw NotRectangle("green: spectral representation needs a full rectangle");
                break;
            case GreenKind::Dense:
                if (dom.size() > dense_cap)
                    throw CapExceeded("green: domain exceeds the dense cap (" +
                                      std::to_string(dense_cap) + " sites)");
                factorize();
                build_dense();
                break;
            case GreenKind::Factored:
                factorize();
                break;
        }
    }

    const lattice::LatticeDomain& domain() const { return *dom_; }
    GreenKind kind() const { return kind_; }

    double entry(std::size_t i, std::size_t j) const {
        if (kind_ == GreenKind::Dense) return G_(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j));
        if (kind_ == GreenKind::Factored) {
            const auto col = column(j);
            return col[i];
        }
        return spectral_entry(i, j);
    }

    double diag(std::size_t i) const {
        if (kind_ == GreenKind::Spectral) {
            const auto& p = dom_->sites[i];
            return fft::green_diag_rect(dom_->width, dom_->height, p.x - dom_->x_lo,
                                        p.y - dom_->y_lo);
        }
        return entry(i, i);
    }

    // Column G(., y) as a vector over sites.
    std::vector<double> column(std::size_t j) const {
        if (kind_ == GreenKind::Spectral) {
            const auto& p = dom_->sites[j];
            return fft::green_column_rect(dom_->width, dom_->height, p.x - dom_->x_lo,
                                          p.y - dom_->y_lo);
        }
        Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dom_->size()));
        e[static_cast<Eigen::Index>(j)] = 4.0;
        Eigen::VectorXd g = llt_->solve(e);
        if (llt_->info() != Eigen::Success) throw SolverFailure("green: sparse solve failed");
        return std::vector<double>(g.data(), g.data() + g.size());
    }

    // h = 2 P^T Lc^{-T} xi has covariance exactly G; used by the exact sampler.
    std::vector<double> correlate(const std::vector<double>& xi) const {
        if (kind_ == GreenKind::Spectral)
            throw SolverFailure("green: correlate needs a factored representation");
        Eigen::Map<const Eigen::VectorXd> x(xi.data(), static_cast<Eigen::Index>(xi.size()));
        Eigen::VectorXd y = llt_->matrixU().solve(x);
        Eigen::VectorXd h = 2.0 * (llt_->permutationPinv() * y);
        return std::vector<double>(h.data(), h.data() + h.size());
    }

    const Eigen::MatrixXd& dense_matrix() const {
        if (kind_ != GreenKind::Dense) throw SolverFailure("green: no dense matrix stored");
        return G_;
    }

  private:
    void factorize() {
        L_ = dirichlet_laplacian(*dom_);
        llt_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
        llt_->compute(L_);
        if (llt_->info() != Eigen::Success)
            throw SolverFailure("green: Cholesky factorization failed");
    }

    void build_dense() {
        const auto V = static_cast<Eigen::Index>(dom_->size());
        G_.resize(V, V);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(V);
        for (Eigen::Index j = 0; j < V; ++j) {
            e[j] = 4.0;
            G_.col(j) = llt_->solve(e);
            e[j] = 0.0;
        }
        // Symmetrize away the last bits of solver noise.
        G_ = 0.5 * (G_ + G_.transpose()).eval();
    }

    double spectral_entry(std::size_t i, std::size_t j) const {
        const int W = dom_->width, H = dom_->height;
        const auto& a = dom_->sites[i];
        const auto& b = dom_->sites[j];
        const double ax = M_PI * (a.x - dom_->x_lo + 1.0) / (W + 1.0);
        const double ay = M_PI * (a.y - dom_->y_lo + 1.0) / (H + 1.0);
        const double bx = M_PI * (b.x - dom_->x_lo + 1.0) / (W + 1.0);
        const double by = M_PI * (b.y - dom_->y_lo + 1.0) / (H + 1.0);
        double acc = 0.0;
        for (int k = 1; k <= H; ++k) {
            const double ck = std::cos(M_PI * k / (H + 1.0));
            const double sy = std::sin(ay * k) * std::sin(by * k);
            for (int jj = 1; jj <= W; ++jj) {
                const double lam = 4.0 - 2.0 * std::cos(M_PI * jj / (W + 1.0)) - 2.0 * ck;
                acc += (4.0 / lam) * std::sin(ax * jj) * std::sin(bx * jj) * sy;
            }
        }
        return acc * 4.0 / ((W + 1.0) * (H + 1.0));
    }

    const lattice::LatticeDomain* dom_;
    GreenKind kind_;
    Eigen::SparseMatrix<double> L_;
    std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
    Eigen::MatrixXd G_;
};

inline GreenOperator green(const lattice::LatticeDomain& dom, GreenKind kind,
                           std::size_t dense_cap = 20000) {
    return GreenOperator(dom, kind, dense_cap);
}

// Default representation: dense for small domains, factored otherwise.
inline GreenOperator green(const lattice::LatticeDomain& dom) {
    return GreenOperator(dom, dom.size() <= 4096 ? GreenKind::Dense : GreenKind::Factored);
}

} // namespace clqg::gff
