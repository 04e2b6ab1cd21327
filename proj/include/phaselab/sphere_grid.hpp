#ifndef PHASELAB_SPHERE_GRID_HPP
#define PHASELAB_SPHERE_GRID_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "phaselab/vec3.hpp"

namespace phaselab::grid {

struct Node1D {
    double x;
    double w;
};

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline std::vector<Node1D> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    std::vector<Node1D> out(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        out[static_cast<std::size_t>(i)] = {-x, w};
        out[static_cast<std::size_t>(n - 1 - i)] = {x, w};
    }
    return out;
}

struct SphereNode {
    UnitVector dir;
    double weight;  // steradians
};

/// Quadrature on S^2: Gauss-Legendre in cos(theta) (L nodes) x uniform
/// periodic nodes in phi (2L nodes). Exact for spherical polynomials up to
/// degree L-1 in cos(theta) and trig degree 2L-1 in phi.
struct SphereGrid {
    int order = 0;  // L
    std::vector<SphereNode> nodes;

    double total_weight() const {
        double s = 0.0;
        for (const auto& n : nodes) s += n.weight;
        return s;
    }
};

inline SphereGrid sphere_grid(int L) {
    if (L < 2) throw std::invalid_argument("sphere_grid: L >= 2 required");
    SphereGrid g;
    g.order = L;
    const auto gl = gauss_legendre(L);
    const int n_phi = 2 * L;
    const double w_phi = 2.0 * M_PI / n_phi;
    g.nodes.reserve(static_cast<std::size_t>(L * n_phi));
    for (const auto& nz : gl)
        for (int k = 0; k < n_phi; ++k)
            g.nodes.push_back({UnitVector::from_z_phi(nz.x, w_phi * k), nz.w * w_phi});
    return g;
}

/// Tensor grid on S^{2 (x) N}; weight of a tuple is the product of the
/// per-sphere weights.
class ProductGrid {
public:
    explicit ProductGrid(std::vector<SphereGrid> grids) : grids_(std::move(grids)) {
        if (grids_.empty()) throw std::invalid_argument("ProductGrid: need at least one sphere");
    }
    ProductGrid(const SphereGrid& g, int n_particles)
        : ProductGrid(std::vector<SphereGrid>(static_cast<std::size_t>(n_particles), g)) {}

    int n_particles() const { return static_cast<int>(grids_.size()); }
    const SphereGrid& sphere(int j) const { return grids_[static_cast<std::size_t>(j)]; }

    std::size_t size() const {
        std::size_t s = 1;
        for (const auto& g : grids_) s *= g.nodes.size();
        return s;
    }

    double total_weight() const {
        double s = 1.0;
        for (const auto& g : grids_) s *= g.total_weight();
        return s;
    }

    /// Odometer iteration over all node tuples, in a fixed deterministic order.
    void for_each(const std::function<void(const DirectionTuple&, double)>& fn) const {
        const std::size_t n = grids_.size();
        std::vector<std::size_t> idx(n, 0);
        DirectionTuple tuple;
        tuple.reserve(n);
        for (const auto& g : grids_) tuple.push_back(g.nodes[0].dir);
        for (;;) {
            double w = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                const auto& node = grids_[j].nodes[idx[j]];
                tuple[j] = node.dir;
                w *= node.weight;
            }
            fn(tuple, w);
            std::size_t j = n;
            while (j > 0) {
                --j;
                if (++idx[j] < grids_[j].nodes.size()) break;
                idx[j] = 0;
                if (j == 0) return;
            }
        }
    }

private:
    std::vector<SphereGrid> grids_;
};

}  // namespace phaselab::grid

#endif
