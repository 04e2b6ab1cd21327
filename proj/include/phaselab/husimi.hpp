#ifndef PHASELAB_HUSIMI_HPP
#define PHASELAB_HUSIMI_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "phaselab/qspin.hpp"
#include "phaselab/rng.hpp"
#include "phaselab/sphere_grid.hpp"

namespace phaselab::husimi {

using qspin::DensityMatrix;
using qspin::Matrix;

inline double two_pi_pow(int n) { return std::pow(2.0 * M_PI, n); }

/// Upper bound of the Husimi density for N particles: 1/(2pi)^N.
inline double husimi_bound(int n_particles) { return 1.0 / two_pi_pow(n_particles); }

/// P_H(rho; n) = <n|rho|n> / (2pi)^N.
inline double husimi_eval(const DensityMatrix& rho, const DirectionTuple& n) {
    return qspin::outcome_plus_prob(rho, n) / two_pi_pow(rho.n_particles());
}

namespace detail {

/// Contract the most significant qubit of M against the coherent ket k:
/// out_{ab} = sum_{ij} conj(k_i) k_j M_{(i d + a),(j d + b)}, d = dim/2.
inline Matrix contract_msq(const Matrix& M, const Eigen::Vector2cd& k) {
    const Eigen::Index d = M.rows() / 2;
    Matrix out(d, d);
    const qspin::cplx c0 = std::conj(k(0)), c1 = std::conj(k(1));
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            out(a, b) = c0 * k(0) * M(a, b) + c0 * k(1) * M(a, d + b) +
                        c1 * k(0) * M(d + a, b) + c1 * k(1) * M(d + a, d + b);
    return out;
}

/// Visit every grid tuple with the quadratic form <n|rho|n> and its weight,
/// contracting one particle per recursion level.
template <typename Fn>
void quad_recurse(const grid::ProductGrid& pg, int level, const Matrix& M, double w_acc,
                  Fn&& fn) {
    const auto& g = pg.sphere(level);
    const bool leaf = (level == pg.n_particles() - 1);
    for (const auto& node : g.nodes) {
        const Eigen::Vector2cd k = qspin::coherent_amplitudes(node.dir);
        if (leaf) {
            const qspin::cplx c0 = std::conj(k(0)), c1 = std::conj(k(1));
            const double p = (c0 * k(0) * M(0, 0) + c0 * k(1) * M(0, 1) +
                              c1 * k(0) * M(1, 0) + c1 * k(1) * M(1, 1))
                                 .real();
            fn(p, w_acc * node.weight);
        } else {
            quad_recurse(pg, level + 1, contract_msq(M, k), w_acc * node.weight,
                         std::forward<Fn>(fn));
        }
    }
}

template <typename Fn>
void for_each_overlap(const DensityMatrix& rho, const grid::ProductGrid& pg, Fn&& fn) {
    if (pg.n_particles() != rho.n_particles())
        throw std::invalid_argument("grid particle count does not match state");
    quad_recurse(pg, 0, rho.matrix(), 1.0, std::forward<Fn>(fn));
}

}  // namespace detail

/// Max-abs residual of (1/(2pi)^N) sum_k w_k |n_k><n_k| - I.
inline double completeness_residual(const grid::ProductGrid& pg) {
    const int n = pg.n_particles();
    const Eigen::Index d = qspin::dim_of(n);
    Matrix acc = Matrix::Zero(d, d);
    pg.for_each([&](const DirectionTuple& tuple, double w) {
        const qspin::Ket k = qspin::product_coherent_ket(tuple);
        acc.noalias() += w * (k.amps * k.amps.adjoint());
    });
    acc /= two_pi_pow(n);
    return (acc - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

inline double completeness_residual(const grid::SphereGrid& g) {
    return completeness_residual(grid::ProductGrid(g, 1));
}

/// Quadrature of P_H over the grid; equals 1 for a valid state.
inline double integrate_husimi(const DensityMatrix& rho, const grid::ProductGrid& pg) {
    double s = 0.0;
    detail::for_each_overlap(rho, pg, [&](double p, double w) { s += p * w; });
    return s / two_pi_pow(rho.n_particles());
}

inline double integrate_husimi(const DensityMatrix& rho, const grid::SphereGrid& g) {
    return integrate_husimi(rho, grid::ProductGrid(g, 1));
}

/// -P ln P with the 0 ln 0 = 0 convention; tolerates tiny negative round-off.
inline double neg_p_ln_p(double p) {
    if (p <= 0.0) return 0.0;
    return -p * std::log(p);
}

/// S_W by quadrature: -sum w_k P ln P (nats).
inline double wehrl_quadrature(const DensityMatrix& rho, const grid::ProductGrid& pg) {
    const double scale = two_pi_pow(rho.n_particles());
    double s = 0.0;
    detail::for_each_overlap(rho, pg,
                             [&](double p, double w) { s += w * neg_p_ln_p(p / scale); });
    return s;
}

inline double wehrl_quadrature(const DensityMatrix& rho, const grid::SphereGrid& g) {
    return wehrl_quadrature(rho, grid::ProductGrid(g, 1));
}

/// Per-sphere quadrature order used for the Wehrl integrand, from the
/// convergence study in the test suite.
inline int default_wehrl_order(int n_particles) {
    switch (n_particles) {
        case 1: return 64;
        case 2: return 48;
        case 3: return 16;
        default: throw std::invalid_argument("quadrature supported for N <= 3; use wehrl_mc");
    }
}

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t trials = 0;
};

/// S_W by uniform Monte Carlo on S^{2 (x) N}: -(4pi)^N mean[P ln P].
/// Per-trial counter-based streams make the result independent of execution
/// order for a given seed.
inline McEstimate wehrl_mc(const DensityMatrix& rho, std::uint64_t m, std::uint64_t seed) {
    if (m < 1000) throw std::invalid_argument("wehrl_mc: m >= 1000 required");
    const int n = rho.n_particles();
    const double vol = std::pow(4.0 * M_PI, n);
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t t = 0; t < m; ++t) {
        rng::Stream s(rng::derive(seed, t));
        const DirectionTuple u = s.direction_tuple(n);
        const double f = vol * neg_p_ln_p(husimi_eval(rho, u));
        sum += f;
        sum2 += f * f;
    }
    McEstimate e;
    e.trials = m;
    e.estimate = sum / static_cast<double>(m);
    const double var = std::max(0.0, sum2 / static_cast<double>(m) - e.estimate * e.estimate);
    e.stderr_ = std::sqrt(var / static_cast<double>(m));
    return e;
}

}  // namespace phaselab::husimi

#endif
