#ifndef PHASELAB_QSPIN_HPP
#define PHASELAB_QSPIN_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaselab/rng.hpp"
#include "phaselab/vec3.hpp"

namespace phaselab::qspin {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline int dim_of(int n_particles) { return 1 << n_particles; }

inline int particles_of(Eigen::Index dim) {
    int n = 0;
    Eigen::Index d = dim;
    while (d > 1) {
        if (d % 2 != 0) throw std::invalid_argument("dimension is not a power of two");
        d /= 2;
        ++n;
    }
    if (n < 1) throw std::invalid_argument("dimension must be at least 2");
    return n;
}

/// Normalized state vector of N qubits. Basis index 0 is the sigma_z = +1
/// state; particle 1 occupies the most significant bit.
struct Ket {
    Vector amps;

    int n_particles() const { return particles_of(amps.size()); }

    void check() const {
        if (std::abs(amps.squaredNorm() - 1.0) > 1e-12)
            throw std::invalid_argument("Ket: squared norm deviates from 1 by more than 1e-12");
    }
};

struct ValidationReport {
    double hermiticity_residual = 0.0;  // max entrywise |rho - rho^dag|
    double min_eigenvalue = 0.0;
    double trace_deviation = 0.0;  // |tr(rho) - 1|

    bool pass() const {
        return hermiticity_residual <= 1e-10 && min_eigenvalue >= -1e-10 &&
               trace_deviation <= 1e-10;
    }
};

/// Hermitian, PSD, trace-one matrix on (C^2)^{(x) N}.
class DensityMatrix {
public:
    DensityMatrix(Matrix m, int n_particles) : mat_(std::move(m)), n_(n_particles) {
        if (mat_.rows() != mat_.cols() || mat_.rows() != dim_of(n_particles))
            throw std::invalid_argument("DensityMatrix: dimension does not match particle count");
    }

    static DensityMatrix from_matrix(Matrix m) {
        const int n = particles_of(m.rows());
        return DensityMatrix(std::move(m), n);
    }

    static DensityMatrix maximally_mixed(int n_particles) {
        const int d = dim_of(n_particles);
        return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), n_particles);
    }

    static DensityMatrix pure(const Ket& k) {
        return DensityMatrix(k.amps * k.amps.adjoint(), k.n_particles());
    }

    const Matrix& matrix() const { return mat_; }
    int n_particles() const { return n_; }
    Eigen::Index dim() const { return mat_.rows(); }

    double purity() const { return (mat_ * mat_).trace().real(); }

private:
    Matrix mat_;
    int n_;
};

inline ValidationReport validate_density(const DensityMatrix& rho) {
    const Matrix& m = rho.matrix();
    ValidationReport r;
    r.hermiticity_residual = (m - m.adjoint()).cwiseAbs().maxCoeff();
    r.trace_deviation = std::abs(m.trace() - cplx(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    return r;
}

/// sigma . n = x sigma_x + y sigma_y + z sigma_z; eigenvalues exactly +-1.
inline Eigen::Matrix2cd sigma_dot_n(const UnitVector& dir) {
    Eigen::Matrix2cd m;
    m(0, 0) = cplx(dir.z(), 0.0);
    m(0, 1) = cplx(dir.x(), -dir.y());
    m(1, 0) = cplx(dir.x(), dir.y());
    m(1, 1) = cplx(-dir.z(), 0.0);
    return m;
}

/// +1 eigenstate of sigma . n with the Bloch convention
/// (cos(theta/2), e^{i phi} sin(theta/2)); phi taken as 0 at the poles.
inline Eigen::Vector2cd coherent_amplitudes(const UnitVector& dir) {
    const double c = std::sqrt(std::max(0.0, 0.5 * (1.0 + dir.z())));
    const double s = std::sqrt(std::max(0.0, 0.5 * (1.0 - dir.z())));
    const double phi = dir.azimuth();
    Eigen::Vector2cd v;
    v(0) = cplx(c, 0.0);
    v(1) = cplx(s * std::cos(phi), s * std::sin(phi));
    return v;
}

inline Ket coherent_ket(const UnitVector& dir) {
    Ket k;
    k.amps = coherent_amplitudes(dir);
    return k;
}

/// Tensor product of per-particle coherent kets, particle 1 most significant.
inline Ket product_coherent_ket(const DirectionTuple& dirs) {
    if (dirs.empty()) throw std::invalid_argument("product_coherent_ket: empty tuple");
    Vector v = coherent_amplitudes(dirs[0]);
    for (std::size_t j = 1; j < dirs.size(); ++j) {
        const Eigen::Vector2cd q = coherent_amplitudes(dirs[j]);
        Vector w(v.size() * 2);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            w(2 * i) = v(i) * q(0);
            w(2 * i + 1) = v(i) * q(1);
        }
        v.swap(w);
    }
    Ket k;
    k.amps = std::move(v);
    return k;
}

/// <n| rho |n>: probability that sigma.n_j reads +1 on every particle.
inline double outcome_plus_prob(const DensityMatrix& rho, const DirectionTuple& n) {
    if (static_cast<int>(n.size()) != rho.n_particles())
        throw std::invalid_argument("outcome_plus_prob: tuple length does not match state");
    const Ket k = product_coherent_ket(n);
    return (k.amps.adjoint() * rho.matrix() * k.amps)(0, 0).real();
}

inline DensityMatrix random_pure_state(int n_particles, std::uint64_t seed) {
    if (n_particles < 1) throw std::invalid_argument("random_pure_state: N >= 1 required");
    rng::Stream s(rng::derive(seed, "random_pure_state"));
    const int d = dim_of(n_particles);
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = cplx(s.normal(), s.normal());
    v /= v.norm();
    Ket k;
    k.amps = std::move(v);
    return DensityMatrix::pure(k);
}

/// Normalized Wishart/Ginibre construction: G G^dag / tr(G G^dag) with G of
/// the requested rank.
inline DensityMatrix random_mixed_state(int n_particles, int rank, std::uint64_t seed) {
    const int d = dim_of(n_particles);
    if (rank < 1 || rank > d) throw std::invalid_argument("random_mixed_state: invalid rank");
    rng::Stream s(rng::derive(seed, "random_mixed_state"));
    Matrix g(d, rank);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = cplx(s.normal(), s.normal());
    Matrix w = g * g.adjoint();
    w /= w.trace().real();
    return DensityMatrix(std::move(w), n_particles);
}

/// Reduced state of one particle (0-based index), tracing out the rest.
inline Eigen::Matrix2cd reduced_single(const DensityMatrix& rho, int particle) {
    const int n = rho.n_particles();
    if (particle < 0 || particle >= n) throw std::invalid_argument("reduced_single: bad index");
    const int shift = n - 1 - particle;  // particle 1 (index 0) is most significant
    const Eigen::Index d = rho.dim();
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (Eigen::Index a = 0; a < d; ++a) {
        const int ba = (a >> shift) & 1;
        for (Eigen::Index b = 0; b < d; ++b) {
            const int bb = (b >> shift) & 1;
            if ((a & ~(Eigen::Index(1) << shift)) == (b & ~(Eigen::Index(1) << shift)))
                out(ba, bb) += rho.matrix()(a, b);
        }
    }
    return out;
}

/// Bloch vector of a single-qubit state: r_k = tr(rho sigma_k).
inline Vec3 bloch_vector(const Eigen::Matrix2cd& rho) {
    return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

}  // namespace phaselab::qspin

#endif
