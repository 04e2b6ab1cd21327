#ifndef PHASELAB_HISTOGRAM_HPP
#define PHASELAB_HISTOGRAM_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "phaselab/qspin.hpp"
#include "phaselab/vec3.hpp"

namespace phaselab::hist {

/// Equal-area binning of S^2: H_z uniform bands in z = cos(theta) times
/// H_phi uniform sectors in phi. Every bin covers 4pi/(H_z H_phi) steradians.
struct SphereBinning {
    int h_z;
    int h_phi;

    SphereBinning(int hz, int hphi) : h_z(hz), h_phi(hphi) {
        if (hz < 1 || hphi < 1) throw std::invalid_argument("SphereBinning: bad bin counts");
    }

    int n_bins() const { return h_z * h_phi; }
    double bin_area() const { return 4.0 * M_PI / n_bins(); }

    int bin_of(const UnitVector& n) const {
        int iz = static_cast<int>((n.z() + 1.0) / 2.0 * h_z);
        iz = std::min(std::max(iz, 0), h_z - 1);
        int ip = static_cast<int>(n.azimuth() / (2.0 * M_PI) * h_phi);
        ip = std::min(std::max(ip, 0), h_phi - 1);
        return iz * h_phi + ip;
    }

    /// Exact first moment m = integral of n over the bin (closed form for a
    /// z-band x phi-sector patch); m0 is the bin area.
    Vec3 bin_moment(int bin) const {
        const int iz = bin / h_phi, ip = bin % h_phi;
        const double z0 = -1.0 + 2.0 * iz / h_z;
        const double z1 = -1.0 + 2.0 * (iz + 1) / h_z;
        const double p0 = 2.0 * M_PI * ip / h_phi;
        const double p1 = 2.0 * M_PI * (ip + 1) / h_phi;
        const auto g = [](double z) {  // antiderivative of sqrt(1-z^2)
            return 0.5 * (z * std::sqrt(std::max(0.0, 1.0 - z * z)) + std::asin(std::clamp(z, -1.0, 1.0)));
        };
        const double radial = g(z1) - g(z0);
        return {radial * (std::sin(p1) - std::sin(p0)),
                radial * (std::cos(p0) - std::cos(p1)),
                0.5 * (z1 * z1 - z0 * z0) * (p1 - p0)};
    }

    /// Integral of |n><n| over the bin: (area I + m . sigma) / 2.
    Eigen::Matrix2cd bin_operator(int bin) const {
        const Vec3 m = bin_moment(bin);
        Eigen::Matrix2cd op;
        const double a = bin_area();
        op(0, 0) = qspin::cplx(0.5 * (a + m.z), 0.0);
        op(0, 1) = qspin::cplx(0.5 * m.x, -0.5 * m.y);
        op(1, 0) = qspin::cplx(0.5 * m.x, 0.5 * m.y);
        op(1, 1) = qspin::cplx(0.5 * (a - m.z), 0.0);
        return op;
    }
};

/// Joint histogram over S^{2 (x) N} with one SphereBinning per particle.
class SphericalHistogram {
public:
    SphericalHistogram(std::vector<SphereBinning> binnings)
        : binnings_(std::move(binnings)) {
        if (binnings_.empty()) throw std::invalid_argument("SphericalHistogram: no binnings");
        std::size_t n = 1;
        for (const auto& b : binnings_) n *= static_cast<std::size_t>(b.n_bins());
        counts_.assign(n, 0.0);
    }
    SphericalHistogram(const SphereBinning& b, int n_particles)
        : SphericalHistogram(std::vector<SphereBinning>(static_cast<std::size_t>(n_particles), b)) {}

    int n_particles() const { return static_cast<int>(binnings_.size()); }
    const SphereBinning& binning(int j) const { return binnings_[static_cast<std::size_t>(j)]; }
    std::size_t n_bins() const { return counts_.size(); }

    std::size_t joint_bin(const DirectionTuple& dirs) const {
        if (dirs.size() != binnings_.size())
            throw std::invalid_argument("SphericalHistogram: tuple length mismatch");
        std::size_t idx = 0;
        for (std::size_t j = 0; j < binnings_.size(); ++j)
            idx = idx * static_cast<std::size_t>(binnings_[j].n_bins()) +
                  static_cast<std::size_t>(binnings_[j].bin_of(dirs[j]));
        return idx;
    }

    void add(const DirectionTuple& dirs) { counts_[joint_bin(dirs)] += 1.0; }

    const std::vector<double>& counts() const { return counts_; }

    double total() const {
        double s = 0.0;
        for (double c : counts_) s += c;
        return s;
    }

    /// Probability mass of P_H in each joint bin, computed from the exact bin
    /// operators: p(b) = tr[rho (x)_j B_{b_j}] / (2pi)^N. Exact because the
    /// Husimi function is multilinear in the per-particle direction vectors.
    std::vector<double> expected_probabilities(const qspin::DensityMatrix& rho) const {
        const int n = n_particles();
        if (rho.n_particles() != n)
            throw std::invalid_argument("expected_probabilities: particle count mismatch");
        // cache per-particle bin operators
        std::vector<std::vector<Eigen::Matrix2cd>> ops(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const auto& b = binnings_[static_cast<std::size_t>(j)];
            ops[static_cast<std::size_t>(j)].reserve(static_cast<std::size_t>(b.n_bins()));
            for (int k = 0; k < b.n_bins(); ++k)
                ops[static_cast<std::size_t>(j)].push_back(b.bin_operator(k));
        }
        const double scale = std::pow(2.0 * M_PI, n);
        std::vector<double> probs(counts_.size(), 0.0);
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        for (std::size_t flat = 0; flat < counts_.size(); ++flat) {
            qspin::Matrix kron = ops[0][static_cast<std::size_t>(idx[0])];
            for (int j = 1; j < n; ++j) {
                const Eigen::Matrix2cd& o = ops[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
                // kron (x) o: particle 1 stays the most significant qubit,
                // matching joint_bin's flattening
                qspin::Matrix next(kron.rows() * 2, kron.cols() * 2);
                for (Eigen::Index r = 0; r < kron.rows(); ++r)
                    for (Eigen::Index c = 0; c < kron.cols(); ++c)
                        next.block(2 * r, 2 * c, 2, 2) = kron(r, c) * o;
                kron.swap(next);
            }
            probs[flat] = (rho.matrix() * kron).trace().real() / scale;
            // odometer
            for (int j = n - 1; j >= 0; --j) {
                if (++idx[static_cast<std::size_t>(j)] < binnings_[static_cast<std::size_t>(j)].n_bins()) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
        }
        return probs;
    }

private:
    std::vector<SphereBinning> binnings_;
    std::vector<double> counts_;
};

}  // namespace phaselab::hist

#endif
