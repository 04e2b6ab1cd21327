#ifndef PHASELAB_EXPERIMENT_HPP
#define PHASELAB_EXPERIMENT_HPP

#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "phaselab/histogram.hpp"
#include "phaselab/husimi.hpp"
#include "phaselab/qspin.hpp"
#include "phaselab/rng.hpp"
#include "phaselab/stats.hpp"

namespace phaselab::experiment {

using qspin::DensityMatrix;

enum class Variant { A, B };

struct ExperimentConfig {
    Variant variant = Variant::A;
    std::uint64_t m = 0;       // trial count
    std::uint64_t seed = 0;
    int n_particles = 1;
};

struct Record {
    std::uint64_t trial;
    DirectionTuple dirs;
};

/// The "notebook": accepted directions plus trial metadata.
struct DirectionLog {
    std::uint64_t trials = 0;
    std::vector<Record> recorded;

    std::uint64_t accepted() const { return recorded.size(); }
};

namespace detail {

/// One trial. Variant A: uniform tuple, accept with probability <u|rho|u>.
/// Variant B: sample the joint sign outcome s over all 2^N patterns (the
/// probabilities <s.u|rho|s.u> sum to 1) and always record (s_1 u_1, ...).
inline bool run_trial(const DensityMatrix& rho, Variant variant, rng::Stream& s,
                      DirectionTuple& out) {
    const int n = rho.n_particles();
    DirectionTuple u = s.direction_tuple(n);
    if (variant == Variant::A) {
        const double p = qspin::outcome_plus_prob(rho, u);
        if (s.uniform() >= p) return false;
        out = std::move(u);
        return true;
    }
    const int patterns = 1 << n;
    const double r = s.uniform();
    double acc = 0.0;
    int chosen = patterns - 1;  // guard against round-off at the top end
    DirectionTuple flipped = u;
    for (int mask = 0; mask < patterns; ++mask) {
        for (int j = 0; j < n; ++j)
            flipped[static_cast<std::size_t>(j)] =
                (mask >> (n - 1 - j)) & 1 ? u[static_cast<std::size_t>(j)].antipode()
                                          : u[static_cast<std::size_t>(j)];
        acc += qspin::outcome_plus_prob(rho, flipped);
        if (r < acc) {
            chosen = mask;
            break;
        }
    }
    out.clear();
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        out.push_back((chosen >> (n - 1 - j)) & 1 ? u[static_cast<std::size_t>(j)].antipode()
                                                  : u[static_cast<std::size_t>(j)]);
    return true;
}

}  // namespace detail

/// Run the thought experiment. Each trial draws from its own counter-based
/// stream keyed by (seed, trial index), so the log is byte-identical for any
/// thread count.
inline DirectionLog run_experiment(const DensityMatrix& rho, const ExperimentConfig& cfg,
                                   int threads = 1) {
    if (rho.n_particles() != cfg.n_particles)
        throw std::invalid_argument("run_experiment: state does not match config.N");
    if (cfg.m < 1) throw std::invalid_argument("run_experiment: m >= 1 required");
    if (threads < 1) threads = 1;

    const auto run_range = [&](std::uint64_t lo, std::uint64_t hi, std::vector<Record>& out) {
        DirectionTuple rec;
        for (std::uint64_t t = lo; t < hi; ++t) {
            rng::Stream s(rng::derive(cfg.seed, t));
            if (detail::run_trial(rho, cfg.variant, s, rec)) out.push_back({t, rec});
        }
    };

    DirectionLog log;
    log.trials = cfg.m;
    if (threads == 1) {
        run_range(0, cfg.m, log.recorded);
        return log;
    }
    std::vector<std::vector<Record>> parts(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (cfg.m + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
        const std::uint64_t lo = chunk * static_cast<std::uint64_t>(k);
        const std::uint64_t hi = std::min(cfg.m, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_range, lo, hi, std::ref(parts[static_cast<std::size_t>(k)]));
    }
    for (auto& th : pool) th.join();
    for (auto& p : parts)  // stable merge by trial index: chunks are ordered
        log.recorded.insert(log.recorded.end(), p.begin(), p.end());
    return log;
}

inline stats::RateEstimate acceptance_rate(const DirectionLog& log) {
    return stats::binomial_rate(static_cast<double>(log.accepted()),
                                static_cast<double>(log.trials));
}

inline hist::SphericalHistogram histogram(const DirectionLog& log, int h_z, int h_phi,
                                          int n_particles) {
    if (log.accepted() < 1) throw std::invalid_argument("histogram: empty log");
    hist::SphericalHistogram h(hist::SphereBinning(h_z, h_phi), n_particles);
    for (const auto& r : log.recorded) h.add(r.dirs);
    return h;
}

/// Pearson chi-square of the recorded-direction histogram against the exact
/// bin masses of P_H.
inline stats::Chi2Result gof_chisquare(const hist::SphericalHistogram& h,
                                       const DensityMatrix& rho) {
    const double d = h.total();
    if (d < 1.0) throw std::invalid_argument("gof_chisquare: empty histogram");
    std::vector<double> expected = h.expected_probabilities(rho);
    for (double& e : expected) e *= d;
    return stats::chi2_gof(h.counts(), expected);
}

/// CDF of c = cos(theta_j) under P_H, by numerical integration of the Husimi
/// marginal (partial trace over the other particles, then phi quadrature).
class PolarMarginalCdf {
public:
    PolarMarginalCdf(const DensityMatrix& rho, int particle, int grid_points = 1025) {
        const Eigen::Matrix2cd rho_j = rho.n_particles() == 1
                                           ? Eigen::Matrix2cd(rho.matrix())
                                           : qspin::reduced_single(rho, particle);
        // density in c after integrating the azimuth numerically
        const int n_phi = 64;
        c_.resize(static_cast<std::size_t>(grid_points));
        cdf_.resize(static_cast<std::size_t>(grid_points));
        std::vector<double> f(static_cast<std::size_t>(grid_points));
        for (int i = 0; i < grid_points; ++i) {
            const double c = -1.0 + 2.0 * i / (grid_points - 1);
            double s = 0.0;
            for (int k = 0; k < n_phi; ++k) {
                const UnitVector n = UnitVector::from_z_phi(c, 2.0 * M_PI * k / n_phi);
                const Eigen::Vector2cd v = qspin::coherent_amplitudes(n);
                s += (v.adjoint() * rho_j * v)(0, 0).real();
            }
            c_[static_cast<std::size_t>(i)] = c;
            f[static_cast<std::size_t>(i)] = s * (2.0 * M_PI / n_phi) / (2.0 * M_PI);
        }
        cdf_[0] = 0.0;
        for (int i = 1; i < grid_points; ++i)
            cdf_[static_cast<std::size_t>(i)] =
                cdf_[static_cast<std::size_t>(i - 1)] +
                0.5 * (f[static_cast<std::size_t>(i - 1)] + f[static_cast<std::size_t>(i)]) *
                    (c_[static_cast<std::size_t>(i)] - c_[static_cast<std::size_t>(i - 1)]);
        const double norm = cdf_.back();
        for (double& v : cdf_) v /= norm;
    }

    double operator()(double c) const {
        if (c <= c_.front()) return 0.0;
        if (c >= c_.back()) return 1.0;
        const auto it = std::upper_bound(c_.begin(), c_.end(), c);
        const std::size_t i = static_cast<std::size_t>(it - c_.begin());
        const double t = (c - c_[i - 1]) / (c_[i] - c_[i - 1]);
        return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
    }

private:
    std::vector<double> c_;
    std::vector<double> cdf_;
};

inline std::vector<double> polar_samples(const DirectionLog& log, int particle) {
    std::vector<double> c;
    c.reserve(log.recorded.size());
    for (const auto& r : log.recorded) c.push_back(r.dirs[static_cast<std::size_t>(particle)].z());
    return c;
}

/// One-sample KS of the empirical cos(theta_j) values against the Husimi
/// polar marginal.
inline stats::KsResult ks_polar_marginal(const DirectionLog& log, const DensityMatrix& rho,
                                         int particle) {
    if (log.accepted() < 100)
        throw std::invalid_argument("ks_polar_marginal: need at least 100 accepted trials");
    const PolarMarginalCdf cdf(rho, particle);
    return stats::ks_one_sample(polar_samples(log, particle),
                                [&](double c) { return cdf(c); });
}

/// Two-sample KS on the cos(theta) marginals, one result per particle axis.
inline std::vector<stats::KsResult> two_sample_compare(const DirectionLog& a,
                                                       const DirectionLog& b,
                                                       int n_particles) {
    std::vector<stats::KsResult> out;
    out.reserve(static_cast<std::size_t>(n_particles));
    for (int j = 0; j < n_particles; ++j)
        out.push_back(stats::ks_two_sample(polar_samples(a, j), polar_samples(b, j)));
    return out;
}

}  // namespace phaselab::experiment

#endif
