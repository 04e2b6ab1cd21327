#ifndef PHASELAB_CVMODE_HPP
#define PHASELAB_CVMODE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "phaselab/husimi.hpp"
#include "phaselab/rng.hpp"
#include "phaselab/sphere_grid.hpp"
#include "phaselab/stats.hpp"

namespace phaselab::cvmode {

using cplx = std::complex<double>;

struct PhasePoint {
    double x_star = 0.0;
    double p_star = 0.0;
};

struct CVConfig {
    double sigma = 1.0;   // length scale of the coherent-state packet
    double hbar = 1.0;
    int fock_dim = 64;    // truncation D
    double box_x = 6.0;   // phase-space box [-X, X] x [-P, P]
    double box_p = 12.0;

    void check() const {
        if (sigma <= 0.0 || hbar <= 0.0 || fock_dim < 1 || box_x <= 0.0 || box_p <= 0.0)
            throw std::invalid_argument("CVConfig: all scales must be positive");
    }
    double box_area() const { return 4.0 * box_x * box_p; }
};

/// Position wavefunction of the coherent state centered at (x*, p*):
/// (2/(pi sigma^2))^{1/4} exp[-(x-x*)^2/sigma^2 + i p* x / hbar].
inline cplx coherent_wavefunction(double x, const PhasePoint& pt, const CVConfig& cfg) {
    cfg.check();
    const double norm = std::pow(2.0 / (M_PI * cfg.sigma * cfg.sigma), 0.25);
    const double dx = x - pt.x_star;
    const double mag = norm * std::exp(-dx * dx / (cfg.sigma * cfg.sigma));
    const double phase = pt.p_star * x / cfg.hbar;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

/// |<psi_a|psi_b>|^2 = exp[-(dx)^2/sigma^2 - sigma^2 (dp)^2/(4 hbar^2)].
inline double coherent_overlap_sq(const PhasePoint& a, const PhasePoint& b,
                                  const CVConfig& cfg) {
    const double dx = a.x_star - b.x_star;
    const double dp = a.p_star - b.p_star;
    return std::exp(-dx * dx / (cfg.sigma * cfg.sigma) -
                    cfg.sigma * cfg.sigma * dp * dp / (4.0 * cfg.hbar * cfg.hbar));
}

/// alpha = x*/sigma + i sigma p*/(2 hbar), the annihilation-operator
/// eigenvalue of the coherent state at (x*, p*).
inline cplx alpha_of(const PhasePoint& pt, const CVConfig& cfg) {
    return {pt.x_star / cfg.sigma, cfg.sigma * pt.p_star / (2.0 * cfg.hbar)};
}

struct FockVector {
    Eigen::VectorXcd amps;
    double tail = 0.0;  // 1 - sum |c_k|^2, the truncated Poisson mass
};

/// Fock amplitudes c_k = e^{-|alpha|^2/2} alpha^k / sqrt(k!), k < D.
inline FockVector coherent_in_fock_raw(cplx alpha, int dim) {
    if (dim < 1) throw std::invalid_argument("coherent_in_fock: D >= 1 required");
    FockVector f;
    f.amps.resize(dim);
    cplx c = std::exp(cplx(-0.5 * std::norm(alpha), 0.0));
    double mass = 0.0;
    for (int k = 0; k < dim; ++k) {
        f.amps(k) = c;
        mass += std::norm(c);
        c *= alpha / std::sqrt(static_cast<double>(k + 1));
    }
    f.tail = std::max(0.0, 1.0 - mass);
    return f;
}

/// Checked variant: refuses points whose truncated mass exceeds 1e-6.
inline FockVector coherent_in_fock(cplx alpha, int dim) {
    FockVector f = coherent_in_fock_raw(alpha, dim);
    if (f.tail > 1e-6)
        throw std::invalid_argument(
            "coherent_in_fock: truncation tail above 1e-6; "
            "increase the Fock dimension or shrink the phase-space box");
    return f;
}

/// Density matrix in the truncated Fock basis of the oscillator whose vacuum
/// has width Delta x = sigma/2.
class CVState {
public:
    CVState(Eigen::MatrixXcd rho, CVConfig cfg) : rho_(std::move(rho)), cfg_(cfg) {
        cfg_.check();
        if (rho_.rows() != rho_.cols() || rho_.rows() != cfg_.fock_dim)
            throw std::invalid_argument("CVState: matrix does not match fock_dim");
    }

    static CVState vacuum(const CVConfig& cfg) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cfg.fock_dim, cfg.fock_dim);
        m(0, 0) = 1.0;
        return CVState(std::move(m), cfg);
    }

    static CVState coherent(const PhasePoint& pt, const CVConfig& cfg) {
        const FockVector f = coherent_in_fock(alpha_of(pt, cfg), cfg.fock_dim);
        Eigen::VectorXcd v = f.amps / f.amps.norm();
        return CVState(v * v.adjoint(), cfg);
    }

    /// Thermal-like diagonal state rho ~ diag(1, r, r^2, ...).
    static CVState geometric_diagonal(double r, const CVConfig& cfg) {
        if (r < 0.0 || r >= 1.0) throw std::invalid_argument("geometric_diagonal: r in [0,1)");
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cfg.fock_dim, cfg.fock_dim);
        double w = 1.0, total = 0.0;
        for (int k = 0; k < cfg.fock_dim; ++k, w *= r) {
            m(k, k) = w;
            total += w;
        }
        m /= total;
        return CVState(std::move(m), cfg);
    }

    /// Random state supported on the lowest `support` Fock levels
    /// (Ginibre-normalized), embedded in the full truncation.
    static CVState random(const CVConfig& cfg, int support, int rank, std::uint64_t seed) {
        if (support < 1 || support > cfg.fock_dim || rank < 1 || rank > support)
            throw std::invalid_argument("CVState::random: bad support/rank");
        rng::Stream s(rng::derive(seed, "cv_random_state"));
        Eigen::MatrixXcd g(support, rank);
        for (int i = 0; i < support; ++i)
            for (int j = 0; j < rank; ++j) g(i, j) = cplx(s.normal(), s.normal());
        Eigen::MatrixXcd w = g * g.adjoint();
        w /= w.trace().real();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cfg.fock_dim, cfg.fock_dim);
        m.topLeftCorner(support, support) = w;
        return CVState(std::move(m), cfg);
    }

    const Eigen::MatrixXcd& matrix() const { return rho_; }
    const CVConfig& config() const { return cfg_; }

    double tail_mass() const { return rho_(cfg_.fock_dim - 1, cfg_.fock_dim - 1).real(); }

    /// <psi_{x*,p*}| rho |psi_{x*,p*}>. Exact whenever the state is supported
    /// strictly inside the truncation, because only amplitudes k < D enter.
    double overlap(const PhasePoint& pt) const {
        const FockVector f = coherent_in_fock_raw(alpha_of(pt, cfg_), cfg_.fock_dim);
        const double v = (f.amps.adjoint() * rho_ * f.amps)(0, 0).real();
        return std::max(0.0, v);
    }

private:
    Eigen::MatrixXcd rho_;
    CVConfig cfg_;
};

/// P_H(rho; x*, p*) = <psi|rho|psi> / (2 pi hbar).
inline double husimi_cv(const CVState& rho, const PhasePoint& pt) {
    return rho.overlap(pt) / (2.0 * M_PI * rho.config().hbar);
}

inline double husimi_cv_bound(const CVConfig& cfg) { return 1.0 / (2.0 * M_PI * cfg.hbar); }

namespace detail {

template <typename Fn>
void box_quadrature(const CVConfig& cfg, int nodes_per_axis, Fn&& fn) {
    const auto gx = grid::gauss_legendre(nodes_per_axis);
    for (const auto& nx : gx) {
        const double x = nx.x * cfg.box_x;
        const double wx = nx.w * cfg.box_x;
        for (const auto& np : gx) {
            const double p = np.x * cfg.box_p;
            const double wp = np.w * cfg.box_p;
            fn(PhasePoint{x, p}, wx * wp);
        }
    }
}

}  // namespace detail

/// Box quadrature of P_H; approaches 1 when the box holds the state's mass.
inline double integrate_husimi_cv(const CVState& rho, int nodes_per_axis = 128) {
    double s = 0.0;
    detail::box_quadrature(rho.config(), nodes_per_axis,
                           [&](const PhasePoint& pt, double w) { s += w * husimi_cv(rho, pt); });
    return s;
}

/// S_W by tensor Gauss-Legendre quadrature over the box (nats).
inline double wehrl_cv(const CVState& rho, int nodes_per_axis = 128) {
    double mass = 0.0, s = 0.0;
    detail::box_quadrature(rho.config(), nodes_per_axis, [&](const PhasePoint& pt, double w) {
        const double p = husimi_cv(rho, pt);
        mass += w * p;
        s += w * husimi::neg_p_ln_p(p);
    });
    if (mass < 1.0 - 1e-6)
        throw std::runtime_error("wehrl_cv: phase-space box captures too little Husimi mass");
    return s;
}

/// Truncated-phase-space sampling experiment: uniform proposals on the box,
/// accepted with probability <psi|rho|psi>.
struct CvLog {
    std::uint64_t trials = 0;
    std::vector<std::pair<std::uint64_t, PhasePoint>> recorded;

    std::uint64_t accepted() const { return recorded.size(); }
};

inline CvLog cv_experiment(const CVState& rho, std::uint64_t m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("cv_experiment: m >= 1 required");
    const CVConfig& cfg = rho.config();
    CvLog log;
    log.trials = m;
    for (std::uint64_t t = 0; t < m; ++t) {
        rng::Stream s(rng::derive(seed, t));
        PhasePoint pt{s.uniform(-cfg.box_x, cfg.box_x), s.uniform(-cfg.box_p, cfg.box_p)};
        if (s.uniform() < rho.overlap(pt)) log.recorded.push_back({t, pt});
    }
    return log;
}

/// Rectangular equal-area binning of the box for goodness-of-fit tests.
struct BoxBinning {
    int n_x, n_p;
    CVConfig cfg;

    int n_bins() const { return n_x * n_p; }

    int bin_of(const PhasePoint& pt) const {
        int ix = static_cast<int>((pt.x_star + cfg.box_x) / (2.0 * cfg.box_x) * n_x);
        ix = std::min(std::max(ix, 0), n_x - 1);
        int ip = static_cast<int>((pt.p_star + cfg.box_p) / (2.0 * cfg.box_p) * n_p);
        ip = std::min(std::max(ip, 0), n_p - 1);
        return ix * n_p + ip;
    }

    /// Probability mass of a normalized density in each bin, by per-bin
    /// Gauss-Legendre quadrature.
    std::vector<double> bin_masses(const std::function<double(const PhasePoint&)>& density,
                                   int nodes_per_axis = 8) const {
        const auto gl = grid::gauss_legendre(nodes_per_axis);
        const double hx = 2.0 * cfg.box_x / n_x, hp = 2.0 * cfg.box_p / n_p;
        std::vector<double> out(static_cast<std::size_t>(n_bins()), 0.0);
        for (int ix = 0; ix < n_x; ++ix) {
            const double x0 = -cfg.box_x + hx * (ix + 0.5);
            for (int ip = 0; ip < n_p; ++ip) {
                const double p0 = -cfg.box_p + hp * (ip + 0.5);
                double s = 0.0;
                for (const auto& a : gl)
                    for (const auto& b : gl)
                        s += a.w * b.w *
                             density(PhasePoint{x0 + 0.5 * hx * a.x, p0 + 0.5 * hp * b.x});
                out[static_cast<std::size_t>(ix * n_p + ip)] = s * 0.25 * hx * hp;
            }
        }
        return out;
    }
};

/// Chi-square of recorded points against the box-renormalized Husimi density.
inline stats::Chi2Result gof_chisquare_cv(const CvLog& log, const CVState& rho, int n_x,
                                          int n_p) {
    if (log.accepted() < 1) throw std::invalid_argument("gof_chisquare_cv: empty log");
    BoxBinning bins{n_x, n_p, rho.config()};
    std::vector<double> observed(static_cast<std::size_t>(bins.n_bins()), 0.0);
    for (const auto& r : log.recorded) observed[static_cast<std::size_t>(bins.bin_of(r.second))] += 1.0;
    std::vector<double> expected =
        bins.bin_masses([&](const PhasePoint& pt) { return husimi_cv(rho, pt); });
    double mass = 0.0;
    for (double e : expected) mass += e;
    const double d = static_cast<double>(log.accepted());
    for (double& e : expected) e *= d / mass;
    return stats::chi2_gof(observed, expected);
}

/// Classical phase-space density on the box with a sampler.
struct LiouvilleDensity {
    std::function<double(const PhasePoint&)> pdf;
    std::function<PhasePoint(rng::Stream&)> sample;
};

/// Gaussian Liouville density matching the Husimi function of the coherent
/// state at `center`.
inline LiouvilleDensity coherent_liouville(const PhasePoint& center, const CVConfig& cfg) {
    cfg.check();
    LiouvilleDensity d;
    const double sigma = cfg.sigma, hbar = cfg.hbar;
    d.pdf = [center, sigma, hbar](const PhasePoint& pt) {
        const double dx = pt.x_star - center.x_star;
        const double dp = pt.p_star - center.p_star;
        return std::exp(-dx * dx / (sigma * sigma) -
                        sigma * sigma * dp * dp / (4.0 * hbar * hbar)) /
               (2.0 * M_PI * hbar);
    };
    d.sample = [center, sigma, hbar](rng::Stream& s) {
        return PhasePoint{center.x_star + sigma / std::sqrt(2.0) * s.normal(),
                          center.p_star + std::sqrt(2.0) * hbar / sigma * s.normal()};
    };
    return d;
}

inline LiouvilleDensity uniform_liouville(const CVConfig& cfg) {
    cfg.check();
    LiouvilleDensity d;
    const double area = cfg.box_area();
    const double bx = cfg.box_x, bp = cfg.box_p;
    d.pdf = [area](const PhasePoint&) { return 1.0 / area; };
    d.sample = [bx, bp](rng::Stream& s) {
        return PhasePoint{s.uniform(-bx, bx), s.uniform(-bp, bp)};
    };
    return d;
}

/// Epsilon-ball analogue of the classical sampling experiment in the (x, p)
/// plane; the metric is the dimensionless |delta alpha| so both axes count
/// equally.
inline CvLog classical_cv_experiment(const LiouvilleDensity& density, const CVConfig& cfg,
                                     std::uint64_t m, double epsilon, std::uint64_t seed) {
    if (m < 1 || epsilon <= 0.0)
        throw std::invalid_argument("classical_cv_experiment: m >= 1 and epsilon > 0 required");
    CvLog log;
    log.trials = m;
    for (std::uint64_t t = 0; t < m; ++t) {
        rng::Stream s(rng::derive(seed, t));
        const PhasePoint w = density.sample(s);
        const PhasePoint u{s.uniform(-cfg.box_x, cfg.box_x), s.uniform(-cfg.box_p, cfg.box_p)};
        const double dx = (w.x_star - u.x_star) / cfg.sigma;
        const double dp = cfg.sigma * (w.p_star - u.p_star) / (2.0 * cfg.hbar);
        if (dx * dx + dp * dp < epsilon * epsilon) log.recorded.push_back({t, u});
    }
    return log;
}

/// Gibbs entropy -integral rho_L ln rho_L over the box.
inline double gibbs_entropy_cv(const LiouvilleDensity& density, const CVConfig& cfg,
                               int nodes_per_axis = 128) {
    double s = 0.0;
    detail::box_quadrature(cfg, nodes_per_axis, [&](const PhasePoint& pt, double w) {
        s += w * husimi::neg_p_ln_p(density.pdf(pt));
    });
    return s;
}

}  // namespace phaselab::cvmode

#endif
