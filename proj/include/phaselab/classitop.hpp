#ifndef PHASELAB_CLASSITOP_HPP
#define PHASELAB_CLASSITOP_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "phaselab/experiment.hpp"
#include "phaselab/qspin.hpp"
#include "phaselab/rng.hpp"
#include "phaselab/sphere_grid.hpp"
#include "phaselab/vec3.hpp"

namespace phaselab::classitop {

struct TopParams {
    double charge = 1.0;       // Q
    double radius = 1.0;       // R, distance of the charge from the axis
    double inertia = 1.0;      // I, moment of inertia about the symmetry axis
    double omega = 1.0;        // spin angular speed
    Vec3 field{0.0, 0.0, 0.0};  // B

    double coupling() const {  // C = Q R^2 / (2 I)
        if (inertia <= 0.0) throw std::invalid_argument("TopParams: inertia must be positive");
        return charge * radius * radius / (2.0 * inertia);
    }
    double precession_rate() const { return std::abs(coupling()) * field.norm(); }
    double spin_period() const { return 2.0 * M_PI / std::abs(omega); }
};

/// Axis direction plus the co-rotating orthonormal triad (w1, w2, w) and the
/// accumulated spin phase.
struct TopState {
    Vec3 w{0.0, 0.0, 1.0};
    Vec3 w1{1.0, 0.0, 0.0};
    Vec3 w2{0.0, 1.0, 0.0};
    double spin_phase = 0.0;

    static TopState from_axis(const UnitVector& axis) {
        TopState s;
        s.w = axis.vec();
        // any vector not parallel to w seeds the triad
        const Vec3 helper = std::abs(s.w.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
        s.w1 = helper.cross(s.w).normalized();
        s.w2 = s.w.cross(s.w1);
        return s;
    }

    double triad_residual() const {
        double r = std::abs(w.dot(w) - 1.0);
        r = std::max(r, std::abs(w1.dot(w1) - 1.0));
        r = std::max(r, std::abs(w2.dot(w2) - 1.0));
        r = std::max(r, std::abs(w.dot(w1)));
        r = std::max(r, std::abs(w.dot(w2)));
        r = std::max(r, std::abs(w1.dot(w2)));
        r = std::max(r, (w1.cross(w2) - w).norm());
        return r;
    }
};

/// Exact step of the averaged precession dw/dt = C w x B: rotation of w
/// about B-hat by -C|B| dt. Preserves |w| to machine precision.
inline Vec3 averaged_step(const Vec3& w, const TopParams& params, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("averaged_step: dt > 0 required");
    const double bn = params.field.norm();
    if (bn == 0.0) return w;
    return rotate_about(w, params.field * (1.0 / bn), -params.coupling() * bn * dt);
}

inline Vec3 averaged_evolve(const Vec3& w0, const TopParams& params, double t) {
    const double bn = params.field.norm();
    if (bn == 0.0 || t == 0.0) return w0;
    return rotate_about(w0, params.field * (1.0 / bn), -params.coupling() * bn * t);
}

/// Spin-period mean of the Lorentz torque: (1/2) Q R^2 omega (w x B).
inline Vec3 mean_torque(const Vec3& w, const TopParams& params) {
    return 0.5 * params.charge * params.radius * params.radius * params.omega *
           w.cross(params.field);
}

/// Instantaneous Lorentz torque M = r x F_L at spin phase a, with
/// r = R(cos a w1 + sin a w2) and F_L = Q v x B.
inline Vec3 instantaneous_torque(const TopState& s, const TopParams& params, double phase) {
    const double c = std::cos(phase), sn = std::sin(phase);
    const Vec3 r = params.radius * (c * s.w1 + sn * s.w2);
    const Vec3 v = params.omega * params.radius * (-sn * s.w1 + c * s.w2);
    const Vec3 f = params.charge * v.cross(params.field);
    return r.cross(f);
}

struct TimedTopState {
    double t;
    TopState state;
};

/// Full rigid-body integration of dw/dt = M/(I omega) with the instantaneous
/// torque. Classic RK4 on the joint (w, w1, w2) state: the triad is
/// parallel-transported with w so the torque stays consistent at every stage.
/// The exact flow conserves |w| and triad orthonormality (the torque is
/// perpendicular to w), so each step ends with a projection back onto that
/// manifold.
inline std::vector<TimedTopState> rigid_body_sim(const TopParams& params, TopState state0,
                                                 double t_end, double dt,
                                                 bool* slow_spin_warning = nullptr) {
    if (dt <= 0.0 || t_end <= 0.0) throw std::invalid_argument("rigid_body_sim: bad times");
    if (dt > params.spin_period() / 50.0)
        throw std::invalid_argument("rigid_body_sim: dt must be at most T_spin/50");
    if (slow_spin_warning) {
        const double prec = params.precession_rate();
        *slow_spin_warning = prec > 0.0 && std::abs(params.omega) / prec < 100.0;
    }

    const double inv_l = 1.0 / (params.inertia * params.omega);
    struct Deriv {
        Vec3 w, w1, w2;
    };
    const auto deriv = [&](const TopState& s, double phase) {
        Deriv d;
        d.w = instantaneous_torque(s, params, phase) * inv_l;
        const Vec3 om = s.w.cross(d.w) * (1.0 / s.w.dot(s.w));  // transport rate
        d.w1 = om.cross(s.w1);
        d.w2 = om.cross(s.w2);
        return d;
    };
    const auto advance = [](const TopState& s, const Deriv& d, double h) {
        TopState r = s;
        r.w = s.w + h * d.w;
        r.w1 = s.w1 + h * d.w1;
        r.w2 = s.w2 + h * d.w2;
        return r;
    };

    std::vector<TimedTopState> traj;
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    traj.reserve(n_steps + 1);
    TopState s = state0;
    const double w_norm = state0.w.norm();
    double t = 0.0;
    traj.push_back({t, s});
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double h = std::min(dt, t_end - t);
        const double a = s.spin_phase, da = params.omega * h;
        const Deriv k1 = deriv(s, a);
        const Deriv k2 = deriv(advance(s, k1, 0.5 * h), a + 0.5 * da);
        const Deriv k3 = deriv(advance(s, k2, 0.5 * h), a + 0.5 * da);
        const Deriv k4 = deriv(advance(s, k3, h), a + da);
        s.w += (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
        s.w1 += (h / 6.0) * (k1.w1 + 2.0 * k2.w1 + 2.0 * k3.w1 + k4.w1);
        s.w2 += (h / 6.0) * (k1.w2 + 2.0 * k2.w2 + 2.0 * k3.w2 + k4.w2);

        // project onto the conserved manifold
        s.w = s.w * (w_norm / s.w.norm());
        const Vec3 wn = s.w * (1.0 / w_norm);
        s.w1 = (s.w1 - wn * s.w1.dot(wn)).normalized();
        s.w2 = wn.cross(s.w1);
        s.spin_phase += da;
        t += h;
        traj.push_back({t, s});
    }
    return traj;
}

/// Canonical chart (varphi, p_varphi = w_z) of the precession dynamics.
struct CanonicalState {
    double varphi = 0.0;
    double p_varphi = 0.0;
};

inline double hamiltonian(const CanonicalState& s, const TopParams& params) {
    if (std::abs(s.p_varphi) > 1.0)
        throw std::invalid_argument("hamiltonian: |p_varphi| <= 1 required");
    const double root = std::sqrt(std::max(0.0, 1.0 - s.p_varphi * s.p_varphi));
    const Vec3& b = params.field;
    return -params.coupling() *
           (b.z * s.p_varphi + root * (b.x * std::cos(s.varphi) + b.y * std::sin(s.varphi)));
}

inline Vec3 canonical_to_axis(const CanonicalState& s) {
    const double root = std::sqrt(std::max(0.0, 1.0 - s.p_varphi * s.p_varphi));
    return {root * std::cos(s.varphi), root * std::sin(s.varphi), s.p_varphi};
}

inline CanonicalState axis_to_canonical(const UnitVector& w) {
    return {w.azimuth(), w.z()};
}

struct TimedCanonicalState {
    double t;
    CanonicalState state;
    double energy;
};

/// RK4 integration of Hamilton's equations for H_top. Refuses trajectories
/// that approach the chart poles |p_varphi| -> 1.
inline std::vector<TimedCanonicalState> hamilton_traj(const CanonicalState& s0,
                                                      const TopParams& params, double t_end,
                                                      double dt) {
    if (dt <= 0.0 || t_end <= 0.0) throw std::invalid_argument("hamilton_traj: bad times");
    if (std::abs(s0.p_varphi) > 1.0 - 1e-6)
        throw std::invalid_argument(
            "hamilton_traj: initial state too close to a chart pole; "
            "integrate in Cartesian form instead");
    const double cc = params.coupling();
    const Vec3& b = params.field;
    const auto deriv = [&](const CanonicalState& s, double& dphi, double& dp) {
        const double p = s.p_varphi;
        const double root = std::sqrt(std::max(1e-300, 1.0 - p * p));
        const double cb = b.x * std::cos(s.varphi) + b.y * std::sin(s.varphi);
        dphi = -cc * (b.z - p / root * cb);                                  // dH/dp
        dp = cc * root * (-b.x * std::sin(s.varphi) + b.y * std::cos(s.varphi));  // -dH/dphi
    };

    std::vector<TimedCanonicalState> traj;
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    traj.reserve(n_steps + 1);
    CanonicalState s = s0;
    double t = 0.0;
    traj.push_back({t, s, hamiltonian(s, params)});
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double h = std::min(dt, t_end - t);
        double k1p, k1q, k2p, k2q, k3p, k3q, k4p, k4q;
        deriv(s, k1q, k1p);
        deriv({s.varphi + 0.5 * h * k1q, s.p_varphi + 0.5 * h * k1p}, k2q, k2p);
        deriv({s.varphi + 0.5 * h * k2q, s.p_varphi + 0.5 * h * k2p}, k3q, k3p);
        deriv({s.varphi + h * k3q, s.p_varphi + h * k3p}, k4q, k4p);
        s.varphi += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        s.p_varphi += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if (std::abs(s.p_varphi) > 1.0 - 1e-6)
            throw std::runtime_error(
                "hamilton_traj: trajectory entered the chart pole region; "
                "integrate in Cartesian form instead");
        t += h;
        traj.push_back({t, s, hamiltonian(s, params)});
    }
    return traj;
}

/// Normalized phase-space density on S^2 with an exact sampler.
struct ClassicalDensity {
    std::function<double(const UnitVector&)> pdf;
    std::function<UnitVector(rng::Stream&)> sample;
};

inline ClassicalDensity uniform_density() {
    ClassicalDensity d;
    d.pdf = [](const UnitVector&) { return 1.0 / (4.0 * M_PI); };
    d.sample = [](rng::Stream& s) { return s.unit_vector(); };
    return d;
}

/// P_C(n) = (1 + n . n0) / (4 pi): the classical counterpart of a pure spin
/// coherent state. Sampled by inverse CDF in the n0-frame.
inline ClassicalDensity coherent_analog_density(const UnitVector& n0) {
    ClassicalDensity d;
    const Vec3 pole = n0.vec();
    d.pdf = [pole](const UnitVector& n) { return (1.0 + n.vec().dot(pole)) / (4.0 * M_PI); };
    d.sample = [pole](rng::Stream& s) {
        const double c = 2.0 * std::sqrt(s.uniform()) - 1.0;  // density (1+c)/2
        const double phi = s.uniform(0.0, 2.0 * M_PI);
        const Vec3 local = UnitVector::from_z_phi(c, phi).vec();
        // rotate +z onto the pole
        const Vec3 zhat{0.0, 0.0, 1.0};
        const Vec3 axis = zhat.cross(pole);
        const double an = axis.norm();
        if (an < 1e-14) return UnitVector(pole.z > 0.0 ? local : Vec3{local.x, local.y, -local.z});
        return UnitVector(rotate_about(local, axis * (1.0 / an), angle_between(zhat, pole)).normalized());
    };
    return d;
}

/// Classical realization of the sampling experiment: the condition w = u is
/// regularized to an epsilon-cone; the recorded density converges to P_C as
/// epsilon -> 0.
inline experiment::DirectionLog classical_bayes_experiment(const ClassicalDensity& density,
                                                           std::uint64_t m, double epsilon,
                                                           std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("classical_bayes_experiment: m >= 1 required");
    if (epsilon <= 0.0 || epsilon > M_PI / 4.0)
        throw std::invalid_argument("classical_bayes_experiment: epsilon in (0, pi/4] required");
    experiment::DirectionLog log;
    log.trials = m;
    for (std::uint64_t t = 0; t < m; ++t) {
        rng::Stream s(rng::derive(seed, t));
        const UnitVector w = density.sample(s);
        const UnitVector u = s.unit_vector();
        if (angle_between(w, u) < epsilon) log.recorded.push_back({t, DirectionTuple{u}});
    }
    return log;
}

inline double gibbs_entropy(const ClassicalDensity& density, const grid::SphereGrid& g) {
    double s = 0.0;
    for (const auto& node : g.nodes) s += node.weight * husimi::neg_p_ln_p(density.pdf(node.dir));
    return s;
}

/// Field realizing a given spin Hamiltonian H_S = hbar f . sigma: B = -2 f / C.
inline Vec3 heisenberg_map(const Vec3& f, const TopParams& params) {
    const double c = params.coupling();
    if (c == 0.0) throw std::invalid_argument("heisenberg_map: C must be nonzero");
    return f * (-2.0 / c);
}

/// Exact quantum <sigma(t)> for the pure state |w0> under H_S = hbar f . sigma,
/// via the closed-form 2x2 unitary.
inline Vec3 sigma_expectation(const Vec3& f, const UnitVector& w0, double t) {
    const double fn = f.norm();
    const Eigen::Vector2cd psi0 = qspin::coherent_amplitudes(w0);
    Eigen::Matrix2cd u;
    if (fn == 0.0) {
        u = Eigen::Matrix2cd::Identity();
    } else {
        const Eigen::Matrix2cd fs = qspin::sigma_dot_n(UnitVector((f * (1.0 / fn)).normalized()));
        u = std::cos(fn * t) * Eigen::Matrix2cd::Identity() -
            qspin::cplx(0.0, 1.0) * std::sin(fn * t) * fs;
    }
    const Eigen::Vector2cd psi = u * psi0;
    const Eigen::Matrix2cd rho = psi * psi.adjoint();
    return qspin::bloch_vector(rho);
}

}  // namespace phaselab::classitop

#endif
