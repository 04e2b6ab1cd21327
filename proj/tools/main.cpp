// phaselab command-line front end.
//
// Subcommands: wehrl, husimi-grid, experiment, top, cv, selftest, replay.
// Every data-producing run writes its outputs plus a manifest.json that echoes
// the effective command line and digests every emitted file; `phaselab replay
// manifest.json --out DIR` re-executes the run and reproduces the data files
// byte for byte at any --threads setting.
//
// Exit codes: 0 success, 1 self-test/oracle failure, 2 input error,
// 3 statistical preconditions unmet.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phaselab/classitop.hpp"
#include "phaselab/cvmode.hpp"
#include "phaselab/experiment.hpp"
#include "phaselab/histogram.hpp"
#include "phaselab/husimi.hpp"
#include "phaselab/io.hpp"
#include "phaselab/qspin.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phaselab;

namespace {

constexpr const char* kVersion = "1.0.0";

/// Raised when a statistical test cannot be run on the data at hand
/// (e.g. underfilled histogram bins); mapped to exit code 3.
struct StatPreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename Fn>
auto stat_guard(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw StatPreconditionError(e.what());
    }
}

int run_cli(std::vector<std::string> args);  // forward, used by `replay`

// ---------------------------------------------------------------------------
// run bookkeeping

struct RunContext {
    std::string out_dir = "phaselab-out";
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<std::string> argv;        // effective args, --out stripped
    std::vector<std::string> files;       // emitted data files (relative)
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    fs::path out() const { return fs::path(out_dir); }

    void emit(const std::string& name, const std::string& content) {
        fs::create_directories(out());
        io::write_text_file((out() / name).string(), content);
        files.push_back(name);
    }

    void finish() {
        fs::create_directories(out());
        json outputs = json::object();
        for (const auto& f : files)
            outputs[f] = io::hex64(io::fnv1a64_file((out() / f).string()));
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const json m{{"artifact_version", kVersion},
                     {"rng_algorithm", rng::kAlgorithmName},
                     {"argv", argv},
                     {"wall_time_seconds", wall},
                     {"outputs", outputs}};
        io::write_text_file((out() / "manifest.json").string(), m.dump(2) + "\n");
    }
};

/// Copy of the argument list with `--out DIR` / `--out=DIR` removed, so the
/// manifest's argv can be replayed into a fresh directory.
std::vector<std::string> strip_out_flag(const std::vector<std::string>& args) {
    std::vector<std::string> r;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;  // skip value
            continue;
        }
        if (args[i].rfind("--out=", 0) == 0) continue;
        r.push_back(args[i]);
    }
    return r;
}

void add_common_flags(CLI::App* sub, RunContext& ctx) {
    sub->add_option("--seed", ctx.seed, "top-level RNG seed")->capture_default_str();
    sub->add_option("--out", ctx.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", ctx.threads, "worker thread cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->set_config("--config", "", "key-value config file (flags win)");
}

// ---------------------------------------------------------------------------
// state sources

qspin::DensityMatrix load_spin_state(const std::string& src, int n) {
    if (src == "coherent")
        return qspin::DensityMatrix::pure(qspin::product_coherent_ket(
            DirectionTuple(static_cast<std::size_t>(n), UnitVector(0.0, 0.0, 1.0))));
    if (src == "mixed") return qspin::DensityMatrix::maximally_mixed(n);
    if (src.rfind("random:", 0) == 0) {
        const std::uint64_t s = std::stoull(src.substr(7));
        return qspin::random_mixed_state(n, static_cast<int>(qspin::dim_of(n)), s);
    }
    if (src.rfind("random-pure:", 0) == 0)
        return qspin::random_pure_state(n, std::stoull(src.substr(12)));

    std::ifstream in(src);
    if (!in) throw std::runtime_error("cannot open state file: " + src);
    json j;
    in >> j;
    auto rho = io::density_from_json(j);
    const auto v = qspin::validate_density(rho);
    if (!v.pass())
        throw std::runtime_error("state file " + src + " is not a density matrix "
                                 "(hermiticity/positivity/trace check failed)");
    return rho;
}

// ---------------------------------------------------------------------------
// wehrl

int cmd_wehrl(RunContext& ctx, const std::string& state, int n, int order,
              std::uint64_t mc_trials) {
    json report;
    if (state == "coherent-cv") {
        cvmode::CVConfig cfg;
        const auto rho = cvmode::CVState::coherent({0.0, 0.0}, cfg);
        const double s = cvmode::wehrl_cv(rho);
        report = {{"entropy", s}, {"method", "cv-quadrature"}, {"hbar", cfg.hbar}};
        std::cout << "S_W = " << io::fmt(s) << " (CV coherent state)\n";
    } else {
        const auto rho = load_spin_state(state, n);
        const int np = rho.n_particles();
        if (mc_trials > 0 || np > 3) {
            const auto mc = husimi::wehrl_mc(rho, mc_trials > 0 ? mc_trials : 1000000, ctx.seed);
            report = {{"entropy", mc.estimate},
                      {"method", "monte-carlo"},
                      {"stderr", mc.stderr_},
                      {"trials", mc.trials},
                      {"n_particles", np}};
            std::cout << "S_W = " << io::fmt(mc.estimate) << " +/- " << io::fmt(mc.stderr_)
                      << " (MC, " << mc.trials << " trials)\n";
        } else {
            const int L = order > 0 ? order : husimi::default_wehrl_order(np);
            const double s =
                np == 1 ? husimi::wehrl_quadrature(rho, grid::sphere_grid(L))
                        : husimi::wehrl_quadrature(rho,
                                                   grid::ProductGrid(grid::sphere_grid(L), np));
            report = {{"entropy", s}, {"method", "quadrature"}, {"order", L},
                      {"n_particles", np}};
            std::cout << "S_W = " << io::fmt(s) << " (quadrature, L=" << L << ")\n";
        }
    }
    ctx.emit("wehrl.json", report.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// husimi-grid

int cmd_husimi_grid(RunContext& ctx, const std::string& state, int n, int order) {
    const auto rho = load_spin_state(state, n);
    const int np = rho.n_particles();
    std::ostringstream csv;
    io::write_husimi_field_csv(csv, rho, grid::ProductGrid(grid::sphere_grid(order), np));
    ctx.emit("husimi_field.csv", csv.str());
    ctx.emit("state.json", io::density_to_json(rho).dump(2) + "\n");
    std::cout << "Husimi field on " << order << "x" << 2 * order << " nodes per sphere, N=" << np
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// experiment (quantum variants A/B and the classical sphere analogue)

std::string histogram_csv(const std::vector<double>& observed,
                          const std::vector<double>& expected) {
    std::ostringstream os;
    os << "bin_index,count,expected\n";
    for (std::size_t k = 0; k < observed.size(); ++k)
        os << k << "," << io::fmt(observed[k]) << "," << io::fmt(expected[k]) << "\n";
    return os.str();
}

int cmd_experiment(RunContext& ctx, const std::string& state, int n,
                   const std::string& variant, std::uint64_t m, int bins_z, int bins_phi,
                   double epsilon) {
    const int hz = bins_z > 0 ? bins_z : (n == 1 ? 8 : 4);
    const int hp = bins_phi > 0 ? bins_phi : (n == 1 ? 9 : 6);

    if (variant == "classical") {
        if (!(state == "uniform" || state == "coherent"))
            throw std::runtime_error(
                "classical variant supports the presets 'uniform' and 'coherent'");
        const auto density = state == "uniform"
                                 ? classitop::uniform_density()
                                 : classitop::coherent_analog_density(UnitVector(0.0, 0.0, 1.0));
        const auto log = classitop::classical_bayes_experiment(density, m, epsilon, ctx.seed);
        std::ostringstream csv;
        io::write_direction_log_csv(csv, log, 1);
        ctx.emit("log.csv", csv.str());

        // expected bin masses of the analogue density, in closed form
        hist::SphereBinning b(hz, hp);
        std::vector<double> observed(static_cast<std::size_t>(b.n_bins()), 0.0);
        for (const auto& r : log.recorded)
            observed[static_cast<std::size_t>(b.bin_of(r.dirs[0]))] += 1.0;
        std::vector<double> expected(static_cast<std::size_t>(b.n_bins()), 0.0);
        const double d = static_cast<double>(log.accepted());
        for (int k = 0; k < b.n_bins(); ++k) {
            const double mass =
                state == "uniform"
                    ? b.bin_area() / (4.0 * M_PI)
                    : (b.bin_area() + b.bin_moment(k).z) / (4.0 * M_PI);
            expected[static_cast<std::size_t>(k)] = d * mass;
        }
        const auto gof = stat_guard([&] { return stats::chi2_gof(observed, expected); });
        const auto rate = experiment::acceptance_rate(log);
        ctx.emit("histogram.csv", histogram_csv(observed, expected));
        const json report{{"variant", "classical"},  {"density", state},
                          {"m", m},                  {"epsilon", epsilon},
                          {"accepted", log.accepted()}, {"acceptance_rate", rate.rate},
                          {"acceptance_stderr", rate.stderr_},
                          {"chi2", gof.statistic},   {"dof", gof.dof},
                          {"p_value", gof.p_value}};
        ctx.emit("gof.json", report.dump(2) + "\n");
        std::cout << "classical: accepted " << log.accepted() << "/" << m
                  << ", GOF p = " << io::fmt(gof.p_value) << "\n";
        return 0;
    }

    if (variant != "A" && variant != "B")
        throw std::runtime_error("unknown variant '" + variant + "' (use A, B, or classical)");
    const auto rho = load_spin_state(state, n);
    const int np = rho.n_particles();
    experiment::ExperimentConfig cfg;
    cfg.variant = variant == "A" ? experiment::Variant::A : experiment::Variant::B;
    cfg.m = m;
    cfg.seed = ctx.seed;
    cfg.n_particles = np;
    const auto log = experiment::run_experiment(rho, cfg, ctx.threads);

    std::ostringstream csv;
    io::write_direction_log_csv(csv, log, np);
    ctx.emit("log.csv", csv.str());
    ctx.emit("state.json", io::density_to_json(rho).dump(2) + "\n");

    const auto h = stat_guard([&] { return experiment::histogram(log, hz, hp, np); });
    const auto gof = stat_guard([&] { return experiment::gof_chisquare(h, rho); });
    const auto probs = h.expected_probabilities(rho);
    std::vector<double> observed, expected;
    const auto& counts = h.counts();
    const double d = h.total();
    for (std::size_t k = 0; k < counts.size(); ++k) {
        observed.push_back(counts[k]);
        expected.push_back(d * probs[k]);
    }
    ctx.emit("histogram.csv", histogram_csv(observed, expected));

    const auto rate = experiment::acceptance_rate(log);
    const json report{{"variant", variant},
                      {"m", m},
                      {"seed", ctx.seed},
                      {"state_hash", io::hex64(io::density_hash(rho))},
                      {"D", log.accepted()},
                      {"acceptance_rate", rate.rate},
                      {"acceptance_stderr", rate.stderr_},
                      {"chi2", gof.statistic},
                      {"dof", gof.dof},
                      {"p_value", gof.p_value}};
    ctx.emit("gof.json", report.dump(2) + "\n");
    std::cout << "variant " << variant << ": accepted " << log.accepted() << "/" << m
              << " (rate " << io::fmt(rate.rate) << "), GOF p = " << io::fmt(gof.p_value)
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// top

int cmd_top(RunContext& ctx, double bx, double by, double bz, double charge, double radius,
            double inertia, double omega_ratio, double periods, int steps_per_spin,
            double theta0, double phi0) {
    classitop::TopParams p;
    p.charge = charge;
    p.radius = radius;
    p.inertia = inertia;
    p.field = {bx, by, bz};
    const double cb = p.precession_rate();
    p.omega = omega_ratio * (cb > 0.0 ? cb : 1.0);

    const double t_end = cb > 0.0 ? periods * 2.0 * M_PI / cb : periods;
    const double dt = p.spin_period() / steps_per_spin;
    const auto s0 = classitop::TopState::from_axis(UnitVector::from_angles(theta0, phi0));

    bool slow_spin = false;
    const auto traj = classitop::rigid_body_sim(p, s0, t_end, dt, &slow_spin);

    double max_dev = 0.0, max_norm_drift = 0.0, max_axis_drift = 0.0;
    const Vec3 bhat = cb > 0.0 ? p.field.normalized() : Vec3{0.0, 0.0, 1.0};
    const double wb0 = s0.w.dot(bhat);
    for (const auto& pt : traj) {
        max_dev = std::max(max_dev,
                           angle_between(pt.state.w, classitop::averaged_evolve(s0.w, p, pt.t)));
        max_norm_drift = std::max(max_norm_drift, std::abs(pt.state.w.norm() - 1.0));
        max_axis_drift = std::max(max_axis_drift, std::abs(pt.state.w.dot(bhat) - wb0));
    }

    // decimate the full trajectory so the CSV stays plot-sized
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / 2000);
    std::vector<classitop::TimedTopState> thin;
    for (std::size_t i = 0; i < traj.size(); i += stride) thin.push_back(traj[i]);
    if (thin.back().t != traj.back().t) thin.push_back(traj.back());
    std::ostringstream full_csv;
    io::write_top_trajectory_csv(full_csv, thin);
    ctx.emit("trajectory_full.csv", full_csv.str());

    json report{{"coupling", p.coupling()},
                {"omega", p.omega},
                {"precession_rate", cb},
                {"slow_spin_warning", slow_spin},
                {"max_deviation_rad", max_dev},
                {"w_norm_drift", max_norm_drift},
                {"w_dot_bhat_drift", max_axis_drift}};

    if (cb > 0.0) {
        const double t_prec = 2.0 * M_PI / cb;
        const auto ham = classitop::hamilton_traj(classitop::axis_to_canonical(UnitVector(s0.w)),
                                                  p,
                                                  t_end, t_prec / 4000.0);
        double max_cdev = 0.0, max_edrift = 0.0;
        const double e0 = ham.front().energy;
        for (const auto& pt : ham) {
            max_cdev = std::max(max_cdev, angle_between(classitop::canonical_to_axis(pt.state),
                                                        classitop::averaged_evolve(s0.w, p, pt.t)));
            max_edrift = std::max(max_edrift, std::abs(pt.energy - e0) / std::abs(e0));
        }
        const std::size_t cstride = std::max<std::size_t>(1, ham.size() / 2000);
        std::vector<classitop::TimedCanonicalState> cthin;
        for (std::size_t i = 0; i < ham.size(); i += cstride) cthin.push_back(ham[i]);
        std::ostringstream ccsv;
        io::write_canonical_trajectory_csv(ccsv, cthin);
        ctx.emit("trajectory_canonical.csv", ccsv.str());
        report["canonical_vs_averaged_rad"] = max_cdev;
        report["energy_drift_rel"] = max_edrift;
    }

    ctx.emit("report.json", report.dump(2) + "\n");
    std::cout << "top: max deviation vs averaged " << io::fmt(max_dev) << " rad, |w| drift "
              << io::fmt(max_norm_drift) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// cv

int cmd_cv(RunContext& ctx, const std::string& state, const std::string& variant,
           std::uint64_t m, double x0, double p0, double sigma, double hbar, int fock_dim,
           double box_x, double box_p, double epsilon, int bins_x, int bins_p) {
    cvmode::CVConfig cfg;
    cfg.sigma = sigma;
    cfg.hbar = hbar;
    cfg.fock_dim = fock_dim;
    cfg.box_x = box_x;
    cfg.box_p = box_p;

    if (variant == "classical") {
        const auto density = state == "uniform" ? cvmode::uniform_liouville(cfg)
                                                : cvmode::coherent_liouville({x0, p0}, cfg);
        const auto log = cvmode::classical_cv_experiment(density, cfg, m, epsilon, ctx.seed);
        std::ostringstream csv;
        io::write_cv_log_csv(csv, log);
        ctx.emit("cv_log.csv", csv.str());
        const double sg = cvmode::gibbs_entropy_cv(density, cfg);
        const json report{{"variant", "classical"}, {"density", state},
                          {"m", m},                 {"epsilon", epsilon},
                          {"accepted", log.accepted()}, {"gibbs_entropy", sg}};
        ctx.emit("report.json", report.dump(2) + "\n");
        std::cout << "cv classical: accepted " << log.accepted() << "/" << m
                  << ", S_G = " << io::fmt(sg) << "\n";
        return 0;
    }
    if (variant != "quantum")
        throw std::runtime_error("unknown cv variant '" + variant +
                                 "' (use quantum or classical)");

    cvmode::CVState rho = [&] {
        if (state == "coherent") return cvmode::CVState::coherent({x0, p0}, cfg);
        if (state == "vacuum") return cvmode::CVState::vacuum(cfg);
        std::ifstream in(state);
        if (!in) throw std::runtime_error("cannot open CV state file: " + state);
        json j;
        in >> j;
        return io::cvstate_from_json(j, cfg.box_x, cfg.box_p);
    }();

    const auto log = cvmode::cv_experiment(rho, m, ctx.seed);
    std::ostringstream csv;
    io::write_cv_log_csv(csv, log);
    ctx.emit("cv_log.csv", csv.str());
    ctx.emit("state.json", io::cvstate_to_json(rho).dump(2) + "\n");

    const auto gof = stat_guard([&] { return cvmode::gof_chisquare_cv(log, rho, bins_x, bins_p); });
    const double sw = cvmode::wehrl_cv(rho);
    const double arate = static_cast<double>(log.accepted()) / static_cast<double>(log.trials);
    const json report{{"variant", "quantum"},
                      {"m", m},
                      {"seed", ctx.seed},
                      {"accepted", log.accepted()},
                      {"acceptance_rate", arate},
                      {"wehrl_entropy", sw},
                      {"chi2", gof.statistic},
                      {"dof", gof.dof},
                      {"p_value", gof.p_value}};
    ctx.emit("gof.json", report.dump(2) + "\n");
    std::cout << "cv: accepted " << log.accepted() << "/" << m << ", S_W = " << io::fmt(sw)
              << ", GOF p = " << io::fmt(gof.p_value) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// selftest

int cmd_selftest() {
    double scale = 1.0;
    if (const char* s = std::getenv("PHASELAB_SELFTEST_TOL_SCALE")) scale = std::atof(s);

    int failures = 0;
    const auto row = [&](const std::string& name, double value, double target, double tol) {
        const bool ok = std::abs(value - target) <= tol * scale;
        if (!ok) ++failures;
        std::cout << (ok ? "  ok   " : "  FAIL ") << name << ": " << io::fmt(value)
                  << " (target " << io::fmt(target) << ", tol " << io::fmt(tol * scale)
                  << ")\n";
    };

    std::cout << "phaselab self-test (closed-form oracles)\n";

    // RNG reference vectors
    std::uint64_t st = 0;
    row("splitmix64 vector 1", static_cast<double>(rng::splitmix64(st) >> 32),
        static_cast<double>(0xE220A8397B1DCDAFULL >> 32), 0.0);

    // entropy constants
    const auto g = grid::sphere_grid(64);
    row("S_W(I/2)", husimi::wehrl_quadrature(qspin::DensityMatrix::maximally_mixed(1), g),
        std::log(4.0 * M_PI), 1e-10);
    row("S_W(coherent qubit)",
        husimi::wehrl_quadrature(
            qspin::DensityMatrix::pure(qspin::coherent_ket(UnitVector(0.0, 0.0, 1.0))), g),
        std::log(2.0 * M_PI) + 0.5, 1e-6);
    row("S_W(coherent CV)", cvmode::wehrl_cv(cvmode::CVState::vacuum(cvmode::CVConfig{})),
        1.0 + std::log(2.0 * M_PI), 1e-6);

    // completeness residuals
    row("completeness N=1", husimi::completeness_residual(grid::sphere_grid(16)), 0.0, 1e-10);
    row("completeness N=2",
        husimi::completeness_residual(grid::ProductGrid(grid::sphere_grid(8), 2)), 0.0, 1e-10);

    // acceptance rate of variant A on a random state
    const auto rho = qspin::random_mixed_state(1, 2, 12345);
    const auto log = experiment::run_experiment(
        rho, experiment::ExperimentConfig{experiment::Variant::A, 200000, 7, 1});
    const auto rate = experiment::acceptance_rate(log);
    row("variant A acceptance", rate.rate, 0.5, 3.0 * rate.stderr_);

    std::cout << (failures == 0 ? "all oracles passed\n"
                                : std::to_string(failures) + " oracle(s) FAILED\n");
    return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// replay

int cmd_replay(const std::string& manifest_path, const std::string& out_dir) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
    json m;
    in >> m;
    std::vector<std::string> args = m.at("argv").get<std::vector<std::string>>();
    args.push_back("--out");
    args.push_back(out_dir);
    return run_cli(std::move(args));
}

// ---------------------------------------------------------------------------
// dispatch

int run_cli(std::vector<std::string> args) {
    CLI::App app{"phaselab: a phase-space laboratory for Husimi functions, Wehrl entropy, "
                 "Bayesian sampling experiments, and the classical spinning top"};
    app.require_subcommand(1);

    RunContext ctx;
    ctx.argv = strip_out_flag(args);

    // wehrl
    std::string w_state = "mixed";
    int w_n = 1, w_order = 0;
    std::uint64_t w_mc = 0;
    auto* wehrl = app.add_subcommand("wehrl", "Wehrl entropy of a state");
    add_common_flags(wehrl, ctx);
    wehrl->add_option("--state", w_state,
                      "preset (coherent, mixed, random:SEED, random-pure:SEED, coherent-cv) "
                      "or JSON file")
        ->capture_default_str();
    wehrl->add_option("--n", w_n, "particle count for presets")->capture_default_str();
    wehrl->add_option("--order", w_order, "quadrature order (0 = automatic)");
    wehrl->add_option("--mc-trials", w_mc, "force Monte Carlo with this many trials");

    // husimi-grid
    std::string h_state = "coherent";
    int h_n = 1, h_order = 16;
    auto* hgrid = app.add_subcommand("husimi-grid", "Husimi field on a quadrature grid");
    add_common_flags(hgrid, ctx);
    hgrid->add_option("--state", h_state, "state preset or JSON file")->capture_default_str();
    hgrid->add_option("--n", h_n, "particle count for presets")->capture_default_str();
    hgrid->add_option("--order", h_order, "grid order L (L x 2L nodes per sphere)")
        ->capture_default_str();

    // experiment
    std::string e_state = "coherent", e_variant = "A";
    int e_n = 1, e_bz = 0, e_bp = 0;
    std::uint64_t e_m = 100000;
    double e_eps = 0.3;
    auto* exper = app.add_subcommand("experiment", "Bayesian sampling thought experiment");
    add_common_flags(exper, ctx);
    exper->add_option("--state", e_state, "state preset or JSON file (classical: uniform|coherent)")
        ->capture_default_str();
    exper->add_option("--n", e_n, "particle count for presets")->capture_default_str();
    exper->add_option("--variant", e_variant, "A, B, or classical")->capture_default_str();
    exper->add_option("--m", e_m, "trial count")->capture_default_str();
    exper->add_option("--bins-z", e_bz, "polar bands per sphere (0 = automatic)");
    exper->add_option("--bins-phi", e_bp, "azimuthal sectors per sphere (0 = automatic)");
    exper->add_option("--epsilon", e_eps, "classical acceptance cone half-angle")
        ->capture_default_str();

    // top
    double t_bx = 0.0, t_by = 0.0, t_bz = 1.0, t_q = 1.0, t_r = 1.0, t_i = 1.0;
    double t_ratio = 1000.0, t_periods = 1.0, t_theta = 1.0, t_phi = 0.3;
    int t_sps = 64;
    auto* top = app.add_subcommand("top", "charged spinning top integrators");
    add_common_flags(top, ctx);
    top->add_option("--bx", t_bx, "field x")->capture_default_str();
    top->add_option("--by", t_by, "field y")->capture_default_str();
    top->add_option("--bz", t_bz, "field z")->capture_default_str();
    top->add_option("--charge", t_q)->capture_default_str();
    top->add_option("--radius", t_r)->capture_default_str();
    top->add_option("--inertia", t_i)->capture_default_str();
    top->add_option("--omega-ratio", t_ratio, "spin rate / precession rate")
        ->capture_default_str();
    top->add_option("--periods", t_periods, "duration in precession periods")
        ->capture_default_str();
    top->add_option("--steps-per-spin", t_sps, "integrator steps per spin period")
        ->capture_default_str();
    top->add_option("--theta0", t_theta, "initial polar angle")->capture_default_str();
    top->add_option("--phi0", t_phi, "initial azimuth")->capture_default_str();

    // cv
    std::string c_state = "coherent", c_variant = "quantum";
    std::uint64_t c_m = 200000;
    double c_x = 0.0, c_p = 0.0, c_sigma = 1.0, c_hbar = 1.0, c_eps = 0.4;
    double c_bx = 6.0, c_bp = 12.0;
    int c_dim = 64, c_binx = 8, c_binp = 8;
    auto* cv = app.add_subcommand("cv", "single-mode continuous-variable experiments");
    add_common_flags(cv, ctx);
    cv->add_option("--state", c_state, "coherent, vacuum, uniform (classical), or JSON file")
        ->capture_default_str();
    cv->add_option("--variant", c_variant, "quantum or classical")->capture_default_str();
    cv->add_option("--m", c_m, "trial count")->capture_default_str();
    cv->add_option("--x", c_x, "coherent center x*")->capture_default_str();
    cv->add_option("--p", c_p, "coherent center p*")->capture_default_str();
    cv->add_option("--sigma", c_sigma)->capture_default_str();
    cv->add_option("--hbar", c_hbar)->capture_default_str();
    cv->add_option("--fock-dim", c_dim)->capture_default_str();
    cv->add_option("--box-x", c_bx, "phase-space box half-width in x")->capture_default_str();
    cv->add_option("--box-p", c_bp, "phase-space box half-width in p")->capture_default_str();
    cv->add_option("--epsilon", c_eps, "classical acceptance ball radius")->capture_default_str();
    cv->add_option("--bins-x", c_binx)->capture_default_str();
    cv->add_option("--bins-p", c_binp)->capture_default_str();

    // selftest
    auto* selftest = app.add_subcommand("selftest", "closed-form oracle suite");
    add_common_flags(selftest, ctx);

    // replay
    std::string r_manifest;
    std::string r_out = "phaselab-replay";
    auto* replay = app.add_subcommand("replay", "re-execute a run from its manifest");
    replay->add_option("manifest", r_manifest, "manifest.json of a previous run")->required();
    replay->add_option("--out", r_out, "output directory for the replayed run")
        ->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        int rc = 0;
        if (wehrl->parsed())
            rc = cmd_wehrl(ctx, w_state, w_n, w_order, w_mc);
        else if (hgrid->parsed())
            rc = cmd_husimi_grid(ctx, h_state, h_n, h_order);
        else if (exper->parsed())
            rc = cmd_experiment(ctx, e_state, e_n, e_variant, e_m, e_bz, e_bp, e_eps);
        else if (top->parsed())
            rc = cmd_top(ctx, t_bx, t_by, t_bz, t_q, t_r, t_i, t_ratio, t_periods, t_sps,
                         t_theta, t_phi);
        else if (cv->parsed())
            rc = cmd_cv(ctx, c_state, c_variant, c_m, c_x, c_p, c_sigma, c_hbar, c_dim, c_bx,
                        c_bp, c_eps, c_binx, c_binp);
        else if (selftest->parsed())
            return cmd_selftest();  // no manifest: diagnostic only
        else if (replay->parsed())
            return cmd_replay(r_manifest, r_out);
        if (rc == 0) ctx.finish();
        return rc;
    } catch (const StatPreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(std::move(args));
}
