#ifndef PHASELAB_IO_HPP
#define PHASELAB_IO_HPP

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "phaselab/classitop.hpp"
#include "phaselab/cvmode.hpp"
#include "phaselab/experiment.hpp"
#include "phaselab/husimi.hpp"
#include "phaselab/qspin.hpp"

namespace phaselab::io {

using nlohmann::json;

/// Shortest round-trip decimal representation; used for every CSV number so
/// outputs are byte-stable.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json density_to_json(const qspin::DensityMatrix& rho) {
    const Eigen::Index d = rho.dim();
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < d; ++i) {
        json rrow = json::array(), irow = json::array();
        for (Eigen::Index j = 0; j < d; ++j) {
            rrow.push_back(rho.matrix()(i, j).real());
            irow.push_back(rho.matrix()(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"n_particles", rho.n_particles()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline qspin::DensityMatrix density_from_json(const json& j) {
    const int n = j.at("n_particles").get<int>();
    const Eigen::Index d = qspin::dim_of(n);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<Eigen::Index>(re.size()) != d || static_cast<Eigen::Index>(im.size()) != d)
        throw std::invalid_argument("density_from_json: matrix size does not match n_particles");
    qspin::Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index jj = 0; jj < d; ++jj)
            m(i, jj) = qspin::cplx(re[i][jj].get<double>(), im[i][jj].get<double>());
    return qspin::DensityMatrix(std::move(m), n);
}

inline json cvstate_to_json(const cvmode::CVState& s) {
    const int d = s.config().fock_dim;
    json re = json::array(), im = json::array();
    for (int i = 0; i < d; ++i) {
        json rrow = json::array(), irow = json::array();
        for (int j = 0; j < d; ++j) {
            rrow.push_back(s.matrix()(i, j).real());
            irow.push_back(s.matrix()(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"dim", d},
                {"re", std::move(re)},
                {"im", std::move(im)},
                {"sigma", s.config().sigma},
                {"hbar", s.config().hbar}};
}

inline cvmode::CVState cvstate_from_json(const json& j, double box_x, double box_p) {
    cvmode::CVConfig cfg;
    cfg.fock_dim = j.at("dim").get<int>();
    cfg.sigma = j.at("sigma").get<double>();
    cfg.hbar = j.at("hbar").get<double>();
    cfg.box_x = box_x;
    cfg.box_p = box_p;
    Eigen::MatrixXcd m(cfg.fock_dim, cfg.fock_dim);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    for (int i = 0; i < cfg.fock_dim; ++i)
        for (int jj = 0; jj < cfg.fock_dim; ++jj)
            m(i, jj) = cvmode::cplx(re[i][jj].get<double>(), im[i][jj].get<double>());
    return cvmode::CVState(std::move(m), cfg);
}

/// Notebook CSV: trial_index, accepted, then theta_j, phi_j per particle.
inline void write_direction_log_csv(std::ostream& os, const experiment::DirectionLog& log,
                                    int n_particles) {
    os << "trial_index,accepted";
    for (int j = 1; j <= n_particles; ++j) os << ",theta_" << j << ",phi_" << j;
    os << "\n";
    for (const auto& r : log.recorded) {
        os << r.trial << ",1";
        for (const auto& d : r.dirs) os << "," << fmt(d.polar()) << "," << fmt(d.azimuth());
        os << "\n";
    }
}

inline void write_cv_log_csv(std::ostream& os, const cvmode::CvLog& log) {
    os << "trial_index,accepted,x_star,p_star\n";
    for (const auto& r : log.recorded)
        os << r.first << ",1," << fmt(r.second.x_star) << "," << fmt(r.second.p_star) << "\n";
}

/// Husimi field on a grid: theta_1, phi_1, ..., value.
inline void write_husimi_field_csv(std::ostream& os, const qspin::DensityMatrix& rho,
                                   const grid::ProductGrid& pg) {
    const int n = pg.n_particles();
    for (int j = 1; j <= n; ++j) os << "theta_" << j << ",phi_" << j << ",";
    os << "value\n";
    pg.for_each([&](const DirectionTuple& tuple, double) {
        for (const auto& d : tuple) os << fmt(d.polar()) << "," << fmt(d.azimuth()) << ",";
        os << fmt(husimi::husimi_eval(rho, tuple)) << "\n";
    });
}

inline void write_top_trajectory_csv(std::ostream& os,
                                     const std::vector<classitop::TimedTopState>& traj) {
    os << "t,w_x,w_y,w_z\n";
    for (const auto& p : traj)
        os << fmt(p.t) << "," << fmt(p.state.w.x) << "," << fmt(p.state.w.y) << ","
           << fmt(p.state.w.z) << "\n";
}

inline void write_canonical_trajectory_csv(
    std::ostream& os, const std::vector<classitop::TimedCanonicalState>& traj) {
    os << "t,w_x,w_y,w_z,varphi,p_varphi,H\n";
    for (const auto& p : traj) {
        const Vec3 w = classitop::canonical_to_axis(p.state);
        os << fmt(p.t) << "," << fmt(w.x) << "," << fmt(w.y) << "," << fmt(w.z) << ","
           << fmt(p.state.varphi) << "," << fmt(p.state.p_varphi) << "," << fmt(p.energy)
           << "\n";
    }
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for digest: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::uint64_t density_hash(const qspin::DensityMatrix& rho) {
    std::ostringstream ss;
    for (Eigen::Index i = 0; i < rho.dim(); ++i)
        for (Eigen::Index j = 0; j < rho.dim(); ++j)
            ss << fmt(rho.matrix()(i, j).real()) << "," << fmt(rho.matrix()(i, j).imag()) << ";";
    return rng::fnv1a64(ss.str());
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace phaselab::io

#endif
