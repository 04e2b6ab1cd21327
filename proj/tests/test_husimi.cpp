#include <doctest.h>

#include <cmath>

#include "phaselab/husimi.hpp"

using namespace phaselab;
using qspin::DensityMatrix;

namespace {

// entropy constants derived in closed form:
//   uniform density 1/(4pi):    S = ln(4pi)
//   coherent density (1+c)/4pi: S = ln(2pi) + 1/2, via int_0^1 2x ln x dx = -1/2
const double kUniformEntropy = std::log(4.0 * M_PI);
const double kCoherentEntropy = std::log(2.0 * M_PI) + 0.5;

}  // namespace

TEST_CASE("husimi evaluation basics") {
    const auto mixed1 = DensityMatrix::maximally_mixed(1);
    rng::Stream s(21);
    for (int i = 0; i < 10; ++i)
        CHECK(husimi::husimi_eval(mixed1, {s.unit_vector()}) ==
              doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));

    // N=1 coherent: (1 + n.n0)/(4pi), oracle |<n|n0>|^2 = cos^2(Theta/2)
    const UnitVector n0 = s.unit_vector();
    const auto pure = DensityMatrix::pure(qspin::coherent_ket(n0));
    for (int i = 0; i < 30; ++i) {
        const UnitVector n = s.unit_vector();
        CHECK(husimi::husimi_eval(pure, {n}) ==
              doctest::Approx((1.0 + n.dot(n0)) / (4.0 * M_PI)).epsilon(1e-10));
    }
    CHECK(husimi::husimi_eval(pure, {n0.antipode()}) <= 1e-15);

    // bound 0 <= P_H <= 1/(2pi)^N over random states and directions
    for (int i = 0; i < 20; ++i) {
        const auto rho = qspin::random_mixed_state(2, 1 + i % 4, 500 + i);
        const double p = husimi::husimi_eval(rho, s.direction_tuple(2));
        CHECK(p >= -1e-12);
        CHECK(p <= husimi::husimi_bound(2) + 1e-12);
    }
}

TEST_CASE("completeness residual") {
    CHECK(husimi::completeness_residual(grid::sphere_grid(16)) <= 1e-12);
    CHECK(husimi::completeness_residual(grid::sphere_grid(2)) <= 1e-12);  // degree-1 integrand
    CHECK(husimi::completeness_residual(grid::ProductGrid(grid::sphere_grid(8), 2)) <= 1e-10);
}

TEST_CASE("husimi normalization by quadrature") {
    CHECK(husimi::integrate_husimi(DensityMatrix::maximally_mixed(1), grid::sphere_grid(4)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(husimi::integrate_husimi(qspin::random_pure_state(1, 77), grid::sphere_grid(16)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(husimi::integrate_husimi(qspin::random_mixed_state(2, 4, 78),
                                   grid::ProductGrid(grid::sphere_grid(8), 2)) ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("wehrl quadrature closed forms") {
    const auto g = grid::sphere_grid(64);
    CHECK(husimi::wehrl_quadrature(DensityMatrix::maximally_mixed(1), g) ==
          doctest::Approx(kUniformEntropy).epsilon(1e-12));

    const auto pure = DensityMatrix::pure(qspin::coherent_ket(UnitVector(0.0, 0.0, 1.0)));
    CHECK(std::abs(husimi::wehrl_quadrature(pure, g) - kCoherentEntropy) <= 1e-6);

    // two-qubit product of coherent states: additive entropy
    const auto prod = DensityMatrix::pure(qspin::product_coherent_ket(
        {UnitVector::from_angles(0.7, 1.1), UnitVector::from_angles(2.0, 4.0)}));
    const double s2 =
        husimi::wehrl_quadrature(prod, grid::ProductGrid(grid::sphere_grid(48), 2));
    CHECK(std::abs(s2 - 2.0 * kCoherentEntropy) <= 1e-5);
}

TEST_CASE("wehrl quadrature convergence under order halving") {
    const auto rho = qspin::random_mixed_state(1, 2, 300);
    const double s64 = husimi::wehrl_quadrature(rho, grid::sphere_grid(64));
    const double s32 = husimi::wehrl_quadrature(rho, grid::sphere_grid(32));
    CHECK(std::abs(s64 - s32) <= 1e-5);  // residual halving check
}

TEST_CASE("wehrl bounds and rotation covariance") {
    const auto g = grid::sphere_grid(64);
    // lower bound: coherent states minimize (desk-scale Lieb property)
    for (int i = 0; i < 25; ++i) {
        const auto rho = qspin::random_pure_state(1, 1000 + i);
        CHECK(husimi::wehrl_quadrature(rho, g) >= kCoherentEntropy - 1e-6);
    }
    // upper bound attained by the maximally mixed state
    for (int i = 0; i < 10; ++i) {
        const auto rho = qspin::random_mixed_state(1, 2, 2000 + i);
        CHECK(husimi::wehrl_quadrature(rho, g) <= kUniformEntropy + 1e-9);
    }
    // single-qubit rotation rigidly rotates the Husimi field
    const auto rho = qspin::random_mixed_state(1, 2, 37);
    rng::Stream s(38);
    const UnitVector axis = s.unit_vector();
    const double ang = 1.234;
    const Eigen::Matrix2cd u =
        std::cos(ang / 2.0) * Eigen::Matrix2cd::Identity() -
        qspin::cplx(0.0, 1.0) * std::sin(ang / 2.0) * qspin::sigma_dot_n(axis);
    const qspin::DensityMatrix rot(u * rho.matrix() * u.adjoint(), 1);
    CHECK(husimi::wehrl_quadrature(rot, g) ==
          doctest::Approx(husimi::wehrl_quadrature(rho, g)).epsilon(1e-10));
}

TEST_CASE("state distinguishability through the Husimi field") {
    const auto g = grid::sphere_grid(8);
    rng::Stream seeds(4242);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = qspin::random_mixed_state(1, 2, 3000 + rep);
        const auto b = qspin::random_pure_state(1, 4000 + rep);
        double dmax = 0.0;
        for (const auto& node : g.nodes)
            dmax = std::max(dmax, std::abs(husimi::husimi_eval(a, {node.dir}) -
                                           husimi::husimi_eval(b, {node.dir})));
        CHECK(dmax > 1e-6);
    }
}

TEST_CASE("wehrl monte carlo estimator") {
    const auto mixed = DensityMatrix::maximally_mixed(1);
    const auto flat = husimi::wehrl_mc(mixed, 100000, 5);
    CHECK(flat.estimate == doctest::Approx(kUniformEntropy).epsilon(1e-12));
    CHECK(flat.stderr_ <= 1e-12);  // constant integrand

    const auto pure = DensityMatrix::pure(qspin::coherent_ket(UnitVector(0.0, 0.0, 1.0)));
    const auto mc = husimi::wehrl_mc(pure, 1000000, 6);
    CHECK(std::abs(mc.estimate - kCoherentEntropy) <= 3.0 * mc.stderr_);

    // determinism per seed
    const auto mc2 = husimi::wehrl_mc(pure, 10000, 6);
    const auto mc3 = husimi::wehrl_mc(pure, 10000, 6);
    CHECK(mc2.estimate == mc3.estimate);
    CHECK_THROWS_AS(husimi::wehrl_mc(pure, 10, 1), std::invalid_argument);
}

TEST_CASE("monte carlo agrees with quadrature on random states") {
    const auto g = grid::sphere_grid(64);
    int agree = 0;
    for (int i = 0; i < 20; ++i) {
        const auto rho = qspin::random_mixed_state(1, 1 + i % 2, 6000 + i);
        const double ref = husimi::wehrl_quadrature(rho, g);
        const auto mc = husimi::wehrl_mc(rho, 20000, 7000 + i);
        if (std::abs(mc.estimate - ref) < 4.0 * mc.stderr_) ++agree;
    }
    CHECK(agree >= 18);
}
