#include <doctest.h>

#include <cmath>

#include "phaselab/io.hpp"
#include "phaselab/qspin.hpp"

using namespace phaselab;
using qspin::cplx;

TEST_CASE("unit vector invariants and angle round trip") {
    CHECK_THROWS_AS(UnitVector(1.0, 1.0, 0.0), std::invalid_argument);
    rng::Stream s(11);
    for (int i = 0; i < 200; ++i) {
        const UnitVector n = s.unit_vector();
        CHECK(std::abs(n.vec().dot(n.vec()) - 1.0) <= 1e-12);
        const UnitVector back = UnitVector::from_angles(n.polar(), n.azimuth());
        CHECK(std::abs(back.x() - n.x()) <= 1e-12);
        CHECK(std::abs(back.y() - n.y()) <= 1e-12);
        CHECK(std::abs(back.z() - n.z()) <= 1e-12);
    }
    // azimuth is defined as 0 at the poles
    CHECK(UnitVector(0.0, 0.0, 1.0).azimuth() == 0.0);
    CHECK(UnitVector(0.0, 0.0, -1.0).azimuth() == 0.0);
}

TEST_CASE("coherent ket matches the Bloch convention") {
    const auto up = qspin::coherent_ket(UnitVector::from_angles(0.0, 1.3));
    CHECK(std::abs(up.amps(0) - cplx(1.0, 0.0)) <= 1e-15);
    CHECK(std::abs(up.amps(1)) <= 1e-15);

    const auto down = qspin::coherent_ket(UnitVector::from_angles(M_PI, 0.0));
    CHECK(std::abs(down.amps(0)) <= 1e-12);
    CHECK(std::abs(down.amps(1) - cplx(1.0, 0.0)) <= 1e-12);

    // theta = pi/2, phi = 0: eigenvector of the explicit sigma_x matrix
    const auto plus_x = qspin::coherent_ket(UnitVector::from_angles(M_PI / 2.0, 0.0));
    Eigen::Matrix2cd sx;
    sx << 0, 1, 1, 0;
    const Eigen::Vector2cd res = sx * plus_x.amps - plus_x.amps;
    CHECK(res.norm() <= 1e-12);
    CHECK(std::abs(plus_x.amps(0).real() - 1.0 / std::sqrt(2.0)) <= 1e-15);
}

TEST_CASE("eigen-equation (sigma.n) |n> = |n> for random directions") {
    rng::Stream s(7);
    for (int i = 0; i < 100; ++i) {
        const UnitVector n = s.unit_vector();
        const Eigen::Matrix2cd m = qspin::sigma_dot_n(n);
        CHECK(std::abs(m.trace()) <= 1e-14);
        CHECK(std::abs(m.determinant() + 1.0) <= 1e-13);
        const auto k = qspin::coherent_ket(n);
        CHECK((m * k.amps - k.amps).norm() <= 1e-12);
    }
}

TEST_CASE("product coherent ket") {
    const UnitVector zp(0.0, 0.0, 1.0);
    const UnitVector xp(1.0, 0.0, 0.0);

    const auto single = qspin::product_coherent_ket({zp});
    CHECK(single.amps.size() == 2);
    CHECK(std::abs(single.amps(0) - cplx(1.0, 0.0)) <= 1e-15);

    const auto upup = qspin::product_coherent_ket({zp, zp});
    CHECK(std::abs(upup.amps(0) - cplx(1.0, 0.0)) <= 1e-15);
    CHECK(upup.amps.tail(3).norm() <= 1e-15);

    // (+z, +x): explicit Kronecker product of the two single-qubit kets
    const auto zx = qspin::product_coherent_ket({zp, xp});
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(zx.amps(0) - cplx(r, 0.0)) <= 1e-12);
    CHECK(std::abs(zx.amps(1) - cplx(r, 0.0)) <= 1e-12);
    CHECK(std::abs(zx.amps(2)) <= 1e-12);
    CHECK(std::abs(zx.amps(3)) <= 1e-12);
    zx.check();
}

TEST_CASE("outcome_plus_prob") {
    rng::Stream s(3);
    const UnitVector n0 = s.unit_vector();
    const auto rho0 = qspin::DensityMatrix::pure(qspin::coherent_ket(n0));
    CHECK(qspin::outcome_plus_prob(rho0, {n0}) == doctest::Approx(1.0).epsilon(1e-12));

    const auto mixed = qspin::DensityMatrix::maximally_mixed(2);
    for (int i = 0; i < 20; ++i)
        CHECK(qspin::outcome_plus_prob(mixed, s.direction_tuple(2)) ==
              doctest::Approx(0.25).epsilon(1e-12));

    // N=1, rho = |+z><+z|, direction at polar angle theta -> cos^2(theta/2),
    // oracle |<n|+z>|^2 from the 2x2 inner product
    const auto up = qspin::DensityMatrix::pure(qspin::coherent_ket(UnitVector(0.0, 0.0, 1.0)));
    for (double theta : {0.1, 0.7, 1.9, 3.0}) {
        const UnitVector n = UnitVector::from_angles(theta, 0.8);
        const double c = std::cos(theta / 2.0);
        CHECK(qspin::outcome_plus_prob(up, {n}) == doctest::Approx(c * c).epsilon(1e-12));
    }

    CHECK_THROWS_AS(qspin::outcome_plus_prob(mixed, {n0}), std::invalid_argument);
}

TEST_CASE("probability factorizes over product states and completes over antipodes") {
    rng::Stream s(5);
    const auto rho_a = qspin::random_mixed_state(1, 2, 101);
    const auto rho_b = qspin::random_pure_state(1, 202);
    qspin::Matrix joint = qspin::Matrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            joint.block(2 * i, 2 * j, 2, 2) = rho_a.matrix()(i, j) * rho_b.matrix();
    const qspin::DensityMatrix rho_ab(joint, 2);

    for (int i = 0; i < 30; ++i) {
        const UnitVector n1 = s.unit_vector(), n2 = s.unit_vector();
        const double pj = qspin::outcome_plus_prob(rho_ab, {n1, n2});
        const double p1 = qspin::outcome_plus_prob(rho_a, {n1});
        const double p2 = qspin::outcome_plus_prob(rho_b, {n2});
        CHECK(pj == doctest::Approx(p1 * p2).epsilon(1e-10));
    }

    // antipodal completeness: <n|rho|n> + <-n|rho|-n> = 1 for N = 1
    for (int i = 0; i < 30; ++i) {
        const UnitVector n = s.unit_vector();
        const double p = qspin::outcome_plus_prob(rho_a, {n});
        const double q = qspin::outcome_plus_prob(rho_a, {n.antipode()});
        CHECK(p + q == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p >= -1e-12);
        CHECK(p <= 1.0 + 1e-12);
    }
}

TEST_CASE("validate_density") {
    CHECK(qspin::validate_density(qspin::DensityMatrix::maximally_mixed(1)).pass());

    qspin::Matrix bad(2, 2);
    bad << 1.0, 0.0, 0.0, 0.1;
    CHECK_FALSE(qspin::validate_density(qspin::DensityMatrix(bad, 1)).pass());
    CHECK(qspin::validate_density(qspin::DensityMatrix(bad, 1)).trace_deviation ==
          doctest::Approx(0.1));

    CHECK(qspin::validate_density(qspin::random_mixed_state(2, 4, 99)).pass());
    CHECK_THROWS_AS(qspin::particles_of(3), std::invalid_argument);
}

TEST_CASE("random state fixtures are deterministic and well formed") {
    const auto a = qspin::random_pure_state(1, 42);
    const auto b = qspin::random_pure_state(1, 42);
    CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.purity() == doctest::Approx(1.0).epsilon(1e-10));

    const auto m = qspin::random_mixed_state(2, 4, 7);
    CHECK(m.purity() < 1.0 - 1e-3);
    CHECK(qspin::validate_density(m).pass());
    CHECK_THROWS_AS(qspin::random_mixed_state(1, 3, 0), std::invalid_argument);
}

TEST_CASE("density matrix JSON round trip is exact") {
    const auto rho = qspin::random_mixed_state(2, 3, 1234);
    const auto j = io::density_to_json(rho);
    const auto back = io::density_from_json(j);
    CHECK(back.n_particles() == 2);
    CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reduced state and Bloch vector") {
    const UnitVector n0 = UnitVector::from_angles(1.1, 2.2);
    const auto rho1 = qspin::DensityMatrix::pure(qspin::coherent_ket(n0));
    const Vec3 r = qspin::bloch_vector(rho1.matrix());
    CHECK(r.x == doctest::Approx(n0.x()).epsilon(1e-12));
    CHECK(r.y == doctest::Approx(n0.y()).epsilon(1e-12));
    CHECK(r.z == doctest::Approx(n0.z()).epsilon(1e-12));

    // tracing particle 2 out of |n0> (x) |m> returns |n0><n0|
    const UnitVector m0 = UnitVector::from_angles(0.4, 5.0);
    const auto rho2 = qspin::DensityMatrix::pure(qspin::product_coherent_ket({n0, m0}));
    const Eigen::Matrix2cd red = qspin::reduced_single(rho2, 0);
    CHECK((red - rho1.matrix()).cwiseAbs().maxCoeff() <= 1e-14);
}
