#include <doctest.h>

#include <cmath>

#include "phaselab/rng.hpp"
#include "phaselab/sphere_grid.hpp"
#include "phaselab/stats.hpp"

using namespace phaselab;

TEST_CASE("splitmix64 reference vectors") {
    std::uint64_t state = 0;
    CHECK(rng::splitmix64(state) == 0xE220A8397B1DCDAFULL);
    CHECK(rng::splitmix64(state) == 0x6E789E6AA1B965F4ULL);
    CHECK(rng::splitmix64(state) == 0x06C45D188009454FULL);
}

TEST_CASE("stream determinism and derived independence") {
    rng::Stream a(rng::derive(42, "unit")), b(rng::derive(42, "unit"));
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(rng::derive(42, "x") != rng::derive(42, "y"));
    CHECK(rng::derive(42, std::uint64_t{0}) != rng::derive(43, std::uint64_t{0}));
}

TEST_CASE("uniform sphere sampling moments") {
    rng::Stream s(rng::derive(1, "sphere"));
    const int m = 200000;
    double sz = 0.0, szz = 0.0;
    for (int i = 0; i < m; ++i) {
        const double z = s.unit_vector().z();
        sz += z;
        szz += z * z;
    }
    CHECK(std::abs(sz / m) < 4.0 / std::sqrt(3.0 * m));          // <z> = 0
    CHECK(std::abs(szz / m - 1.0 / 3.0) < 5.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const auto gl = grid::gauss_legendre(8);
    double s0 = 0.0, s6 = 0.0;
    for (const auto& n : gl) {
        s0 += n.w;
        s6 += n.w * std::pow(n.x, 6);
    }
    CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s6 == doctest::Approx(2.0 / 7.0).epsilon(1e-13));
}

TEST_CASE("sphere grid weights and moments") {
    CHECK_THROWS_AS(grid::sphere_grid(1), std::invalid_argument);

    const auto g2 = grid::sphere_grid(2);
    CHECK(g2.nodes.size() == 8);
    CHECK(g2.total_weight() == doctest::Approx(4.0 * M_PI).epsilon(1e-12));

    const auto g = grid::sphere_grid(16);
    double z1 = 0.0, z2 = 0.0, z3 = 0.0, z4 = 0.0;
    for (const auto& n : g.nodes) {
        z1 += n.weight * n.dir.z();
        z2 += n.weight * n.dir.z() * n.dir.z();
        z3 += n.weight * std::pow(n.dir.z(), 3);
        z4 += n.weight * std::pow(n.dir.z(), 4);
    }
    CHECK(std::abs(z1) <= 1e-12);
    CHECK(z2 == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
    CHECK(std::abs(z3) <= 1e-12);
    CHECK(z4 == doctest::Approx(4.0 * M_PI / 5.0).epsilon(1e-12));
}

TEST_CASE("product grid total weight and iteration order") {
    const auto pg = grid::ProductGrid(grid::sphere_grid(4), 2);
    CHECK(pg.total_weight() == doctest::Approx(std::pow(4.0 * M_PI, 2)).epsilon(1e-8));
    std::size_t count = 0;
    double wsum = 0.0;
    pg.for_each([&](const DirectionTuple& t, double w) {
        CHECK(t.size() == 2);
        wsum += w;
        ++count;
    });
    CHECK(count == pg.size());
    CHECK(wsum == doctest::Approx(pg.total_weight()).epsilon(1e-12));
}

TEST_CASE("chi-square tail values") {
    // reference values from the identity Q(1, x) = erfc(sqrt(x/2))
    CHECK(stats::chi2_sf(1.0, 1.0) == doctest::Approx(std::erfc(std::sqrt(0.5))).epsilon(1e-12));
    // Q(k=2, x) = exp(-x/2)
    CHECK(stats::chi2_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
    // k=4: Q = (1 + x/2) exp(-x/2)
    CHECK(stats::chi2_sf(5.0, 4.0) == doctest::Approx((1.0 + 2.5) * std::exp(-2.5)).epsilon(1e-12));
}

TEST_CASE("chi-square GOF pools underfilled bins and rejects hopeless input") {
    std::vector<double> obs{52, 48, 50, 1};
    std::vector<double> exp{50, 50, 48, 3};  // last bin pooled away alone -> fails threshold
    CHECK_THROWS(stats::chi2_gof(obs, exp));

    std::vector<double> obs2{52, 48, 50, 1, 3};
    std::vector<double> exp2{50, 50, 47, 3, 4};  // pooled group reaches 7 >= 5
    const auto r = stats::chi2_gof(obs2, exp2);
    CHECK(r.dof == 3);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value <= 1.0);
}

TEST_CASE("one-sample KS against known uniform data") {
    rng::Stream s(rng::derive(9, "ks"));
    std::vector<double> data;
    for (int i = 0; i < 5000; ++i) data.push_back(s.uniform());
    const auto ok = stats::ks_one_sample(data, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(ok.p_value > 0.001);
    const auto bad = stats::ks_one_sample(data, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
    CHECK(bad.p_value < 1e-10);
}

TEST_CASE("two-sample KS separates shifted samples") {
    rng::Stream s(rng::derive(10, "ks2"));
    std::vector<double> a, b, c;
    for (int i = 0; i < 4000; ++i) {
        a.push_back(s.normal());
        b.push_back(s.normal());
        c.push_back(s.normal() + 0.25);
    }
    CHECK(stats::ks_two_sample(a, b).p_value > 0.001);
    CHECK(stats::ks_two_sample(a, c).p_value < 1e-8);
}
