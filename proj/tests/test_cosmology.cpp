#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "multilens/cosmology.hpp"
#include "multilens/errors.hpp"

using namespace multilens;

namespace {

// Matter-only flat universe: d^C(0, z) = 2 (1 - 1/sqrt(1+z)).
double eds_closed_form(double z) { return 2.0 * (1.0 - 1.0 / std::sqrt(1.0 + z)); }

const Cosmology kEds = Cosmology::make(1.0, 0.0);

}  // namespace

TEST_CASE("comoving distance: degenerate and closed-form cases") {
  CHECK(comoving_distance(kEds, 1.3, 1.3) == 0.0);
  CHECK(comoving_distance(kEds, 0, 3) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(comoving_distance(kEds, 0, 8) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-11));
  for (double z : {0.5, 1.0, 2.0, 3.0, 8.0}) {
    CHECK(std::abs(comoving_distance(kEds, 0, z) - eds_closed_form(z)) <=
          1e-9);
  }
}

TEST_CASE("quadrature is stable under tolerance halving") {
  for (double z : {0.5, 1.0, 2.0, 3.0, 8.0}) {
    const double a = comoving_distance(kEds, 0, z, 1e-10);
    const double b = comoving_distance(kEds, 0, z, 5e-11);
    CHECK(std::abs(a - b) <= 1e-9);
  }
  const Cosmology lcdm = Cosmology::make(0.3, 0.7);
  const double a = comoving_distance(lcdm, 0.2, 5.0, 1e-10);
  const double b = comoving_distance(lcdm, 0.2, 5.0, 5e-11);
  CHECK(std::abs(a - b) <= 1e-9);
}

TEST_CASE("comoving distance rejects a vanishing expansion rate") {
  // omega_m = 0.1, omega_lambda = 2 drives the radicand negative in range
  const Cosmology bad = Cosmology::make(0.1, 2.0);
  CHECK_THROWS_AS(comoving_distance(bad, 0, 3), ValidationError);
  CHECK_THROWS_AS(comoving_distance(kEds, 2.0, 1.0), ValidationError);
}

TEST_CASE("transverse comoving distance branches") {
  CHECK(transverse_comoving(kEds, 0.7) == 0.7);

  const Cosmology open = Cosmology::make(0.0, 0.0);  // omega_k = 1
  CHECK(open.omega_k == 1.0);
  CHECK(transverse_comoving(open, 1.0) ==
        doctest::Approx(std::sinh(1.0)).epsilon(1e-12));

  const Cosmology closed = Cosmology::make(0.5, 1.5);  // omega_k = -1
  CHECK(transverse_comoving(closed, 1.0) ==
        doctest::Approx(std::sin(1.0)).epsilon(1e-12));

  SUBCASE("both curved branches meet the flat one as omega_k -> 0") {
    for (double sign : {+1.0, -1.0}) {
      Cosmology c = kEds;
      c.omega_k = sign * 1e-6;
      const double d = transverse_comoving(c, 1.0);
      CHECK(std::abs(d - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("angular diameter distance") {
  CHECK(angular_diameter(kEds, 2.0, 2.0) == 0.0);
  CHECK(angular_diameter(kEds, 0, 3) == doctest::Approx(0.25).epsilon(1e-10));
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> zd(0.1, 6.0);
  for (int t = 0; t < 20; ++t) {
    double z1 = zd(rng), z2 = zd(rng);
    if (z1 > z2) std::swap(z1, z2);
    CHECK(angular_diameter(kEds, z1, z2) <=
          transverse_comoving_between(kEds, z1, z2));
  }
}

TEST_CASE("plane parameters for the matter-only z = (1, 2, 3) system") {
  const PlaneRedshifts zr({1.0, 2.0, 3.0});
  const PlaneParameters p = plane_parameters(kEds, zr);
  REQUIRE(p.betas.size() == 2);
  REQUIRE(p.epsilons.size() == 2);

  // closed-form oracle
  const double d1 = eds_closed_form(1.0);
  const double d2 = eds_closed_form(2.0);
  const double d3 = eds_closed_form(3.0);
  const double beta1 = (d2 - d1) / d2;
  const double beta2 = (d3 - d2) / d3;
  const double eps2 = d1 * (d3 - d2) / ((d2 - d1) * d3);

  CHECK(p.epsilons[0] == 0.0);
  CHECK(p.betas[0] == doctest::Approx(beta1).epsilon(1e-9));
  CHECK(p.betas[1] == doctest::Approx(beta2).epsilon(1e-9));
  CHECK(p.epsilons[1] == doctest::Approx(eps2).epsilon(1e-8));
  // frozen oracle values
  CHECK(p.betas[0] == doctest::Approx(0.3070072040).epsilon(1e-6));
  CHECK(p.epsilons[1] == doctest::Approx(0.3491981804).epsilon(1e-6));
}

TEST_CASE("flat additivity of transverse comoving distances") {
  const Cosmology lcdm = Cosmology::make(0.3, 0.7);
  for (auto [z1, z2, z3] : {std::tuple{0.5, 1.0, 2.0}, {1.0, 2.0, 3.0},
                            {0.1, 3.0, 7.0}}) {
    const double a = transverse_comoving_between(lcdm, z1, z2);
    const double b = transverse_comoving_between(lcdm, z2, z3);
    const double c = transverse_comoving_between(lcdm, z1, z3);
    CHECK(std::abs(a + b - c) <= 1e-9);
  }
}

TEST_CASE("beta and epsilon ranges over random flat configurations") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> om(0.05, 1.0);
  for (int t = 0; t < 25; ++t) {
    const double m = om(rng);
    const Cosmology c = Cosmology::make(m, 1.0 - m);
    std::vector<double> zs;
    double z = 0.0;
    const int planes = 1 + t % 3;
    for (int i = 0; i <= planes; ++i) {
      z += std::uniform_real_distribution<double>(0.2, 2.0)(rng);
      zs.push_back(z);
    }
    const PlaneParameters p = plane_parameters(c, PlaneRedshifts(zs));
    CHECK(p.epsilons[0] == 0.0);
    for (double b : p.betas) {
      CHECK(b > 0.0);
      CHECK(b < 1.0);
    }
    for (double e : p.epsilons) CHECK(e >= 0.0);
  }
}

TEST_CASE("redshift list validation") {
  CHECK_THROWS_AS(PlaneRedshifts({1.0}), ValidationError);
  CHECK_THROWS_AS(PlaneRedshifts({2.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(PlaneRedshifts({0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(PlaneRedshifts({1.0, 1.0, 2.0}), ValidationError);
}

TEST_CASE("realize_small_epsilon") {
  const PlaneRedshifts zr({1.0, 2.0, 3.0});
  const PlaneParameters base = plane_parameters(kEds, zr);
  const double current = base.epsilons[1];

  SUBCASE("identity at the current epsilon") {
    const auto r =
        realize_small_epsilon(kEds, zr, current, EpsilonMode::foreground);
    CHECK(r.redshifts.zs[0] == doctest::Approx(1.0));
    CHECK(r.mass_rescale_factors[0] == doctest::Approx(1.0));
    CHECK(r.mass_rescale_factors[1] == doctest::Approx(1.0));
  }

  SUBCASE("foreground mode hits the target and keeps the bending terms") {
    const double target = 0.01;
    const auto r =
        realize_small_epsilon(kEds, zr, target, EpsilonMode::foreground);
    CHECK(std::abs(r.achieved_epsilon - target) <= 1e-8);
    CHECK(r.redshifts.zs[0] > 0.0);
    CHECK(r.redshifts.zs[0] < 1.0);
    CHECK(r.redshifts.zs[1] == 2.0);
    CHECK(r.mass_rescale_factors[0] < 1.0);  // foreground masses shrink
    CHECK(r.mass_rescale_factors[1] == doctest::Approx(1.0));

    // bending-term scaling d^M_{i,i+1} M_i / (d^A_i d^M_{i+1}) is preserved
    auto scaling = [&](double zn, double zf, double zp, double mass) {
      return transverse_comoving_between(kEds, zn, zf) * mass /
             (angular_diameter(kEds, 0, zp) *
              transverse_comoving_between(kEds, 0, zf));
    };
    const double s1_old = scaling(1.0, 2.0, 1.0, 1.0);
    const double s1_new = scaling(r.redshifts.zs[0], 2.0, r.redshifts.zs[0],
                                  r.mass_rescale_factors[0]);
    CHECK(std::abs(s1_new - s1_old) <= 1e-8 * s1_old);
    const double s2_old = scaling(2.0, 3.0, 2.0, 1.0);
    const double s2_new = scaling(2.0, r.redshifts.zs[2], 2.0,
                                  r.mass_rescale_factors[1]);
    CHECK(std::abs(s2_new - s2_old) <= 1e-8 * s2_old);
  }

  SUBCASE("background mode pushes the source toward plane 2, masses up") {
    const double target = 0.05;
    const auto r =
        realize_small_epsilon(kEds, zr, target, EpsilonMode::background);
    CHECK(std::abs(r.achieved_epsilon - target) <= 1e-8);
    CHECK(r.redshifts.zs[2] > 2.0);
    CHECK(r.redshifts.zs[2] < 3.0);
    CHECK(r.mass_rescale_factors[0] == doctest::Approx(1.0));
    CHECK(r.mass_rescale_factors[1] > 1.0);

    auto scaling = [&](double zn, double zf, double zp, double mass) {
      return transverse_comoving_between(kEds, zn, zf) * mass /
             (angular_diameter(kEds, 0, zp) *
              transverse_comoving_between(kEds, 0, zf));
    };
    const double s2_old = scaling(2.0, 3.0, 2.0, 1.0);
    const double s2_new = scaling(2.0, r.redshifts.zs[2], 2.0,
                                  r.mass_rescale_factors[1]);
    CHECK(std::abs(s2_new - s2_old) <= 1e-8 * s2_old);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(
        realize_small_epsilon(kEds, zr, 2.0 * current,
                              EpsilonMode::foreground),
        ValidationError);
    CHECK_THROWS_AS(
        realize_small_epsilon(kEds, zr, -0.1, EpsilonMode::foreground),
        ValidationError);
    const Cosmology curved = Cosmology::make(0.3, 0.4);
    CHECK_THROWS_AS(
        realize_small_epsilon(curved, zr, 0.01, EpsilonMode::foreground),
        ValidationError);
    const PlaneRedshifts three({0.5, 1.0, 2.0, 3.0});
    CHECK_THROWS_AS(
        realize_small_epsilon(kEds, three, 0.01, EpsilonMode::foreground),
        ValidationError);
  }
}
