#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "multilens/builder.hpp"
#include "multilens/errors.hpp"
#include "multilens/rhie.hpp"
#include "multilens/solver.hpp"

using namespace multilens;

TEST_CASE("scale_plane scales masses and positions") {
  const LensPlane plane({{{1, 0}, 1.0}});
  const LensPlane scaled = scale_plane(plane, 2.0);
  CHECK(scaled.masses()[0].einstein_radius == doctest::Approx(2.0));
  CHECK(scaled.masses()[0].position.u == doctest::Approx(2.0));

  const LensPlane same = scale_plane(plane, 1.0);
  CHECK(same.masses()[0].einstein_radius == 1.0);
  CHECK(same.masses()[0].position.u == 1.0);

  CHECK_THROWS_AS(scale_plane(plane, 0.0), ValidationError);
  CHECK_THROWS_AS(scale_plane(plane, -2.0), ValidationError);
}

TEST_CASE("scaling moves the one-mass image by the same factor") {
  // u^2 - 0.5 u - 1 = 0 gives the bright image of the unit lens at
  // source (0.5, 0); scaling by 10 must scale the image tenfold.
  const double u = (0.5 + std::sqrt(4.25)) / 2.0;
  MultiplaneLens lens({LensPlane({{{0, 0}, 1.0}})}, {0.5, 0});
  const SolveResult r1 = find_images(lens);
  REQUIRE(r1.images.size() == 2);
  CHECK(r1.images[1].position().u == doctest::Approx(u).epsilon(1e-10));

  const MultiplaneLens big = scale_system(lens, 10.0);
  CHECK(big.source().u == doctest::Approx(5.0));
  SolveOptions opts;
  opts.window_half_width = 30.0;
  const SolveResult r10 = find_images(big, opts);
  REQUIRE(r10.images.size() == 2);
  CHECK(r10.images[1].position().u == doctest::Approx(10.0 * u).epsilon(1e-9));
}

TEST_CASE("solution_radius pads the outermost front impact") {
  LensedImage img;
  img.path.impacts = {Vec2{0.8, 0.0}};
  CHECK(solution_radius({img}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(solution_radius({}), ValidationError);
}

TEST_CASE("solution_radius covers the two-mass ensemble census") {
  const auto [plane, cfg] = rhie_plane(2);
  const SolveResult r = find_images(MultiplaneLens({plane}, {0, 0}));
  REQUIRE(r.images.size() == 5);
  CHECK(solution_radius(r.images) >= 1.0);  // images straddle the unit masses
}

TEST_CASE("scaling equivariance of the solution set (two planes)") {
  const auto [p1, c1] = rhie_plane(2);
  const MultiplaneLens base({p1, scale_plane(p1, 0.1)}, {0, 0});
  const SolveResult ref = find_images(base);
  REQUIRE(ref.images.size() == 25);
  for (double lambda : {0.1, 2.0, 10.0}) {
    const MultiplaneLens scaled = scale_system(base, lambda);
    SolveOptions opts;
    opts.window_half_width = lambda * 4.0;
    const SolveResult got = find_images(scaled, opts);
    REQUIRE(got.images.size() == ref.images.size());
    // bijective match within 1e-8 * lambda
    for (const auto& img : ref.images) {
      const Vec2 want = lambda * img.position();
      double best = 1e18;
      for (const auto& other : got.images) {
        best = std::min(best, distance(other.position(), want));
      }
      CHECK(best <= 1e-8 * lambda);
    }
  }
}

TEST_CASE("perturb_epsilon swaps couplings only") {
  const auto [p1, c1] = rhie_plane(2);
  const MultiplaneLens base({p1, scale_plane(p1, 0.1)}, {0, 0});
  const MultiplaneLens same = perturb_epsilon(base, std::vector<double>{0.0});
  CHECK(same.epsilons()[0] == 0.0);
  const MultiplaneLens moved = perturb_epsilon(base, std::vector<double>{0.01});
  CHECK(moved.epsilons()[0] == 0.01);
  CHECK(moved.source() == base.source());
  CHECK_THROWS_AS(perturb_epsilon(base, std::vector<double>{0.1, 0.1}),
                  ValidationError);
}

TEST_CASE("explicit-lambda build reproduces the known counts") {
  BuildOptions opts;
  opts.lambdas = std::vector<double>{0.1};
  const int gs[] = {2, 2};
  const auto [lens, report] = build_preliminary(gs, opts);
  CHECK(report.expected_count == 25);
  CHECK(report.achieved_count_eps0 == 25);
  CHECK(report.lambdas.size() == 1);
  CHECK(report.lambdas[0] == doctest::Approx(0.1));
  CHECK(lens.plane(1).masses()[0].einstein_radius == doctest::Approx(0.1));

  SUBCASE("epsilon perturbation keeps the count at 0.01") {
    const MultiplaneLens moved =
        perturb_epsilon(lens, std::vector<double>{0.01});
    const SolveResult r = find_images(moved);
    CHECK(r.images.size() == 25);
  }
}

TEST_CASE("single-plane build needs no scaling") {
  const int gs[] = {3};
  const auto [lens, report] = build_preliminary(gs);
  CHECK(report.expected_count == 10);
  CHECK(report.achieved_count_eps0 == 10);
  CHECK(report.lambdas.empty());
}

TEST_CASE("automatic build: counts telescope for g=(2,2)") {
  BuildOptions opts;
  opts.source_radius.circle_samples = 16;
  opts.source_radius.bisect_iters = 10;
  opts.source_radius.solve.grid_n = 72;
  const int gs[] = {2, 2};
  const auto [lens, report] = build_preliminary(gs, opts);
  CHECK(report.achieved_count_eps0 == 25);
  REQUIRE(report.step_lambdas.size() == 1);
  CHECK(report.deltas[0] > 0.0);
  CHECK(report.radii[0] > 0.0);
  CHECK(report.step_lambdas[0] ==
        doctest::Approx(report.deltas[0] / report.radii[0]));

  SUBCASE("every solution is nondegenerate, factorwise") {
    const SolveResult r = find_images(lens);
    for (const auto& img : r.images) {
      const double full =
          lens.system_jacobian(img.path.impacts).determinant();
      CHECK(std::abs(full) >= 1e-10);
      for (std::size_t i = 1; i <= lens.num_planes(); ++i) {
        const double factor =
            lens.system_diagonal_block(i, img.path.impacts[i - 1]).det();
        CHECK(std::abs(factor) > 1e-6);
      }
    }
  }
}

TEST_CASE("build rejects bad inputs") {
  CHECK_THROWS_AS(build_preliminary(std::vector<int>{}), ValidationError);
  CHECK_THROWS_AS(build_preliminary(std::vector<int>{1, 2}), ValidationError);
  BuildOptions opts;
  opts.lambdas = std::vector<double>{0.1, 0.2};
  CHECK_THROWS_AS(build_preliminary(std::vector<int>{2, 2}, opts),
                  ValidationError);
}

TEST_CASE("max_stable_epsilon: massless second plane never loses images") {
  const auto [p1, c1] = rhie_plane(2);
  const LensPlane ghost({{{4, 4}, 0.0}});
  const MultiplaneLens lens({p1, ghost}, {0, 0});
  StableEpsilonOptions opts;
  opts.bisect_iters = 6;
  opts.solve.grid_n = 96;
  const double eps = max_stable_epsilon(lens, 5, opts);
  // the predicate holds across the whole bracket
  CHECK(eps == doctest::Approx(0.5 * opts.bracket_high));
}

TEST_CASE("max_stable_epsilon certifies a positive margin for g=(2,2)") {
  BuildOptions opts;
  opts.lambdas = std::vector<double>{0.1};
  const int gs[] = {2, 2};
  const auto [lens, report] = build_preliminary(gs, opts);
  StableEpsilonOptions sopts;
  sopts.bisect_iters = 8;
  sopts.solve.grid_n = 128;
  const double eps = max_stable_epsilon(lens, 25, sopts);
  CHECK(eps > 0.0);
  // monotone safety at sampled fractions of the certified value
  for (double f : {0.2, 0.5, 1.0}) {
    const MultiplaneLens moved =
        perturb_epsilon(lens, std::vector<double>{f * eps});
    CHECK(find_images(moved).images.size() == 25);
  }
}
