#include "multilens/builder.hpp"

#include <cmath>
#include <string>

#include "multilens/errors.hpp"

namespace multilens {

LensPlane scale_plane(const LensPlane& plane, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("scale factor must be > 0");
  }
  std::vector<PointMass> masses = plane.masses();
  for (auto& m : masses) {
    m.position = lambda * m.position;
    m.einstein_radius *= lambda;
  }
  return LensPlane(std::move(masses));
}

MultiplaneLens scale_system(const MultiplaneLens& lens, double lambda) {
  std::vector<LensPlane> planes;
  planes.reserve(lens.num_planes());
  for (const auto& p : lens.planes()) planes.push_back(scale_plane(p, lambda));
  return MultiplaneLens(std::move(planes), lambda * lens.source(),
                        lens.epsilons(), lens.betas());
}

double solution_radius(const std::vector<LensedImage>& images) {
  if (images.empty()) {
    throw ValidationError("solution_radius needs at least one image");
  }
  double r = 0.0;
  for (const auto& img : images) r = std::max(r, img.position().norm());
  return 1.25 * r;
}

MultiplaneLens perturb_epsilon(const MultiplaneLens& lens,
                               std::span<const double> eps_values) {
  if (eps_values.size() != lens.num_planes() - 1) {
    throw ValidationError("perturb_epsilon needs K-1 values, got " +
                          std::to_string(eps_values.size()));
  }
  return lens.with_epsilons({eps_values.begin(), eps_values.end()});
}

namespace {

long long expected_product(std::span<const int> g_list) {
  long long p = 1;
  for (int g : g_list) p *= 5LL * g - 5LL;
  return p;
}

}  // namespace

std::pair<MultiplaneLens, ConstructionReport> build_preliminary(
    std::span<const int> g_list, const BuildOptions& opts) {
  const std::size_t k = g_list.size();
  if (k == 0) throw ValidationError("build_preliminary needs at least one g");
  for (int g : g_list) {
    if (g < 2) throw ValidationError("build_preliminary needs every g >= 2");
  }
  if (opts.lambdas && opts.lambdas->size() != k - 1) {
    throw ValidationError("explicit lambdas must have K-1 entries");
  }

  ConstructionReport report;
  report.g_list.assign(g_list.begin(), g_list.end());
  report.expected_count = expected_product(g_list);
  report.epsilon_used.assign(k - 1, 0.0);

  std::vector<LensPlane> planes;
  planes.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double rot = j < opts.rotations.size() ? opts.rotations[j] : 0.0;
    const double cb = j < opts.central_b.size() ? opts.central_b[j] : -1.0;
    planes.push_back(rhie_plane(g_list[j], rot, cb, opts.tune).first);
  }

  std::vector<double> cumulative(k, 1.0);  // scale applied to plane j so far

  if (opts.lambdas) {
    for (std::size_t j = 1; j < k; ++j) {
      planes[j] = scale_plane(planes[j], (*opts.lambdas)[j - 1]);
      cumulative[j] = (*opts.lambdas)[j - 1];
    }
  } else {
    // Step t (t = 1..K-1) rescales the solved tail (planes p+1..K) so all of
    // its front-coordinate solutions fit inside the safe source disk of
    // plane p, the next plane forward.
    for (std::size_t p = k - 1; p >= 1; --p) {
      std::vector<LensPlane> tail(planes.begin() + p, planes.end());
      MultiplaneLens tail_lens(tail, {0.0, 0.0});
      const SolveResult sols = find_images(tail_lens, opts.solve);
      if (sols.images.empty() || !sols.suspects.empty()) {
        throw ConstructionError("tail system at plane " + std::to_string(p + 1) +
                                " produced no clean solution set");
      }
      long long tail_expected = 1;
      for (std::size_t j = p; j < k; ++j) tail_expected *= 5LL * g_list[j] - 5;
      if (opts.verify_steps &&
          static_cast<long long>(sols.images.size()) != tail_expected) {
        throw ConstructionError(
            "tail count " + std::to_string(sols.images.size()) + " != " +
            std::to_string(tail_expected) + " before scaling at plane " +
            std::to_string(p + 1));
      }
      const double radius = solution_radius(sols.images);
      const double delta =
          max_source_radius(planes[p - 1], 5 * g_list[p - 1] - 5,
                            opts.source_radius);
      const double lambda = delta / radius;
      report.step_lambdas.push_back(lambda);
      report.deltas.push_back(delta);
      report.radii.push_back(radius);
      for (std::size_t j = p; j < k; ++j) {
        planes[j] = scale_plane(planes[j], lambda);
        cumulative[j] *= lambda;
      }
    }
  }

  report.lambdas.assign(cumulative.begin() + 1, cumulative.end());

  MultiplaneLens lens(planes, {0.0, 0.0});
  const SolveResult final_sols = find_images(lens, opts.solve);
  report.achieved_count_eps0 = static_cast<long long>(final_sols.images.size());
  if (report.achieved_count_eps0 != report.expected_count ||
      !final_sols.suspects.empty()) {
    throw ConstructionError(
        "preliminary system produced " +
        std::to_string(report.achieved_count_eps0) + " images (" +
        std::to_string(final_sols.suspects.size()) + " degenerate), expected " +
        std::to_string(report.expected_count));
  }
  return {std::move(lens), std::move(report)};
}

double max_stable_epsilon(const MultiplaneLens& eps0_lens,
                          long long target_count,
                          const StableEpsilonOptions& opts) {
  const std::size_t k = eps0_lens.num_planes();
  if (k < 2) return 0.0;

  // Seed every probe with the eps = 0 solution set; the roots move
  // continuously in eps, so these dominate the basins and the lattice only
  // has to catch strays.
  SolveOptions probe = opts.solve;
  {
    const SolveResult base = find_images(eps0_lens, opts.solve);
    if (static_cast<long long>(base.images.size()) != target_count) {
      throw ConstructionError(
          "eps = 0 system does not achieve the target count");
    }
    probe.extra_seeds.reserve(base.images.size());
    for (const auto& img : base.images) {
      probe.extra_seeds.push_back(img.position());
    }
  }

  auto holds = [&](double eps) {
    const MultiplaneLens lens =
        eps0_lens.with_epsilons(std::vector<double>(k - 1, eps));
    const SolveResult r = find_images(lens, probe);
    if (static_cast<long long>(r.images.size()) != target_count) return false;
    if (!r.suspects.empty()) return false;
    for (const auto& img : r.images) {
      if (std::abs(img.lens_map_jacobian_det) < opts.det_margin) return false;
    }
    return true;
  };

  double lo = 0.0;
  double hi = opts.bracket_high;
  if (holds(hi)) return 0.5 * hi;
  for (int it = 0; it < opts.bisect_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * lo;
}

}  // namespace multilens
