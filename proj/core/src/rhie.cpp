#include "multilens/rhie.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "multilens/errors.hpp"

namespace multilens {

namespace {

LensPlane polygon_plane(int g, double rotation, double central_b) {
  std::vector<PointMass> masses;
  if (g <= 3) {
    for (int k = 0; k < g; ++k) {
      const double th = 2.0 * std::numbers::pi * k / g + rotation;
      masses.push_back({{std::cos(th), std::sin(th)}, 1.0});
    }
  } else {
    const double a = rhie_polygon_radius(g);
    for (int k = 0; k < g - 1; ++k) {
      const double th = 2.0 * std::numbers::pi * k / (g - 1) + rotation;
      masses.push_back({{a * std::cos(th), a * std::sin(th)}, 1.0});
    }
    masses.push_back({{0.0, 0.0}, central_b});
  }
  return LensPlane(std::move(masses));
}

struct CountResult {
  long long count = 0;
  double min_abs_det = 0.0;
  bool clean = true;  // no suspect roots
};

CountResult count_images(const LensPlane& plane, Vec2 source,
                         const SolveOptions& opts) {
  MultiplaneLens lens({plane}, source);
  const SolveResult r = find_images(lens, opts);
  CountResult c;
  c.count = static_cast<long long>(r.images.size());
  c.clean = r.suspects.empty();
  c.min_abs_det = std::numeric_limits<double>::infinity();
  for (const auto& img : r.images) {
    c.min_abs_det = std::min(c.min_abs_det, std::abs(img.lens_map_jacobian_det));
  }
  if (r.images.empty()) c.min_abs_det = 0.0;
  return c;
}

}  // namespace

double rhie_polygon_radius(int g) {
  if (g < 4) throw ValidationError("polygon radius formula needs g >= 4");
  const double gm2 = g - 2.0;
  const double gm1 = g - 1.0;
  return std::pow(gm2, -1.0 / gm1) * std::sqrt(gm2 / gm1);
}

double tune_central_mass(int g, const TuneOptions& opts) {
  if (g < 4) throw ValidationError("tune_central_mass needs g >= 4");
  const long long target = 5LL * g - 5LL;
  long long prev_count = -1;
  double prev_min_det = 0.0;
  for (int m = 0; m <= opts.max_halvings; ++m) {
    const double b = opts.start_b * std::pow(2.0, -m);
    const CountResult cur = count_images(polygon_plane(g, 0.0, b), {0.0, 0.0},
                                         opts.solve);
    if (m > 0 && prev_count == target && prev_min_det >= opts.det_margin &&
        cur.count == target) {
      return opts.start_b * std::pow(2.0, -(m - 1));
    }
    prev_count = cur.clean ? cur.count : -1;
    prev_min_det = cur.min_abs_det;
  }
  throw ConstructionError(
      "central mass tuning for g = " + std::to_string(g) +
      " did not stabilize at " + std::to_string(target) + " images within " +
      std::to_string(opts.max_halvings) + " halvings");
}

std::pair<LensPlane, RhieConfig> rhie_plane(int g, double rotation,
                                            double central_b,
                                            const TuneOptions& tune) {
  if (g < 2) throw ValidationError("rhie_plane needs g >= 2");
  RhieConfig cfg;
  cfg.g = g;
  cfg.rotation = rotation;
  if (g <= 3) {
    cfg.polygon_radius = 1.0;
    cfg.central_b = 0.0;
  } else {
    cfg.polygon_radius = rhie_polygon_radius(g);
    cfg.central_b = central_b > 0.0 ? central_b : tune_central_mass(g, tune);
  }
  return {polygon_plane(g, rotation, cfg.central_b), cfg};
}

double max_source_radius(const LensPlane& plane, int target_count,
                         const SourceRadiusOptions& opts) {
  const CountResult origin = count_images(plane, {0.0, 0.0}, opts.solve);
  if (origin.count != target_count || !origin.clean ||
      origin.min_abs_det < opts.det_margin) {
    throw ConstructionError(
        "source at origin produces " + std::to_string(origin.count) +
        " images, expected " + std::to_string(target_count));
  }
  auto circle_ok = [&](double r) {
    for (int k = 0; k < opts.circle_samples; ++k) {
      const double th = 2.0 * std::numbers::pi * k / opts.circle_samples;
      const Vec2 y{r * std::cos(th), r * std::sin(th)};
      const CountResult c = count_images(plane, y, opts.solve);
      if (c.count != target_count || !c.clean ||
          c.min_abs_det < opts.det_margin) {
        return false;
      }
    }
    return true;
  };
  double lo = 0.0;
  double hi = opts.bracket_high;
  if (circle_ok(hi)) return 0.5 * hi;
  for (int it = 0; it < opts.bisect_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (circle_ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * lo;
}

}  // namespace multilens
