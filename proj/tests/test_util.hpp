#ifndef MULTILENS_TEST_UTIL_HPP
#define MULTILENS_TEST_UTIL_HPP

#include <cmath>
#include <random>
#include <vector>

#include "multilens/core.hpp"

namespace mltest {

using multilens::LensPlane;
using multilens::Mat2;
using multilens::MultiplaneLens;
using multilens::PointMass;
using multilens::Vec2;

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random plane with g masses in the disk of radius 2, separations > 0.3.
inline LensPlane random_plane(std::mt19937& rng, int g) {
  std::vector<PointMass> masses;
  while (static_cast<int>(masses.size()) < g) {
    const Vec2 p{uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
    bool ok = true;
    for (const auto& m : masses) {
      if (multilens::distance(m.position, p) < 0.3) ok = false;
    }
    if (!ok) continue;
    masses.push_back({p, uniform(rng, 0.3, 1.2)});
  }
  return LensPlane(masses);
}

/// Random K-plane lens with small couplings.
inline MultiplaneLens random_lens(std::mt19937& rng, int k_max = 3,
                                  int g_max = 4) {
  const int k = std::uniform_int_distribution<int>(1, k_max)(rng);
  std::vector<LensPlane> planes;
  for (int i = 0; i < k; ++i) {
    const int g = std::uniform_int_distribution<int>(1, g_max)(rng);
    planes.push_back(random_plane(rng, g));
  }
  std::vector<double> eps;
  for (int i = 1; i < k; ++i) eps.push_back(uniform(rng, 0.0, 0.05));
  const Vec2 y{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
  return MultiplaneLens(std::move(planes), y, std::move(eps));
}

/// Point at distance > 0.1 from every plane-1 mass, in the disk of radius 3.
inline Vec2 random_eval_point(std::mt19937& rng, const MultiplaneLens& lens) {
  while (true) {
    const Vec2 x{uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0)};
    bool ok = true;
    for (const auto& m : lens.plane(0).masses()) {
      if (multilens::distance(m.position, x) < 0.1) ok = false;
    }
    multilens::RayPath path;
    if (ok && lens.try_trace(x, &path)) {
      bool clear = true;
      for (std::size_t j = 0; j < lens.num_planes(); ++j) {
        for (const auto& m : lens.plane(j).masses()) {
          if (multilens::distance(m.position, path.impacts[j]) < 0.05) {
            clear = false;
          }
        }
      }
      if (clear) return x;
    }
  }
}

/// Central finite differences of the lensing map.
inline Mat2 fd_lens_map_jacobian(const MultiplaneLens& lens, Vec2 x,
                                 double h = 1e-6) {
  const Vec2 fu1 = lens.lens_map({x.u + h, x.v});
  const Vec2 fu0 = lens.lens_map({x.u - h, x.v});
  const Vec2 fv1 = lens.lens_map({x.u, x.v + h});
  const Vec2 fv0 = lens.lens_map({x.u, x.v - h});
  return {(fu1.u - fu0.u) / (2 * h), (fv1.u - fv0.u) / (2 * h),
          (fu1.v - fu0.v) / (2 * h), (fv1.v - fv0.v) / (2 * h)};
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline double mat_rel_err(const Mat2& got, const Mat2& want) {
  const double num = (got - want).max_abs();
  return num / std::max(1.0, want.max_abs());
}

}  // namespace mltest

#endif
