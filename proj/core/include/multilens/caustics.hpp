#ifndef MULTILENS_CAUSTICS_HPP
#define MULTILENS_CAUSTICS_HPP

#include <vector>

#include "multilens/core.hpp"

namespace multilens {

struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;
};

struct CurveWindow {
  Vec2 center{0.0, 0.0};
  double half_width = 3.0;
};

/// Critical curves, their caustic images, and the grouping of caustics that
/// coincide (the multiplicity structure of composed eps = 0 systems).
struct CurveSet {
  std::vector<Polyline> critical;  // plane 1
  std::vector<Polyline> caustic;   // source plane, index-aligned
  std::vector<std::vector<int>> multiplicity_groups;
  double group_tolerance = 0.0;
  int dropped_points = 0;  // caustic vertices lost to obstruction
};

/// Zero set of det D eta on a grid_n x grid_n lattice over the window,
/// extracted by marching squares with 10-step bisection refinement of every
/// edge crossing. Cells touching obstructed nodes are skipped. Contours that
/// leave the window stay in the output as open polylines.
std::vector<Polyline> critical_curves(const MultiplaneLens& lens,
                                      const CurveWindow& window, int grid_n,
                                      int refine_iters = 10);

/// Pointwise image of each polyline under the lensing map. Obstructed
/// vertices are dropped (the polyline is reopened when that happens);
/// `dropped` counts them when non-null.
std::vector<Polyline> map_to_caustics(const MultiplaneLens& lens,
                                      const std::vector<Polyline>& critical,
                                      int* dropped = nullptr);

/// Symmetric Hausdorff distance between polylines (vertex against segment).
double polyline_hausdorff(const Polyline& a, const Polyline& b);

/// Single-linkage partition of the caustic polylines at Hausdorff distance
/// <= tol. Groups are index lists ordered by smallest member.
std::vector<std::vector<int>> group_by_caustic(
    const std::vector<Polyline>& caustics, double tol);

struct CurveOptions {
  CurveWindow window;
  int grid_n = 512;
  int refine_iters = 10;
  /// Grouping tolerance; <= 0 selects 3 x (caustic footprint / grid_n).
  double group_tol = 0.0;
};

/// Extraction, mapping, and grouping in one pass.
CurveSet extract_curves(const MultiplaneLens& lens,
                        const CurveOptions& opts = {});

}  // namespace multilens

#endif
