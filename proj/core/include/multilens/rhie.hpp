#ifndef MULTILENS_RHIE_HPP
#define MULTILENS_RHIE_HPP

#include <utility>

#include "multilens/core.hpp"
#include "multilens/solver.hpp"

namespace multilens {

/// Parameters of an extremal single-plane ensemble with g masses.
struct RhieConfig {
  int g = 0;
  double polygon_radius = 1.0;  // vertex radius (unit circle for g = 2, 3)
  double central_b = 0.0;       // 0 for g = 2, 3
  double rotation = 0.0;        // angle of vertex k = 0
};

/// Vertex radius a = (g-2)^{-1/(g-1)} ((g-2)/(g-1))^{1/2} for g >= 4.
double rhie_polygon_radius(int g);

struct TuneOptions {
  double start_b = 0.1;       // grid is start_b * 2^{-m}
  int max_halvings = 40;
  double det_margin = 1e-6;   // min |det D eta| over images at the candidate
  SolveOptions solve;
  TuneOptions() { solve.grid_n = 128; }
};

/// Largest b from the grid {0.1 * 2^{-m}} for which the g-mass ensemble with
/// central mass b lenses exactly 5g-5 images of a source at the origin (with
/// the det margin) and the next smaller grid value repeats the count.
double tune_central_mass(int g, const TuneOptions& opts = {});

/// The extremal ensemble: g unit masses on the unit circle for g = 2, 3;
/// for g >= 4, g-1 unit masses on the polygon of radius a plus a tuned
/// central mass. `central_b` <= 0 means tune it here.
std::pair<LensPlane, RhieConfig> rhie_plane(int g, double rotation = 0.0,
                                            double central_b = -1.0,
                                            const TuneOptions& tune = {});

struct SourceRadiusOptions {
  int circle_samples = 64;
  int bisect_iters = 20;
  double bracket_high = 1.0;
  double det_margin = 1e-8;
  SolveOptions solve;
  SourceRadiusOptions() { solve.grid_n = 96; }
};

/// Safe source-disk radius: 0.5 * r_hat where r_hat is found by bisection on
/// "all of `circle_samples` sources on the circle of radius r produce
/// `target_count` images with min |det| >= det_margin". Throws
/// ConstructionError if the origin itself misses target_count.
double max_source_radius(const LensPlane& plane, int target_count,
                         const SourceRadiusOptions& opts = {});

}  // namespace multilens

#endif
