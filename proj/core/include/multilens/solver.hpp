#ifndef MULTILENS_SOLVER_HPP
#define MULTILENS_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "multilens/core.hpp"

namespace multilens {

struct SolveOptions {
  /// Half-width of the square seed window in plane 1; 0 means auto
  /// (2 x outermost plane-1 mass radius + 2).
  double window_half_width = 0.0;
  Vec2 window_center{0.0, 0.0};
  /// Lattice seeds per axis.
  int grid_n = 256;
  /// Convergence threshold on |eta(x1) - y|.
  double newton_tol = 1e-12;
  int newton_max_iter = 60;
  double dedup_radius = 1e-8;
  /// Roots with |det D eta| below this go to the suspect list.
  double nondegeneracy_margin = 1e-10;
  /// Multiplane seeding: predict roots by back-substituting single-plane
  /// solutions through the eps=0 cascade, and seed around plane-1 preimages
  /// of downstream mass positions.
  bool cascade_seeds = true;
  /// Lattice resolution for the internal single-plane cascade solves.
  int cascade_grid_n = 128;
  std::vector<Vec2> extra_seeds;
};

/// Count bounds for a K-plane system with g_i masses per plane.
struct BoundsReport {
  long long lower = 0;              // prod (g_i + 1)
  long long even_sum = 0;           // E_K of prod (1 + g_i Z)
  long long odd_sum = 0;            // O_K
  long long upper_eq1 = 0;          // E_K^2 + O_K^2
  std::optional<long long> conjectured_max;   // prod (5 g_i - 5), g_i >= 2
  std::optional<long long> petters_special;   // 2 (2^{2(K-1)} - 1), all g_i = 1
};

struct SolveResult {
  std::vector<LensedImage> images;    // nondegenerate, sorted by (u, v)
  std::vector<LensedImage> suspects;  // converged but |det| below margin
  std::size_t seed_count = 0;
};

/// Finds all lensed images of the lens's source by multi-start damped Newton
/// on x1 -> eta(x1) - y. Returned images satisfy residual_norm <= newton_tol
/// and |det D eta| >= nondegeneracy_margin; degenerate converged roots are
/// reported in `suspects`, not dropped.
SolveResult find_images(const MultiplaneLens& lens,
                        const SolveOptions& opts = {});

/// Fills parity from sign(det D eta) and, for single-plane lenses, the Morse
/// type of the image as a critical point of the time delay.
LensedImage classify_image(const MultiplaneLens& lens, LensedImage img);

/// Single-plane time delay T(x) = |x - y|^2 / 2 - sum b_i^2 log|x - xi_i|.
double time_delay(const LensPlane& plane, Vec2 source, Vec2 x);

/// Exact integer expansion of prod (1 + g_i Z); throws on int64 overflow.
BoundsReport image_count_bounds(std::span<const int> g_list);

/// Single-linkage clustering: cuts the minimum spanning tree at the largest
/// consecutive gap of sorted edge lengths. Returns clusters as index lists
/// (each sorted, ordered by smallest member). `achieved_gap_ratio` gets the
/// ratio across the cut (infinity for <= 1 point within one cluster).
/// When `min_gap_ratio` > 0 and the best ratio is below it, everything stays
/// in one cluster.
std::vector<std::vector<int>> cluster_by_gap(std::span<const Vec2> points,
                                             double min_gap_ratio = 0.0,
                                             double* achieved_gap_ratio
                                             = nullptr);

}  // namespace multilens

#endif
