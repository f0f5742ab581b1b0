#ifndef MULTILENS_BUILDER_HPP
#define MULTILENS_BUILDER_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "multilens/core.hpp"
#include "multilens/rhie.hpp"
#include "multilens/solver.hpp"

namespace multilens {

/// Bookkeeping of one preliminary construction run.
struct ConstructionReport {
  std::vector<int> g_list;
  /// Cumulative scale factor applied to plane j, j = 2..K.
  std::vector<double> lambdas;
  /// Per-step values, back to front (step t rescales planes K-t+1..K).
  std::vector<double> step_lambdas;
  std::vector<double> deltas;
  std::vector<double> radii;
  long long expected_count = 0;
  long long achieved_count_eps0 = 0;
  std::vector<double> epsilon_used;
};

/// Scales every mass of the plane: b -> lambda b, xi -> lambda xi.
LensPlane scale_plane(const LensPlane& plane, double lambda);

/// Scales all planes and the source. The solution set scales by the same
/// factor for eps = 0 systems.
MultiplaneLens scale_system(const MultiplaneLens& lens, double lambda);

/// 1.25 x the largest front-plane impact radius over the solved images.
double solution_radius(const std::vector<LensedImage>& images);

struct BuildOptions {
  /// Explicit cumulative scale factors for planes 2..K; when set, the
  /// automatic delta/R measurement is bypassed.
  std::optional<std::vector<double>> lambdas;
  /// Rotation of each plane's ensemble (defaults to 0).
  std::vector<double> rotations;
  /// Pinned central masses per plane (<= 0 entries are tuned; g >= 4 only).
  std::vector<double> central_b;
  SolveOptions solve;
  SourceRadiusOptions source_radius;
  TuneOptions tune;
  /// Verify the image count after each induction step, not just at the end.
  bool verify_steps = true;
};

/// The eps = 0 preliminary construction. Works backward from plane K:
/// solve the current tail system, measure R from its front coordinate,
/// take delta from the safe source disk of the next plane forward, and
/// rescale the whole tail by lambda = delta / R. The result with source
/// y = 0 lenses exactly prod (5 g_i - 5) images.
std::pair<MultiplaneLens, ConstructionReport> build_preliminary(
    std::span<const int> g_list, const BuildOptions& opts = {});

/// Same lens with the interplane couplings replaced.
MultiplaneLens perturb_epsilon(const MultiplaneLens& lens,
                               std::span<const double> eps_values);

struct StableEpsilonOptions {
  int bisect_iters = 30;
  double bracket_high = 1.0;
  double det_margin = 1e-10;
  SolveOptions solve;
};

/// Bisects for the largest uniform eps at which the image count still equals
/// `target_count` (with the det margin) and returns half that value.
double max_stable_epsilon(const MultiplaneLens& eps0_lens,
                          long long target_count,
                          const StableEpsilonOptions& opts = {});

}  // namespace multilens

#endif
