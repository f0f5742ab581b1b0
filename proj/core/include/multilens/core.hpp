#ifndef MULTILENS_CORE_HPP
#define MULTILENS_CORE_HPP

#include <span>
#include <vector>

#include "multilens/linalg.hpp"
#include "multilens/vec2.hpp"

namespace multilens {

/// Rays passing closer than this to a mass position count as obstructed.
/// Absolute, in working angular units; far below any structure scale used
/// by the constructions here.
inline constexpr double kExclusionRadius = 1e-9;

/// One point deflector: position and Einstein radius b (b^2 acts as mass).
struct PointMass {
  Vec2 position;
  double einstein_radius = 0.0;
};

/// A single lens plane holding g >= 1 point masses at pairwise distinct
/// positions.
class LensPlane {
 public:
  explicit LensPlane(std::vector<PointMass> masses);

  const std::vector<PointMass>& masses() const { return masses_; }
  std::size_t size() const { return masses_.size(); }

  /// Largest |position| over the plane's masses.
  double outermost_radius() const;

  /// Bending angle  alpha(x) = sum_l b_l^2 (x - xi_l)/|x - xi_l|^2.
  /// Throws ObstructionError (plane index 0 placeholder) when x lies within
  /// the exclusion radius of a mass.
  Vec2 deflection(Vec2 x) const;

  /// Jacobian of the bending angle,
  /// Dalpha(x) = sum_l b_l^2 (|d|^2 I - 2 d d^T)/|d|^4, d = x - xi_l.
  /// Trace-free for every valid x.
  Mat2 deflection_jacobian(Vec2 x) const;

  /// Non-throwing variants; return false on obstruction.
  bool try_deflection(Vec2 x, Vec2* out) const;
  bool try_deflection_jacobian(Vec2 x, Mat2* out) const;

 private:
  std::vector<PointMass> masses_;
};

/// One backward-traced ray: impact positions x_1..x_K, the source-plane hit
/// x_{K+1}, and |x_{K+1} - y|.
struct RayPath {
  std::vector<Vec2> impacts;
  Vec2 source_hit;
  double residual_norm = 0.0;
};

enum class MorseType { minimum, saddle, maximum, unavailable };

/// A solved image: its ray path plus the lensing-map Jacobian data used to
/// classify it.
struct LensedImage {
  RayPath path;
  double lens_map_jacobian_det = 0.0;
  int parity = 0;  // sign of lens_map_jacobian_det
  MorseType morse_type = MorseType::unavailable;

  Vec2 position() const { return path.impacts.front(); }
};

/// Ordered lens planes with their coupling constants and a fixed source.
///
/// The ray recursion is
///   x_{i+1} = x_i + eps_i (x_i - x_{i-1}) - beta_i alpha_i(x_i),  i = 1..K,
/// with eps_1 = 0 (so x_0 never enters) and x_{K+1} compared against the
/// source position y. beta_i defaults to 1: the scaling constructions absorb
/// beta into the Einstein radii, and the cosmology module produces explicit
/// values when wanted.
class MultiplaneLens {
 public:
  /// epsilons has K-1 entries for planes 2..K (eps_1 is identically 0 and
  /// not stored). betas empty means all 1.
  MultiplaneLens(std::vector<LensPlane> planes, Vec2 source,
                 std::vector<double> epsilons = {},
                 std::vector<double> betas = {});

  std::size_t num_planes() const { return planes_.size(); }
  const std::vector<LensPlane>& planes() const { return planes_; }
  const LensPlane& plane(std::size_t i) const { return planes_[i]; }
  Vec2 source() const { return source_; }
  const std::vector<double>& epsilons() const { return epsilons_; }
  const std::vector<double>& betas() const { return betas_; }

  /// eps_i for the recursion, 1-based plane index; eps(1) == 0.
  double eps(std::size_t i) const { return i >= 2 ? epsilons_[i - 2] : 0.0; }
  double beta(std::size_t i) const { return betas_[i - 1]; }

  MultiplaneLens with_source(Vec2 y) const;
  MultiplaneLens with_epsilons(std::vector<double> eps) const;

  /// Runs the ray recursion from plane-1 position x1.
  /// Throws ObstructionError with the 1-based blocking plane index.
  RayPath trace(Vec2 x1) const;
  bool try_trace(Vec2 x1, RayPath* out, int* blocked_plane = nullptr) const;

  /// eta(x1): the source-plane hit of the traced ray.
  Vec2 lens_map(Vec2 x1) const;

  /// D eta(x1) via the recursion
  ///   D_{i+1} = (1 + eps_i) D_i - eps_i D_{i-1} - beta_i Dalpha_i(x_i) D_i,
  /// D_1 = I, D_0 = 0.
  Mat2 lens_map_jacobian(Vec2 x1) const;

  /// Evaluates eta and D eta in one pass; false on obstruction.
  bool try_lens_map_with_jacobian(Vec2 x1, Vec2* eta, Mat2* jac,
                                  int* blocked_plane = nullptr) const;

  /// Stacked residual  f_i = (1+eps_i) x_i - eps_i x_{i-1} - beta_i
  /// alpha_i(x_i) - x_{i+1}  (x_{K+1} = y), flattened to 2K reals.
  /// Zero exactly when xs solves the lens system.
  std::vector<double> system_residual(std::span<const Vec2> xs) const;

  /// 2K x 2K Jacobian of the stacked residual: block tridiagonal with
  /// diagonal blocks (1+eps_i) I - beta_i Dalpha_i(x_i), superdiagonal -I,
  /// subdiagonal -eps_i I. Block upper triangular when all eps vanish.
  DenseMatrix system_jacobian(std::span<const Vec2> xs) const;

  /// Diagonal block (1+eps_i) I - beta_i Dalpha_i(x_i), 1-based plane index.
  Mat2 system_diagonal_block(std::size_t i, Vec2 xi) const;

 private:
  std::vector<LensPlane> planes_;
  std::vector<double> betas_;
  std::vector<double> epsilons_;
  Vec2 source_;
};

}  // namespace multilens

#endif
