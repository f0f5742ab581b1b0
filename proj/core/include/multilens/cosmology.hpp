#ifndef MULTILENS_COSMOLOGY_HPP
#define MULTILENS_COSMOLOGY_HPP

#include <vector>

#include "multilens/vec2.hpp"

namespace multilens {

/// FLRW parameters. All distances are in Hubble units (scaled by c/H0);
/// only distance ratios enter the lens equation.
struct Cosmology {
  double omega_m = 1.0;
  double omega_lambda = 0.0;
  double omega_k = 0.0;  // 1 - omega_m - omega_lambda, stored

  static Cosmology make(double om, double ol);
  bool flat() const { return omega_k == 0.0; }
};

/// Lens-plane redshifts z_1 < ... < z_K followed by the source redshift.
struct PlaneRedshifts {
  std::vector<double> zs;

  explicit PlaneRedshifts(std::vector<double> redshifts);
  int num_planes() const { return static_cast<int>(zs.size()) - 1; }
  double source_z() const { return zs.back(); }
};

/// Line-of-sight comoving distance between z1 <= z2 by adaptive quadrature
/// of 1/sqrt(Om (1+z)^3 + Ok (1+z)^2 + Ol) to the absolute tolerance.
/// Rejects parameter sets where the radicand is not positive on the range.
double comoving_distance(const Cosmology& c, double z1, double z2,
                         double abs_tol = 1e-10);

/// Transverse comoving distance for a given line-of-sight value:
/// sinh branch for open (omega_k > 0), sin branch for closed.
double transverse_comoving(const Cosmology& c, double dc);

/// d^M(z1, z2) = transverse_comoving(d^C(z1, z2)).
double transverse_comoving_between(const Cosmology& c, double z1, double z2,
                                   double abs_tol = 1e-10);

/// d^A(z1, z2) = d^M(z1, z2) / (1 + z2).
double angular_diameter(const Cosmology& c, double z1, double z2,
                        double abs_tol = 1e-10);

/// Per-plane coupling constants. epsilons[0] is always 0.
struct PlaneParameters {
  std::vector<double> betas;     // size K
  std::vector<double> epsilons;  // size K, first entry 0
};

/// beta_i = d^M_{i,i+1} / d^M_{i+1} (plane K+1 is the source) and
/// eps_i = d^M_i d^M_{i-1,i+1} / (d^M_{i-1,i} d^M_{i+1}) - 1 for i >= 2.
PlaneParameters plane_parameters(const Cosmology& c,
                                 const PlaneRedshifts& zr);

enum class EpsilonMode {
  foreground,  // bisect z_1 toward 0 (plane-1 masses shrink)
  background,  // bisect z_3 toward z_2 (plane-2 masses grow)
};

struct SmallEpsilonResult {
  PlaneRedshifts redshifts;
  /// Per-plane mass factors that hold each plane's bending-term scaling
  /// d^M_{i,i+1} M_i / (d^A_i d^M_{i+1}) at its original value.
  std::vector<double> mass_rescale_factors;
  double achieved_epsilon = 0.0;
};

/// Moves one redshift of a flat two-plane configuration until eps_2 equals
/// target_eps (within 1e-8), keeping the bending terms fixed via the
/// returned mass factors. Throws ConstructionError when the bisection cannot
/// bracket the target.
SmallEpsilonResult realize_small_epsilon(const Cosmology& c,
                                         const PlaneRedshifts& zr,
                                         double target_eps, EpsilonMode mode);

}  // namespace multilens

#endif
