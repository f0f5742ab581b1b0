#include "multilens/cosmology.hpp"

#include <cmath>
#include <string>

#include "multilens/errors.hpp"

namespace multilens {

Cosmology Cosmology::make(double om, double ol) {
  if (!(om >= 0.0) || !std::isfinite(om) || !std::isfinite(ol)) {
    throw ValidationError("omega_m must be >= 0 and finite");
  }
  Cosmology c;
  c.omega_m = om;
  c.omega_lambda = ol;
  c.omega_k = 1.0 - om - ol;
  return c;
}

PlaneRedshifts::PlaneRedshifts(std::vector<double> redshifts)
    : zs(std::move(redshifts)) {
  if (zs.size() < 2) {
    throw ValidationError("need at least one lens plane and a source");
  }
  double prev = 0.0;
  for (double z : zs) {
    if (!(z > prev) || !std::isfinite(z)) {
      throw ValidationError("redshifts must be positive, finite and strictly increasing");
    }
    prev = z;
  }
}

namespace {

double integrand(const Cosmology& c, double z) {
  const double zp = 1.0 + z;
  const double radicand =
      c.omega_m * zp * zp * zp + c.omega_k * zp * zp + c.omega_lambda;
  if (!(radicand > 0.0)) {
    throw ValidationError("expansion-rate radicand is not positive at z = " +
                          std::to_string(z));
  }
  return 1.0 / std::sqrt(radicand);
}

double simpson(const Cosmology& c, double a, double fa, double b, double fb,
               double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const Cosmology& c, double a, double fa, double b,
                        double fb, double fm, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = integrand(c, lm);
  const double frm = integrand(c, rm);
  const double left = simpson(c, a, fa, m, fm, flm);
  const double right = simpson(c, m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(c, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(c, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double comoving_distance(const Cosmology& c, double z1, double z2,
                         double abs_tol) {
  if (!(z1 >= 0.0) || !(z2 >= z1)) {
    throw ValidationError("comoving_distance needs 0 <= z1 <= z2");
  }
  if (z1 == z2) return 0.0;
  const double fa = integrand(c, z1);
  const double fb = integrand(c, z2);
  const double fm = integrand(c, 0.5 * (z1 + z2));
  const double whole = simpson(c, z1, fa, z2, fb, fm);
  return adaptive_simpson(c, z1, fa, z2, fb, fm, whole, abs_tol, 48);
}

double transverse_comoving(const Cosmology& c, double dc) {
  if (!(dc >= 0.0)) throw ValidationError("transverse_comoving needs dC >= 0");
  if (c.omega_k > 0.0) {
    const double s = std::sqrt(c.omega_k);
    return std::sinh(s * dc) / s;
  }
  if (c.omega_k < 0.0) {
    const double s = std::sqrt(-c.omega_k);
    return std::sin(s * dc) / s;
  }
  return dc;
}

double transverse_comoving_between(const Cosmology& c, double z1, double z2,
                                   double abs_tol) {
  return transverse_comoving(c, comoving_distance(c, z1, z2, abs_tol));
}

double angular_diameter(const Cosmology& c, double z1, double z2,
                        double abs_tol) {
  return transverse_comoving_between(c, z1, z2, abs_tol) / (1.0 + z2);
}

PlaneParameters plane_parameters(const Cosmology& c,
                                 const PlaneRedshifts& zr) {
  const int k = zr.num_planes();
  auto dm = [&](int i, int j) {
    // 0 denotes the observer
    const double zi = i == 0 ? 0.0 : zr.zs[i - 1];
    const double zj = zr.zs[j - 1];
    return transverse_comoving_between(c, zi, zj);
  };
  PlaneParameters out;
  out.betas.resize(k);
  out.epsilons.assign(k, 0.0);
  for (int i = 1; i <= k; ++i) {
    out.betas[i - 1] = dm(i, i + 1) / dm(0, i + 1);
    if (i >= 2) {
      out.epsilons[i - 1] =
          dm(0, i) * dm(i - 1, i + 1) / (dm(i - 1, i) * dm(0, i + 1)) - 1.0;
    }
  }
  return out;
}

namespace {

double eps2_flat(const Cosmology& c, double z1, double z2, double z3) {
  const double d1 = transverse_comoving_between(c, 0.0, z1);
  const double d2 = transverse_comoving_between(c, 0.0, z2);
  const double d3 = transverse_comoving_between(c, 0.0, z3);
  return d1 * (d3 - d2) / ((d2 - d1) * d3);
}

/// Bending-term scaling of plane i per unit mass:
/// d^M_{i,i+1} / (d^A_i d^M_{i+1}), plane K+1 being the source.
double bending_scaling(const Cosmology& c, double z_near, double z_far,
                       double z_plane) {
  const double dmi = transverse_comoving_between(c, z_near, z_far);
  const double da = angular_diameter(c, 0.0, z_plane);
  const double dfar = transverse_comoving_between(c, 0.0, z_far);
  return dmi / (da * dfar);
}

}  // namespace

SmallEpsilonResult realize_small_epsilon(const Cosmology& c,
                                         const PlaneRedshifts& zr,
                                         double target_eps, EpsilonMode mode) {
  if (!c.flat()) {
    throw ValidationError("realize_small_epsilon assumes a flat cosmology");
  }
  if (zr.num_planes() != 2) {
    throw ValidationError("realize_small_epsilon works on two-plane systems");
  }
  const double z1 = zr.zs[0], z2 = zr.zs[1], z3 = zr.zs[2];
  const double current = eps2_flat(c, z1, z2, z3);
  if (!(target_eps > 0.0) || !(target_eps <= current)) {
    throw ValidationError("target epsilon must lie in (0, current eps_2]");
  }

  const double s1_old = bending_scaling(c, z1, z2, z1);  // plane 1
  const double s2_old = bending_scaling(c, z2, z3, z2);  // plane 2

  auto finish = [&](double nz1, double nz2, double nz3) {
    SmallEpsilonResult r{PlaneRedshifts({nz1, nz2, nz3}), {1.0, 1.0}, 0.0};
    r.achieved_epsilon = eps2_flat(c, nz1, nz2, nz3);
    const double s1_new = bending_scaling(c, nz1, nz2, nz1);
    const double s2_new = bending_scaling(c, nz2, nz3, nz2);
    r.mass_rescale_factors = {s1_old / s1_new, s2_old / s2_new};
    return r;
  };

  if (target_eps == current) return finish(z1, z2, z3);

  const double kEdgeOffset = 1e-6;  // keep brackets off the 0/0 limits
  double lo, hi;
  auto eps_of = [&](double t) {
    return mode == EpsilonMode::foreground ? eps2_flat(c, t, z2, z3)
                                           : eps2_flat(c, z1, z2, t);
  };
  if (mode == EpsilonMode::foreground) {
    lo = kEdgeOffset;
    hi = z1;
  } else {
    lo = z2 + kEdgeOffset;
    hi = z3;
  }
  const double f_lo = eps_of(lo);
  const double f_hi = eps_of(hi);
  if (!(f_lo <= target_eps && target_eps <= f_hi)) {
    throw ConstructionError(
        "epsilon bisection cannot bracket the target (eps(" +
        std::to_string(lo) + ") = " + std::to_string(f_lo) + ", eps(" +
        std::to_string(hi) + ") = " + std::to_string(f_hi) + ")");
  }
  double a = lo, b = hi;
  double mid = 0.5 * (a + b);
  bool hit = false;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (a + b);
    const double f = eps_of(mid);
    if (std::abs(f - target_eps) <= 1e-8) {
      hit = true;
      break;
    }
    if (f < target_eps) {
      a = mid;
    } else {
      b = mid;
    }
  }
  if (!hit) {
    throw ConstructionError(
        "epsilon bisection did not converge; eps_2 may not be monotone here");
  }
  return mode == EpsilonMode::foreground ? finish(mid, z2, z3)
                                         : finish(z1, z2, mid);
}

}  // namespace multilens
