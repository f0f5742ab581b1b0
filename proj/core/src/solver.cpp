#include "multilens/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "multilens/errors.hpp"
#include "multilens/parallel.hpp"

namespace multilens {

namespace {

double auto_half_width(const MultiplaneLens& lens) {
  return 2.0 * lens.plane(0).outermost_radius() + 2.0;
}

void push_ring(std::vector<Vec2>& seeds, Vec2 center, double radius,
               int count) {
  for (int k = 0; k < count; ++k) {
    const double th = 2.0 * std::numbers::pi * k / count;
    seeds.push_back(center + Vec2{radius * std::cos(th),
                                  radius * std::sin(th)});
  }
}

struct NewtonOutcome {
  bool converged = false;
  Vec2 root;
  double residual = 0.0;
  double det = 0.0;
};

/// Damped Newton on eta(x) - y from one seed. Steps that blow the residual
/// up or land in an exclusion zone are halved (up to 20 times).
NewtonOutcome newton_from(const MultiplaneLens& lens, Vec2 seed,
                          const SolveOptions& opts, double half_width) {
  NewtonOutcome out;
  const Vec2 y = lens.source();
  const double bail = 100.0 * std::max(half_width, 1.0);

  Vec2 x = seed;
  Vec2 eta;
  Mat2 jac;
  if (!lens.try_lens_map_with_jacobian(x, &eta, &jac)) return out;
  double res = (eta - y).norm();

  for (int it = 0; it < opts.newton_max_iter; ++it) {
    if (res <= opts.newton_tol) {
      out.converged = true;
      out.root = x;
      out.residual = res;
      out.det = jac.det();
      return out;
    }
    const double det = jac.det();
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return out;
    Vec2 step = jac.solve(y - eta);
    if (!step.finite()) return out;
    // cap absurd steps so grid seeds near critical curves stay local
    const double sl = step.norm();
    if (sl > half_width) step = step * (half_width / sl);

    bool moved = false;
    double t = 1.0;
    for (int h = 0; h < 20; ++h, t *= 0.5) {
      const Vec2 xt = x + t * step;
      Vec2 eta_t;
      Mat2 jac_t;
      if (!lens.try_lens_map_with_jacobian(xt, &eta_t, &jac_t)) continue;
      const double res_t = (eta_t - y).norm();
      if (!std::isfinite(res_t)) continue;
      if (res_t < res || (t == 1.0 && res_t <= res)) {
        x = xt;
        eta = eta_t;
        jac = jac_t;
        res = res_t;
        moved = true;
        break;
      }
    }
    if (!moved || x.norm() > bail) return out;
  }
  if (res <= opts.newton_tol) {
    out.converged = true;
    out.root = x;
    out.residual = res;
    out.det = jac.det();
  }
  return out;
}

/// Plane-1 predictions of all roots via the eps=0 back-substitution: solve
/// the last plane alone against the source, then treat each solution as the
/// source of the plane before it, down to plane 1. Exact for eps = 0 and an
/// O(eps) prediction otherwise.
std::vector<Vec2> cascade_predictions(const MultiplaneLens& lens,
                                      const SolveOptions& opts);

/// Plane-1 preimages of each downstream mass position through the leading
/// eps=0 chain, each surrounded by seed rings at the pulled-back Einstein
/// radius of that mass.
std::vector<Vec2> downstream_projection_seeds(const MultiplaneLens& lens,
                                              const SolveOptions& opts);

std::vector<Vec2> build_seeds(const MultiplaneLens& lens,
                              const SolveOptions& opts, double half_width) {
  std::vector<Vec2> seeds;
  const int n = std::max(2, opts.grid_n);
  seeds.reserve(static_cast<std::size_t>(n) * n + 1024);

  const Vec2 c = opts.window_center;
  for (int i = 0; i < n; ++i) {
    const double v = c.v - half_width + 2.0 * half_width * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double u = c.u - half_width + 2.0 * half_width * j / (n - 1);
      seeds.push_back({u, v});
    }
  }
  for (const auto& m : lens.plane(0).masses()) {
    if (m.einstein_radius <= 0.0) continue;
    for (double f : {0.5, 1.0, 1.5}) {
      push_ring(seeds, m.position, f * m.einstein_radius, 64);
    }
  }
  if (lens.num_planes() > 1 && opts.cascade_seeds) {
    const auto predictions = cascade_predictions(lens, opts);
    // Predicted roots arrive in tight clusters; a local lattice around each
    // prediction at the cluster scale catches the roots that drift when
    // eps > 0 deforms the system away from the composed eps = 0 one.
    double local = half_width;
    for (std::size_t a = 0; a < predictions.size(); ++a) {
      double nn = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < predictions.size(); ++b) {
        if (a != b) nn = std::min(nn, distance(predictions[a], predictions[b]));
      }
      if (std::isfinite(nn) && nn > 0.0) local = std::min(local, nn);
    }
    for (const Vec2 p : predictions) {
      seeds.push_back(p);
      const double h = 1.5 * local;
      for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) {
          if (i == 0 && j == 0) continue;
          seeds.push_back(p + Vec2{j * h / 3.0, i * h / 3.0});
        }
      }
    }
    const auto proj = downstream_projection_seeds(lens, opts);
    seeds.insert(seeds.end(), proj.begin(), proj.end());
  }
  seeds.insert(seeds.end(), opts.extra_seeds.begin(), opts.extra_seeds.end());
  return seeds;
}

}  // namespace

SolveResult find_images(const MultiplaneLens& lens, const SolveOptions& opts) {
  const double half_width = opts.window_half_width > 0.0
                                ? opts.window_half_width
                                : auto_half_width(lens);
  const std::vector<Vec2> seeds = build_seeds(lens, opts, half_width);

  std::vector<NewtonOutcome> outcomes(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      outcomes[i] = newton_from(lens, seeds[i], opts, half_width);
    }
  });

  // Deduplicate in seed order, then sort for a stable public ordering.
  std::vector<Vec2> roots;
  for (const auto& o : outcomes) {
    if (!o.converged) continue;
    bool dup = false;
    for (const Vec2 r : roots) {
      if (distance(r, o.root) <= opts.dedup_radius) {
        dup = true;
        break;
      }
    }
    if (!dup) roots.push_back(o.root);
  }
  std::sort(roots.begin(), roots.end(), [](Vec2 a, Vec2 b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });

  SolveResult result;
  result.seed_count = seeds.size();
  for (const Vec2 r : roots) {
    LensedImage img;
    img.path = lens.trace(r);
    img.lens_map_jacobian_det = lens.lens_map_jacobian(r).det();
    img = classify_image(lens, std::move(img));
    if (std::abs(img.lens_map_jacobian_det) >= opts.nondegeneracy_margin) {
      result.images.push_back(std::move(img));
    } else {
      result.suspects.push_back(std::move(img));
    }
  }
  return result;
}

namespace {

std::vector<Vec2> solve_single_plane(const LensPlane& plane, Vec2 source,
                                     const SolveOptions& base) {
  SolveOptions o;
  o.grid_n = base.cascade_grid_n;
  o.newton_tol = base.newton_tol;
  o.newton_max_iter = base.newton_max_iter;
  o.dedup_radius = base.dedup_radius;
  o.nondegeneracy_margin = base.nondegeneracy_margin;
  o.cascade_seeds = false;
  MultiplaneLens single({plane}, source);
  const SolveResult r = find_images(single, o);
  std::vector<Vec2> out;
  out.reserve(r.images.size() + r.suspects.size());
  for (const auto& img : r.images) out.push_back(img.position());
  for (const auto& img : r.suspects) out.push_back(img.position());
  return out;
}

std::vector<Vec2> cascade_predictions(const MultiplaneLens& lens,
                                      const SolveOptions& opts) {
  const std::size_t k = lens.num_planes();
  std::vector<Vec2> sources{lens.source()};
  for (std::size_t j = k; j >= 1; --j) {
    std::vector<Vec2> next;
    for (const Vec2 s : sources) {
      const auto sols = solve_single_plane(lens.plane(j - 1), s, opts);
      next.insert(next.end(), sols.begin(), sols.end());
    }
    sources = std::move(next);
    if (sources.empty()) break;
    if (j == 1) break;
  }
  return sources;
}

std::vector<Vec2> downstream_projection_seeds(const MultiplaneLens& lens,
                                              const SolveOptions& opts) {
  std::vector<Vec2> seeds;
  for (std::size_t j = 2; j <= lens.num_planes(); ++j) {
    for (const auto& m : lens.plane(j - 1).masses()) {
      if (m.einstein_radius <= 0.0) continue;
      // preimages of the mass position through planes j-1 .. 1
      std::vector<Vec2> pts{m.position};
      for (std::size_t p = j - 1; p >= 1; --p) {
        std::vector<Vec2> next;
        for (const Vec2 s : pts) {
          const auto sols = solve_single_plane(lens.plane(p - 1), s, opts);
          next.insert(next.end(), sols.begin(), sols.end());
        }
        pts = std::move(next);
        if (pts.empty() || p == 1) break;
      }
      for (const Vec2 pre : pts) {
        Mat2 jac;
        double scale = m.einstein_radius;
        if (lens.try_lens_map_with_jacobian(pre, nullptr, &jac) &&
            std::abs(jac.det()) > 1e-12) {
          scale = m.einstein_radius / std::sqrt(std::abs(jac.det()));
        }
        for (double f : {0.5, 1.0, 1.5}) push_ring(seeds, pre, f * scale, 16);
      }
    }
  }
  return seeds;
}

}  // namespace

LensedImage classify_image(const MultiplaneLens& lens, LensedImage img) {
  img.parity = img.lens_map_jacobian_det >= 0.0 ? +1 : -1;
  if (lens.num_planes() != 1) {
    img.morse_type = MorseType::unavailable;
    return img;
  }
  // Hessian of the time delay is I - Dalpha: symmetric, so the eigenvalue
  // signs follow from its trace and determinant.
  const Mat2 hess = Mat2::identity() -
                    (lens.beta(1) *
                     lens.plane(0).deflection_jacobian(img.position()));
  const double det = hess.det();
  const double tr = hess.trace();
  if (det < 0.0) {
    img.morse_type = MorseType::saddle;
  } else {
    img.morse_type = tr > 0.0 ? MorseType::minimum : MorseType::maximum;
  }
  return img;
}

double time_delay(const LensPlane& plane, Vec2 source, Vec2 x) {
  double t = 0.5 * (x - source).norm2();
  for (const auto& m : plane.masses()) {
    const double r = distance(x, m.position);
    if (r <= kExclusionRadius) throw ObstructionError(1, x.u, x.v);
    t -= m.einstein_radius * m.einstein_radius * std::log(r);
  }
  return t;
}

namespace {

long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("integer overflow in image_count_bounds");
  }
  return r;
}

long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("integer overflow in image_count_bounds");
  }
  return r;
}

}  // namespace

BoundsReport image_count_bounds(std::span<const int> g_list) {
  if (g_list.empty()) {
    throw ValidationError("image_count_bounds needs a nonempty g list");
  }
  for (int g : g_list) {
    if (g < 1) throw ValidationError("image_count_bounds needs g_i >= 1");
  }
  // coefficients of prod (1 + g_i Z)
  std::vector<long long> coef{1};
  for (int g : g_list) {
    std::vector<long long> next(coef.size() + 1, 0);
    for (std::size_t d = 0; d < coef.size(); ++d) {
      next[d] = checked_add(next[d], coef[d]);
      next[d + 1] = checked_add(next[d + 1], checked_mul(coef[d], g));
    }
    coef = std::move(next);
  }
  BoundsReport r;
  for (std::size_t d = 0; d < coef.size(); ++d) {
    if (d % 2 == 0) {
      r.even_sum = checked_add(r.even_sum, coef[d]);
    } else {
      r.odd_sum = checked_add(r.odd_sum, coef[d]);
    }
  }
  r.upper_eq1 = checked_add(checked_mul(r.even_sum, r.even_sum),
                            checked_mul(r.odd_sum, r.odd_sum));
  r.lower = 1;
  for (int g : g_list) r.lower = checked_mul(r.lower, g + 1);

  bool all_ge2 = true, all_eq1 = true;
  for (int g : g_list) {
    all_ge2 = all_ge2 && g >= 2;
    all_eq1 = all_eq1 && g == 1;
  }
  if (all_ge2) {
    long long p = 1;
    for (int g : g_list) p = checked_mul(p, 5LL * g - 5LL);
    r.conjectured_max = p;
  }
  if (all_eq1) {
    const long long k = static_cast<long long>(g_list.size());
    long long pow4 = 1;
    for (long long i = 0; i < k - 1; ++i) pow4 = checked_mul(pow4, 4);
    r.petters_special = checked_mul(2, pow4 - 1);
  }
  return r;
}

std::vector<std::vector<int>> cluster_by_gap(std::span<const Vec2> points,
                                             double min_gap_ratio,
                                             double* achieved_gap_ratio) {
  const int n = static_cast<int>(points.size());
  if (achieved_gap_ratio) {
    *achieved_gap_ratio = std::numeric_limits<double>::infinity();
  }
  if (n == 0) return {};
  if (n == 1) return {{0}};

  // Prim's MST on the complete graph.
  std::vector<char> intree(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> best_from(n, 0);
  struct Edge {
    double w;
    int a, b;
  };
  std::vector<Edge> edges;
  intree[0] = 1;
  for (int i = 1; i < n; ++i) {
    best[i] = distance(points[0], points[i]);
    best_from[i] = 0;
  }
  for (int it = 1; it < n; ++it) {
    int j = -1;
    double w = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!intree[i] && best[i] < w) {
        w = best[i];
        j = i;
      }
    }
    edges.push_back({w, best_from[j], j});
    intree[j] = 1;
    for (int i = 0; i < n; ++i) {
      if (!intree[i]) {
        const double d = distance(points[j], points[i]);
        if (d < best[i]) {
          best[i] = d;
          best_from[i] = j;
        }
      }
    }
  }

  std::vector<double> w;
  w.reserve(edges.size());
  for (const auto& e : edges) w.push_back(e.w);
  std::sort(w.begin(), w.end());
  double ratio = 0.0;
  double cut = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double r = w[i] > 0.0 ? w[i + 1] / w[i]
                                : std::numeric_limits<double>::infinity();
    if (r >= ratio) {  // on ties prefer the outermost (largest-scale) gap
      ratio = r;
      cut = 0.5 * (w[i] + w[i + 1]);
    }
  }
  if (achieved_gap_ratio && !w.empty()) *achieved_gap_ratio = ratio;
  if (ratio < min_gap_ratio) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return {all};
  }

  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (const auto& e : edges) {
    if (e.w < cut) parent[find(e.a)] = find(e.b);
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> group_of(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (group_of[r] < 0) {
      group_of[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of[r]].push_back(i);
  }
  return groups;
}

}  // namespace multilens
