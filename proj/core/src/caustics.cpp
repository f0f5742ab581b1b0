#include "multilens/caustics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "multilens/parallel.hpp"

namespace multilens {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Grid {
  int n = 0;
  Vec2 origin;   // node (0, 0)
  double h = 0;  // node spacing
  std::vector<double> det;  // row-major, NaN where obstructed

  Vec2 node(int i, int j) const {
    return {origin.u + j * h, origin.v + i * h};
  }
  double value(int i, int j) const { return det[std::size_t(i) * n + j]; }
};

Grid evaluate_grid(const MultiplaneLens& lens, const CurveWindow& w, int n) {
  Grid g;
  g.n = n;
  g.h = 2.0 * w.half_width / (n - 1);
  g.origin = {w.center.u - w.half_width, w.center.v - w.half_width};
  g.det.assign(std::size_t(n) * n, kNan);
  parallel_for(std::size_t(n) * n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const int i = static_cast<int>(t) / n;
      const int j = static_cast<int>(t) % n;
      Mat2 jac;
      if (lens.try_lens_map_with_jacobian(g.node(i, j), nullptr, &jac)) {
        g.det[t] = jac.det();
      }
    }
  });
  return g;
}

// Edge identifiers: horizontal edge (i,j)-(i,j+1) and vertical (i,j)-(i+1,j).
std::int64_t hkey(int i, int j, int n) {
  return (std::int64_t(i) * n + j) * 2;
}
std::int64_t vkey(int i, int j, int n) {
  return (std::int64_t(i) * n + j) * 2 + 1;
}

/// Crossing position on the edge from a (value fa) to b (value fb),
/// refined by bisection on the actual det along the edge.
Vec2 refine_crossing(const MultiplaneLens& lens, Vec2 a, double fa, Vec2 b,
                     double fb, int iters) {
  for (int it = 0; it < iters; ++it) {
    const Vec2 mid = 0.5 * (a + b);
    Mat2 jac;
    if (!lens.try_lens_map_with_jacobian(mid, nullptr, &jac)) break;
    const double fm = jac.det();
    if (!std::isfinite(fm)) break;
    if ((fa > 0.0) == (fm > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
  }
  // final linear interpolation inside the last bracket
  const double d = fa - fb;
  const double t = (d != 0.0) ? fa / d : 0.5;
  return a + std::clamp(t, 0.0, 1.0) * (b - a);
}

}  // namespace

std::vector<Polyline> critical_curves(const MultiplaneLens& lens,
                                      const CurveWindow& window, int grid_n,
                                      int refine_iters) {
  const int n = std::max(grid_n, 8);
  const Grid grid = evaluate_grid(lens, window, n);

  std::unordered_map<std::int64_t, int> vertex_of_edge;
  std::vector<Vec2> vertices;
  std::vector<std::pair<int, int>> segments;

  auto crossing_vertex = [&](std::int64_t key, Vec2 a, double fa, Vec2 b,
                             double fb) {
    auto it = vertex_of_edge.find(key);
    if (it != vertex_of_edge.end()) return it->second;
    const int idx = static_cast<int>(vertices.size());
    vertices.push_back(refine_crossing(lens, a, fa, b, fb, refine_iters));
    vertex_of_edge.emplace(key, idx);
    return idx;
  };

  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      const double f00 = grid.value(i, j);       // bottom-left
      const double f10 = grid.value(i, j + 1);   // bottom-right
      const double f11 = grid.value(i + 1, j + 1);
      const double f01 = grid.value(i + 1, j);   // top-left
      if (!std::isfinite(f00) || !std::isfinite(f10) || !std::isfinite(f11) ||
          !std::isfinite(f01)) {
        continue;
      }
      const int code = (f00 > 0.0 ? 1 : 0) | (f10 > 0.0 ? 2 : 0) |
                       (f11 > 0.0 ? 4 : 0) | (f01 > 0.0 ? 8 : 0);
      if (code == 0 || code == 15) continue;

      const Vec2 p00 = grid.node(i, j);
      const Vec2 p10 = grid.node(i, j + 1);
      const Vec2 p11 = grid.node(i + 1, j + 1);
      const Vec2 p01 = grid.node(i + 1, j);

      // candidate crossings on the four cell edges
      auto bottom = [&] {
        return crossing_vertex(hkey(i, j, n), p00, f00, p10, f10);
      };
      auto top = [&] {
        return crossing_vertex(hkey(i + 1, j, n), p01, f01, p11, f11);
      };
      auto left = [&] {
        return crossing_vertex(vkey(i, j, n), p00, f00, p01, f01);
      };
      auto right = [&] {
        return crossing_vertex(vkey(i, j + 1, n), p10, f10, p11, f11);
      };

      switch (code) {
        case 1: case 14:
          segments.emplace_back(bottom(), left());
          break;
        case 2: case 13:
          segments.emplace_back(bottom(), right());
          break;
        case 3: case 12:
          segments.emplace_back(left(), right());
          break;
        case 4: case 11:
          segments.emplace_back(top(), right());
          break;
        case 6: case 9:
          segments.emplace_back(bottom(), top());
          break;
        case 7: case 8:
          segments.emplace_back(top(), left());
          break;
        case 5: case 10: {
          // saddle cell: the center value picks the pairing
          double fc;
          Mat2 jac;
          const Vec2 center = 0.25 * (p00 + p10 + p11 + p01);
          if (lens.try_lens_map_with_jacobian(center, nullptr, &jac)) {
            fc = jac.det();
          } else {
            fc = 0.25 * (f00 + f10 + f11 + f01);
          }
          const bool center_in = fc > 0.0;
          // code 5 has f00/f11 inside; a positive center joins them, so the
          // contour arcs hug the two outside corners (and vice versa).
          const bool diagonal_joined = (code == 5) == center_in;
          if (diagonal_joined) {
            segments.emplace_back(left(), top());
            segments.emplace_back(bottom(), right());
          } else {
            segments.emplace_back(left(), bottom());
            segments.emplace_back(top(), right());
          }
          break;
        }
        default:
          break;
      }
    }
  }

  // Chain segments into polylines. Every vertex has degree <= 2.
  std::vector<std::vector<int>> adj(vertices.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    adj[segments[s].first].push_back(static_cast<int>(s));
    adj[segments[s].second].push_back(static_cast<int>(s));
  }
  std::vector<char> used(segments.size(), 0);
  std::vector<Polyline> out;

  auto walk = [&](int start_vertex, int start_seg) {
    std::vector<int> chain{start_vertex};
    int v = start_vertex;
    int s = start_seg;
    while (true) {
      used[s] = 1;
      v = segments[s].first == v ? segments[s].second : segments[s].first;
      chain.push_back(v);
      int next = -1;
      for (int cand : adj[v]) {
        if (!used[cand]) {
          next = cand;
          break;
        }
      }
      if (next < 0) break;
      s = next;
    }
    return chain;
  };

  // open chains first (start at degree-1 vertices), then remaining loops
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      const bool endpoint = adj[v].size() == 1;
      if (pass == 0 && !endpoint) continue;
      for (int s : adj[v]) {
        if (used[s]) continue;
        std::vector<int> chain = walk(static_cast<int>(v), s);
        Polyline poly;
        poly.closed = chain.size() > 2 && chain.front() == chain.back();
        if (poly.closed) chain.pop_back();
        poly.points.reserve(chain.size());
        for (int idx : chain) {
          const Vec2 p = vertices[idx];
          if (poly.points.empty() || distance(poly.points.back(), p) > 0.0) {
            poly.points.push_back(p);
          }
        }
        if (poly.points.size() >= 2) out.push_back(std::move(poly));
      }
    }
  }

  // stable output order: by first vertex, lexicographic
  std::sort(out.begin(), out.end(), [](const Polyline& a, const Polyline& b) {
    const Vec2 pa = a.points.front();
    const Vec2 pb = b.points.front();
    return pa.u != pb.u ? pa.u < pb.u : pa.v < pb.v;
  });
  return out;
}

std::vector<Polyline> map_to_caustics(const MultiplaneLens& lens,
                                      const std::vector<Polyline>& critical,
                                      int* dropped) {
  int lost = 0;
  std::vector<Polyline> out;
  out.reserve(critical.size());
  for (const auto& poly : critical) {
    Polyline mapped;
    mapped.closed = poly.closed;
    mapped.points.reserve(poly.points.size());
    for (const Vec2 p : poly.points) {
      RayPath path;
      if (lens.try_trace(p, &path)) {
        if (mapped.points.empty() ||
            distance(mapped.points.back(), path.source_hit) > 0.0) {
          mapped.points.push_back(path.source_hit);
        }
      } else {
        ++lost;
        mapped.closed = false;
      }
    }
    out.push_back(std::move(mapped));
  }
  if (dropped) *dropped = lost;
  return out;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// max over (subsampled) vertices of a of the distance to b's segments.
double directed_hausdorff(const Polyline& a, const Polyline& b) {
  const std::size_t na = a.points.size();
  const std::size_t stride = std::max<std::size_t>(1, na / 768);
  double worst = 0.0;
  for (std::size_t i = 0; i < na; i += stride) {
    const Vec2 p = a.points[i];
    double best = std::numeric_limits<double>::infinity();
    const std::size_t nb = b.points.size();
    const std::size_t nseg = b.closed ? nb : nb - 1;
    for (std::size_t s = 0; s < nseg; ++s) {
      const Vec2 q0 = b.points[s];
      const Vec2 q1 = b.points[(s + 1) % nb];
      best = std::min(best, point_segment_distance(p, q0, q1));
      if (best <= worst) break;  // cannot raise the max any more
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double polyline_hausdorff(const Polyline& a, const Polyline& b) {
  if (a.points.empty() || b.points.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

std::vector<std::vector<int>> group_by_caustic(
    const std::vector<Polyline>& caustics, double tol) {
  const int n = static_cast<int>(caustics.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (find(i) == find(j)) continue;
      if (polyline_hausdorff(caustics[i], caustics[j]) <= tol) {
        parent[find(i)] = find(j);
      }
    }
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

CurveSet extract_curves(const MultiplaneLens& lens, const CurveOptions& opts) {
  CurveSet set;
  set.critical = critical_curves(lens, opts.window, opts.grid_n,
                                 opts.refine_iters);
  set.caustic = map_to_caustics(lens, set.critical, &set.dropped_points);

  double tol = opts.group_tol;
  if (tol <= 0.0) {
    double lo_u = 0, hi_u = 0, lo_v = 0, hi_v = 0;
    bool first = true;
    for (const auto& poly : set.caustic) {
      for (const Vec2 p : poly.points) {
        if (first) {
          lo_u = hi_u = p.u;
          lo_v = hi_v = p.v;
          first = false;
        } else {
          lo_u = std::min(lo_u, p.u);
          hi_u = std::max(hi_u, p.u);
          lo_v = std::min(lo_v, p.v);
          hi_v = std::max(hi_v, p.v);
        }
      }
    }
    const double footprint = std::max(hi_u - lo_u, hi_v - lo_v);
    tol = 3.0 * footprint / std::max(opts.grid_n, 1);
  }
  set.group_tolerance = tol;
  set.multiplicity_groups = group_by_caustic(set.caustic, tol);
  return set;
}

}  // namespace multilens
