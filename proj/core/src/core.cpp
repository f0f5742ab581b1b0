#include "multilens/core.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "multilens/errors.hpp"

namespace multilens {

LensPlane::LensPlane(std::vector<PointMass> masses)
    : masses_(std::move(masses)) {
  if (masses_.empty()) {
    throw ValidationError("LensPlane needs at least one mass");
  }
  for (const auto& m : masses_) {
    if (!m.position.finite() || !std::isfinite(m.einstein_radius)) {
      throw ValidationError("mass has non-finite fields");
    }
    if (m.einstein_radius < 0.0) {
      throw ValidationError("einstein_radius must be >= 0");
    }
  }
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    for (std::size_t j = i + 1; j < masses_.size(); ++j) {
      if (distance(masses_[i].position, masses_[j].position) <= 0.0) {
        throw ValidationError("mass positions must be pairwise distinct");
      }
    }
  }
}

double LensPlane::outermost_radius() const {
  double r = 0.0;
  for (const auto& m : masses_) r = std::max(r, m.position.norm());
  return r;
}

bool LensPlane::try_deflection(Vec2 x, Vec2* out) const {
  Vec2 acc{0.0, 0.0};
  for (const auto& m : masses_) {
    const Vec2 d = x - m.position;
    const double r2 = d.norm2();
    if (r2 <= kExclusionRadius * kExclusionRadius) return false;
    const double b2 = m.einstein_radius * m.einstein_radius;
    acc += (b2 / r2) * d;
  }
  *out = acc;
  return true;
}

bool LensPlane::try_deflection_jacobian(Vec2 x, Mat2* out) const {
  Mat2 acc{};
  for (const auto& m : masses_) {
    const Vec2 d = x - m.position;
    const double r2 = d.norm2();
    if (r2 <= kExclusionRadius * kExclusionRadius) return false;
    const double b2 = m.einstein_radius * m.einstein_radius;
    const double s = b2 / (r2 * r2);
    acc.a += s * (r2 - 2.0 * d.u * d.u);
    acc.b += s * (-2.0 * d.u * d.v);
    acc.c += s * (-2.0 * d.u * d.v);
    acc.d += s * (r2 - 2.0 * d.v * d.v);
  }
  *out = acc;
  return true;
}

Vec2 LensPlane::deflection(Vec2 x) const {
  Vec2 out;
  if (!try_deflection(x, &out)) throw ObstructionError(0, x.u, x.v);
  return out;
}

Mat2 LensPlane::deflection_jacobian(Vec2 x) const {
  Mat2 out;
  if (!try_deflection_jacobian(x, &out)) throw ObstructionError(0, x.u, x.v);
  return out;
}

MultiplaneLens::MultiplaneLens(std::vector<LensPlane> planes, Vec2 source,
                               std::vector<double> epsilons,
                               std::vector<double> betas)
    : planes_(std::move(planes)),
      betas_(std::move(betas)),
      epsilons_(std::move(epsilons)),
      source_(source) {
  const std::size_t k = planes_.size();
  if (k == 0) throw ValidationError("MultiplaneLens needs at least one plane");
  if (!source_.finite()) throw ValidationError("source must be finite");
  if (epsilons_.empty()) epsilons_.assign(k >= 1 ? k - 1 : 0, 0.0);
  if (epsilons_.size() != k - 1) {
    throw ValidationError("epsilons must have K-1 entries, got " +
                          std::to_string(epsilons_.size()) + " for K = " +
                          std::to_string(k));
  }
  for (double e : epsilons_) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw ValidationError("epsilons must be finite and >= 0");
    }
  }
  if (betas_.empty()) betas_.assign(k, 1.0);
  if (betas_.size() != k) {
    throw ValidationError("betas must have K entries");
  }
  for (double b : betas_) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw ValidationError("betas must be finite and > 0");
    }
  }
}

MultiplaneLens MultiplaneLens::with_source(Vec2 y) const {
  MultiplaneLens out = *this;
  if (!y.finite()) throw ValidationError("source must be finite");
  out.source_ = y;
  return out;
}

MultiplaneLens MultiplaneLens::with_epsilons(std::vector<double> eps) const {
  return MultiplaneLens(planes_, source_, std::move(eps), betas_);
}

bool MultiplaneLens::try_trace(Vec2 x1, RayPath* out,
                               int* blocked_plane) const {
  const std::size_t k = planes_.size();
  out->impacts.resize(k);
  Vec2 prev{0.0, 0.0};
  Vec2 cur = x1;
  for (std::size_t i = 1; i <= k; ++i) {
    out->impacts[i - 1] = cur;
    Vec2 alpha;
    if (!planes_[i - 1].try_deflection(cur, &alpha)) {
      if (blocked_plane) *blocked_plane = static_cast<int>(i);
      return false;
    }
    const double e = eps(i);
    Vec2 next = cur - beta(i) * alpha;
    if (i >= 2) next += e * (cur - prev);
    prev = cur;
    cur = next;
  }
  out->source_hit = cur;
  out->residual_norm = (cur - source_).norm();
  return true;
}

RayPath MultiplaneLens::trace(Vec2 x1) const {
  RayPath p;
  int blocked = 0;
  if (!try_trace(x1, &p, &blocked)) {
    throw ObstructionError(blocked, x1.u, x1.v);
  }
  return p;
}

Vec2 MultiplaneLens::lens_map(Vec2 x1) const { return trace(x1).source_hit; }

bool MultiplaneLens::try_lens_map_with_jacobian(Vec2 x1, Vec2* eta, Mat2* jac,
                                                int* blocked_plane) const {
  const std::size_t k = planes_.size();
  Vec2 prev{0.0, 0.0};
  Vec2 cur = x1;
  Mat2 d_prev{};  // D_0 = 0
  Mat2 d_cur = Mat2::identity();
  for (std::size_t i = 1; i <= k; ++i) {
    Vec2 alpha;
    Mat2 dalpha;
    if (!planes_[i - 1].try_deflection(cur, &alpha) ||
        !planes_[i - 1].try_deflection_jacobian(cur, &dalpha)) {
      if (blocked_plane) *blocked_plane = static_cast<int>(i);
      return false;
    }
    const double e = eps(i);
    const double b = beta(i);
    Vec2 next = cur - b * alpha;
    if (i >= 2) next += e * (cur - prev);
    Mat2 d_next = (1.0 + e) * d_cur - e * d_prev - b * (dalpha * d_cur);
    prev = cur;
    cur = next;
    d_prev = d_cur;
    d_cur = d_next;
  }
  if (eta) *eta = cur;
  if (jac) *jac = d_cur;
  return true;
}

Mat2 MultiplaneLens::lens_map_jacobian(Vec2 x1) const {
  Mat2 jac;
  int blocked = 0;
  if (!try_lens_map_with_jacobian(x1, nullptr, &jac, &blocked)) {
    throw ObstructionError(blocked, x1.u, x1.v);
  }
  return jac;
}

std::vector<double> MultiplaneLens::system_residual(
    std::span<const Vec2> xs) const {
  const std::size_t k = planes_.size();
  if (xs.size() != k) {
    throw ValidationError("system_residual needs exactly K plane points");
  }
  std::vector<double> f(2 * k);
  for (std::size_t i = 1; i <= k; ++i) {
    const Vec2 xi = xs[i - 1];
    Vec2 alpha;
    if (!planes_[i - 1].try_deflection(xi, &alpha)) {
      throw ObstructionError(static_cast<int>(i), xi.u, xi.v);
    }
    const double e = eps(i);
    Vec2 fi = xi - beta(i) * alpha;
    if (i >= 2) fi += e * (xi - xs[i - 2]);
    const Vec2 next = (i == k) ? source_ : xs[i];
    fi -= next;
    f[2 * (i - 1)] = fi.u;
    f[2 * (i - 1) + 1] = fi.v;
  }
  return f;
}

Mat2 MultiplaneLens::system_diagonal_block(std::size_t i, Vec2 xi) const {
  Mat2 dalpha;
  if (!planes_[i - 1].try_deflection_jacobian(xi, &dalpha)) {
    throw ObstructionError(static_cast<int>(i), xi.u, xi.v);
  }
  return (1.0 + eps(i)) * Mat2::identity() - beta(i) * dalpha;
}

DenseMatrix MultiplaneLens::system_jacobian(std::span<const Vec2> xs) const {
  const std::size_t k = planes_.size();
  if (xs.size() != k) {
    throw ValidationError("system_jacobian needs exactly K plane points");
  }
  DenseMatrix j(2 * k, 2 * k);
  const Mat2 minus_i{-1.0, 0.0, 0.0, -1.0};
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t r = 2 * (i - 1);
    j.set_block2(r, r, system_diagonal_block(i, xs[i - 1]));
    if (i < k) j.set_block2(r, r + 2, minus_i);
    if (i >= 2) {
      const double e = eps(i);
      j.set_block2(r, r - 2, Mat2{-e, 0.0, 0.0, -e});
    }
  }
  return j;
}

}  // namespace multilens
