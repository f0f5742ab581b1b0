#ifndef MULTILENS_VEC2_HPP
#define MULTILENS_VEC2_HPP

#include <cmath>

namespace multilens {

/// Position in a lens or source plane, dimensionless angular units.
struct Vec2 {
  double u = 0.0;
  double v = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.v + b.v}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.u, s * a.v}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.u, s * a.v}; }
  friend Vec2 operator/(Vec2 a, double s) { return {a.u / s, a.v / s}; }
  Vec2& operator+=(Vec2 b) { u += b.u; v += b.v; return *this; }
  Vec2& operator-=(Vec2 b) { u -= b.u; v -= b.v; return *this; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.u == b.u && a.v == b.v; }

  double norm2() const { return u * u + v * v; }
  double norm() const { return std::hypot(u, v); }
  bool finite() const { return std::isfinite(u) && std::isfinite(v); }
};

using PlanePoint = Vec2;

inline double dot(Vec2 a, Vec2 b) { return a.u * b.u + a.v * b.v; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// 2x2 real matrix, row major: [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  friend Mat2 operator+(Mat2 x, Mat2 y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend Mat2 operator-(Mat2 x, Mat2 y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend Mat2 operator*(double s, Mat2 x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
  friend Mat2 operator*(Mat2 x, Mat2 y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Vec2 operator*(Mat2 m, Vec2 x) {
    return {m.a * x.u + m.b * x.v, m.c * x.u + m.d * x.v};
  }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)),
                    std::max(std::abs(c), std::abs(d)));
  }

  /// Solve m x = rhs by Cramer's rule. Caller checks det is usable.
  Vec2 solve(Vec2 rhs) const {
    const double dt = det();
    return {(rhs.u * d - b * rhs.v) / dt, (a * rhs.v - rhs.u * c) / dt};
  }
};

}  // namespace multilens

#endif
