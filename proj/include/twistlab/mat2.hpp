#pragma once

#include <algorithm>
#include <cmath>

namespace twistlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    const double n = norm();
    return {x / n, y / n};
  }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
};

// 2x2 matrix [[a, b], [c, d]] acting on column vectors (dtheta, dr).
struct Jacobian {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  static Jacobian identity() { return {}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

  Jacobian operator*(const Jacobian& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }

  Jacobian scaled(double s) const { return {a * s, b * s, c * s, d * s}; }

  // Inverse assuming det == 1 (symplectic); exact adjugate otherwise divided by det.
  Jacobian inverse() const {
    const double det_ = det();
    return {d / det_, -b / det_, -c / det_, a / det_};
  }

  Jacobian transpose() const { return {a, c, b, d}; }

  double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

  // Largest singular value.
  double operator_norm() const {
    // sigma_max^2 = (F^2 + sqrt(F^4 - 4 det^2)) / 2 with F the Frobenius norm.
    const double f2 = a * a + b * b + c * c + d * d;
    const double dt = det();
    const double disc = std::max(0.0, f2 * f2 - 4.0 * dt * dt);
    return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
  }
};

}  // namespace twistlab
