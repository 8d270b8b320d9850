#include <cmath>
#include <numbers>

#include "twistlab/error.hpp"
#include "twistlab/green.hpp"

namespace twistlab {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

ProjLine ProjLine::from_angle(double phi) {
  if (!std::isfinite(phi)) throw ComputationError("ProjLine: non-finite angle");
  double a = std::fmod(phi, std::numbers::pi);
  if (a > kHalfPi) a -= std::numbers::pi;
  if (a <= -kHalfPi) a += std::numbers::pi;
  ProjLine l;
  l.phi_ = a;
  return l;
}

ProjLine ProjLine::from_vector(Vec2 v) {
  if (v.x == 0.0 && v.y == 0.0) throw ComputationError("ProjLine: zero vector");
  if (v.x == 0.0) return from_angle(kHalfPi);
  return from_angle(std::atan2(v.y, v.x));
}

ProjLine ProjLine::from_slope(double s) {
  if (std::isinf(s)) return from_angle(kHalfPi);
  return from_angle(std::atan(s));
}

bool ProjLine::vertical() const noexcept { return phi_ == kHalfPi; }

double ProjLine::slope() const {
  if (vertical()) throw ComputationError("ProjLine: slope of a vertical line");
  return std::tan(phi_);
}

Vec2 ProjLine::direction() const { return {std::cos(phi_), std::sin(phi_)}; }

double angular_distance(const ProjLine& a, const ProjLine& b) {
  const double d = std::abs(a.angle() - b.angle());
  return std::min(d, std::numbers::pi - d);
}

bool slope_less(double a, double b) {
  if (std::abs(a) > 1e6 || std::abs(b) > 1e6) return std::atan(a) < std::atan(b);
  return a < b;
}

std::string to_string(Growth g) { return g == Growth::unbounded ? "unbounded" : "bounded"; }

}  // namespace twistlab
