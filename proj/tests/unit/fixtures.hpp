#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "twistlab/aubry.hpp"
#include "twistlab/twistmap.hpp"

namespace fixtures {

using namespace twistlab;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Linear hyperbolic twist map (theta, r) -> (2 theta + r, theta + r) on the plane.
class CatMap final : public TwistMap {
 public:
  std::string family() const override { return "fixture:cat"; }
  TwistMapSpec spec() const override { return {family(), 0.0}; }
  LiftedPoint apply_lift(LiftedPoint p) const override { return {2.0 * p.theta + p.r, p.theta + p.r}; }
  LiftedPoint inverse_lift(LiftedPoint p) const override { return {p.theta - p.r, 2.0 * p.r - p.theta}; }
  Jacobian jacobian(LiftedPoint) const override { return {2.0, 1.0, 1.0, 1.0}; }
  using TwistMap::jacobian;
  GeneratingEval generating(double theta, double theta_next) const override {
    const double dt = theta_next - theta;
    return {0.5 * dt * dt + 0.5 * theta * theta, 2.0 * theta - theta_next, dt, 2.0, -1.0, 1.0};
  }

  // Eigenvalue e^lambda and the slopes of the expanding and contracting eigenlines.
  static double lambda() { return std::log((3.0 + std::sqrt(5.0)) / 2.0); }
  static double unstable_slope() { return (std::sqrt(5.0) - 1.0) / 2.0; }
  static double stable_slope() { return -(std::sqrt(5.0) + 1.0) / 2.0; }
};

// theta' = theta + sin(2 pi r) / 2pi, r' = r: the twist d theta'/dr = cos(2 pi r)
// changes sign.
class BrokenTwistMap final : public TwistMap {
 public:
  std::string family() const override { return "fixture:broken-twist"; }
  TwistMapSpec spec() const override { return {family(), 0.0}; }
  LiftedPoint apply_lift(LiftedPoint p) const override {
    return {p.theta + std::sin(kTwoPi * p.r) / kTwoPi, p.r};
  }
  LiftedPoint inverse_lift(LiftedPoint p) const override {
    return {p.theta - std::sin(kTwoPi * p.r) / kTwoPi, p.r};
  }
  Jacobian jacobian(LiftedPoint p) const override { return {1.0, std::cos(kTwoPi * p.r), 0.0, 1.0}; }
  using TwistMap::jacobian;
  GeneratingEval generating(double, double) const override { return {}; }
};

inline OrderedOrbit golden(double K, int depth) {
  const auto map = make_map({"standard", K});
  return am_set_approx(*map, named_irrational("golden"), depth, {}, "golden").orbit;
}

inline OrderedOrbit rational(double K, long p, long q) {
  const auto map = make_map({"standard", K});
  const MinimizationResult res = minimize_orbit(*map, {p, q});
  return orbit_points(*map, res.config, res.grad_norm);
}

inline std::vector<Point> random_points(int n, unsigned seed, double r_range = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> th(0.0, 1.0), rr(-r_range, r_range);
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) out.push_back({th(rng), rr(rng)});
  return out;
}

}  // namespace fixtures
