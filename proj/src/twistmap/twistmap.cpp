#include "twistlab/twistmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "twistlab/error.hpp"

namespace twistlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_angle(double theta) {
  double t = theta - std::floor(theta);
  // floor can round x - floor(x) up to exactly 1 for tiny negative x
  if (t >= 1.0) t = 0.0;
  return t;
}

double centered(double x) {
  double c = x - std::floor(x + 0.5);
  if (c >= 0.5) c -= 1.0;
  return c;
}

Point make_point(double theta, double r) {
  if (!std::isfinite(theta) || !std::isfinite(r)) {
    throw ConfigError("point coordinates must be finite");
  }
  return {wrap_angle(theta), r};
}

double annulus_distance(Point a, Point b) {
  return std::hypot(centered(a.theta - b.theta), a.r - b.r);
}

Point TwistMap::apply(Point p) const {
  if (!std::isfinite(p.theta) || !std::isfinite(p.r)) {
    throw ConfigError("apply: non-finite input");
  }
  return project(apply_lift(lift(p)));
}

Point TwistMap::inverse(Point p) const {
  if (!std::isfinite(p.theta) || !std::isfinite(p.r)) {
    throw ConfigError("inverse: non-finite input");
  }
  return project(inverse_lift(lift(p)));
}

Jacobian TwistMap::inverse_jacobian(LiftedPoint p) const {
  // Df^{-1}(p) = (Df(f^{-1} p))^{-1}
  return jacobian(inverse_lift(p)).inverse();
}

// ---------------------------------------------------------------------------

StandardMap::StandardMap(double K) : K_(K) {
  if (!std::isfinite(K) || K < 0.0) throw ConfigError("standard map: K must be finite and >= 0");
}

double StandardMap::kick(double theta) const { return K_ / kTwoPi * std::sin(kTwoPi * theta); }

double StandardMap::kick_prime(double theta) const { return K_ * std::cos(kTwoPi * theta); }

LiftedPoint StandardMap::apply_lift(LiftedPoint p) const {
  const double r_next = p.r + kick(p.theta);
  return {p.theta + r_next, r_next};
}

LiftedPoint StandardMap::inverse_lift(LiftedPoint p) const {
  const double theta_prev = p.theta - p.r;
  return {theta_prev, p.r - kick(theta_prev)};
}

Jacobian StandardMap::jacobian(LiftedPoint p) const {
  const double kp = kick_prime(p.theta);
  return {1.0 + kp, 1.0, kp, 1.0};
}

GeneratingEval StandardMap::generating(double theta, double theta_next) const {
  const double dt = theta_next - theta;
  const double arg = kTwoPi * theta;
  GeneratingEval g;
  g.h = 0.5 * dt * dt - K_ / (kTwoPi * kTwoPi) * std::cos(arg);
  g.d1h = -dt + K_ / kTwoPi * std::sin(arg);
  g.d2h = dt;
  g.d11h = 1.0 + K_ * std::cos(arg);
  g.d12h = -1.0;
  g.d22h = 1.0;
  return g;
}

std::shared_ptr<const TwistMap> make_map(const TwistMapSpec& spec) {
  if (spec.family == "standard") return std::make_shared<StandardMap>(spec.K);
  throw ConfigError("unknown map family '" + spec.family + "' (available: standard)");
}

// ---------------------------------------------------------------------------

double generating_residual(const TwistMap& map, Point p) {
  const LiftedPoint next = map.apply_lift(lift(p));
  const GeneratingEval g = map.generating(p.theta, next.theta);
  return std::max(std::abs(p.r + g.d1h), std::abs(next.r - g.d2h));
}

Jacobian finite_difference_jacobian(const TwistMap& map, LiftedPoint p, double step) {
  const LiftedPoint tp = map.apply_lift({p.theta + step, p.r});
  const LiftedPoint tm = map.apply_lift({p.theta - step, p.r});
  const LiftedPoint rp = map.apply_lift({p.theta, p.r + step});
  const LiftedPoint rm = map.apply_lift({p.theta, p.r - step});
  const double h2 = 2.0 * step;
  return {(tp.theta - tm.theta) / h2, (rp.theta - rm.theta) / h2, (tp.r - tm.r) / h2,
          (rp.r - rm.r) / h2};
}

TwistReport verify_twist(const TwistMap& map, int n_samples, std::uint64_t seed, double r_range) {
  if (n_samples < 1) throw ConfigError("verify_twist: n_samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta_dist(0.0, 1.0);
  std::uniform_real_distribution<double> r_dist(-r_range, r_range);

  TwistReport rep;
  rep.samples = n_samples;
  rep.min_forward_twist = INFINITY;
  rep.min_backward_twist = INFINITY;
  for (int i = 0; i < n_samples; ++i) {
    const Point p{theta_dist(rng), r_dist(rng)};
    const double fwd = map.jacobian(p).b;
    const double bwd = -map.inverse_jacobian(lift(p)).b;
    rep.min_forward_twist = std::min(rep.min_forward_twist, fwd);
    rep.min_backward_twist = std::min(rep.min_backward_twist, bwd);
    if (!rep.witness && (fwd <= 0.0 || bwd <= 0.0)) rep.witness = p;
  }
  rep.ok = !rep.witness.has_value();
  return rep;
}

MapInvariantReport check_map_invariants(const TwistMap& map, int n_samples, std::uint64_t seed,
                                        double r_range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta_dist(0.0, 1.0);
  std::uniform_real_distribution<double> r_dist(-r_range, r_range);

  MapInvariantReport rep;
  rep.samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const Point p{theta_dist(rng), r_dist(rng)};
    const Jacobian J = map.jacobian(p);
    rep.max_det_residual = std::max(rep.max_det_residual, std::abs(J.det() - 1.0));

    const Point back = map.apply(map.inverse(p));
    rep.max_roundtrip_error = std::max(rep.max_roundtrip_error, annulus_distance(back, p));

    rep.max_generating_residual = std::max(rep.max_generating_residual, generating_residual(map, p));

    const LiftedPoint a = map.apply_lift(lift(p));
    const LiftedPoint b = map.apply_lift({p.theta + 1.0, p.r});
    rep.max_lift_equivariance =
        std::max(rep.max_lift_equivariance, std::hypot(b.theta - a.theta - 1.0, b.r - a.r));

    const Jacobian fd = finite_difference_jacobian(map, lift(p));
    const double err = std::max({std::abs(fd.a - J.a), std::abs(fd.b - J.b), std::abs(fd.c - J.c),
                                 std::abs(fd.d - J.d)});
    rep.max_jacobian_fd_error = std::max(rep.max_jacobian_fd_error, err);
  }
  return rep;
}

}  // namespace twistlab
