#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "twistlab/mat2.hpp"

namespace twistlab {

/// A point of the annulus T x R. The angle is always reduced into [0, 1).
struct Point {
  double theta = 0.0;
  double r = 0.0;
};

/// A point of the universal cover R^2; the angle is never reduced.
struct LiftedPoint {
  double theta = 0.0;
  double r = 0.0;
};

/// Floor-based reduction into [0, 1).
double wrap_angle(double theta);

/// Validates finiteness and reduces the angle. Throws ConfigError otherwise.
Point make_point(double theta, double r);

inline Point project(LiftedPoint p) { return {wrap_angle(p.theta), p.r}; }
inline LiftedPoint lift(Point p) { return {p.theta, p.r}; }

/// Value and partial derivatives of a generating function h(theta, theta').
struct GeneratingEval {
  double h = 0.0;
  double d1h = 0.0;
  double d2h = 0.0;
  double d11h = 0.0;
  double d12h = 0.0;
  double d22h = 0.0;
};

struct MapTolerances {
  double det = 1e-12;
  double gen = 1e-10;
};

/// Identifies a member of a map family, e.g. {"standard", 0.97}.
struct TwistMapSpec {
  std::string family = "standard";
  double K = 0.0;
};

/// Exact symplectic positive twist map of the annulus, given through a lift.
///
/// Families implement the lifted forward/inverse maps, the derivative and the
/// generating function; reduction to the annulus is done here once.
class TwistMap {
 public:
  virtual ~TwistMap() = default;

  virtual std::string family() const = 0;
  virtual TwistMapSpec spec() const = 0;

  virtual LiftedPoint apply_lift(LiftedPoint p) const = 0;
  virtual LiftedPoint inverse_lift(LiftedPoint p) const = 0;
  virtual Jacobian jacobian(LiftedPoint p) const = 0;
  virtual GeneratingEval generating(double theta, double theta_next) const = 0;

  /// Momentum at theta for the orbit segment theta -> theta_next: r = -d1h.
  double momentum(double theta, double theta_next) const {
    return -generating(theta, theta_next).d1h;
  }

  Point apply(Point p) const;
  Point inverse(Point p) const;
  Jacobian jacobian(Point p) const { return jacobian(lift(p)); }
  Jacobian inverse_jacobian(LiftedPoint p) const;
};

/// Chirikov standard map
///   theta' = theta + r + (K / 2pi) sin(2pi theta),  r' = r + (K / 2pi) sin(2pi theta)
/// with generating function h = (theta' - theta)^2 / 2 - (K / 4pi^2) cos(2pi theta).
class StandardMap final : public TwistMap {
 public:
  explicit StandardMap(double K);

  double K() const noexcept { return K_; }

  std::string family() const override { return "standard"; }
  TwistMapSpec spec() const override { return {"standard", K_}; }
  LiftedPoint apply_lift(LiftedPoint p) const override;
  LiftedPoint inverse_lift(LiftedPoint p) const override;
  Jacobian jacobian(LiftedPoint p) const override;
  using TwistMap::jacobian;
  GeneratingEval generating(double theta, double theta_next) const override;

  double kick(double theta) const;       // (K / 2pi) sin(2pi theta)
  double kick_prime(double theta) const;  // K cos(2pi theta)

 private:
  double K_;
};

/// Builds a map from its family name. Throws ConfigError for unknown families
/// or invalid parameters.
std::shared_ptr<const TwistMap> make_map(const TwistMapSpec& spec);

struct TwistReport {
  int samples = 0;
  double min_forward_twist = 0.0;   // min of d(pi o f)/dr
  double min_backward_twist = 0.0;  // min of -d(pi o f^-1)/dr
  bool ok = false;
  std::optional<Point> witness;  // first sample violating either sign condition
};

/// Samples theta uniformly and r in [-r_range, r_range] with a fixed seed.
TwistReport verify_twist(const TwistMap& map, int n_samples, std::uint64_t seed = 1,
                         double r_range = 2.0);

/// Worst-case residuals of the structural identities over random samples.
struct MapInvariantReport {
  int samples = 0;
  double max_det_residual = 0.0;        // |det Df - 1|
  double max_roundtrip_error = 0.0;     // |apply(inverse(p)) - p|
  double max_generating_residual = 0.0; // r = -d1h, r' = d2h
  double max_lift_equivariance = 0.0;   // f~(theta + 1, r) - f~(theta, r) - (1, 0)
  double max_jacobian_fd_error = 0.0;   // entries vs central differences
};

MapInvariantReport check_map_invariants(const TwistMap& map, int n_samples, std::uint64_t seed = 7,
                                        double r_range = 2.0);

/// Residual of the generating relations for the step p -> apply(p).
double generating_residual(const TwistMap& map, Point p);

/// Central finite-difference Jacobian of the lifted map.
Jacobian finite_difference_jacobian(const TwistMap& map, LiftedPoint p, double step = 1e-6);

/// Distance on the annulus with the angle difference taken in [-1/2, 1/2).
double annulus_distance(Point a, Point b);

/// Representative of x in [-1/2, 1/2).
double centered(double x);

}  // namespace twistlab
