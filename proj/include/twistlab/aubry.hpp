#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/track.hpp"
#include "twistlab/twistmap.hpp"

namespace twistlab {

struct Rational {
  long p = 0;
  long q = 1;
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  bool operator==(const Rational&) const = default;
};

struct ConvergentList {
  std::vector<Rational> convergents;
  bool rational = false;  // expansion terminated: the input is (numerically) p/q
};

// Continued-fraction convergents of 0 < value < 1, skipping the trivial 0/1 and
// any later denominators equal to 1. Throws ConfigError on bad input.
ConvergentList convergents(double value, int depth);

// "golden" (sqrt5 - 1)/2 and "silver" sqrt2 - 1. Throws ConfigError otherwise.
double named_irrational(const std::string& name);

struct RotationNumber {
  bool rational = true;
  Rational pq;
  double value = 0.0;
  std::string name;  // irrational only, may be empty when given by value
  int depth = 0;
  std::vector<Rational> convergents;

  static RotationNumber from_rational(Rational r);
  static RotationNumber from_irrational(double value, int depth, std::string name = "");
};

// Lifted periodic configuration theta_0..theta_{q-1} with theta_{i+q} = theta_i + p.
struct Configuration {
  Rational rho;
  std::vector<double> thetas;

  double theta(long i) const;  // extended by the boundary condition
};

double action(const TwistMap& map, const Configuration& c);
std::vector<double> action_gradient(const TwistMap& map, const Configuration& c);

// Cyclic tridiagonal Hessian of the periodic action. off[i] couples i and
// (i + 1) mod q; for q <= 2 the couplings accumulate on the same entries.
struct CyclicTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }
  double entry(int i, int j) const;
  // Number of eigenvalues strictly below sigma (Sylvester inertia of an LDL^T sweep).
  int count_below(double sigma) const;
  double min_eigenvalue(double tol = 1e-13) const;
};

CyclicTridiagonal action_hessian(const TwistMap& map, const Configuration& c);

enum class InitStrategy { equispaced, continuation };

struct MinimizeOptions {
  double tol_grad = 1e-11;
  int max_iters = 200;
  InitStrategy init = InitStrategy::equispaced;
  double continuation_step = 0.1;  // largest K increment along the continuation path
  double psd_tol = 1e-8;
};

struct MinimizationResult {
  Configuration config;
  double action = 0.0;
  double initial_action = 0.0;
  double grad_norm = 0.0;
  double min_hessian_eigenvalue = 0.0;
  int newton_steps = 0;
  int gradient_steps = 0;
};

// Single damped-Newton run from the given start; no canonicalization.
MinimizationResult minimize_from(const TwistMap& map, Configuration start,
                                 const MinimizeOptions& opts);

// Minimizing Birkhoff orbit of type rho, canonicalized so that |theta_0| is least.
// Throws NonConvergence or OrderingViolation.
MinimizationResult minimize_orbit(const TwistMap& map, Rational rho,
                                  const MinimizeOptions& opts = {});

// Relabels the orbit and shifts by an integer so that theta_0 is the point
// closest to 0.
Configuration canonicalize(const Configuration& c);

struct OrderedOrbit {
  TwistMapSpec map;
  RotationNumber rho;
  Rational approximant;
  std::vector<double> thetas;  // lifted
  std::vector<double> rs;
  double lipschitz_bound = 0.0;
  double grad_norm = 0.0;
  double closure_residual = 0.0;
  std::optional<double> hausdorff_proxy;

  int size() const { return static_cast<int>(thetas.size()); }
  Point point(int i) const { return {wrap_angle(thetas[i]), rs[i]}; }
  std::vector<Point> points() const;
  Track track() const { return Track::periodic(thetas, rs, approximant.p); }
};

// Momenta from the generating function. Throws ComputationError when the
// projected angles collide or the orbit does not close to 1e-9.
OrderedOrbit orbit_points(const TwistMap& map, const Configuration& c, double grad_norm = 0.0);

struct OrderCertificate {
  bool ok = true;
  std::optional<std::pair<int, int>> witness;
  long pairs_checked = 0;
};

// Pairwise check that the index shift i -> i + 1 preserves the order of lifts.
OrderCertificate check_ordered(const Configuration& c);
OrderCertificate check_ordered(const OrderedOrbit& orbit);

double rotation_number_estimate(const TwistMap& map, Point p, long n);
double rotation_number_estimate(const Track& track, long n);

struct MatherMeasureApprox {
  std::vector<double> weights;
  // max |w_i - w_{sigma(i)}| over the cyclic shift sigma
  double permutation_residual() const;
  double total() const;
};

MatherMeasureApprox mather_measure(const OrderedOrbit& orbit);

// Hausdorff distance between two point sets in the annulus metric.
double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b);

struct AmSetApprox {
  OrderedOrbit orbit;  // deepest convergent
  std::vector<Rational> convergents;
  std::vector<double> hausdorff_by_depth;  // between consecutive convergent orbits
};

// Minimizes every convergent up to depth; the deepest one is the approximation.
AmSetApprox am_set_approx(const TwistMap& map, double value, int depth,
                          const MinimizeOptions& opts = {}, const std::string& name = "");

// Largest angular gap between consecutive projected points.
double max_theta_gap(const std::vector<Point>& pts);

}  // namespace twistlab
