#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twistlab/aubry.hpp"
#include "twistlab/mat2.hpp"
#include "twistlab/track.hpp"
#include "twistlab/twistmap.hpp"

namespace twistlab {

// A line through the origin stored by its angle phi in (-pi/2, pi/2].
class ProjLine {
 public:
  static ProjLine from_vector(Vec2 v);
  static ProjLine from_slope(double s);
  static ProjLine from_angle(double phi);

  double angle() const noexcept { return phi_; }
  bool vertical() const noexcept;
  double slope() const;  // throws for vertical lines
  Vec2 direction() const;

 private:
  double phi_ = 0.0;
};

// Distance between two lines in [0, pi/2].
double angular_distance(const ProjLine& a, const ProjLine& b);

// a strictly below b, compared in angle space once either slope exceeds 1e6.
bool slope_less(double a, double b);

struct GreenOptions {
  int n_max = 64;
  double tol_cauchy = 1e-9;
  double interlace_margin = 1e-12;
  double monotone_tol = 1e-10;
};

// s_n(x_k) = slope of Df^n(x_{k-n})(0, 1), pushed one step at a time with
// renormalization. Throws TransversalityFailure when the image turns vertical
// or crosses the vertical.
double slope_forward(const TwistMap& map, const Track& track, long k, int n);
double slope_backward(const TwistMap& map, const Track& track, long k, int n);
double slope_forward(const TwistMap& map, Point x, int n);
double slope_backward(const TwistMap& map, Point x, int n);

struct GreenSequence {
  Point base;
  std::vector<double> forward;   // s_1 .. s_N
  std::vector<double> backward;  // s_{-1} .. s_{-N}
};

GreenSequence green_sequence(const TwistMap& map, const Track& track, long k, int n_max);

struct InterlacingReport {
  bool ok = true;
  double max_violation = 0.0;  // largest positive amount by which an inequality fails
  double min_margin = 0.0;     // smallest slack among the strict inequalities
  std::optional<int> first_bad_n;
};

InterlacingReport check_interlacing(const GreenSequence& seq, double margin = 1e-12);

struct GreenLimits {
  double s_minus = 0.0;
  double s_plus = 0.0;
  double gap = 0.0;
  double gap_uncertainty = 0.0;  // estimated tail of both sequences beyond n_used
  int n_used = 0;
  double cauchy_residual = 0.0;
  bool converged = false;
  std::vector<double> forward;
  std::vector<double> backward;
};

// Throws GreenSetViolation on a monotonicity failure beyond opts.monotone_tol.
GreenLimits green_limits(const TwistMap& map, const Track& track, long k, const GreenOptions& opts = {});
GreenLimits green_limits(const TwistMap& map, Point x, const GreenOptions& opts = {});

std::vector<GreenLimits> green_table(const TwistMap& map, const OrderedOrbit& orbit,
                                     const GreenOptions& opts = {});

struct CocycleEntries {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double det() const { return a * d - b * c; }
};

// M_n(x_k) = Df^n(x_k). Throws GreenSetViolation when b_n <= 0 and
// ComputationError on overflow.
CocycleEntries cocycle_entries(const TwistMap& map, const Track& track, long k, int n);

// Direct product of n Jacobians, kept as the oracle for the projective iteration.
Jacobian jacobian_product(const TwistMap& map, const Track& track, long k, int n);

struct GreenSetReport {
  bool ok = true;
  std::optional<int> bad_n;
  std::optional<long> bad_k;
  std::string reason;
};

// Sign conditions Dpi Df^n(x_k)(0,1) > 0, Dpi Df^{-n}(x_k)(0,1) < 0 and the
// interlacing, for k in [k_first, k_first + window) and n <= n_max.
GreenSetReport green_set_check(const TwistMap& map, const Track& track, long k_first, int window,
                               int n_max);

struct InvarianceResidual {
  double minus = 0.0;
  double plus = 0.0;
  double max() const { return minus > plus ? minus : plus; }
};

// Angle between Df(x_k) G_pm(x_k) and G_pm(x_{k+1}), with both limits computed
// independently.
InvarianceResidual invariance_residual(const TwistMap& map, const Track& track, long k,
                                       const GreenOptions& opts = {});

enum class Growth { unbounded, bounded };

struct GrowthProfile {
  std::vector<double> values;  // |Dpi Df^n(x_k) v| for n = 0..n_max
  Growth growth = Growth::bounded;
};

GrowthProfile dynamical_criterion_test(const TwistMap& map, const Track& track, long k, Vec2 v,
                                       int n_max);

struct BGrowth {
  std::vector<double> log_b;  // log b_n for n = 1..n_max
  double log_slope = 0.0;     // least-squares slope of log b_n over the second half
};

BGrowth growth_b_n(const TwistMap& map, const Track& track, long k, int n_max);

std::string to_string(Growth g);

// Relative residuals of d_n = s_n(x_{k+n}) b_n, a_n = -b_n s_{-n}(x_k), det M_n = 1 and
// 1 = b_n^2 (s_+(x_k) - s_{-n}(x_k)) (s_n(x_{k+n}) - s_+(x_{k+n})), given the two limits.
struct MatrixIdentityResidual {
  double d = 0.0;
  double a = 0.0;
  double det = 0.0;
  double det_n = 0.0;
  double max() const;
};

MatrixIdentityResidual matrix_identity_residuals(const TwistMap& map, const Track& track, long k, int n,
                                                 double s_plus_k, double s_plus_kn);

}  // namespace twistlab
