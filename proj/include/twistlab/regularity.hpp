#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/aubry.hpp"
#include "twistlab/green.hpp"
#include "twistlab/twistmap.hpp"

namespace twistlab {

struct PointCloud {
  std::vector<Point> points;
  std::string label;
};

PointCloud cloud_from_orbit(const OrderedOrbit& orbit);

// Difference b - a with the angle taken in [-1/2, 1/2).
Vec2 cloud_difference(Point a, Point b);

struct SecantSample {
  std::vector<double> slopes;
  std::vector<std::pair<int, int>> pairs;
  bool empty() const { return slopes.empty(); }
};

// Secants between cloud points within distance s_max of x and at least s_min
// apart. Pairs with equal angles are skipped.
SecantSample secant_slopes(const PointCloud& cloud, Point x, double s_min, double s_max);

// s_0 * 2^-k for k = 0 .. rungs - 1.
std::vector<double> geometric_ladder(double s0 = 0.1, int rungs = 6);

struct ScaleInterval {
  double scale = 0.0;
  int count = 0;  // secants at this scale
  double lo = 0.0;
  double hi = 0.0;
};

struct ConeEstimate {
  Point base;
  std::vector<ScaleInterval> scales;  // coarse to fine, as given by the ladder
  double lo = 0.0;                    // extrapolated cone, slopes
  double hi = 0.0;
  double angular_width = 0.0;
  std::pair<int, int> lo_pair{-1, -1};
  std::pair<int, int> hi_pair{-1, -1};
  SecantSample finest;  // union of the two finest non-empty scales
};

// Throws SparseCloud when fewer than two scales carry secants, and ConfigError
// for ladders with fewer than three rungs.
ConeEstimate cone_estimate(const PointCloud& cloud, Point x, const std::vector<double>& ladder);

struct UnitArc {
  double from = 0.0;  // angles in radians, from <= to
  double to = 0.0;
  double measure() const { return to - from; }
};

// Antipodal pair of arcs on the unit circle covering the cone directions.
struct UnitaryCone {
  UnitArc arc;
  UnitArc antipode;
  std::vector<Vec2> endpoints() const;  // unit vectors at the four arc ends
};

UnitaryCone unitary_cone(const ConeEstimate& cone);

struct ContainmentVerdict {
  bool contained = true;
  double excess = 0.0;  // how far the cone leaves the widened Green interval
  std::optional<std::pair<int, int>> witness;
  std::optional<double> witness_slope;
};

ContainmentVerdict cone_vs_green(const ConeEstimate& cone, const GreenLimits& limits, double delta);

struct HyperbolicConeReport {
  bool applicable = false;  // false when the gap is not resolved (reported N/A)
  double fraction = 0.0;
  std::vector<bool> two_direction;
};

// delta_i = delta_factor * gap_i at every sampled point.
HyperbolicConeReport hyperbolic_cone_check(const PointCloud& cloud, const std::vector<GreenLimits>& green,
                                           double delta_factor, const std::vector<double>& ladder);

struct RegularityOptions {
  std::vector<double> ladder = geometric_ladder();
  double width_threshold = 0.02;
  double containment_delta = 0.05;  // times the local gap
  double two_direction_delta = 0.1;
};

struct RegularityReport {
  std::vector<ConeEstimate> cones;
  std::vector<double> widths;
  double regular_fraction = 0.0;
  double containment_fraction = 0.0;
  HyperbolicConeReport hyperbolic;
  double max_width = 0.0;
  double median_width = 0.0;
};

RegularityReport regularity_report(const PointCloud& cloud, const std::vector<GreenLimits>& green,
                                   const RegularityOptions& opts = {});

struct PushForwardReport {
  double fitted_constant = 0.0;  // max angle error / pair scale over all secants
  double bound_constant = 0.0;   // analytic bound for the standard family
  int secants = 0;
};

// Compares Df(x_i) applied to each secant near x_i with the matching secant of
// the image cloud.
PushForwardReport pushforward_check(const TwistMap& map, const PointCloud& cloud, int i, double scale);

}  // namespace twistlab
