#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "twistlab/error.hpp"
#include "twistlab/regularity.hpp"

namespace twistlab {

PointCloud cloud_from_orbit(const OrderedOrbit& orbit) {
  PointCloud c;
  c.points = orbit.points();
  c.label = std::to_string(orbit.approximant.p) + "/" + std::to_string(orbit.approximant.q);
  return c;
}

Vec2 cloud_difference(Point a, Point b) { return {centered(b.theta - a.theta), b.r - a.r}; }

SecantSample secant_slopes(const PointCloud& cloud, Point x, double s_min, double s_max) {
  if (!(s_min >= 0.0 && s_min < s_max)) throw ConfigError("secant_slopes: need 0 <= s_min < s_max");
  std::vector<int> ball;
  for (int i = 0; i < static_cast<int>(cloud.points.size()); ++i) {
    if (annulus_distance(cloud.points[i], x) <= s_max) ball.push_back(i);
  }
  SecantSample out;
  for (std::size_t a = 0; a < ball.size(); ++a) {
    for (std::size_t b = a + 1; b < ball.size(); ++b) {
      const Vec2 d = cloud_difference(cloud.points[ball[a]], cloud.points[ball[b]]);
      if (d.x == 0.0 || d.norm() < s_min) continue;
      out.slopes.push_back(d.y / d.x);
      out.pairs.emplace_back(ball[a], ball[b]);
    }
  }
  return out;
}

std::vector<double> geometric_ladder(double s0, int rungs) {
  if (!(s0 > 0.0) || rungs < 1) throw ConfigError("geometric_ladder: need s0 > 0 and rungs >= 1");
  std::vector<double> out(rungs);
  for (int k = 0; k < rungs; ++k) out[k] = std::ldexp(s0, -k);
  return out;
}

ConeEstimate cone_estimate(const PointCloud& cloud, Point x, const std::vector<double>& ladder) {
  if (ladder.size() < 3) throw ConfigError("cone_estimate: the scale ladder needs at least 3 rungs");
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    if (!(ladder[k] < ladder[k - 1])) throw ConfigError("cone_estimate: the ladder must decrease");
  }

  ConeEstimate cone;
  cone.base = x;
  std::vector<SecantSample> samples;
  std::vector<std::size_t> nonempty;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    SecantSample s = secant_slopes(cloud, x, 0.0, ladder[k]);
    ScaleInterval iv;
    iv.scale = ladder[k];
    iv.count = static_cast<int>(s.slopes.size());
    if (!s.empty()) {
      const auto [mn, mx] = std::minmax_element(s.slopes.begin(), s.slopes.end());
      iv.lo = *mn;
      iv.hi = *mx;
      nonempty.push_back(k);
    }
    cone.scales.push_back(iv);
    samples.push_back(std::move(s));
  }
  if (nonempty.size() < 2) {
    throw SparseCloud("cloud too sparse near (" + std::to_string(x.theta) + ", " + std::to_string(x.r) +
                      "): fewer than two scales carry secants; deepen the convergent");
  }

  for (std::size_t idx : {nonempty[nonempty.size() - 2], nonempty.back()}) {
    const SecantSample& s = samples[idx];
    cone.finest.slopes.insert(cone.finest.slopes.end(), s.slopes.begin(), s.slopes.end());
    cone.finest.pairs.insert(cone.finest.pairs.end(), s.pairs.begin(), s.pairs.end());
  }
  const auto& sl = cone.finest.slopes;
  const auto lo_it = std::min_element(sl.begin(), sl.end());
  const auto hi_it = std::max_element(sl.begin(), sl.end());
  cone.lo = *lo_it;
  cone.hi = *hi_it;
  cone.lo_pair = cone.finest.pairs[static_cast<std::size_t>(lo_it - sl.begin())];
  cone.hi_pair = cone.finest.pairs[static_cast<std::size_t>(hi_it - sl.begin())];
  cone.angular_width = std::atan(cone.hi) - std::atan(cone.lo);
  return cone;
}

std::vector<Vec2> UnitaryCone::endpoints() const {
  return {{std::cos(arc.from), std::sin(arc.from)},
          {std::cos(arc.to), std::sin(arc.to)},
          {std::cos(antipode.from), std::sin(antipode.from)},
          {std::cos(antipode.to), std::sin(antipode.to)}};
}

UnitaryCone unitary_cone(const ConeEstimate& cone) {
  UnitaryCone u;
  u.arc = {std::atan(cone.lo), std::atan(cone.lo) + cone.angular_width};
  u.antipode = {u.arc.from + std::numbers::pi, u.arc.to + std::numbers::pi};
  return u;
}

ContainmentVerdict cone_vs_green(const ConeEstimate& cone, const GreenLimits& limits, double delta) {
  ContainmentVerdict v;
  const double below = (limits.s_minus - delta) - cone.lo;
  const double above = cone.hi - (limits.s_plus + delta);
  if (below > 0.0 || above > 0.0) {
    v.contained = false;
    if (below >= above) {
      v.excess = below;
      v.witness = cone.lo_pair;
      v.witness_slope = cone.lo;
    } else {
      v.excess = above;
      v.witness = cone.hi_pair;
      v.witness_slope = cone.hi;
    }
  }
  return v;
}

namespace {

bool gap_resolved(const GreenLimits& g) { return g.gap > 0.0 && g.gap > g.gap_uncertainty; }

bool has_slope_near(const std::vector<double>& slopes, double target, double delta) {
  return std::any_of(slopes.begin(), slopes.end(), [&](double s) { return std::abs(s - target) <= delta; });
}

void check_sizes(const PointCloud& cloud, const std::vector<GreenLimits>& green) {
  if (cloud.points.size() != green.size()) throw ConfigError("cloud and Green table sizes differ");
}

}  // namespace

HyperbolicConeReport hyperbolic_cone_check(const PointCloud& cloud, const std::vector<GreenLimits>& green,
                                           double delta_factor, const std::vector<double>& ladder) {
  check_sizes(cloud, green);
  HyperbolicConeReport rep;
  rep.applicable = !green.empty() && std::all_of(green.begin(), green.end(), gap_resolved);
  if (!rep.applicable) return rep;
  int hits = 0;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    bool both = false;
    try {
      const ConeEstimate cone = cone_estimate(cloud, cloud.points[i], ladder);
      const double delta = delta_factor * green[i].gap;
      both = has_slope_near(cone.finest.slopes, green[i].s_minus, delta) &&
             has_slope_near(cone.finest.slopes, green[i].s_plus, delta);
    } catch (const SparseCloud&) {
      both = false;
    }
    rep.two_direction.push_back(both);
    hits += both ? 1 : 0;
  }
  rep.fraction = static_cast<double>(hits) / static_cast<double>(cloud.points.size());
  return rep;
}

RegularityReport regularity_report(const PointCloud& cloud, const std::vector<GreenLimits>& green,
                                   const RegularityOptions& opts) {
  check_sizes(cloud, green);
  RegularityReport rep;
  const std::size_t n = cloud.points.size();
  if (n == 0) throw ConfigError("regularity_report: empty cloud");
  int regular = 0, contained = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ConeEstimate cone = cone_estimate(cloud, cloud.points[i], opts.ladder);
    rep.widths.push_back(cone.angular_width);
    if (cone.angular_width < opts.width_threshold) ++regular;
    if (cone_vs_green(cone, green[i], opts.containment_delta * std::abs(green[i].gap)).contained) ++contained;
    rep.cones.push_back(std::move(cone));
  }
  rep.regular_fraction = static_cast<double>(regular) / static_cast<double>(n);
  rep.containment_fraction = static_cast<double>(contained) / static_cast<double>(n);
  rep.hyperbolic = hyperbolic_cone_check(cloud, green, opts.two_direction_delta, opts.ladder);

  std::vector<double> w = rep.widths;
  std::sort(w.begin(), w.end());
  rep.max_width = w.back();
  rep.median_width = w.size() % 2 ? w[w.size() / 2] : 0.5 * (w[w.size() / 2 - 1] + w[w.size() / 2]);
  return rep;
}

namespace {
constexpr double kMinSecant = 1e-8;
}  // namespace

PushForwardReport pushforward_check(const TwistMap& map, const PointCloud& cloud, int i, double scale) {
  const Point x = cloud.points.at(static_cast<std::size_t>(i));
  const Jacobian J = map.jacobian(x);
  const SecantSample s = secant_slopes(cloud, x, 0.0, scale);

  PushForwardReport rep;
  const TwistMapSpec spec = map.spec();
  // |Df(y) - Df(x)| <= 2 pi K |y - x| entrywise in the first column; the angle
  // error is at most (pi/2) |error| / |Df(x) delta|.
  rep.bound_constant = std::numbers::pi / 2.0 * std::sqrt(2.0) * 2.0 * std::numbers::pi * spec.K * J.operator_norm();
  for (std::size_t k = 0; k < s.pairs.size(); ++k) {
    const auto [a, b] = s.pairs[k];
    const Point pa = cloud.points[a], pb = cloud.points[b];
    const Vec2 d = cloud_difference(pa, pb);
    // Below this length the image secant is dominated by rounding in apply().
    if (d.norm() < kMinSecant) continue;
    const Vec2 predicted = J * d;
    const Vec2 actual = cloud_difference(map.apply(pa), map.apply(pb));
    const double err = angular_distance(ProjLine::from_vector(predicted), ProjLine::from_vector(actual));
    const double reach = std::max(annulus_distance(pa, x), annulus_distance(pb, x));
    if (reach > 0.0) rep.fitted_constant = std::max(rep.fitted_constant, err / reach);
    ++rep.secants;
  }
  return rep;
}

}  // namespace twistlab
