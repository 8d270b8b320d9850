#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twistlab/aubry.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

std::vector<Point> OrderedOrbit::points() const {
  std::vector<Point> out(thetas.size());
  for (int i = 0; i < size(); ++i) out[i] = point(i);
  return out;
}

OrderedOrbit orbit_points(const TwistMap& map, const Configuration& c, double grad_norm) {
  const long q = c.rho.q;
  if (static_cast<long>(c.thetas.size()) != q) throw ConfigError("orbit_points: malformed configuration");

  OrderedOrbit o;
  o.map = map.spec();
  o.rho = RotationNumber::from_rational(c.rho);
  o.approximant = c.rho;
  o.thetas = c.thetas;
  o.rs.resize(q);
  o.grad_norm = grad_norm;
  for (long i = 0; i < q; ++i) o.rs[i] = map.momentum(c.theta(i), c.theta(i + 1));

  for (long i = 0; i < q; ++i) {
    const LiftedPoint img = map.apply_lift({c.theta(i), o.rs[i]});
    const double err = std::hypot(img.theta - c.theta(i + 1), img.r - o.rs[(i + 1) % q]);
    o.closure_residual = std::max(o.closure_residual, err);
  }
  if (!(o.closure_residual <= 1e-9)) {
    throw ComputationError("orbit does not close: residual " + std::to_string(o.closure_residual));
  }

  std::vector<double> angles(q);
  for (long i = 0; i < q; ++i) angles[i] = wrap_angle(o.thetas[i]);
  std::sort(angles.begin(), angles.end());
  for (long i = 0; i + 1 < q; ++i) {
    if (angles[i + 1] - angles[i] <= 1e-14) {
      throw ComputationError("orbit points collapse in angle (graph property lost at q = " +
                             std::to_string(q) + ")");
    }
  }

  double lip = 0.0;
  for (long i = 0; i < q; ++i) {
    for (long j = i + 1; j < q; ++j) {
      const double dt = std::abs(centered(o.thetas[j] - o.thetas[i]));
      lip = std::max(lip, std::abs(o.rs[j] - o.rs[i]) / dt);
    }
  }
  o.lipschitz_bound = lip;
  return o;
}

namespace {

template <class ThetaAt>
OrderCertificate ordered_impl(long q, ThetaAt theta) {
  OrderCertificate cert;
  for (long i = 0; i < q; ++i) {
    const double ti = theta(i);
    const double ti1 = theta(i + 1);
    for (long j = 0; j < q; ++j) {
      if (j == i) continue;
      const double tj = theta(j);
      const double tj1 = theta(j + 1);
      const double m0 = std::floor(ti - tj);
      for (double m : {m0 - 1.0, m0, m0 + 1.0, m0 + 2.0}) {
        ++cert.pairs_checked;
        const double before = tj + m - ti;
        const double after = tj1 + m - ti1;
        if (before == 0.0 || after == 0.0 || (before > 0.0) != (after > 0.0)) {
          cert.ok = false;
          cert.witness = std::make_pair(static_cast<int>(std::min(i, j)), static_cast<int>(std::max(i, j)));
          return cert;
        }
      }
    }
  }
  return cert;
}

}  // namespace

OrderCertificate check_ordered(const Configuration& c) {
  return ordered_impl(c.rho.q, [&c](long i) { return c.theta(i); });
}

OrderCertificate check_ordered(const OrderedOrbit& orbit) {
  if (orbit.size() < 2) throw ConfigError("check_ordered: need at least 2 points");
  Configuration c{orbit.approximant, orbit.thetas};
  return check_ordered(c);
}

double rotation_number_estimate(const TwistMap& map, Point p, long n) {
  if (n < 1) throw ConfigError("rotation_number_estimate: n must be >= 1");
  LiftedPoint z = lift(p);
  for (long k = 0; k < n; ++k) z = map.apply_lift(z);
  return (z.theta - p.theta) / static_cast<double>(n);
}

double rotation_number_estimate(const Track& track, long n) {
  if (n < 1) throw ConfigError("rotation_number_estimate: n must be >= 1");
  return (track.at(n).theta - track.at(0).theta) / static_cast<double>(n);
}

MatherMeasureApprox mather_measure(const OrderedOrbit& orbit) {
  MatherMeasureApprox m;
  m.weights.assign(orbit.size(), 1.0 / static_cast<double>(orbit.size()));
  return m;
}

double MatherMeasureApprox::permutation_residual() const {
  double r = 0.0;
  const std::size_t q = weights.size();
  for (std::size_t i = 0; i < q; ++i) r = std::max(r, std::abs(weights[i] - weights[(i + 1) % q]));
  return r;
}

double MatherMeasureApprox::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    double worst = 0.0;
    for (const Point& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point& y : to) best = std::min(best, annulus_distance(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double max_theta_gap(const std::vector<Point>& pts) {
  if (pts.empty()) return 1.0;
  std::vector<double> a;
  a.reserve(pts.size());
  for (const Point& p : pts) a.push_back(p.theta);
  std::sort(a.begin(), a.end());
  double gap = a.front() + 1.0 - a.back();
  for (std::size_t i = 0; i + 1 < a.size(); ++i) gap = std::max(gap, a[i + 1] - a[i]);
  return gap;
}

AmSetApprox am_set_approx(const TwistMap& map, double value, int depth, const MinimizeOptions& opts,
                          const std::string& name) {
  if (depth < 3) throw ConfigError("am_set_approx: depth must be >= 3");
  const RotationNumber rn = RotationNumber::from_irrational(value, depth, name);

  AmSetApprox out;
  out.convergents = rn.convergents;
  std::vector<Point> previous;
  for (const Rational& pq : rn.convergents) {
    OrderedOrbit orbit;
    try {
      const MinimizationResult m = minimize_orbit(map, pq, opts);
      orbit = orbit_points(map, m.config, m.grad_norm);
    } catch (const ComputationError& e) {
      throw ComputationError("convergent " + std::to_string(pq.p) + "/" + std::to_string(pq.q) +
                             " failed: " + e.what());
    }
    std::vector<Point> pts = orbit.points();
    if (!previous.empty()) out.hausdorff_by_depth.push_back(hausdorff_distance(previous, pts));
    previous = std::move(pts);
    out.orbit = std::move(orbit);
  }
  out.orbit.rho = rn;
  if (!out.hausdorff_by_depth.empty()) out.orbit.hausdorff_proxy = out.hausdorff_by_depth.back();
  return out;
}

}  // namespace twistlab
