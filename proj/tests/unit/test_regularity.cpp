#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "twistlab/error.hpp"
#include "twistlab/regularity.hpp"

using namespace twistlab;

namespace {

PointCloud line_cloud(double slope, int n = 200) {
  PointCloud c;
  for (int i = 0; i < n; ++i) {
    const double t = 0.3 + 0.4 * i / (n - 1);
    c.points.push_back({t, 0.2 + slope * (t - 0.5)});
  }
  return c;
}

// Points of the graph r = |theta - 1/2| around the corner.
PointCloud corner_cloud() {
  PointCloud c;
  for (int i = -100; i <= 100; ++i) {
    const double t = 0.5 + 0.001 * i;
    c.points.push_back({t, std::abs(t - 0.5)});
  }
  return c;
}

// Lattice spanned by steps along slopes a and b through (1/2, 0).
PointCloud lattice_cloud(double a, double b) {
  PointCloud c;
  const double h = 0.01;
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j) c.points.push_back({0.5 + h * (i + j), h * (a * i + b * j)});
  return c;
}

GreenLimits fake_limits(double s_minus, double s_plus) {
  GreenLimits g;
  g.s_minus = s_minus;
  g.s_plus = s_plus;
  g.gap = s_plus - s_minus;
  g.converged = true;
  return g;
}

}  // namespace

TEST_CASE("secant slopes: collinear, corner and hyperbolic clouds") {
  const SecantSample line = secant_slopes(line_cloud(0.0), {0.5, 0.2}, 0.0, 0.05);
  CHECK(line.slopes.size() > 100);
  for (double s : line.slopes) CHECK(std::abs(s) < 1e-12);

  const SecantSample corner = secant_slopes(corner_cloud(), {0.5, 0.0}, 0.0, 0.05);
  const auto [mn, mx] = std::minmax_element(corner.slopes.begin(), corner.slopes.end());
  CHECK(*mn == doctest::Approx(-1.0));
  CHECK(*mx == doctest::Approx(1.0));
  int interior = 0;
  for (double s : corner.slopes) interior += std::abs(s) < 0.5 ? 1 : 0;
  CHECK(interior > 0);

  const auto m = make_map({"standard", 2.0});
  const OrderedOrbit o = fixtures::golden(2.0, 8);
  const auto green = green_table(*m, o, {64, 1e-11});
  const PointCloud cloud = cloud_from_orbit(o);
  const SecantSample s = secant_slopes(cloud, cloud.points[0], 0.0, 0.1);
  const auto [lo, hi] = std::minmax_element(s.slopes.begin(), s.slopes.end());
  CHECK(*lo <= green[0].s_minus + 0.1 * green[0].gap);
  CHECK(*hi >= green[0].s_plus - 0.1 * green[0].gap);

  const SecantSample annulus = secant_slopes(line_cloud(0.0), {0.5, 0.2}, 0.05, 0.1);
  CHECK_FALSE(annulus.empty());
  CHECK(annulus.slopes.size() < secant_slopes(line_cloud(0.0), {0.5, 0.2}, 0.0, 0.1).slopes.size());
  CHECK_THROWS_AS(secant_slopes(line_cloud(0.0), {0.5, 0.2}, 0.2, 0.1), ConfigError);
}

TEST_CASE("cone_estimate: widths of fixtures") {
  const std::vector<double> ladder = geometric_ladder(0.1, 6);
  CHECK(ladder.back() == doctest::Approx(0.1 / 32));

  const ConeEstimate line = cone_estimate(line_cloud(0.7), {0.5, 0.2}, ladder);
  CHECK(line.angular_width < 1e-12);
  CHECK(line.lo == doctest::Approx(0.7));

  const ConeEstimate corner = cone_estimate(corner_cloud(), {0.5, 0.0}, ladder);
  CHECK(corner.angular_width == doctest::Approx(std::numbers::pi / 2));

  // Scale intervals are nested: a smaller ball sees a subset of the secants.
  for (std::size_t k = 1; k < corner.scales.size(); ++k) {
    if (corner.scales[k].count == 0) continue;
    CHECK(corner.scales[k].lo >= corner.scales[k - 1].lo);
    CHECK(corner.scales[k].hi <= corner.scales[k - 1].hi);
    CHECK(corner.scales[k].count <= corner.scales[k - 1].count);
  }

  CHECK_THROWS_AS(cone_estimate(line_cloud(0.0), {0.5, 0.2}, {0.1, 0.05}), ConfigError);
  CHECK_THROWS_AS(cone_estimate(line_cloud(0.0), {0.5, 0.2}, {0.1, 0.2, 0.05}), ConfigError);
}

TEST_CASE("cone_estimate: sparse clouds ask for a deeper convergent") {
  const OrderedOrbit o = fixtures::golden(1.2, 3);
  const PointCloud cloud = cloud_from_orbit(o);
  try {
    cone_estimate(cloud, cloud.points[0], geometric_ladder());
    FAIL("expected SparseCloud");
  } catch (const SparseCloud& e) {
    CHECK(std::string(e.what()).find("deepen") != std::string::npos);
  }
}

TEST_CASE("regular regime: cones are thin at K=0.3 on a deep approximant") {
  const auto m = make_map({"standard", 0.3});
  const OrderedOrbit o = fixtures::golden(0.3, 11);
  const RegularityReport rep = regularity_report(cloud_from_orbit(o), green_table(*m, o));
  CHECK(rep.regular_fraction == 1.0);
  CHECK(rep.containment_fraction == 1.0);
  CHECK(rep.max_width < 0.02);
  CHECK(rep.median_width <= rep.max_width);
  CHECK_FALSE(rep.hyperbolic.applicable);
}

TEST_CASE("cone_vs_green") {
  const auto m0 = make_map({"standard", 0.0});
  const OrderedOrbit o0 = fixtures::golden(0.0, 8);
  const PointCloud c0 = cloud_from_orbit(o0);
  const auto g0 = green_table(*m0, o0);
  for (int i = 0; i < o0.size(); i += 7) {
    CHECK(cone_vs_green(cone_estimate(c0, c0.points[i], geometric_ladder()), g0[i], 0.0).contained);
  }

  const auto m2 = make_map({"standard", 2.0});
  const OrderedOrbit o2 = fixtures::golden(2.0, 8);
  RegularityOptions opts;
  const RegularityReport r2 = regularity_report(cloud_from_orbit(o2), green_table(*m2, o2, {64, 1e-11}), opts);
  CHECK(r2.containment_fraction >= 0.95);

  PointCloud outlier = line_cloud(0.0);
  outlier.points.push_back({0.501, 0.2015});
  const int bad = static_cast<int>(outlier.points.size()) - 1;
  const ConeEstimate cone = cone_estimate(outlier, {0.5, 0.2}, geometric_ladder());
  const ContainmentVerdict v = cone_vs_green(cone, fake_limits(-0.1, 0.1), 0.0);
  CHECK_FALSE(v.contained);
  REQUIRE(v.witness.has_value());
  CHECK((v.witness->first == bad || v.witness->second == bad));
  CHECK(v.excess > 0.0);
  REQUIRE(v.witness_slope.has_value());
  CHECK(std::abs(*v.witness_slope) > 0.1);
}

TEST_CASE("hyperbolic_cone_check") {
  const auto m2 = make_map({"standard", 2.0});
  const OrderedOrbit o2 = fixtures::golden(2.0, 8);
  const HyperbolicConeReport h =
      hyperbolic_cone_check(cloud_from_orbit(o2), green_table(*m2, o2, {64, 1e-11}), 0.1, geometric_ladder());
  CHECK(h.applicable);
  CHECK(h.fraction >= 0.9);

  const auto m0 = make_map({"standard", 0.0});
  const OrderedOrbit o0 = fixtures::golden(0.0, 8);
  const HyperbolicConeReport na = hyperbolic_cone_check(cloud_from_orbit(o0), green_table(*m0, o0), 0.1,
                                                        geometric_ladder());
  CHECK_FALSE(na.applicable);

  const PointCloud lat = lattice_cloud(-1.0, 1.0);
  const std::vector<GreenLimits> g(lat.points.size(), fake_limits(-1.0, 1.0));
  const HyperbolicConeReport two = hyperbolic_cone_check(lat, g, 0.05, geometric_ladder());
  CHECK(two.applicable);
  CHECK(two.fraction == 1.0);

  CHECK_THROWS_AS(hyperbolic_cone_check(lat, {}, 0.1, geometric_ladder()), ConfigError);
}

TEST_CASE("unitary cones") {
  const ConeEstimate corner = cone_estimate(corner_cloud(), {0.5, 0.0}, geometric_ladder());
  const UnitaryCone u = unitary_cone(corner);
  CHECK(u.arc.measure() == doctest::Approx(std::numbers::pi / 2));
  CHECK(u.antipode.measure() == doctest::Approx(u.arc.measure()));
  CHECK(u.arc.from == doctest::Approx(-std::numbers::pi / 4));
  const auto e = u.endpoints();
  REQUIRE(e.size() == 4);
  for (int i = 0; i < 2; ++i) {
    CHECK(e[i].x == doctest::Approx(-e[i + 2].x));
    CHECK(e[i].y == doctest::Approx(-e[i + 2].y));
    CHECK(e[i].norm() == doctest::Approx(1.0));
  }

  const UnitaryCone flat = unitary_cone(cone_estimate(line_cloud(0.0), {0.5, 0.2}, geometric_ladder()));
  CHECK(flat.arc.measure() == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("cone widths do not depend on the order of the cloud") {
  const OrderedOrbit o = fixtures::golden(1.2, 8);
  PointCloud a = cloud_from_orbit(o);
  PointCloud b = a;
  std::mt19937_64 rng(3);
  std::shuffle(b.points.begin(), b.points.end(), rng);
  for (int i = 0; i < o.size(); i += 5) {
    const ConeEstimate ca = cone_estimate(a, o.point(i), geometric_ladder());
    const ConeEstimate cb = cone_estimate(b, o.point(i), geometric_ladder());
    CHECK(ca.lo == cb.lo);
    CHECK(ca.hi == cb.hi);
    CHECK(ca.angular_width == cb.angular_width);
  }
}

TEST_CASE("push-forward of secants by the derivative") {
  for (double K : {0.5, 1.2, 2.0}) {
    const auto m = make_map({"standard", K});
    const OrderedOrbit o = fixtures::golden(K, 8);
    const PointCloud c = cloud_from_orbit(o);
    for (int i = 0; i < o.size(); i += 11) {
      const PushForwardReport rep = pushforward_check(*m, c, i, 0.05);
      CHECK(rep.secants > 0);
      CHECK(rep.fitted_constant <= rep.bound_constant);
    }
  }
}

TEST_CASE("maximal width grows with K in the regular regime") {
  double prev = 0.0;
  for (double K : {0.1, 0.2, 0.3}) {
    const auto m = make_map({"standard", K});
    const OrderedOrbit o = fixtures::golden(K, 11);
    const RegularityReport r = regularity_report(cloud_from_orbit(o), green_table(*m, o));
    CHECK(r.max_width >= prev);
    prev = r.max_width;
  }
}
