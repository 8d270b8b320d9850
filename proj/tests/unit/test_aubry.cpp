#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "twistlab/aubry.hpp"
#include "twistlab/error.hpp"

using namespace twistlab;
using fixtures::kTwoPi;

namespace {

// Direct summation of the standard-map generating function.
double action_oracle(double K, const Configuration& c) {
  double w = 0.0;
  for (long i = 0; i < c.rho.q; ++i) {
    const double t = c.theta(i), tn = c.theta(i + 1);
    w += 0.5 * (tn - t) * (tn - t) - K / (kTwoPi * kTwoPi) * std::cos(kTwoPi * t);
  }
  return w;
}

Eigen::MatrixXd dense(const CyclicTridiagonal& T) {
  const int q = T.size();
  Eigen::MatrixXd M(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) M(i, j) = T.entry(i, j);
  return M;
}

std::vector<Rational> list(std::initializer_list<std::pair<long, long>> xs) {
  std::vector<Rational> out;
  for (auto [p, q] : xs) out.push_back({p, q});
  return out;
}

}  // namespace

TEST_CASE("convergents: golden, silver and a rational input") {
  const ConvergentList g = convergents(named_irrational("golden"), 8);
  CHECK_FALSE(g.rational);
  CHECK(g.convergents == list({{1, 2}, {2, 3}, {3, 5}, {5, 8}, {8, 13}, {13, 21}, {21, 34}, {34, 55}}));

  const ConvergentList s = convergents(std::sqrt(2.0) - 1.0, 5);
  CHECK(s.convergents == list({{1, 2}, {2, 5}, {5, 12}, {12, 29}, {29, 70}}));

  const ConvergentList third = convergents(1.0 / 3.0, 8);
  CHECK(third.rational);
  CHECK(third.convergents.back() == Rational{1, 3});
  CHECK_THROWS_AS(RotationNumber::from_irrational(1.0 / 3.0, 8), ConfigError);
  CHECK_THROWS_AS(RotationNumber::from_rational({2, 4}), ConfigError);
  CHECK_THROWS_AS(named_irrational("bronze"), ConfigError);
}

TEST_CASE("action: closed forms and direct summation") {
  const auto m0 = make_map({"standard", 0.0});
  CHECK(action(*m0, {{1, 2}, {0.0, 0.5}}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(action(*m0, {{0, 1}, {0.123}}) == 0.0);

  const auto m1 = make_map({"standard", 1.0});
  const Configuration c{{1, 2}, {0.0, 0.5}};
  CHECK(std::abs(action(*m1, c) - action_oracle(1.0, c)) < 1e-12);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  const auto m = make_map({"standard", 1.7});
  Configuration r{{5, 8}, {}};
  for (int i = 0; i < 8; ++i) r.thetas.push_back(5.0 * i / 8.0 + jitter(rng));
  CHECK(std::abs(action(*m, r) - action_oracle(1.7, r)) < 1e-12);
}

TEST_CASE("action gradient: zero at K=0 equispaced, finite differences elsewhere") {
  const auto m0 = make_map({"standard", 0.0});
  Configuration eq{{3, 7}, {}};
  for (int i = 0; i < 7; ++i) eq.thetas.push_back(3.0 * i / 7.0 + 0.2);
  for (double g : action_gradient(*m0, eq)) CHECK(std::abs(g) < 1e-15);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  const auto m = make_map({"standard", 1.1});
  for (int trial = 0; trial < 5; ++trial) {
    Configuration c{{3, 7}, {}};
    for (int i = 0; i < 7; ++i) c.thetas.push_back(3.0 * i / 7.0 + jitter(rng));
    const std::vector<double> g = action_gradient(*m, c);
    for (int i = 0; i < 7; ++i) {
      Configuration p = c, n = c;
      p.thetas[i] += 1e-6;
      n.thetas[i] -= 1e-6;
      CHECK(std::abs(g[i] - (action(*m, p) - action(*m, n)) / 2e-6) < 1e-7);
    }
  }
}

TEST_CASE("hessian: cyclic tridiagonal against a dense eigen-solver") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int q : {1, 2, 3, 5, 13}) {
    CyclicTridiagonal T;
    for (int i = 0; i < q; ++i) {
      T.diag.push_back(2.0 + u(rng));
      T.off.push_back(u(rng));
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense(T)).eigenvalues();
    CHECK(std::abs(T.min_eigenvalue() - ev(0)) < 1e-10);
    for (double sigma : {-1.0, 0.5, 2.0, 3.5}) {
      int below = 0;
      for (int i = 0; i < q; ++i) below += ev(i) < sigma ? 1 : 0;
      CHECK(T.count_below(sigma) == below);
    }
  }

  const auto m = make_map({"standard", 1.4});
  Configuration c{{2, 5}, {0.0, 0.43, 0.79, 1.22, 1.61}};
  const CyclicTridiagonal H = action_hessian(*m, c);
  const std::vector<double> g0 = action_gradient(*m, c);
  for (int j = 0; j < 5; ++j) {
    Configuration p = c;
    p.thetas[j] += 1e-6;
    const std::vector<double> g1 = action_gradient(*m, p);
    for (int i = 0; i < 5; ++i) CHECK(std::abs((g1[i] - g0[i]) / 1e-6 - H.entry(i, j)) < 1e-5);
  }
}

TEST_CASE("minimize_orbit: integrable case is exact and needs no Newton step") {
  const auto m0 = make_map({"standard", 0.0});
  for (Rational pq : {Rational{1, 2}, Rational{2, 5}, Rational{5, 8}, Rational{13, 21}}) {
    const MinimizationResult res = minimize_orbit(*m0, pq);
    CHECK(res.newton_steps == 0);
    for (long i = 0; i < pq.q; ++i) {
      CHECK(std::abs(res.config.thetas[i] - res.config.thetas[0] - pq.value() * i) < 1e-12);
    }
  }
}

TEST_CASE("minimize_orbit: K=0.5 1/2 is the same orbit from both strategies") {
  const auto m = make_map({"standard", 0.5});
  MinimizeOptions a, b;
  b.init = InitStrategy::continuation;
  const MinimizationResult ra = minimize_orbit(*m, {1, 2}, a);
  const MinimizationResult rb = minimize_orbit(*m, {1, 2}, b);
  CHECK(ra.grad_norm <= 1e-11);
  CHECK(rb.grad_norm <= 1e-11);
  CHECK(check_ordered(ra.config).ok);
  CHECK(std::abs(ra.action - rb.action) < 1e-12);
  // Same point set on the circle; the labelling may differ by a shift.
  for (double t : ra.config.thetas) {
    double best = 1.0;
    for (double u : rb.config.thetas) best = std::min(best, std::abs(centered(t - u)));
    CHECK(best < 1e-9);
  }
}

TEST_CASE("minimize_orbit: K=2 34/55 descends, converges and is ordered with PSD Hessian") {
  const auto m = make_map({"standard", 2.0});
  const MinimizationResult res = minimize_orbit(*m, {34, 55});
  CHECK(res.grad_norm <= 1e-11);
  CHECK(res.action < res.initial_action);
  CHECK(check_ordered(res.config).ok);
  CHECK(res.min_hessian_eigenvalue >= -1e-8);
  CHECK(res.min_hessian_eigenvalue == doctest::Approx(action_hessian(*m, res.config).min_eigenvalue()));
}

TEST_CASE("minimize_orbit: fixed points and exhausted budgets") {
  const auto m = make_map({"standard", 1.0});
  const MinimizationResult fp = minimize_orbit(*m, {0, 1});
  CHECK(std::abs(centered(fp.config.thetas[0])) < 1e-12);

  MinimizeOptions tiny;
  tiny.tol_grad = 1e-300;
  tiny.max_iters = 2;
  CHECK_THROWS_AS(minimize_orbit(*make_map({"standard", 2.0}), {21, 34}, tiny), NonConvergence);
  try {
    minimize_orbit(*make_map({"standard", 2.0}), {21, 34}, tiny);
  } catch (const NonConvergence& e) {
    CHECK(e.best_thetas().size() == 34);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("canonicalize: theta_0 is the point closest to 0") {
  const Configuration c{{2, 5}, {0.3, 0.7, 1.1, 1.5, 1.98}};
  const Configuration k = canonicalize(c);
  CHECK(k.thetas[0] == doctest::Approx(-0.02));
  CHECK(k.theta(5) == doctest::Approx(k.thetas[0] + 2.0));
}

TEST_CASE("orbit_points: momenta, invariance and Lipschitz data") {
  const OrderedOrbit half = fixtures::rational(0.0, 1, 2);
  for (double r : half.rs) CHECK(std::abs(r - 0.5) < 1e-15);
  CHECK(half.lipschitz_bound < 1e-15);

  const auto m = make_map({"standard", 1.2});
  const OrderedOrbit o = fixtures::rational(1.2, 13, 21);
  double worst = 0.0;
  for (int i = 0; i < o.size(); ++i) {
    worst = std::max(worst, annulus_distance(m->apply(o.point(i)), o.point((i + 1) % o.size())));
  }
  CHECK(worst < 1e-9);
  CHECK(o.closure_residual < 1e-9);

  double lip = 0.0;
  for (int i = 0; i < o.size(); ++i)
    for (int j = 0; j < o.size(); ++j) {
      if (i == j) continue;
      const Vec2 d{centered(o.point(j).theta - o.point(i).theta), o.rs[j] - o.rs[i]};
      lip = std::max(lip, std::abs(d.y / d.x));
    }
  CHECK(o.lipschitz_bound == doctest::Approx(lip).epsilon(1e-12));
}

TEST_CASE("check_ordered: accepted orbits pass, a swapped pair is caught") {
  CHECK(check_ordered(fixtures::rational(1.2, 13, 21)).ok);
  CHECK(check_ordered(fixtures::golden(2.0, 8)).ok);

  OrderedOrbit o = fixtures::rational(1.2, 13, 21);
  std::swap(o.thetas[3], o.thetas[4]);
  const OrderCertificate cert = check_ordered(o);
  CHECK_FALSE(cert.ok);
  REQUIRE(cert.witness.has_value());
  const auto [i, j] = *cert.witness;
  CHECK(((i == 3 || i == 4) || (j == 3 || j == 4)));
}

TEST_CASE("rotation numbers") {
  const auto m0 = make_map({"standard", 0.0});
  for (long n : {1L, 10L, 1000L}) CHECK(std::abs(rotation_number_estimate(*m0, {0.1, 0.3}, n) - 0.3) < 1e-12);

  const OrderedOrbit o = fixtures::rational(1.2, 13, 21);
  CHECK(std::abs(rotation_number_estimate(o.track(), 21 * 50) - 13.0 / 21.0) < 1e-12);
  const auto m = make_map({"standard", 1.2});
  // The orbit is hyperbolic, so iterating the map only tracks it for a few periods.
  CHECK(std::abs(rotation_number_estimate(*m, o.point(0), 42) - 13.0 / 21.0) < 1e-9);

  const auto m9 = make_map({"standard", 0.9});
  const double a = rotation_number_estimate(*m9, {0.21, 0.52}, 100000);
  const double b = rotation_number_estimate(*m9, {0.21, 0.52}, 200000);
  CHECK(std::abs(a - b) < 1e-3);
}

TEST_CASE("am_set_approx: integrable line, successive approximation, Cantor gaps") {
  const OrderedOrbit line = fixtures::golden(0.0, 8);
  CHECK(line.size() == 55);
  for (double r : line.rs) CHECK(std::abs(r - 34.0 / 55.0) < 1e-12);

  const auto m5 = make_map({"standard", 0.5});
  const AmSetApprox am = am_set_approx(*m5, named_irrational("golden"), 8);
  REQUIRE(am.hausdorff_by_depth.size() >= 3);
  const auto& h = am.hausdorff_by_depth;
  CHECK(h.back() < h[h.size() - 2]);
  CHECK(h.back() < h.front());
  REQUIRE(am.orbit.hausdorff_proxy.has_value());
  CHECK(*am.orbit.hausdorff_proxy == h.back());

  const double gap6 = max_theta_gap(fixtures::golden(2.0, 6).points());
  const double gap8 = max_theta_gap(fixtures::golden(2.0, 8).points());
  const double gap_line = max_theta_gap(line.points());
  CHECK(gap8 > 0.9 * gap6);
  CHECK(gap8 > 5.0 * gap_line);

  CHECK_THROWS_AS(am_set_approx(*m5, named_irrational("golden"), 2), ConfigError);
}

TEST_CASE("Mather measure weights are uniform and shift invariant") {
  const OrderedOrbit o = fixtures::rational(0.8, 8, 13);
  const MatherMeasureApprox mu = mather_measure(o);
  CHECK(mu.weights.size() == 13);
  CHECK(std::abs(mu.total() - 1.0) < 1e-15);
  CHECK(mu.permutation_residual() == 0.0);
}
