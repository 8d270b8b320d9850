#include "twistlab/lab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "twistlab/cocycle.hpp"
#include "twistlab/conjugacy.hpp"
#include "twistlab/error.hpp"
#include "twistlab/green.hpp"
#include "twistlab/lab/config.hpp"
#include "twistlab/lab/scan.hpp"
#include "twistlab/regularity.hpp"

namespace twistlab::lab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Standard map with r' = (1 + eps) r + kick: det Df = 1 + eps.
class DetBreakingMap final : public TwistMap {
 public:
  DetBreakingMap(double K, double eps) : base_(K), eps_(eps) {}
  std::string family() const override { return "fault:det-breaking"; }
  TwistMapSpec spec() const override { return {family(), base_.K()}; }
  LiftedPoint apply_lift(LiftedPoint p) const override {
    const double r1 = (1.0 + eps_) * p.r + base_.kick(p.theta);
    return {p.theta + r1, r1};
  }
  LiftedPoint inverse_lift(LiftedPoint p) const override {
    const double theta = p.theta - p.r;
    return {theta, (p.r - base_.kick(theta)) / (1.0 + eps_)};
  }
  Jacobian jacobian(LiftedPoint p) const override {
    const double kp = base_.kick_prime(p.theta);
    return {1.0 + kp, 1.0 + eps_, kp, 1.0 + eps_};
  }
  using TwistMap::jacobian;
  GeneratingEval generating(double theta, double theta_next) const override {
    return base_.generating(theta, theta_next);
  }

 private:
  StandardMap base_;
  double eps_;
};

// theta' = theta - r', r' = r + kick: symplectic but with negative twist.
class TwistBreakingMap final : public TwistMap {
 public:
  explicit TwistBreakingMap(double K) : base_(K) {}
  std::string family() const override { return "fault:twist-breaking"; }
  TwistMapSpec spec() const override { return {family(), base_.K()}; }
  LiftedPoint apply_lift(LiftedPoint p) const override {
    const double r1 = p.r + base_.kick(p.theta);
    return {p.theta - r1, r1};
  }
  LiftedPoint inverse_lift(LiftedPoint p) const override {
    const double theta = p.theta + p.r;
    return {theta, p.r - base_.kick(theta)};
  }
  Jacobian jacobian(LiftedPoint p) const override {
    const double kp = base_.kick_prime(p.theta);
    return {1.0 - kp, -1.0, kp, 1.0};
  }
  using TwistMap::jacobian;
  GeneratingEval generating(double theta, double theta_next) const override {
    const double dt = theta_next - theta;
    const double K = base_.K();
    GeneratingEval g;
    g.h = -0.5 * dt * dt - K / (kTwoPi * kTwoPi) * std::cos(kTwoPi * theta);
    g.d1h = dt + base_.kick(theta);
    g.d2h = -dt;
    g.d11h = -1.0 + base_.kick_prime(theta);
    g.d12h = 1.0;
    g.d22h = -1.0;
    return g;
  }

 private:
  StandardMap base_;
};

std::string num(double x) { return format_double(x); }

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Suite {
 public:
  explicit Suite(VerifyReport& rep) : rep_(rep) {}

  void run(const std::string& name, const std::function<Outcome()>& fn) {
    VerifyCheck c;
    c.name = name;
    try {
      const Outcome o = fn();
      c.passed = o.passed;
      c.detail = o.detail;
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("exception: ") + e.what();
    }
    rep_.checks.push_back(std::move(c));
  }

 private:
  VerifyReport& rep_;
};

OrderedOrbit golden_orbit(const TwistMap& map, int depth) {
  return am_set_approx(map, named_irrational("golden"), depth, {}, "golden").orbit;
}

OrderedOrbit rational_orbit(const TwistMap& map, Rational pq) {
  const MinimizationResult res = minimize_orbit(map, pq);
  return orbit_points(map, res.config, res.grad_norm);
}

void twistmap_suite(Suite& s, const TwistMap& map) {
  const MapInvariantReport inv = check_map_invariants(map, 256);
  s.run("twistmap.det", [&] {
    return Outcome{inv.max_det_residual <= 1e-12, "max |det Df - 1| = " + num(inv.max_det_residual)};
  });
  s.run("twistmap.roundtrip", [&] {
    return Outcome{inv.max_roundtrip_error <= 1e-11, "max roundtrip error = " + num(inv.max_roundtrip_error)};
  });
  s.run("twistmap.generating", [&] {
    return Outcome{inv.max_generating_residual <= 1e-10,
                   "max generating residual = " + num(inv.max_generating_residual)};
  });
  s.run("twistmap.lift_equivariance", [&] {
    return Outcome{inv.max_lift_equivariance <= 1e-12, "max defect = " + num(inv.max_lift_equivariance)};
  });
  s.run("twistmap.jacobian", [&] {
    return Outcome{inv.max_jacobian_fd_error <= 1e-6, "max fd error = " + num(inv.max_jacobian_fd_error)};
  });
  s.run("twistmap.twist", [&] {
    const TwistReport tw = verify_twist(map, 256);
    return Outcome{tw.ok, "min forward twist " + num(tw.min_forward_twist) + ", min backward twist " +
                              num(tw.min_backward_twist)};
  });
}

void aubry_suite(Suite& s) {
  s.run("aubry.integrable", [] {
    const auto map = make_map({"standard", 0.0});
    const MinimizationResult res = minimize_orbit(*map, {3, 8});
    double err = 0.0;
    for (int i = 0; i < 8; ++i) err = std::max(err, std::abs(res.config.thetas[i] - res.config.thetas[0] - 3.0 * i / 8.0));
    return Outcome{err <= 1e-12, "max deviation from equispacing " + num(err)};
  });
  s.run("aubry.minimizer", [] {
    const auto map = make_map({"standard", 1.2});
    const MinimizeOptions opts;
    const MinimizationResult res = minimize_orbit(*map, {21, 34}, opts);
    const bool ordered = check_ordered(res.config).ok;
    const bool ok = res.grad_norm <= opts.tol_grad && res.action <= res.initial_action && ordered &&
                    res.min_hessian_eigenvalue >= -opts.psd_tol;
    return Outcome{ok, "grad " + num(res.grad_norm) + ", min eigenvalue " + num(res.min_hessian_eigenvalue) +
                           (ordered ? ", ordered" : ", NOT ordered")};
  });
  s.run("aubry.orbit_closure", [] {
    const auto map = make_map({"standard", 1.2});
    const OrderedOrbit o = rational_orbit(*map, {21, 34});
    double worst = 0.0;
    for (int i = 0; i < o.size(); ++i) {
      worst = std::max(worst, annulus_distance(map->apply(o.point(i)), o.point((i + 1) % o.size())));
    }
    return Outcome{worst <= 1e-9, "max |f(x_i) - x_{i+1}| = " + num(worst)};
  });
  s.run("aubry.rotation_number", [] {
    const auto map = make_map({"standard", 1.2});
    const OrderedOrbit o = rational_orbit(*map, {21, 34});
    const double est = rotation_number_estimate(o.track(), 100L * o.size());
    const double err = std::abs(est - 21.0 / 34.0);
    return Outcome{err <= 1e-12, "|rho_est - 21/34| = " + num(err)};
  });
  s.run("aubry.mather_measure", [] {
    const auto map = make_map({"standard", 0.8});
    const OrderedOrbit o = rational_orbit(*map, {8, 13});
    const MatherMeasureApprox mu = mather_measure(o);
    const double err = std::abs(mu.total() - 1.0) + mu.permutation_residual();
    return Outcome{err <= 1e-14, "mass and invariance defect " + num(err)};
  });
}

void green_suite(Suite& s, bool full) {
  s.run("green.integrable", [] {
    const auto map = make_map({"standard", 0.0});
    const Track t = Track::iterate(*map, {0.2, 0.3}, 40, 40);
    double err = 0.0;
    for (int n = 1; n <= 20; ++n) {
      err = std::max(err, std::abs(slope_forward(*map, t, 0, n) - 1.0 / n));
      err = std::max(err, std::abs(slope_backward(*map, t, 0, n) + 1.0 / n));
    }
    return Outcome{err <= 1e-12, "max |s_n - 1/n|, |s_-n + 1/n| = " + num(err)};
  });
  std::vector<double> Ks{1.5};
  if (full) Ks.insert(Ks.begin(), 0.5);
  for (double K : Ks) {
    s.run("green.interlacing.K" + num(K), [K] {
      const auto map = make_map({"standard", K});
      const OrderedOrbit o = golden_orbit(*map, 8);
      const Track t = o.track();
      double worst = 0.0;
      bool ok = true;
      for (int k = 0; k < o.size(); ++k) {
        const InterlacingReport r = check_interlacing(green_sequence(*map, t, k, 32));
        ok = ok && r.ok;
        worst = std::max(worst, r.max_violation);
      }
      return Outcome{ok && worst <= 1e-12, "max violation " + num(worst) + " over " + std::to_string(o.size()) + " points"};
    });
  }
  s.run("green.matrix_identities", [] {
    const auto map = make_map({"standard", 1.2});
    const OrderedOrbit o = golden_orbit(*map, 8);
    const Track t = o.track();
    GreenOptions go;
    go.n_max = 200;
    go.tol_cauchy = 1e-15;
    double worst = 0.0;
    for (int k = 0; k < o.size(); k += 11) {
      const double sp = green_limits(*map, t, k, go).s_plus;
      for (int n = 1; n <= 20; ++n) {
        const double spn = green_limits(*map, t, k + n, go).s_plus;
        worst = std::max(worst, matrix_identity_residuals(*map, t, k, n, sp, spn).max());
      }
    }
    return Outcome{worst <= 1e-9, "max relative residual " + num(worst)};
  });
}

void cocycle_suite(Suite& s, bool full) {
  s.run("cocycle.diag_exponent", [] {
    const LyapunovEstimate e = lyapunov_qr(CocycleSource::constant({2.0, 0.0, 0.0, 0.5}));
    const double err = std::abs(e.lambda - std::log(2.0));
    return Outcome{err <= 1e-9, "|lambda - ln 2| = " + num(err)};
  });
  s.run("cocycle.trace_criterion", [] {
    int wrong = 0;
    const std::vector<std::pair<Jacobian, QuasiHyp>> cases = {
        {{2.0, 0.0, 0.0, 0.5}, QuasiHyp::quasi_hyperbolic},
        {{2.0, 1.0, 1.0, 1.0}, QuasiHyp::quasi_hyperbolic},
        {{std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0)}, QuasiHyp::not_quasi_hyperbolic},
        {{0.0, -1.0, 1.0, 0.0}, QuasiHyp::not_quasi_hyperbolic},
    };
    for (const auto& [A, expected] : cases) {
      if (quasi_hyperbolicity_scan(CocycleSource::constant(A)).classification != expected) ++wrong;
    }
    return Outcome{wrong == 0, std::to_string(wrong) + " misclassified of " + std::to_string(cases.size())};
  });
  s.run("cocycle.positive_exponent", [] {
    const auto map = make_map({"standard", 2.0});
    const OrderedOrbit o = golden_orbit(*map, 8);
    LyapunovOptions lo;
    lo.n = 40L * o.size();
    const LyapunovEstimate e = lyapunov_qr(CocycleSource::from_map(map, o.track()), lo);
    return Outcome{e.lambda > 3.0 * e.ci_halfwidth && e.lambda > 0.0,
                   "lambda " + num(e.lambda) + " +- " + num(e.ci_halfwidth)};
  });
  if (!full) return;
  s.run("cocycle.green_oseledets", [] {
    const auto map = make_map({"standard", 2.0});
    const OrderedOrbit o = golden_orbit(*map, 8);
    const GreenOseledetsTable t = compare_green_oseledets(map, o, 60);
    return Outcome{t.conclusive && t.max_residual < 1e-3, "max angular residual " + num(t.max_residual)};
  });
}

void regularity_suite(Suite& s, bool full) {
  s.run("regularity.pushforward", [] {
    const auto map = make_map({"standard", 0.5});
    const PointCloud cloud = cloud_from_orbit(golden_orbit(*map, 8));
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < static_cast<int>(cloud.points.size()); i += 5) {
      const PushForwardReport r = pushforward_check(*map, cloud, i, 0.1);
      ok = ok && r.fitted_constant <= r.bound_constant;
      worst = std::max(worst, r.fitted_constant / r.bound_constant);
    }
    return Outcome{ok, "largest fitted/bound ratio " + num(worst)};
  });
  s.run("regularity.sparse_cloud", [] {
    const auto map = make_map({"standard", 0.5});
    const PointCloud cloud = cloud_from_orbit(golden_orbit(*map, 3));
    try {
      cone_estimate(cloud, cloud.points[0], geometric_ladder());
    } catch (const SparseCloud&) {
      return Outcome{true, "SparseCloud raised"};
    }
    return Outcome{false, "no SparseCloud on a depth-3 cloud"};
  });
  if (!full) return;
  s.run("regularity.monotonicity", [] {
    double prev = -1.0;
    bool ok = true;
    std::string detail = "max widths";
    for (double K : {0.1, 0.2, 0.3}) {
      const auto map = make_map({"standard", K});
      const OrderedOrbit o = golden_orbit(*map, 11);
      const RegularityReport r = regularity_report(cloud_from_orbit(o), green_table(*map, o));
      ok = ok && r.max_width >= prev;
      prev = r.max_width;
      detail += " " + num(r.max_width);
    }
    return Outcome{ok, detail};
  });
}

void conjugacy_suite(Suite& s) {
  s.run("conjugacy.rigid_rotation", [] {
    const auto map = make_map({"standard", 0.0});
    const CircleMapSample c = build_conjugacy(rational_orbit(*map, {3, 8}));
    const double L = lambda_estimate({c}, {1, 2, 4, 8, 16}).Lambda;
    return Outcome{L == 0.0, "Lambda = " + num(L)};
  });
  s.run("conjugacy.subadditivity", [] {
    const auto map = make_map({"standard", 0.3});
    const CircleMapSample c = build_conjugacy(golden_orbit(*map, 8));
    const SubadditivityReport r = check_subadditivity(c, {1, 2, 3, 5, 8, 13});
    return Outcome{r.ok, std::to_string(r.pairs_tested) + " pairs, max excess " + num(r.max_excess)};
  });
  s.run("conjugacy.bi_lipschitz", [] {
    const auto map = make_map({"standard", 0.3});
    const BiLipschitzReport r = check_bi_lipschitz(build_conjugacy(golden_orbit(*map, 8)));
    return Outcome{r.ok, "secants in [" + num(r.min_secant) + ", " + num(r.max_secant) + "]"};
  });
}

void lab_suite(Suite& s) {
  s.run("lab.config_roundtrip", [] {
    ExperimentConfig c;
    c.map.K = 0.1 + 0.2;
    c.map.K_min = 0.0;
    c.map.K_max = 2.0;
    c.map.K_step = 0.1;
    c.rotation.value = 1.0 / std::numbers::pi;
    c.rotation.name = "";
    return Outcome{parse_config(to_ini(c)) == c, "parse(to_ini(cfg)) == cfg"};
  });
  s.run("lab.classification", [] {
    const ClassifySection t;
    const bool ok = classify(1.0, 0.01, 0.7, 0.01, t) == "hyperbolic" &&
                    classify(0.01, 0.05, 0.001, 0.002, t) == "curve-like" &&
                    classify(0.5, 0.1, 0.7, 0.01, t) == "inconclusive" && classify(NAN, 0.1, 0.7, 0.01, t) == "inconclusive";
    return Outcome{ok, "reference rows classified"};
  });
}

void dichotomy_suite(Suite& s) {
  s.run("dichotomy.hyperbolic_K2", [] {
    const auto map = make_map({"standard", 2.0});
    const OrderedOrbit o = golden_orbit(*map, 8);
    const std::vector<GreenLimits> g = green_table(*map, o);
    double gmin = INFINITY, res = 0.0;
    for (const GreenLimits& l : g) {
      gmin = std::min(gmin, l.gap);
      res = std::max(res, l.cauchy_residual);
    }
    LyapunovOptions lo;
    lo.n = 40L * o.size();
    const LyapunovEstimate e = lyapunov_qr(CocycleSource::from_map(map, o.track()), lo);
    const double lg = green_lyapunov_estimate(*map, o.track(), 0, 200, g[0]).lambda_green;
    const RegularityReport r = regularity_report(cloud_from_orbit(o), g);
    const bool ok = gmin > 0.0 && res < 1e-8 && e.lambda - e.ci_halfwidth > 0.0 &&
                    std::abs(lg - e.lambda) / e.lambda < 0.05 && r.hyperbolic.applicable &&
                    r.hyperbolic.fraction >= 0.9 && r.regular_fraction < 0.1;
    return Outcome{ok, "gap " + num(gmin) + ", lambda " + num(e.lambda) + ", lambda_green " + num(lg) +
                           ", two-direction " + num(r.hyperbolic.fraction) + ", regular " + num(r.regular_fraction)};
  });
  s.run("dichotomy.regular_K0.3", [] {
    const auto map = make_map({"standard", 0.3});
    const OrderedOrbit o = golden_orbit(*map, 11);
    const RegularityReport r = regularity_report(cloud_from_orbit(o), green_table(*map, o));
    const double L = lambda_estimate({build_conjugacy(o)}, {1, 2, 4, 8, 16, 32, 64}).Lambda;
    const bool ok = r.regular_fraction >= 0.9 && r.containment_fraction >= 0.95 && std::abs(L) <= 0.02;
    return Outcome{ok, "regular " + num(r.regular_fraction) + ", contained " + num(r.containment_fraction) +
                           ", Lambda " + num(L)};
  });
}

}  // namespace

VerifyLevel parse_level(const std::string& s) {
  if (s == "quick") return VerifyLevel::quick;
  if (s == "full") return VerifyLevel::full;
  throw ConfigError("verify level must be 'quick' or 'full', got '" + s + "'");
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

std::vector<std::string> VerifyReport::failures() const {
  std::vector<std::string> out;
  for (const VerifyCheck& c : checks) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

VerifyReport run_verify(VerifyLevel level, std::shared_ptr<const TwistMap> map_override) {
  VerifyReport rep;
  rep.level = level;
  Suite s(rep);
  const bool full = level == VerifyLevel::full;
  const auto map = map_override ? map_override : make_map({"standard", 1.2});
  twistmap_suite(s, *map);
  aubry_suite(s);
  green_suite(s, full);
  cocycle_suite(s, full);
  regularity_suite(s, full);
  conjugacy_suite(s);
  lab_suite(s);
  if (full) dichotomy_suite(s);
  return rep;
}

json verify_to_json(const VerifyReport& rep) {
  json doc;
  doc["level"] = rep.level == VerifyLevel::full ? "full" : "quick";
  doc["passed"] = rep.passed();
  doc["failures"] = rep.failures();
  json checks = json::array();
  for (const VerifyCheck& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  doc["checks"] = checks;
  return doc;
}

std::shared_ptr<const TwistMap> make_fault_fixture(const std::string& name, double K) {
  if (name == "det-breaking") return std::make_shared<DetBreakingMap>(K, 0.01);
  if (name == "twist-breaking") return std::make_shared<TwistBreakingMap>(K);
  throw ConfigError("unknown fault fixture '" + name + "' (det-breaking, twist-breaking)");
}

}  // namespace twistlab::lab
