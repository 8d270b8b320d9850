#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "twistlab/aubry.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Configuration equispaced(Rational rho, double offset) {
  Configuration c{rho, std::vector<double>(rho.q)};
  for (long i = 0; i < rho.q; ++i) {
    c.thetas[i] = offset + static_cast<double>(i * rho.p) / static_cast<double>(rho.q);
  }
  return c;
}

Configuration shifted_by(const Configuration& c, const std::vector<double>& step, double t) {
  Configuration out = c;
  for (std::size_t i = 0; i < step.size(); ++i) out.thetas[i] += t * step[i];
  return out;
}

// Solves (H + mu I) x = rhs for the cyclic tridiagonal H.
std::vector<double> solve_shifted(const CyclicTridiagonal& H, double mu, const std::vector<double>& rhs) {
  const int q = H.size();
  if (q == 1) return {rhs[0] / (H.entry(0, 0) + mu)};
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * q);
  for (int i = 0; i < q; ++i) {
    trip.emplace_back(i, i, H.entry(i, i) + mu);
    const int j = (i + 1) % q;
    if (q > 2 || i == 0) {
      trip.emplace_back(i, j, H.entry(i, j));
      trip.emplace_back(j, i, H.entry(i, j));
    }
  }
  Eigen::SparseMatrix<double> A(q, q);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw ComputationError("Newton system factorization failed");
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), q);
  Eigen::VectorXd x = ldlt.solve(b);
  return {x.data(), x.data() + q};
}

std::vector<double> starting_offsets(long q) {
  const double dq = static_cast<double>(q);
  return {0.0, 0.5 / dq, 0.3 / dq};
}

}  // namespace

MinimizationResult minimize_from(const TwistMap& map, Configuration start, const MinimizeOptions& opts) {
  if (start.rho.q < 1) throw ConfigError("minimize: q must be >= 1");
  if (opts.tol_grad <= 0.0 || opts.max_iters < 0) throw ConfigError("minimize: bad tolerances");

  MinimizationResult res;
  Configuration c = std::move(start);
  double W = action(map, c);
  res.initial_action = W;
  std::vector<double> g = action_gradient(map, c);
  double gn = sup_norm(g);
  // An ordered start stays ordered: trials that leave the Birkhoff class are
  // rejected, so the iteration cannot settle on a non-ordered critical point.
  const bool keep_order = c.rho.q >= 2 && check_ordered(c).ok;
  auto admissible = [&](const Configuration& trial) { return !keep_order || check_ordered(trial).ok; };

  // Levenberg-Marquardt damping on top of the shift that makes H positive
  // definite: rejected trials raise the damping, accepted ones relax it.
  double damp = 0.0;
  for (int it = 0; it < opts.max_iters && gn > opts.tol_grad; ++it) {
    const CyclicTridiagonal H = action_hessian(map, c);
    const double lam = H.min_eigenvalue();
    const double shift = lam < 1e-10 ? 1e-10 - lam : 0.0;
    std::vector<double> rhs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];

    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Configuration trial = shifted_by(c, solve_shifted(H, shift + damp, rhs), 1.0);
      const double Wt = action(map, trial);
      bool ok = std::isfinite(Wt) && admissible(trial);
      std::vector<double> gt;
      double gnt = 0.0;
      if (ok) {
        gt = action_gradient(map, trial);
        gnt = sup_norm(gt);
        // Near a minimum the action change drowns in rounding; fall back to
        // the gradient norm as the progress measure there.
        ok = Wt < W || (Wt <= W + 1e-14 * std::abs(W) + 1e-15 && gnt < gn);
      }
      if (ok) {
        if (damp > 0.0) ++res.gradient_steps;
        else ++res.newton_steps;
        c = std::move(trial);
        W = Wt;
        g = std::move(gt);
        gn = gnt;
        damp = damp < 1e-9 ? 0.0 : 0.1 * damp;
        accepted = true;
        break;
      }
      damp = damp == 0.0 ? std::max(1e-3, 0.1 * std::abs(lam)) : 8.0 * damp;
    }
    if (!accepted) break;
  }

  res.config = std::move(c);
  res.action = W;
  res.grad_norm = gn;
  res.min_hessian_eigenvalue = action_hessian(map, res.config).min_eigenvalue();
  return res;
}

Configuration canonicalize(const Configuration& c) {
  const long q = c.rho.q;
  long best = 0;
  double best_abs = 2.0;
  for (long j = 0; j < q; ++j) {
    const double a = std::abs(centered(c.thetas[j]));
    if (a < best_abs - 1e-15) {
      best_abs = a;
      best = j;
    }
  }
  const double m = std::round(c.thetas[best]);
  Configuration out{c.rho, std::vector<double>(q)};
  for (long i = 0; i < q; ++i) out.thetas[i] = c.theta(i + best) - m;
  return out;
}

MinimizationResult minimize_orbit(const TwistMap& map, Rational rho, const MinimizeOptions& opts) {
  if (rho.q < 1) throw ConfigError("minimize_orbit: q must be >= 1");

  std::vector<MinimizationResult> candidates;
  std::optional<MinimizationResult> best_unconverged;
  bool order_failed = false;
  std::pair<int, int> order_witness{-1, -1};

  auto consider = [&](MinimizationResult r) {
    if (r.grad_norm > opts.tol_grad) {
      if (!best_unconverged || r.grad_norm < best_unconverged->grad_norm) best_unconverged = r;
      return;
    }
    const OrderCertificate cert = check_ordered(r.config);
    if (!cert.ok) {
      order_failed = true;
      if (cert.witness) order_witness = *cert.witness;
      return;
    }
    if (r.min_hessian_eigenvalue < -opts.psd_tol) return;
    candidates.push_back(std::move(r));
  };

  const std::vector<double> offsets = starting_offsets(rho.q);
  if (opts.init == InitStrategy::equispaced) {
    for (double off : offsets) consider(minimize_from(map, equispaced(rho, off), opts));
  } else {
    const TwistMapSpec spec = map.spec();
    const int stages = std::max(1, static_cast<int>(std::ceil(spec.K / opts.continuation_step - 1e-12)));
    for (double off : {offsets[0], offsets[1]}) {
      Configuration c = equispaced(rho, off);
      double initial = action(map, c);
      for (int s = 1; s <= stages; ++s) {
        TwistMapSpec stage = spec;
        stage.K = spec.K * static_cast<double>(s) / static_cast<double>(stages);
        const auto stage_map = make_map(stage);
        c = minimize_from(*stage_map, std::move(c), opts).config;
      }
      MinimizationResult r = minimize_from(map, std::move(c), opts);
      r.initial_action = std::min(r.initial_action, initial);
      consider(std::move(r));
    }
  }

  if (candidates.empty()) {
    if (order_failed) {
      throw OrderingViolation("minimizer for " + std::to_string(rho.p) + "/" + std::to_string(rho.q) +
                                  " converged to a non-ordered critical point",
                              order_witness.first, order_witness.second);
    }
    if (best_unconverged) {
      throw NonConvergence("minimizer for " + std::to_string(rho.p) + "/" + std::to_string(rho.q) +
                               " did not reach tol_grad",
                           best_unconverged->config.thetas, best_unconverged->grad_norm);
    }
    throw NonConvergence("no minimizing critical point found for " + std::to_string(rho.p) + "/" +
                             std::to_string(rho.q),
                         {}, 0.0);
  }

  auto best = std::min_element(candidates.begin(), candidates.end(),
                               [](const auto& a, const auto& b) { return a.action < b.action; });
  MinimizationResult out = *best;
  out.config = canonicalize(out.config);
  return out;
}

}  // namespace twistlab
