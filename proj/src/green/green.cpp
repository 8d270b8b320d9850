#include <algorithm>
#include <cmath>
#include <string>

#include "twistlab/error.hpp"
#include "twistlab/green.hpp"

namespace twistlab {

namespace {

// Jacobians J_j = Df(x_j) for j in [lo, hi], cached for one base point.
class JacobianWindow {
 public:
  JacobianWindow(const TwistMap& map, const Track& track, long lo, long hi) : lo_(lo) {
    if (lo < track.first() || hi > track.last()) {
      throw ComputationError("track window too short for the requested depth");
    }
    js_.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long j = lo; j <= hi; ++j) js_.push_back(map.jacobian(track.at(j)));
  }
  const Jacobian& operator()(long j) const { return js_[static_cast<std::size_t>(j - lo_)]; }

 private:
  long lo_;
  std::vector<Jacobian> js_;
};

Vec2 renormalized(Vec2 v) {
  const double n = v.norm();
  return {v.x / n, v.y / n};
}

// Image of the vertical at x_{k-n} under Df^n; direction only.
Vec2 push_vertical_forward(const JacobianWindow& J, long k, int n) {
  Vec2 v{0.0, 1.0};
  for (long j = k - n; j < k; ++j) v = renormalized(J(j) * v);
  return v;
}

// Preimage of the vertical at x_{k+n} under Df^n; direction only.
Vec2 pull_vertical_back(const JacobianWindow& J, long k, int n) {
  Vec2 v{0.0, 1.0};
  for (long j = k + n - 1; j >= k; --j) v = renormalized(J(j).inverse() * v);
  return v;
}

double forward_slope_from(const JacobianWindow& J, long k, int n) {
  const Vec2 v = push_vertical_forward(J, k, n);
  if (!(v.x > 0.0)) throw TransversalityFailure("forward image of the vertical is not transverse at n = " + std::to_string(n), n);
  return v.y / v.x;
}

double backward_slope_from(const JacobianWindow& J, long k, int n) {
  const Vec2 v = pull_vertical_back(J, k, n);
  if (!(v.x < 0.0)) throw TransversalityFailure("backward image of the vertical is not transverse at n = " + std::to_string(n), n);
  return v.y / v.x;
}

double tail_estimate(const std::vector<double>& s, int n_used) {
  // s is indexed s[n - 1]
  if (n_used < 3) return std::abs(s[n_used - 1] - (n_used >= 2 ? s[n_used - 2] : 0.0));
  const double d = std::abs(s[n_used - 1] - s[n_used - 2]);
  const double d_prev = std::abs(s[n_used - 2] - s[n_used - 3]);
  if (d == 0.0) return 0.0;
  const double rho = d_prev > 0.0 ? d / d_prev : 1.0;
  if (rho < 0.9) return d * rho / (1.0 - rho);
  return 2.0 * static_cast<double>(n_used) * d;
}

void check_depth(int n) {
  if (n < 1) throw ConfigError("Green slopes need n >= 1");
}

}  // namespace

double slope_forward(const TwistMap& map, const Track& track, long k, int n) {
  check_depth(n);
  return forward_slope_from(JacobianWindow(map, track, k - n, k - 1), k, n);
}

double slope_backward(const TwistMap& map, const Track& track, long k, int n) {
  check_depth(n);
  return backward_slope_from(JacobianWindow(map, track, k, k + n - 1), k, n);
}

double slope_forward(const TwistMap& map, Point x, int n) {
  check_depth(n);
  return slope_forward(map, Track::iterate(map, x, n, 0), 0, n);
}

double slope_backward(const TwistMap& map, Point x, int n) {
  check_depth(n);
  return slope_backward(map, Track::iterate(map, x, 0, n), 0, n);
}

GreenSequence green_sequence(const TwistMap& map, const Track& track, long k, int n_max) {
  check_depth(n_max);
  const JacobianWindow J(map, track, k - n_max, k + n_max - 1);
  GreenSequence seq;
  seq.base = track.point(k);
  seq.forward.resize(n_max);
  seq.backward.resize(n_max);
  for (int n = 1; n <= n_max; ++n) {
    seq.forward[n - 1] = forward_slope_from(J, k, n);
    seq.backward[n - 1] = backward_slope_from(J, k, n);
  }
  return seq;
}

InterlacingReport check_interlacing(const GreenSequence& seq, double margin) {
  InterlacingReport rep;
  rep.min_margin = INFINITY;
  const int N = static_cast<int>(seq.forward.size());
  auto visit = [&](double lower, double upper, int n) {
    const double slack = upper - lower;
    rep.min_margin = std::min(rep.min_margin, slack);
    if (slack < 0.0) rep.max_violation = std::max(rep.max_violation, -slack);
    if (slack < -margin && !rep.first_bad_n) {
      rep.ok = false;
      rep.first_bad_n = n;
    }
  };
  for (int n = 1; n < N; ++n) {
    visit(seq.backward[n - 1], seq.backward[n], n);
    visit(seq.forward[n], seq.forward[n - 1], n);
  }
  if (N >= 1) visit(seq.backward[N - 1], seq.forward[N - 1], N);
  return rep;
}

GreenLimits green_limits(const TwistMap& map, const Track& track, long k, const GreenOptions& opts) {
  if (opts.n_max < 2) throw ConfigError("green_limits: n_max must be >= 2");
  if (!(opts.tol_cauchy > 0.0)) throw ConfigError("green_limits: tol_cauchy must be positive");
  const GreenSequence seq = green_sequence(map, track, k, opts.n_max);
  const auto& f = seq.forward;
  const auto& b = seq.backward;

  for (int n = 1; n < opts.n_max; ++n) {
    if (f[n] > f[n - 1] + opts.monotone_tol || b[n] < b[n - 1] - opts.monotone_tol) {
      throw GreenSetViolation("Green slope sequence not monotone at n = " + std::to_string(n + 1) +
                              " (k = " + std::to_string(k) + ")");
    }
  }
  if (b[opts.n_max - 1] > f[opts.n_max - 1] + opts.monotone_tol) {
    throw GreenSetViolation("Green slopes cross at k = " + std::to_string(k));
  }

  GreenLimits out;
  out.n_used = opts.n_max;
  for (int n = 2; n <= opts.n_max; ++n) {
    const double res = std::max(std::abs(f[n - 1] - f[n - 2]), std::abs(b[n - 1] - b[n - 2]));
    out.cauchy_residual = res;
    if (res <= opts.tol_cauchy) {
      out.n_used = n;
      out.converged = true;
      break;
    }
  }
  out.s_plus = f[out.n_used - 1];
  out.s_minus = b[out.n_used - 1];
  out.gap = out.s_plus - out.s_minus;
  out.gap_uncertainty = tail_estimate(f, out.n_used) + tail_estimate(b, out.n_used);
  out.forward = f;
  out.backward = b;
  return out;
}

GreenLimits green_limits(const TwistMap& map, Point x, const GreenOptions& opts) {
  return green_limits(map, Track::iterate(map, x, opts.n_max, opts.n_max), 0, opts);
}

std::vector<GreenLimits> green_table(const TwistMap& map, const OrderedOrbit& orbit, const GreenOptions& opts) {
  const Track track = orbit.track();
  std::vector<GreenLimits> out;
  out.reserve(orbit.size());
  for (int k = 0; k < orbit.size(); ++k) out.push_back(green_limits(map, track, k, opts));
  return out;
}

Jacobian jacobian_product(const TwistMap& map, const Track& track, long k, int n) {
  Jacobian M = Jacobian::identity();
  for (long j = k; j < k + n; ++j) M = map.jacobian(track.at(j)) * M;
  return M;
}

CocycleEntries cocycle_entries(const TwistMap& map, const Track& track, long k, int n) {
  check_depth(n);
  const Jacobian M = jacobian_product(map, track, k, n);
  if (!std::isfinite(M.a) || !std::isfinite(M.b) || !std::isfinite(M.c) || !std::isfinite(M.d)) {
    throw ComputationError("cocycle entries overflow at n = " + std::to_string(n));
  }
  if (!(M.b > 0.0)) {
    throw GreenSetViolation("b_n <= 0 at n = " + std::to_string(n) + ", k = " + std::to_string(k));
  }
  return {M.a, M.b, M.c, M.d};
}

GreenSetReport green_set_check(const TwistMap& map, const Track& track, long k_first, int window, int n_max) {
  if (n_max < 1 || window < 1) throw ConfigError("green_set_check: n_max and window must be >= 1");
  GreenSetReport rep;
  for (long k = k_first; k < k_first + window; ++k) {
    const JacobianWindow J(map, track, k - n_max, k + n_max - 1);
    Vec2 fwd{0.0, 1.0};
    Vec2 bwd{0.0, 1.0};
    for (int n = 1; n <= n_max; ++n) {
      fwd = renormalized(J(k + n - 1) * fwd);
      bwd = renormalized(J(k - n).inverse() * bwd);
      if (!(fwd.x > 0.0) || !(bwd.x < 0.0)) {
        rep.ok = false;
        rep.bad_n = n;
        rep.bad_k = k;
        rep.reason = fwd.x > 0.0 ? "backward sign condition fails" : "forward sign condition fails";
        return rep;
      }
    }
    GreenSequence seq;
    seq.forward.resize(n_max);
    seq.backward.resize(n_max);
    for (int n = 1; n <= n_max; ++n) {
      seq.forward[n - 1] = forward_slope_from(J, k, n);
      seq.backward[n - 1] = backward_slope_from(J, k, n);
    }
    const InterlacingReport il = check_interlacing(seq);
    if (!il.ok) {
      rep.ok = false;
      rep.bad_n = *il.first_bad_n;
      rep.bad_k = k;
      rep.reason = "interlacing fails";
      return rep;
    }
  }
  return rep;
}

InvarianceResidual invariance_residual(const TwistMap& map, const Track& track, long k, const GreenOptions& opts) {
  const GreenLimits here = green_limits(map, track, k, opts);
  const GreenLimits there = green_limits(map, track, k + 1, opts);
  const Jacobian J = map.jacobian(track.at(k));
  InvarianceResidual r;
  r.minus = angular_distance(ProjLine::from_vector(J * Vec2{1.0, here.s_minus}),
                             ProjLine::from_slope(there.s_minus));
  r.plus = angular_distance(ProjLine::from_vector(J * Vec2{1.0, here.s_plus}),
                            ProjLine::from_slope(there.s_plus));
  return r;
}

GrowthProfile dynamical_criterion_test(const TwistMap& map, const Track& track, long k, Vec2 v, int n_max) {
  if (n_max < 2) throw ConfigError("dynamical_criterion_test: n_max must be >= 2");
  GrowthProfile prof;
  prof.values.reserve(n_max + 1);
  double log_scale = std::log(v.norm());
  Vec2 w = v.normalized();
  prof.values.push_back(std::abs(v.x));
  for (int n = 1; n <= n_max; ++n) {
    w = map.jacobian(track.at(k + n - 1)) * w;
    const double nrm = w.norm();
    log_scale += std::log(nrm);
    w = w * (1.0 / nrm);
    prof.values.push_back(std::abs(w.x) * std::exp(log_scale));
  }
  const auto& vals = prof.values;
  const int mid = n_max / 2;
  bool rising = true;
  for (int n = mid + 1; n <= n_max; ++n) {
    if (vals[n] < vals[n - 1] * (1.0 - 1e-12)) rising = false;
  }
  if (rising && vals[n_max] >= 1.5 * vals[mid] && vals[n_max] > vals[0]) prof.growth = Growth::unbounded;
  return prof;
}

BGrowth growth_b_n(const TwistMap& map, const Track& track, long k, int n_max) {
  check_depth(n_max);
  BGrowth out;
  out.log_b.reserve(n_max);
  Vec2 w{0.0, 1.0};
  double log_scale = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    w = map.jacobian(track.at(k + n - 1)) * w;
    const double nrm = w.norm();
    log_scale += std::log(nrm);
    w = w * (1.0 / nrm);
    if (!(w.x > 0.0)) throw GreenSetViolation("b_n <= 0 at n = " + std::to_string(n));
    out.log_b.push_back(std::log(w.x) + log_scale);
  }
  const int lo = std::max(1, n_max / 2);
  const int cnt = n_max - lo + 1;
  if (cnt >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int n = lo; n <= n_max; ++n) {
      const double x = n, y = out.log_b[n - 1];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    out.log_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  return out;
}

double MatrixIdentityResidual::max() const { return std::max({d, a, det, det_n}); }

MatrixIdentityResidual matrix_identity_residuals(const TwistMap& map, const Track& track, long k, int n,
                                                 double s_plus_k, double s_plus_kn) {
  const CocycleEntries M = cocycle_entries(map, track, k, n);
  const double sn = slope_forward(map, track, k + n, n);
  const double smn = slope_backward(map, track, k, n);
  MatrixIdentityResidual r;
  r.d = std::abs(M.d - sn * M.b) / std::max(std::abs(M.d), std::abs(sn * M.b));
  r.a = std::abs(M.a + M.b * smn) / std::max(std::abs(M.a), std::abs(M.b * smn));
  r.det = std::abs(M.det() - 1.0);
  r.det_n = std::abs(M.b * M.b * (s_plus_k - smn) * (sn - s_plus_kn) - 1.0);
  return r;
}

}  // namespace twistlab
