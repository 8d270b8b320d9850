#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "twistlab/cocycle.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

namespace {

// Product of n steps with renormalization; log_norm(m) is available at the
// requested checkpoints.
class NormTracker {
 public:
  explicit NormTracker(int renorm_every) : every_(renorm_every) {}

  void step(const Jacobian& A) {
    M_ = A * M_;
    ++steps_;
    if (steps_ % every_ == 0) {
      const double nrm = M_.operator_norm();
      if (!std::isfinite(nrm) || nrm == 0.0) {
        throw ComputationError("cocycle norm left double range; reduce renorm_every");
      }
      const double l = std::log(nrm);
      log_sum_ += l;
      log_.push_back(l);
      M_ = M_.scaled(1.0 / nrm);
    }
  }

  double log_norm() const {
    const double nrm = M_.operator_norm();
    if (!std::isfinite(nrm)) throw ComputationError("cocycle norm left double range; reduce renorm_every");
    return log_sum_ + std::log(nrm);
  }

  const std::vector<double>& renorm_log() const { return log_; }

 private:
  int every_;
  long steps_ = 0;
  Jacobian M_ = Jacobian::identity();
  double log_sum_ = 0.0;
  std::vector<double> log_;
};

long round_to(long m, std::optional<long> period) {
  if (!period || *period <= 0 || m < *period) return m;
  return (m / *period) * *period;
}

}  // namespace

double periodic_exponent(const CocycleSource& src, long q) {
  if (q < 1) throw ConfigError("periodic_exponent: q must be >= 1");
  Jacobian M = Jacobian::identity();
  double log_scale = 0.0;
  for (long k = 0; k < q; ++k) {
    M = src.at(k) * M;
    const double nrm = M.operator_norm();
    log_scale += std::log(nrm);
    M = M.scaled(1.0 / nrm);
  }
  const double t = M.trace();
  const double det = M.det();
  const double disc = t * t - 4.0 * det;
  const double radius = disc >= 0.0 ? 0.5 * (std::abs(t) + std::sqrt(disc)) : std::sqrt(std::abs(det));
  return (std::log(radius) + log_scale) / static_cast<double>(q);
}

LyapunovEstimate lyapunov_qr(const CocycleSource& src, const LyapunovOptions& opts) {
  if (opts.renorm_every < 1 || opts.n < opts.renorm_every) {
    throw ConfigError("lyapunov_qr: need n >= renorm_every >= 1");
  }
  const long n = opts.n;
  const std::optional<long> period = src.period();

  constexpr int kBlocks = 10;
  std::vector<long> marks;
  for (int j = 1; j <= kBlocks; ++j) marks.push_back(round_to(n * j / kBlocks, period));
  const long m1 = round_to(n / 4, period);
  const long m2 = round_to(n / 2, period);
  marks.push_back(m1);
  marks.push_back(m2);
  marks.push_back(n);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  marks.erase(marks.begin(), std::upper_bound(marks.begin(), marks.end(), 0L));

  NormTracker tr(opts.renorm_every);
  std::vector<double> L(marks.size());
  std::size_t next = 0;
  for (long i = 0; i < n; ++i) {
    const Jacobian A = opts.backward ? src.at(-i - 1).inverse() : src.at(i);
    tr.step(A);
    while (next < marks.size() && marks[next] == i + 1) L[next++] = tr.log_norm();
  }
  auto L_at = [&](long m) {
    const auto it = std::lower_bound(marks.begin(), marks.end(), m);
    return L[static_cast<std::size_t>(it - marks.begin())];
  };

  LyapunovEstimate est;
  est.n = n;
  est.renorm_log = tr.renorm_log();
  est.renorm_count = static_cast<int>(est.renorm_log.size());
  est.lambda_plain = L_at(n) / static_cast<double>(n);
  est.lambda = est.lambda_plain;

  est.lambda_fit = est.lambda_plain;
  if (m1 > 1 && m1 < m2 && m2 < n) {
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    const long ms[3] = {m1, m2, n};
    for (int r = 0; r < 3; ++r) {
      A(r, 0) = static_cast<double>(ms[r]);
      A(r, 1) = std::log(static_cast<double>(ms[r]));
      A(r, 2) = 1.0;
      b(r) = L_at(ms[r]);
    }
    const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(b);
    if (std::isfinite(sol(0))) est.lambda_fit = sol(0);
  }

  std::vector<double> rates;
  long prev = 0;
  double L_prev = 0.0;
  for (int j = 1; j <= kBlocks; ++j) {
    const long m = round_to(n * j / kBlocks, period);
    if (m <= prev) continue;
    const double Lm = L_at(m);
    rates.push_back((Lm - L_prev) / static_cast<double>(m - prev));
    prev = m;
    L_prev = Lm;
  }
  double se = 0.0;
  if (rates.size() >= 2) {
    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(rates.size());
    double var = 0.0;
    for (double r : rates) var += (r - mean) * (r - mean);
    var /= static_cast<double>(rates.size() - 1);
    se = std::sqrt(var / static_cast<double>(rates.size()));
  }
  est.ci_halfwidth = 2.0 * se + std::abs(est.lambda_plain - est.lambda_fit);

  if (period) est.lambda_periodic = periodic_exponent(src, *period);
  return est;
}

GreenLyapunov green_lyapunov_estimate(const TwistMap& map, const Track& track, long k, int n,
                                      const GreenLimits& limits) {
  if (n < 1) throw ConfigError("green_lyapunov_estimate: n must be >= 1");
  if (!(limits.gap > 0.0) || !(limits.gap > limits.gap_uncertainty)) {
    throw ComputationError("Green gap is not positive; the gap estimator is undefined");
  }
  GreenLyapunov out;
  out.n = n;
  out.log_b_n = growth_b_n(map, track, k, n).log_b.back();
  out.s_minus_n = slope_backward(map, track, k, n);
  out.lambda_green = (out.log_b_n + std::log(limits.s_plus - out.s_minus_n)) / static_cast<double>(n);

  Jacobian M = Jacobian::identity();
  double log_scale = 0.0;
  for (long j = k; j < k + n; ++j) {
    M = map.jacobian(track.at(j)) * M;
    const double nrm = M.operator_norm();
    log_scale += std::log(nrm);
    M = M.scaled(1.0 / nrm);
  }
  out.norm_bound = (log_scale + std::log(M.operator_norm()) + 0.5 * std::log1p(limits.s_plus * limits.s_plus)) /
                   static_cast<double>(n);
  return out;
}

}  // namespace twistlab
