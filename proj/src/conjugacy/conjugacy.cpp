#include "twistlab/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "twistlab/error.hpp"

namespace twistlab {

double CircleMapSample::lifted(long i) const {
  const long q = static_cast<long>(thetas.size());
  long m = i / q;
  long j = i % q;
  if (j < 0) {
    j += q;
    --m;
  }
  return thetas[j] + static_cast<double>(m * rho.p);
}

CircleMapSample build_conjugacy(const OrderedOrbit& orbit) {
  if (orbit.size() < 1) throw ConfigError("build_conjugacy: empty orbit");
  if (orbit.size() >= 2) {
    const OrderCertificate cert = check_ordered(orbit);
    if (!cert.ok) {
      throw OrderingViolation("circle map sample is not order preserving", cert.witness->first,
                              cert.witness->second);
    }
  }
  CircleMapSample s;
  s.rho = orbit.approximant;
  s.thetas = orbit.thetas;
  s.lipschitz_bound = orbit.lipschitz_bound;
  s.K = orbit.map.K;
  const int q = orbit.size();
  s.order.resize(q);
  std::iota(s.order.begin(), s.order.end(), 0);
  std::sort(s.order.begin(), s.order.end(),
            [&](int a, int b) { return wrap_angle(s.thetas[a]) < wrap_angle(s.thetas[b]); });
  s.position.resize(q);
  for (int k = 0; k < q; ++k) s.position[s.order[k]] = k;
  return s;
}

namespace {

// Secant of h~^n between theta_i and theta_j + m.
double secant(const CircleMapSample& s, int n, int i, int j, double m) {
  const double num = s.image(j, n) + m - s.image(i, n);
  const double den = s.lifted(j) + m - s.lifted(i);
  return num / den;
}

}  // namespace

std::optional<double> secant_derivative(const CircleMapSample& s, int n, int i, double scale) {
  if (n < 1) throw ConfigError("secant_derivative: n must be >= 1");
  int best = -1;
  double best_d = 0.0;
  for (int j = 0; j < s.size(); ++j) {
    if (j == i) continue;
    const double d = std::abs(centered(s.thetas[j] - s.thetas[i]));
    if (d >= 0.5 * scale && d <= scale && (best < 0 || d < best_d)) {
      best = j;
      best_d = d;
    }
  }
  if (best < 0) return std::nullopt;
  const double target = s.thetas[i] + centered(s.thetas[best] - s.thetas[i]);
  const double m = std::round(target - s.thetas[best]);
  return secant(s, n, i, best, m);
}

std::vector<double> g_values(const CircleMapSample& s, int n) {
  if (n < 1) throw ConfigError("g_values: n must be >= 1");
  const int q = s.size();
  std::vector<double> g(q);
  for (int i = 0; i < q; ++i) {
    const int k = s.position[i];
    const int right = s.order[(k + 1) % q];
    const int left = s.order[(k + q - 1) % q];
    // lifts in (theta_i, theta_i + 1) and (theta_i - 1, theta_i)
    double m_right = -std::floor(s.thetas[right] - s.thetas[i]);
    if (s.thetas[right] + m_right <= s.thetas[i]) m_right += 1.0;
    double m_left = -std::ceil(s.thetas[left] - s.thetas[i]);
    if (s.thetas[left] + m_left >= s.thetas[i]) m_left -= 1.0;
    const double sr = secant(s, n, i, right, m_right);
    const double sl = secant(s, n, i, left, m_left);
    if (!(sr > 0.0) || !(sl > 0.0)) {
      throw ComputationError("non-positive secant of h^" + std::to_string(n) + " at sample " + std::to_string(i));
    }
    g[i] = std::max(-std::log(sr), -std::log(sl));
  }
  return g;
}

double mean_g(const CircleMapSample& s, int n) {
  const std::vector<double> g = g_values(s, n);
  double sum = 0.0;
  for (double v : g) sum += v;
  return sum / static_cast<double>(g.size());
}

SubadditiveEstimate lambda_estimate(const std::vector<CircleMapSample>& ladder, const std::vector<int>& n_list) {
  if (ladder.empty()) throw ConfigError("lambda_estimate: empty sample ladder");
  if (n_list.empty() || n_list.front() < 1) throw ConfigError("lambda_estimate: n_list must hold positive values");
  for (std::size_t j = 1; j < n_list.size(); ++j) {
    if (n_list[j] <= n_list[j - 1]) throw ConfigError("lambda_estimate: n_list must increase");
  }

  SubadditiveEstimate est;
  est.n_list = n_list;
  for (const CircleMapSample& s : ladder) {
    SubadditiveLevel level;
    level.rho = s.rho;
    for (int n : n_list) level.means.push_back(mean_g(s, n));
    est.levels.push_back(std::move(level));
  }
  est.means = est.levels.back().means;
  est.inf_normalized = INFINITY;
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    est.normalized.push_back(est.means[j] / n_list[j]);
    est.inf_normalized = std::min(est.inf_normalized, est.normalized.back());
  }

  const std::size_t start = n_list.size() / 2;
  const std::size_t cnt = n_list.size() - start;
  if (cnt >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = start; j < n_list.size(); ++j) {
      const double x = n_list[j], y = est.means[j];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double c = static_cast<double>(cnt);
    est.Lambda = (c * sxy - sx * sy) / (c * sxx - sx * sx);
  } else {
    est.Lambda = est.normalized.back();
  }

  if (ladder.size() < 2) est.warnings.push_back("single-level ladder: no scale refinement available");
  if (ladder.back().size() < 2 * n_list.back()) {
    est.warnings.push_back("largest n exceeds half the finest orbit length; per-n means may be scale-dependent");
  }
  return est;
}

SubadditivityReport check_subadditivity(const CircleMapSample& s, const std::vector<int>& ns) {
  SubadditivityReport rep;
  rep.max_excess = -INFINITY;
  for (int n : ns) {
    for (int m : ns) {
      const double gn = mean_g(s, n), gm = mean_g(s, m), gnm = mean_g(s, n + m);
      const double excess = gnm - gn - gm;
      const double budget = 1e-12 * (n + m) * (1.0 + std::abs(gn) + std::abs(gm));
      rep.noise_budget = std::max(rep.noise_budget, budget);
      rep.max_excess = std::max(rep.max_excess, excess);
      if (excess > budget) rep.ok = false;
      ++rep.pairs_tested;
    }
  }
  return rep;
}

BiLipschitzReport check_bi_lipschitz(const CircleMapSample& s) {
  BiLipschitzReport rep;
  rep.lower_bound = 1.0 / (1.0 + s.lipschitz_bound);
  rep.upper_bound = 1.0 + s.lipschitz_bound + s.K;
  rep.min_secant = INFINITY;
  rep.max_secant = 0.0;
  rep.ok = true;
  const int q = s.size();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      const double target = s.thetas[i] + centered(s.thetas[j] - s.thetas[i]);
      const double m = std::round(target - s.thetas[j]);
      const double sec = secant(s, 1, i, j, m);
      rep.min_secant = std::min(rep.min_secant, sec);
      rep.max_secant = std::max(rep.max_secant, sec);
      // Rounding of the lifted angles, relative to the pair separation.
      const double den = std::abs(s.lifted(j) + m - s.lifted(i));
      const double scale = 2.0 + std::abs(s.image(i, 1)) + std::abs(s.image(j, 1)) + std::abs(m);
      const double slack = 16.0 * eps * scale * (1.0 + sec) / den;
      if (sec < rep.lower_bound - slack || sec > rep.upper_bound + slack) rep.ok = false;
    }
  }
  if (q < 2) rep.min_secant = rep.max_secant = 1.0;
  return rep;
}

double degree_one_residual(const CircleMapSample& s) {
  // h~(theta_i + m) = theta_{i+1} + m on the lifted samples; a full turn of the
  // argument (i -> i + q, theta advances by p) must advance the image by p too.
  double worst = 0.0;
  const long q = s.size();
  for (long i = 0; i < q; ++i) {
    const double turn = s.lifted(i + q) - s.lifted(i);
    const double image_turn = s.image(i + q, 1) - s.image(i, 1);
    worst = std::max(worst, std::abs(image_turn - turn));
    const double h_shift = (s.image(i, 1) + 1.0) - s.image(i, 1);
    worst = std::max(worst, std::abs(h_shift - 1.0));
  }
  return worst;
}

}  // namespace twistlab
