#include <cmath>
#include <limits>
#include <numbers>

#include "twistlab/cocycle.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

namespace {

struct ProductSvd {
  double log_ratio = 0.0;       // log(sigma_1 / sigma_2)
  double contracted_angle = 0.0;
};

// Accumulates A_{n-1} ... A_0 (or the inverse cocycle backwards) with
// renormalization and reads off the right singular structure.
class DirectionalProduct {
 public:
  explicit DirectionalProduct(bool backward) : backward_(backward) {}

  void step(const CocycleSource& src, long i) {
    const Jacobian A = backward_ ? src.at(-i - 1).inverse() : src.at(i);
    log_det_ += std::log(std::abs(A.det()));
    M_ = A * M_;
    const double nrm = M_.operator_norm();
    log_scale_ += std::log(nrm);
    M_ = M_.scaled(1.0 / nrm);
  }

  ProductSvd svd() const {
    // M^T M = [[p, r], [r, t]]
    const double p = M_.a * M_.a + M_.c * M_.c;
    const double t = M_.b * M_.b + M_.d * M_.d;
    const double r = M_.a * M_.b + M_.c * M_.d;
    const double s1sq = 0.5 * (p + t + std::hypot(p - t, 2.0 * r));
    ProductSvd out;
    out.log_ratio = 2.0 * (0.5 * std::log(s1sq) + log_scale_) - log_det_;
    out.contracted_angle = 0.5 * std::atan2(2.0 * r, p - t) + std::numbers::pi / 2.0;
    return out;
  }

 private:
  bool backward_;
  Jacobian M_ = Jacobian::identity();
  double log_scale_ = 0.0;
  double log_det_ = 0.0;
};

}  // namespace

SplittingEstimate oseledets_directions(const CocycleSource& src, int n) {
  if (n < 2) throw ConfigError("oseledets_directions: n must be >= 2");
  DirectionalProduct fwd(false), bwd(true);
  ProductSvd fwd_half, bwd_half;
  for (long i = 0; i < n; ++i) {
    fwd.step(src, i);
    bwd.step(src, i);
    if (i + 1 == n / 2) {
      fwd_half = fwd.svd();
      bwd_half = bwd.svd();
    }
  }
  const ProductSvd f = fwd.svd();
  const ProductSvd b = bwd.svd();

  SplittingEstimate est;
  est.e_s = ProjLine::from_angle(f.contracted_angle);
  est.e_u = ProjLine::from_angle(b.contracted_angle);
  est.angle_gap = angular_distance(est.e_s, est.e_u);
  est.log_ratio_forward = f.log_ratio;
  est.log_ratio_backward = b.log_ratio;

  const double need = std::log(1e3);
  const bool large = f.log_ratio >= need && b.log_ratio >= need;
  // Exponential separation doubles the log ratio when n doubles; polynomial
  // growth (parabolic cocycles) does not.
  const bool doubling = f.log_ratio >= 1.5 * fwd_half.log_ratio && b.log_ratio >= 1.5 * bwd_half.log_ratio;
  est.conclusive = large && doubling;
  if (!large) {
    est.note = "singular value ratio below 1e3";
  } else if (!doubling) {
    est.note = "singular value ratio grows subexponentially";
  }
  return est;
}

std::string to_string(QuasiHyp c) {
  switch (c) {
    case QuasiHyp::quasi_hyperbolic:
      return "quasi-hyperbolic";
    case QuasiHyp::not_quasi_hyperbolic:
      return "not";
    case QuasiHyp::inconclusive:
      break;
  }
  return "inconclusive";
}

QuasiHypReport quasi_hyperbolicity_scan(const CocycleSource& src, const QuasiHypOptions& opts) {
  if (opts.window < 1) throw ConfigError("quasi_hyperbolicity_scan: window must be >= 1");
  if (opts.n_dirs < 8) throw ConfigError("quasi_hyperbolicity_scan: n_dirs must be >= 8");

  std::vector<Jacobian> fwd(opts.window), bwd(opts.window);
  for (int k = 0; k < opts.window; ++k) {
    fwd[k] = src.at(k);
    bwd[k] = src.at(-k - 1).inverse();
  }

  QuasiHypReport rep;
  rep.window = opts.window;
  rep.n_dirs = opts.n_dirs;
  rep.threshold = opts.C * std::pow(opts.rho, opts.window);
  rep.min_max_norm = std::numeric_limits<double>::infinity();
  for (int j = 0; j < opts.n_dirs; ++j) {
    const double phi = std::numbers::pi * j / opts.n_dirs;
    const Vec2 v{std::cos(phi), std::sin(phi)};
    double best = 1.0;
    Vec2 w = v;
    for (const Jacobian& A : fwd) {
      w = A * w;
      best = std::max(best, w.norm());
    }
    w = v;
    for (const Jacobian& A : bwd) {
      w = A * w;
      best = std::max(best, w.norm());
    }
    if (best < rep.min_max_norm) {
      rep.min_max_norm = best;
      rep.worst_angle = phi;
    }
  }

  if (rep.min_max_norm >= rep.threshold) {
    rep.classification = QuasiHyp::quasi_hyperbolic;
  } else if (opts.window >= opts.not_min_window && rep.min_max_norm <= opts.not_threshold) {
    rep.classification = QuasiHyp::not_quasi_hyperbolic;
  } else {
    rep.classification = QuasiHyp::inconclusive;
  }
  return rep;
}

GreenOseledetsTable compare_green_oseledets(std::shared_ptr<const TwistMap> map, const OrderedOrbit& orbit,
                                            int n, const GreenOptions& gopts) {
  const Track track = orbit.track();
  const CocycleSource src = CocycleSource::from_map(map, track);
  GreenOseledetsTable table;
  table.conclusive = true;
  std::vector<GreenOseledetsRow> rows;
  for (int k = 0; k < orbit.size(); ++k) {
    const SplittingEstimate sp = oseledets_directions(src.shifted(k), n);
    if (!sp.conclusive) {
      table.conclusive = false;
      continue;
    }
    const GreenLimits gl = green_limits(*map, track, k, gopts);
    GreenOseledetsRow row;
    row.index = k;
    row.residual_minus = angular_distance(ProjLine::from_slope(gl.s_minus), sp.e_s);
    row.residual_plus = angular_distance(ProjLine::from_slope(gl.s_plus), sp.e_u);
    rows.push_back(row);
  }
  if (table.conclusive) {
    table.rows = std::move(rows);
    for (const auto& r : table.rows) {
      table.max_residual = std::max({table.max_residual, r.residual_minus, r.residual_plus});
    }
  }
  return table;
}

}  // namespace twistlab
