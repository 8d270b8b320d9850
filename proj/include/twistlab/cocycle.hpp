#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/aubry.hpp"
#include "twistlab/green.hpp"
#include "twistlab/mat2.hpp"
#include "twistlab/track.hpp"
#include "twistlab/twistmap.hpp"

namespace twistlab {

// A two-sided sequence of SL(2, R) matrices A_k, k in Z. The forward cocycle is
// F_n = A_{n-1} ... A_0 and F_{-n} = A_{-n}^{-1} ... A_{-1}^{-1}.
class CocycleSource {
 public:
  static CocycleSource from_map(std::shared_ptr<const TwistMap> map, Track track);
  static CocycleSource constant(Jacobian A, std::string name = "constant");
  static CocycleSource constant_hyperbolic(double lambda);  // diag(e^lambda, e^-lambda)
  static CocycleSource shear();                              // [[1, 1], [0, 1]]
  static CocycleSource rotation(double angle);
  // Periodic repetition of a finite list, A_k = list[k mod size].
  static CocycleSource sequence(std::vector<Jacobian> list, std::string name = "sequence");

  Jacobian at(long k) const { return fn_(k); }
  const std::string& kind() const noexcept { return kind_; }
  // Period of the sequence when known (map sources on periodic tracks, constants, lists).
  std::optional<long> period() const noexcept { return period_; }
  double det_tolerance() const noexcept { return 1e-12; }

  // Source re-based so that index 0 becomes index k.
  CocycleSource shifted(long k) const;

 private:
  std::function<Jacobian(long)> fn_;
  std::string kind_;
  std::optional<long> period_;
};

struct LyapunovOptions {
  long n = 2000;
  int renorm_every = 20;
  bool backward = false;
};

struct LyapunovEstimate {
  double lambda = 0.0;
  long n = 0;
  int renorm_count = 0;
  double ci_halfwidth = 0.0;
  double lambda_plain = 0.0;  // (1/n) log ||F_n||
  double lambda_fit = 0.0;    // three-point fit with a log n correction
  std::vector<double> renorm_log;
  std::optional<double> lambda_periodic;  // (1/q) log spectral radius of the period product
};

// Norm growth with renormalization every renorm_every steps. Throws
// ComputationError on a non-finite norm.
LyapunovEstimate lyapunov_qr(const CocycleSource& src, const LyapunovOptions& opts = {});

// (1/q) log of the spectral radius of A_{q-1} ... A_0.
double periodic_exponent(const CocycleSource& src, long q);

struct GreenLyapunov {
  double lambda_green = 0.0;
  double log_b_n = 0.0;
  double s_minus_n = 0.0;
  double norm_bound = 0.0;  // (1/n) log(||Df^n|| * ||(1, s_plus)||)
  int n = 0;
};

// (1/n) log[b_n (s_plus - s_{-n})] at x_k. Throws ComputationError unless the
// gap exceeds its uncertainty.
GreenLyapunov green_lyapunov_estimate(const TwistMap& map, const Track& track, long k, int n,
                                      const GreenLimits& limits);

struct SplittingEstimate {
  bool conclusive = false;
  ProjLine e_s;
  ProjLine e_u;
  double angle_gap = 0.0;
  double log_ratio_forward = 0.0;  // log of the singular value ratio
  double log_ratio_backward = 0.0;
  std::string note;
};

SplittingEstimate oseledets_directions(const CocycleSource& src, int n);

enum class QuasiHyp { quasi_hyperbolic, not_quasi_hyperbolic, inconclusive };
std::string to_string(QuasiHyp c);

struct QuasiHypOptions {
  int window = 50;
  int n_dirs = 64;
  double C = 1.0;
  double rho = 1.05;
  double not_threshold = 2.0;
  int not_min_window = 50;
};

struct QuasiHypReport {
  int window = 0;
  int n_dirs = 0;
  double min_max_norm = 0.0;
  double threshold = 0.0;
  double worst_angle = 0.0;
  QuasiHyp classification = QuasiHyp::inconclusive;
};

QuasiHypReport quasi_hyperbolicity_scan(const CocycleSource& src, const QuasiHypOptions& opts = {});

struct GreenOseledetsRow {
  int index = 0;
  double residual_minus = 0.0;  // angle(G_-, E^s)
  double residual_plus = 0.0;   // angle(G_+, E^u)
};

struct GreenOseledetsTable {
  bool conclusive = false;
  std::vector<GreenOseledetsRow> rows;
  double max_residual = 0.0;
};

GreenOseledetsTable compare_green_oseledets(std::shared_ptr<const TwistMap> map, const OrderedOrbit& orbit,
                                            int n, const GreenOptions& gopts = {});

}  // namespace twistlab
