#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twistlab/aubry.hpp"

namespace twistlab {

// The circle map h = pi o f on the projected orbit, kept as lifted samples:
// theta_i (lifted orbit angles) with h~^n(theta_i) = theta_{i+n}.
struct CircleMapSample {
  Rational rho;
  std::vector<double> thetas;
  std::vector<int> order;     // indices sorted by theta mod 1
  std::vector<int> position;  // inverse permutation of order
  double lipschitz_bound = 0.0;
  double K = 0.0;

  int size() const { return static_cast<int>(thetas.size()); }
  double lifted(long i) const;                    // theta_i extended by theta_{i+q} = theta_i + p
  double image(long i, int n) const { return lifted(i + n); }
};

// Throws OrderingViolation (with the witness pair) when the sample is not
// order preserving.
CircleMapSample build_conjugacy(const OrderedOrbit& orbit);

// Secant of h~^n between theta_i and the nearest lift of a sample point at
// distance in [scale/2, scale]; empty when no such neighbour exists.
std::optional<double> secant_derivative(const CircleMapSample& s, int n, int i, double scale);

// g_n(i) = max over the two circular neighbours of -log of the h~^n secant.
std::vector<double> g_values(const CircleMapSample& s, int n);
double mean_g(const CircleMapSample& s, int n);

struct SubadditiveLevel {
  Rational rho;
  std::vector<double> means;  // mean g_n for n in n_list
};

struct SubadditiveEstimate {
  std::vector<int> n_list;
  std::vector<double> means;       // finest level
  std::vector<double> normalized;  // means[j] / n_list[j]
  double Lambda = 0.0;             // slope fit over the largest half of n_list
  double inf_normalized = 0.0;
  std::vector<SubadditiveLevel> levels;
  std::vector<std::string> warnings;
};

// The ladder runs coarse to fine; the finest sample carries the estimate.
SubadditiveEstimate lambda_estimate(const std::vector<CircleMapSample>& ladder, const std::vector<int>& n_list);

struct SubadditivityReport {
  bool ok = true;
  double max_excess = 0.0;  // max of mean g_{n+m} - mean g_n - mean g_m
  double noise_budget = 0.0;
  int pairs_tested = 0;
};

SubadditivityReport check_subadditivity(const CircleMapSample& s, const std::vector<int>& ns);

struct BiLipschitzReport {
  double min_secant = 0.0;
  double max_secant = 0.0;
  double lower_bound = 0.0;  // 1 / (1 + L)
  double upper_bound = 0.0;  // 1 + L + K
  bool ok = false;
};

BiLipschitzReport check_bi_lipschitz(const CircleMapSample& s);

// Largest |h~(theta + 1) - h~(theta) - 1| over the lifted samples.
double degree_one_residual(const CircleMapSample& s);

}  // namespace twistlab
