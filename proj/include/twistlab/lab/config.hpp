#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/aubry.hpp"
#include "twistlab/cocycle.hpp"
#include "twistlab/green.hpp"
#include "twistlab/regularity.hpp"
#include "twistlab/twistmap.hpp"

namespace twistlab::lab {

struct MapSection {
  std::string family = "standard";
  double K = 0.0;
  std::optional<double> K_min, K_max, K_step;  // scan range, all or none
  bool operator==(const MapSection&) const = default;
};

struct RotationSection {
  std::string kind = "irrational";  // rational | irrational
  long p = 1, q = 2;
  std::string name = "golden";      // named irrational, or empty when value is given
  std::optional<double> value;
  int depth = 8;
  bool operator==(const RotationSection&) const = default;
};

struct MinimizeSection {
  double tol_grad = 1e-11;
  int max_iters = 200;
  std::string init = "equispaced";
  double continuation_step = 0.1;
  bool operator==(const MinimizeSection&) const = default;
};

struct GreenSection {
  int n_max = 64;
  double tol_cauchy = 1e-9;
  double interlace_margin = 1e-12;
  bool operator==(const GreenSection&) const = default;
};

struct CocycleSection {
  long n = 0;  // 0: 40 periods of the orbit
  int renorm_every = 20;
  int green_n = 200;
  int oseledets_n = 60;
  bool operator==(const CocycleSection&) const = default;
};

struct ConeSection {
  double s0 = 0.1;
  int rungs = 6;
  double width_threshold = 0.02;
  double containment_delta = 0.05;
  double two_direction_delta = 0.1;
  bool operator==(const ConeSection&) const = default;
};

struct ConjugacySection {
  std::vector<int> n_list{1, 2, 4, 8, 16, 32, 64};
  int ladder_levels = 3;
  bool operator==(const ConjugacySection&) const = default;
};

struct ClassifySection {
  double gap_factor = 10.0;
  double lambda_factor = 3.0;
  bool operator==(const ClassifySection&) const = default;
};

struct OutputSection {
  std::string dir = "twistlab-out";
  std::string prefix = "run";
  bool operator==(const OutputSection&) const = default;
};

struct RunSection {
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  bool operator==(const RunSection&) const = default;
};

struct ExperimentConfig {
  MapSection map;
  RotationSection rotation;
  MinimizeSection minimize;
  GreenSection green;
  CocycleSection cocycle;
  ConeSection cone;
  ConjugacySection conjugacy;
  ClassifySection classify;
  OutputSection output;
  RunSection run;
  bool operator==(const ExperimentConfig&) const = default;

  TwistMapSpec map_spec() const { return {map.family, map.K}; }
  MinimizeOptions minimize_options() const;
  GreenOptions green_options() const;
  RegularityOptions regularity_options() const;
  std::vector<double> scan_values() const;  // K grid of the scan range
  bool has_range() const { return map.K_min.has_value(); }
};

// Parses "key = value" lines grouped in [sections]. Throws ConfigError on
// unknown keys, malformed values or failed validation.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string to_ini(const ExperimentConfig& cfg);

// Applies "section.key=value" overrides on top of a config.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// The only environment override: TWISTLAB_OUTPUT_DIR replaces output.dir.
void apply_environment(ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace twistlab::lab
