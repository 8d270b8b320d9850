#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "twistlab/lab/config.hpp"
#include "twistlab/lab/serialize.hpp"

namespace twistlab::lab {

struct ScanRow {
  double K = 0.0;
  double rho = 0.0;
  std::string rho_label;
  long q = 0;
  double gap_min = NAN;
  double gap_median = NAN;
  double gap_uncertainty = NAN;  // largest tail estimate over the orbit
  double lambda_qr = NAN;
  double lambda_ci = NAN;
  double lambda_green = NAN;
  double width_max = NAN;
  double width_median = NAN;
  double regular_fraction = NAN;
  std::string classification = "inconclusive";
  std::string flags;  // ';'-separated, e.g. slow-convergence
  std::string error;
};

// hyperbolic: gap_min > gap_factor * gap_uncertainty and lambda_qr > lambda_factor * lambda_ci.
// curve-like: |gap_min| <= gap_uncertainty and |lambda_qr| <= lambda_ci.
std::string classify(double gap_min, double gap_uncertainty, double lambda_qr, double lambda_ci,
                     const ClassifySection& thresholds);

// One (K, rho) cell. Failures land in row.error; never throws Error.
ScanRow scan_cell(const ExperimentConfig& cfg, double K);

// All cells of the K grid, evaluated concurrently and sorted by (K, rho).
std::vector<ScanRow> run_scan(const ExperimentConfig& cfg);

CsvTable scan_table(const std::vector<ScanRow>& rows);
std::vector<ScanRow> scan_rows_from_table(const CsvTable& table);

struct ScanResult {
  std::vector<std::string> files;
  std::vector<ScanRow> rows;
};

ScanResult cmd_scan(const ExperimentConfig& cfg);

}  // namespace twistlab::lab
