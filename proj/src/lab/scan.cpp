#include "twistlab/lab/scan.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <thread>

#include "twistlab/cocycle.hpp"
#include "twistlab/error.hpp"
#include "twistlab/green.hpp"
#include "twistlab/lab/commands.hpp"
#include "twistlab/regularity.hpp"

namespace twistlab::lab {

std::string classify(double gap_min, double gap_uncertainty, double lambda_qr, double lambda_ci,
                     const ClassifySection& t) {
  if (!std::isfinite(gap_min) || !std::isfinite(gap_uncertainty) || !std::isfinite(lambda_qr) ||
      !std::isfinite(lambda_ci)) {
    return "inconclusive";
  }
  if (gap_min > t.gap_factor * gap_uncertainty && lambda_qr > t.lambda_factor * lambda_ci) return "hyperbolic";
  if (std::abs(gap_min) <= gap_uncertainty && std::abs(lambda_qr) <= lambda_ci) return "curve-like";
  return "inconclusive";
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string rho_label(const ExperimentConfig& cfg) {
  if (cfg.rotation.kind == "rational") return std::to_string(cfg.rotation.p) + "/" + std::to_string(cfg.rotation.q);
  if (!cfg.rotation.value) return cfg.rotation.name;
  return format_double(*cfg.rotation.value);
}

double rho_value(const ExperimentConfig& cfg) {
  if (cfg.rotation.kind == "rational") return static_cast<double>(cfg.rotation.p) / cfg.rotation.q;
  return cfg.rotation.value ? *cfg.rotation.value : named_irrational(cfg.rotation.name);
}

void add_flag(ScanRow& row, const std::string& f) { row.flags += (row.flags.empty() ? "" : ";") + f; }

}  // namespace

ScanRow scan_cell(const ExperimentConfig& base, double K) {
  ExperimentConfig cfg = base;
  cfg.map.K = K;
  cfg.map.K_min.reset();
  cfg.map.K_max.reset();
  cfg.map.K_step.reset();

  ScanRow row;
  row.K = K;
  row.rho_label = rho_label(cfg);
  try {
    row.rho = rho_value(cfg);
    const auto map = make_map(cfg.map_spec());
    const OrderedOrbit orbit = compute_orbit(cfg);
    row.q = orbit.approximant.q;

    const std::vector<GreenLimits> green = green_table(*map, orbit, cfg.green_options());
    std::vector<double> gaps;
    double unc = 0.0;
    bool all_converged = true;
    for (const GreenLimits& g : green) {
      gaps.push_back(g.gap);
      unc = std::max(unc, g.gap_uncertainty);
      all_converged = all_converged && g.converged;
    }
    row.gap_min = *std::min_element(gaps.begin(), gaps.end());
    row.gap_median = median(gaps);
    row.gap_uncertainty = unc;
    if (!all_converged) add_flag(row, "slow-convergence");

    LyapunovOptions lo;
    lo.n = cfg.cocycle.n > 0 ? cfg.cocycle.n : 40L * orbit.size();
    lo.renorm_every = cfg.cocycle.renorm_every;
    const LyapunovEstimate ly = lyapunov_qr(CocycleSource::from_map(map, orbit.track()), lo);
    row.lambda_qr = ly.lambda;
    row.lambda_ci = ly.ci_halfwidth;

    const bool resolved = std::all_of(green.begin(), green.end(),
                                      [](const GreenLimits& g) { return g.gap > 0.0 && g.gap > g.gap_uncertainty; });
    if (resolved) {
      row.lambda_green = green_lyapunov_estimate(*map, orbit.track(), 0, cfg.cocycle.green_n, green[0]).lambda_green;
    }

    try {
      const RegularityReport rep = regularity_report(cloud_from_orbit(orbit), green, cfg.regularity_options());
      row.width_max = rep.max_width;
      row.width_median = rep.median_width;
      row.regular_fraction = rep.regular_fraction;
    } catch (const SparseCloud& e) {
      add_flag(row, "sparse-cloud");
      row.error = e.what();
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.classification = classify(row.gap_min, row.gap_uncertainty, row.lambda_qr, row.lambda_ci, cfg.classify);
  return row;
}

std::vector<ScanRow> run_scan(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<double> Ks = cfg.scan_values();
  std::vector<ScanRow> rows(Ks.size());
  unsigned workers = cfg.run.threads > 0 ? static_cast<unsigned>(cfg.run.threads) : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(Ks.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < Ks.size(); i = next++) rows[i] = scan_cell(cfg, Ks[i]);
    });
  }
  for (auto& t : pool) t.join();
  std::sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
    return a.K != b.K ? a.K < b.K : a.rho < b.rho;
  });
  return rows;
}

namespace {

const std::vector<std::string> kScanHeader = {
    "K", "rho", "rho_label", "q", "gap_min", "gap_median", "gap_uncertainty", "lambda_qr", "lambda_ci",
    "lambda_green", "width_max", "width_median", "regular_fraction", "classification", "flags", "error"};

double parse_cell(const std::string& s) {
  if (s == "nan" || s.empty()) return NAN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return std::stod(s);
}

}  // namespace

CsvTable scan_table(const std::vector<ScanRow>& rows) {
  CsvTable t;
  t.header = kScanHeader;
  for (const ScanRow& r : rows) {
    t.rows.push_back({csv_double(r.K), csv_double(r.rho), r.rho_label, std::to_string(r.q), csv_double(r.gap_min),
                      csv_double(r.gap_median), csv_double(r.gap_uncertainty), csv_double(r.lambda_qr),
                      csv_double(r.lambda_ci), csv_double(r.lambda_green), csv_double(r.width_max),
                      csv_double(r.width_median), csv_double(r.regular_fraction), r.classification, r.flags,
                      r.error});
  }
  return t;
}

std::vector<ScanRow> scan_rows_from_table(const CsvTable& table) {
  if (table.header != kScanHeader) throw SchemaError("scan table: unexpected header");
  std::vector<ScanRow> out;
  for (const auto& c : table.rows) {
    if (c.size() != kScanHeader.size()) throw SchemaError("scan table: ragged row");
    ScanRow r;
    r.K = parse_cell(c[0]);
    r.rho = parse_cell(c[1]);
    r.rho_label = c[2];
    r.q = std::stol(c[3]);
    r.gap_min = parse_cell(c[4]);
    r.gap_median = parse_cell(c[5]);
    r.gap_uncertainty = parse_cell(c[6]);
    r.lambda_qr = parse_cell(c[7]);
    r.lambda_ci = parse_cell(c[8]);
    r.lambda_green = parse_cell(c[9]);
    r.width_max = parse_cell(c[10]);
    r.width_median = parse_cell(c[11]);
    r.regular_fraction = parse_cell(c[12]);
    r.classification = c[13];
    r.flags = c[14];
    r.error = c[15];
    out.push_back(std::move(r));
  }
  return out;
}

ScanResult cmd_scan(const ExperimentConfig& cfg) {
  ScanResult res;
  res.rows = run_scan(cfg);
  const std::string path = (std::filesystem::path(cfg.output.dir) / (cfg.output.prefix + ".scan.csv")).string();
  write_csv(path, scan_table(res.rows));
  res.files.push_back(path);
  return res;
}

}  // namespace twistlab::lab
