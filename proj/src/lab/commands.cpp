#include "twistlab/lab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "twistlab/cocycle.hpp"
#include "twistlab/conjugacy.hpp"
#include "twistlab/error.hpp"
#include "twistlab/green.hpp"
#include "twistlab/regularity.hpp"

namespace twistlab::lab {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> head(const std::vector<double>& v, int n) {
  return {v.begin(), v.begin() + std::min<std::ptrdiff_t>(n, static_cast<std::ptrdiff_t>(v.size()))};
}

long cocycle_length(const ExperimentConfig& cfg, const OrderedOrbit& orbit) {
  return cfg.cocycle.n > 0 ? cfg.cocycle.n : 40L * orbit.size();
}

struct LoadedOrbit {
  json doc;
  OrderedOrbit orbit;
  std::shared_ptr<const TwistMap> map;
};

LoadedOrbit load_orbit(const std::string& path) {
  LoadedOrbit l;
  l.doc = read_json_file(path);
  l.orbit = orbit_from_json(l.doc);
  try {
    l.map = make_map(l.orbit.map);
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("orbit document: ") + e.what());
  }
  return l;
}

std::string fmt(double x) { return format_double(x); }

}  // namespace

OrderedOrbit compute_orbit(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto map = make_map(cfg.map_spec());
  const MinimizeOptions opts = cfg.minimize_options();
  if (cfg.rotation.kind == "rational") {
    const Rational pq{cfg.rotation.p, cfg.rotation.q};
    const MinimizationResult res = minimize_orbit(*map, pq, opts);
    return orbit_points(*map, res.config, res.grad_norm);
  }
  const double value = cfg.rotation.value ? *cfg.rotation.value : named_irrational(cfg.rotation.name);
  const std::string name = cfg.rotation.value ? std::string() : cfg.rotation.name;
  return am_set_approx(*map, value, cfg.rotation.depth, opts, name).orbit;
}

std::string orbit_path(const ExperimentConfig& cfg) {
  return (std::filesystem::path(cfg.output.dir) / (cfg.output.prefix + ".orbit.json")).string();
}

std::string sibling_path(const std::string& orbit_file, const std::string& suffix) {
  std::string base = orbit_file;
  for (const std::string ext : {".orbit.json", ".json"}) {
    if (base.size() > ext.size() && base.compare(base.size() - ext.size(), ext.size(), ext) == 0) {
      base.resize(base.size() - ext.size());
      break;
    }
  }
  return base + "." + suffix;
}

json green_block(const TwistMap& map, const OrderedOrbit& orbit, const ExperimentConfig& cfg) {
  const GreenOptions opts = cfg.green_options();
  const std::vector<GreenLimits> table = green_table(map, orbit, opts);
  json points = json::array();
  std::vector<double> gaps;
  double unc = 0.0, worst_violation = 0.0;
  bool interlaced = true;
  int converged = 0;
  for (int i = 0; i < orbit.size(); ++i) {
    const GreenLimits& g = table[i];
    const GreenSequence seq{orbit.point(i), g.forward, g.backward};
    const InterlacingReport il = check_interlacing(seq, opts.interlace_margin);
    interlaced = interlaced && il.ok;
    worst_violation = std::max(worst_violation, il.max_violation);
    gaps.push_back(g.gap);
    unc = std::max(unc, g.gap_uncertainty);
    converged += g.converged ? 1 : 0;
    json p;
    p["index"] = i;
    p["theta"] = orbit.point(i).theta;
    p["r"] = orbit.rs[i];
    p["s_fwd"] = numbers(head(g.forward, g.n_used));
    p["s_bwd"] = numbers(head(g.backward, g.n_used));
    p["s_plus"] = g.s_plus;
    p["s_minus"] = g.s_minus;
    p["gap"] = g.gap;
    p["gap_uncertainty"] = g.gap_uncertainty;
    p["n_used"] = g.n_used;
    p["residual"] = g.cauchy_residual;
    p["converged"] = g.converged;
    points.push_back(p);
  }
  json block;
  block["n_max"] = opts.n_max;
  block["tol_cauchy"] = opts.tol_cauchy;
  block["summary"] = {{"gap_min", *std::min_element(gaps.begin(), gaps.end())},
                      {"gap_median", median(gaps)},
                      {"gap_uncertainty_max", unc},
                      {"converged_points", converged},
                      {"interlacing_ok", interlaced},
                      {"interlacing_max_violation", worst_violation}};
  block["points"] = points;
  return block;
}

json cocycle_block(std::shared_ptr<const TwistMap> map, const OrderedOrbit& orbit, const ExperimentConfig& cfg) {
  const Track track = orbit.track();
  const CocycleSource src = CocycleSource::from_map(map, track);
  LyapunovOptions lo;
  lo.n = cocycle_length(cfg, orbit);
  lo.renorm_every = cfg.cocycle.renorm_every;
  const LyapunovEstimate fwd = lyapunov_qr(src, lo);
  lo.backward = true;
  const LyapunovEstimate bwd = lyapunov_qr(src, lo);

  json block;
  block["n"] = fwd.n;
  block["renorm_every"] = lo.renorm_every;
  block["renorm_count"] = fwd.renorm_count;
  block["lambda"] = fwd.lambda;
  block["ci_halfwidth"] = fwd.ci_halfwidth;
  block["lambda_plain"] = fwd.lambda_plain;
  block["lambda_fit"] = fwd.lambda_fit;
  block["lambda_backward"] = bwd.lambda;
  block["lambda_periodic"] = fwd.lambda_periodic ? json(*fwd.lambda_periodic) : json(nullptr);

  const GreenOptions gopts = cfg.green_options();
  const std::vector<GreenLimits> table = green_table(*map, orbit, gopts);
  const bool resolved = std::all_of(table.begin(), table.end(),
                                    [](const GreenLimits& g) { return g.gap > 0.0 && g.gap > g.gap_uncertainty; });
  if (resolved) {
    const GreenLyapunov gl = green_lyapunov_estimate(*map, track, 0, cfg.cocycle.green_n, table[0]);
    block["lambda_green"] = {{"value", gl.lambda_green}, {"n", gl.n}, {"norm_bound", gl.norm_bound}};
    const GreenOseledetsTable cmp = compare_green_oseledets(map, orbit, cfg.cocycle.oseledets_n, gopts);
    block["oseledets"] = {{"conclusive", cmp.conclusive},
                          {"n", cfg.cocycle.oseledets_n},
                          {"max_residual", cmp.conclusive ? json(cmp.max_residual) : json(nullptr)}};
  } else {
    block["lambda_green"] = nullptr;
    block["oseledets"] = {{"conclusive", false}, {"n", cfg.cocycle.oseledets_n}, {"max_residual", nullptr}};
  }
  const QuasiHypReport qh = quasi_hyperbolicity_scan(src);
  block["quasi_hyperbolicity"] = {{"classification", to_string(qh.classification)},
                                  {"window", qh.window},
                                  {"n_dirs", qh.n_dirs},
                                  {"min_max_norm", qh.min_max_norm},
                                  {"threshold", qh.threshold}};
  return block;
}

json cone_block(const TwistMap& map, const OrderedOrbit& orbit, const ExperimentConfig& cfg, CsvTable& table) {
  const RegularityOptions ropts = cfg.regularity_options();
  const std::vector<GreenLimits> green = green_table(map, orbit, cfg.green_options());
  const PointCloud cloud = cloud_from_orbit(orbit);
  const RegularityReport rep = regularity_report(cloud, green, ropts);

  table = {};
  table.header = {"index", "theta", "r"};
  for (std::size_t s = 0; s < ropts.ladder.size(); ++s) {
    const std::string k = std::to_string(s);
    table.header.insert(table.header.end(), {"scale_" + k, "count_" + k, "lo_" + k, "hi_" + k});
  }
  table.header.insert(table.header.end(),
                      {"lo", "hi", "width", "regular", "contained", "two_direction", "green_minus", "green_plus"});
  for (std::size_t i = 0; i < rep.cones.size(); ++i) {
    const ConeEstimate& c = rep.cones[i];
    std::vector<std::string> row{std::to_string(i), csv_double(c.base.theta), csv_double(c.base.r)};
    for (const ScaleInterval& s : c.scales) {
      row.push_back(csv_double(s.scale));
      row.push_back(std::to_string(s.count));
      row.push_back(s.count ? csv_double(s.lo) : "");
      row.push_back(s.count ? csv_double(s.hi) : "");
    }
    const bool contained = cone_vs_green(c, green[i], ropts.containment_delta * std::abs(green[i].gap)).contained;
    row.push_back(csv_double(c.lo));
    row.push_back(csv_double(c.hi));
    row.push_back(csv_double(c.angular_width));
    row.push_back(c.angular_width < ropts.width_threshold ? "1" : "0");
    row.push_back(contained ? "1" : "0");
    row.push_back(rep.hyperbolic.applicable ? (rep.hyperbolic.two_direction[i] ? "1" : "0") : "");
    row.push_back(csv_double(green[i].s_minus));
    row.push_back(csv_double(green[i].s_plus));
    table.rows.push_back(std::move(row));
  }

  json block;
  block["ladder"] = numbers(ropts.ladder);
  block["width_threshold"] = ropts.width_threshold;
  block["containment_delta"] = ropts.containment_delta;
  block["two_direction_delta"] = ropts.two_direction_delta;
  block["regular_fraction"] = rep.regular_fraction;
  block["containment_fraction"] = rep.containment_fraction;
  block["two_direction_fraction"] = rep.hyperbolic.applicable ? json(rep.hyperbolic.fraction) : json(nullptr);
  block["max_width"] = rep.max_width;
  block["median_width"] = rep.median_width;
  return block;
}

json conjugacy_block(const TwistMap& map, const OrderedOrbit& orbit, const ExperimentConfig& cfg) {
  std::vector<CircleMapSample> ladder;
  if (!orbit.rho.rational) {
    const auto& conv = orbit.rho.convergents;
    const auto it = std::find(conv.begin(), conv.end(), orbit.approximant);
    if (it == conv.end()) throw SchemaError("orbit document: convergent is not in the expansion of rho");
    const long last = it - conv.begin();
    const long first = std::max(0L, last - cfg.conjugacy.ladder_levels + 1);
    for (long j = first; j < last; ++j) {
      const MinimizationResult res = minimize_orbit(map, conv[j], cfg.minimize_options());
      ladder.push_back(build_conjugacy(orbit_points(map, res.config, res.grad_norm)));
    }
  }
  ladder.push_back(build_conjugacy(orbit));
  const SubadditiveEstimate est = lambda_estimate(ladder, cfg.conjugacy.n_list);

  std::vector<int> pair_ns;
  for (int n : cfg.conjugacy.n_list) {
    if (2 * n <= cfg.conjugacy.n_list.back()) pair_ns.push_back(n);
  }
  if (pair_ns.empty()) pair_ns.push_back(cfg.conjugacy.n_list.front());
  const SubadditivityReport sub = check_subadditivity(ladder.back(), pair_ns);
  const BiLipschitzReport bl = check_bi_lipschitz(ladder.back());

  json block;
  block["n_list"] = est.n_list;
  block["means"] = numbers(est.means);
  block["normalized"] = numbers(est.normalized);
  block["Lambda"] = est.Lambda;
  block["inf_normalized"] = est.inf_normalized;
  json levels = json::array();
  for (const SubadditiveLevel& l : est.levels) {
    levels.push_back({{"p", l.rho.p}, {"q", l.rho.q}, {"means", numbers(l.means)}});
  }
  block["levels"] = levels;
  block["subadditivity"] = {{"ok", sub.ok},
                            {"pairs_tested", sub.pairs_tested},
                            {"max_excess", sub.max_excess},
                            {"noise_budget", sub.noise_budget}};
  block["bi_lipschitz"] = {{"ok", bl.ok},
                           {"min_secant", bl.min_secant},
                           {"max_secant", bl.max_secant},
                           {"lower_bound", bl.lower_bound},
                           {"upper_bound", bl.upper_bound}};
  block["degree_one_residual"] = degree_one_residual(ladder.back());
  block["warnings"] = est.warnings;
  return block;
}

CommandResult cmd_orbit(const ExperimentConfig& cfg) {
  const OrderedOrbit orbit = compute_orbit(cfg);
  const auto map = make_map(cfg.map_spec());
  const std::string path = orbit_path(cfg);
  write_json_file(path, orbit_to_json(*map, orbit));
  return {{path}, "orbit " + std::to_string(orbit.approximant.p) + "/" + std::to_string(orbit.approximant.q) +
                      " at K=" + fmt(orbit.map.K) + ", grad " + fmt(orbit.grad_norm)};
}

CommandResult cmd_green(const std::string& orbit_file, const ExperimentConfig& cfg) {
  LoadedOrbit l = load_orbit(orbit_file);
  l.doc["green"] = green_block(*l.map, l.orbit, cfg);
  write_json_file(orbit_file, l.doc);
  const json& s = l.doc["green"]["summary"];
  return {{orbit_file}, "green: min gap " + fmt(s["gap_min"].get<double>()) + ", uncertainty " +
                            fmt(s["gap_uncertainty_max"].get<double>())};
}

CommandResult cmd_lyapunov(const std::string& orbit_file, const ExperimentConfig& cfg) {
  LoadedOrbit l = load_orbit(orbit_file);
  l.doc["cocycle"] = cocycle_block(l.map, l.orbit, cfg);
  write_json_file(orbit_file, l.doc);
  const json& c = l.doc["cocycle"];
  return {{orbit_file},
          "lyapunov: lambda " + fmt(c["lambda"].get<double>()) + " +- " + fmt(c["ci_halfwidth"].get<double>())};
}

CommandResult cmd_cone(const std::string& orbit_file, const ExperimentConfig& cfg) {
  LoadedOrbit l = load_orbit(orbit_file);
  CsvTable table;
  json block = cone_block(*l.map, l.orbit, cfg, table);
  const std::string csv = sibling_path(orbit_file, "cone.csv");
  block["csv"] = std::filesystem::path(csv).filename().string();
  l.doc["cone"] = block;
  write_csv(csv, table);
  write_json_file(orbit_file, l.doc);
  return {{orbit_file, csv}, "cone: regular fraction " + fmt(block["regular_fraction"].get<double>()) +
                                 ", max width " + fmt(block["max_width"].get<double>())};
}

CommandResult cmd_conjugacy(const std::string& orbit_file, const ExperimentConfig& cfg) {
  LoadedOrbit l = load_orbit(orbit_file);
  l.doc["conjugacy"] = conjugacy_block(*l.map, l.orbit, cfg);
  write_json_file(orbit_file, l.doc);
  return {{orbit_file}, "conjugacy: Lambda " + fmt(l.doc["conjugacy"]["Lambda"].get<double>())};
}

}  // namespace twistlab::lab
