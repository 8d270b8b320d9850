#include "twistlab/lab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "twistlab/error.hpp"

namespace twistlab::lab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const std::string t = trim(v);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(x)) {
    throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  }
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  long x = 0;
  const std::string t = trim(v);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_long(key, v)); }

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define TL_DOUBLE(sec, member)                                                                  \
  Field{#sec, #member, [](const ExperimentConfig& c) -> std::optional<std::string> {           \
          return format_double(c.sec.member);                                                   \
        },                                                                                      \
        [](ExperimentConfig& c, const std::string& v) { c.sec.member = to_double(#sec "." #member, v); }}
#define TL_OPT_DOUBLE(sec, member)                                                              \
  Field{#sec, #member, [](const ExperimentConfig& c) -> std::optional<std::string> {           \
          if (!c.sec.member) return std::nullopt;                                               \
          return format_double(*c.sec.member);                                                  \
        },                                                                                      \
        [](ExperimentConfig& c, const std::string& v) { c.sec.member = to_double(#sec "." #member, v); }}
#define TL_INT(sec, member)                                                                     \
  Field{#sec, #member, [](const ExperimentConfig& c) -> std::optional<std::string> {           \
          return std::to_string(c.sec.member);                                                  \
        },                                                                                      \
        [](ExperimentConfig& c, const std::string& v) {                                         \
          c.sec.member = static_cast<decltype(c.sec.member)>(to_long(#sec "." #member, v));     \
        }}
#define TL_STRING(sec, member)                                                                  \
  Field{#sec, #member, [](const ExperimentConfig& c) -> std::optional<std::string> {           \
          return c.sec.member;                                                                  \
        },                                                                                      \
        [](ExperimentConfig& c, const std::string& v) { c.sec.member = trim(v); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      TL_STRING(map, family),
      TL_DOUBLE(map, K),
      TL_OPT_DOUBLE(map, K_min),
      TL_OPT_DOUBLE(map, K_max),
      TL_OPT_DOUBLE(map, K_step),
      TL_STRING(rotation, kind),
      TL_INT(rotation, p),
      TL_INT(rotation, q),
      TL_STRING(rotation, name),
      TL_OPT_DOUBLE(rotation, value),
      TL_INT(rotation, depth),
      TL_DOUBLE(minimize, tol_grad),
      TL_INT(minimize, max_iters),
      TL_STRING(minimize, init),
      TL_DOUBLE(minimize, continuation_step),
      TL_INT(green, n_max),
      TL_DOUBLE(green, tol_cauchy),
      TL_DOUBLE(green, interlace_margin),
      TL_INT(cocycle, n),
      TL_INT(cocycle, renorm_every),
      TL_INT(cocycle, green_n),
      TL_INT(cocycle, oseledets_n),
      TL_DOUBLE(cone, s0),
      TL_INT(cone, rungs),
      TL_DOUBLE(cone, width_threshold),
      TL_DOUBLE(cone, containment_delta),
      TL_DOUBLE(cone, two_direction_delta),
      Field{"conjugacy", "n_list",
            [](const ExperimentConfig& c) -> std::optional<std::string> { return join(c.conjugacy.n_list); },
            [](ExperimentConfig& c, const std::string& v) { c.conjugacy.n_list = to_int_list("conjugacy.n_list", v); }},
      TL_INT(conjugacy, ladder_levels),
      TL_DOUBLE(classify, gap_factor),
      TL_DOUBLE(classify, lambda_factor),
      TL_STRING(output, dir),
      TL_STRING(output, prefix),
      Field{"run", "seed",
            [](const ExperimentConfig& c) -> std::optional<std::string> { return std::to_string(c.run.seed); },
            [](ExperimentConfig& c, const std::string& v) {
              const long s = to_long("run.seed", v);
              if (s < 0) throw ConfigError("run.seed must be >= 0");
              c.run.seed = static_cast<std::uint64_t>(s);
            }},
      TL_INT(run, threads),
  };
  return table;
}

#undef TL_DOUBLE
#undef TL_OPT_DOUBLE
#undef TL_INT
#undef TL_STRING

const Field& find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields()) {
    if (section == f.section && key == f.key) return f;
  }
  throw ConfigError("unknown config key '" + section + "." + key + "'");
}

}  // namespace

MinimizeOptions ExperimentConfig::minimize_options() const {
  MinimizeOptions o;
  o.tol_grad = minimize.tol_grad;
  o.max_iters = minimize.max_iters;
  o.init = minimize.init == "continuation" ? InitStrategy::continuation : InitStrategy::equispaced;
  o.continuation_step = minimize.continuation_step;
  return o;
}

GreenOptions ExperimentConfig::green_options() const {
  GreenOptions o;
  o.n_max = green.n_max;
  o.tol_cauchy = green.tol_cauchy;
  o.interlace_margin = green.interlace_margin;
  return o;
}

RegularityOptions ExperimentConfig::regularity_options() const {
  RegularityOptions o;
  o.ladder = geometric_ladder(cone.s0, cone.rungs);
  o.width_threshold = cone.width_threshold;
  o.containment_delta = cone.containment_delta;
  o.two_direction_delta = cone.two_direction_delta;
  return o;
}

std::vector<double> ExperimentConfig::scan_values() const {
  if (!has_range()) return {map.K};
  const double lo = *map.K_min, hi = *map.K_max, step = *map.K_step;
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long i = 0; i < count; ++i) {
    // round to the step's decimal grid so that 0.1 * 3 prints as 0.3
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  make_map(c.map_spec());
  const int range_keys = c.map.K_min.has_value() + c.map.K_max.has_value() + c.map.K_step.has_value();
  if (range_keys != 0 && range_keys != 3) throw ConfigError("map: K_min, K_max and K_step go together");
  if (range_keys == 3) {
    if (!(*c.map.K_step > 0.0)) throw ConfigError("map.K_step must be positive");
    if (*c.map.K_min < 0.0 || *c.map.K_max < *c.map.K_min) throw ConfigError("map: empty or negative K range");
  }
  if (c.rotation.kind == "rational") {
    RotationNumber::from_rational({c.rotation.p, c.rotation.q});
  } else if (c.rotation.kind == "irrational") {
    if (c.rotation.depth < 3) throw ConfigError("rotation.depth must be >= 3");
    const double v = c.rotation.value ? *c.rotation.value : named_irrational(c.rotation.name);
    RotationNumber::from_irrational(v, c.rotation.depth, c.rotation.name);
  } else {
    throw ConfigError("rotation.kind must be 'rational' or 'irrational'");
  }
  if (!(c.minimize.tol_grad > 0.0) || c.minimize.max_iters < 1) throw ConfigError("minimize: bad tolerances");
  if (c.minimize.init != "equispaced" && c.minimize.init != "continuation") {
    throw ConfigError("minimize.init must be 'equispaced' or 'continuation'");
  }
  if (!(c.minimize.continuation_step > 0.0)) throw ConfigError("minimize.continuation_step must be positive");
  if (c.green.n_max < 2 || !(c.green.tol_cauchy > 0.0) || !(c.green.interlace_margin >= 0.0)) {
    throw ConfigError("green: n_max >= 2 and positive tolerances required");
  }
  if (c.cocycle.n < 0 || c.cocycle.renorm_every < 1 || c.cocycle.green_n < 1 || c.cocycle.oseledets_n < 2) {
    throw ConfigError("cocycle: iteration counts out of range");
  }
  if (!(c.cone.s0 > 0.0) || c.cone.rungs < 3 || !(c.cone.width_threshold > 0.0) ||
      !(c.cone.containment_delta >= 0.0) || !(c.cone.two_direction_delta >= 0.0)) {
    throw ConfigError("cone: s0 > 0, rungs >= 3 and non-negative deltas required");
  }
  for (std::size_t j = 0; j < c.conjugacy.n_list.size(); ++j) {
    if (c.conjugacy.n_list[j] < 1 || (j && c.conjugacy.n_list[j] <= c.conjugacy.n_list[j - 1])) {
      throw ConfigError("conjugacy.n_list must be increasing positive integers");
    }
  }
  if (c.conjugacy.ladder_levels < 1) throw ConfigError("conjugacy.ladder_levels must be >= 1");
  if (!(c.classify.gap_factor > 0.0) || !(c.classify.lambda_factor > 0.0)) {
    throw ConfigError("classify: factors must be positive");
  }
  if (c.output.dir.empty() || c.output.prefix.empty()) throw ConfigError("output: dir and prefix must be set");
  if (c.run.threads < 0) throw ConfigError("run.threads must be >= 0");
}

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) find_field(section, key).set(cfg, value.data());
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_ini(const ExperimentConfig& cfg) {
  std::string out;
  std::string current;
  for (const Field& f : fields()) {
    if (current != f.section) {
      if (!current.empty()) out += "\n";
      current = f.section;
      out += "[" + current + "]\n";
    }
    const auto v = f.get(cfg);
    if (v) out += std::string(f.key) + " = " + *v + "\n";
  }
  return out;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
  }
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  find_field(section, key).set(cfg, assignment.substr(eq + 1));
}

void apply_environment(ExperimentConfig& cfg) {
  if (const char* dir = std::getenv("TWISTLAB_OUTPUT_DIR"); dir && *dir) cfg.output.dir = dir;
}

}  // namespace twistlab::lab
