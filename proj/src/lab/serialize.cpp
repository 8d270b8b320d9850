#include "twistlab/lab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "twistlab/error.hpp"

namespace twistlab::lab {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number_or_null(x));
  return a;
}

json orbit_to_json(const TwistMap& map, const OrderedOrbit& orbit) {
  json doc;
  doc["format"] = kOrbitFormat;
  doc["version"] = kOrbitVersion;
  doc["family"] = orbit.map.family;
  doc["K"] = orbit.map.K;
  json rho;
  if (orbit.rho.rational) {
    rho["p"] = orbit.approximant.p;
    rho["q"] = orbit.approximant.q;
  } else {
    rho["value"] = orbit.rho.value;
    rho["depth"] = orbit.rho.depth;
    rho["name"] = orbit.rho.name;
    rho["convergent"] = {{"p", orbit.approximant.p}, {"q", orbit.approximant.q}};
  }
  doc["rho"] = rho;
  doc["thetas"] = numbers(orbit.thetas);
  doc["rs"] = numbers(orbit.rs);
  json diag;
  diag["grad_norm"] = orbit.grad_norm;
  diag["lipschitz"] = orbit.lipschitz_bound;
  diag["hausdorff_proxy"] = orbit.hausdorff_proxy ? json(*orbit.hausdorff_proxy) : json(nullptr);
  diag["closure_residual"] = orbit.closure_residual;
  diag["action"] = action(map, Configuration{orbit.approximant, orbit.thetas});
  doc["diagnostics"] = diag;
  return doc;
}

namespace {

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(std::string("orbit document: missing field '") + key + "'");
  return obj.at(key);
}

double get_double(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) throw SchemaError(std::string("orbit document: '") + key + "' must be a number");
  return v.get<double>();
}

long get_long(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number_integer()) throw SchemaError(std::string("orbit document: '") + key + "' must be an integer");
  return v.get<long>();
}

std::vector<double> get_doubles(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_array()) throw SchemaError(std::string("orbit document: '") + key + "' must be an array");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw SchemaError(std::string("orbit document: '") + key + "' holds a non-number");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

OrderedOrbit orbit_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("orbit document: not a JSON object");
  const json& fmt = field(doc, "format");
  if (!fmt.is_string() || fmt.get<std::string>() != kOrbitFormat) {
    throw SchemaError("orbit document: format must be '" + std::string(kOrbitFormat) + "'");
  }
  const long version = get_long(doc, "version");
  if (version != kOrbitVersion) {
    throw SchemaError("orbit document: version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kOrbitVersion) + ")");
  }
  OrderedOrbit o;
  const json& fam = field(doc, "family");
  if (!fam.is_string()) throw SchemaError("orbit document: 'family' must be a string");
  o.map = {fam.get<std::string>(), get_double(doc, "K")};
  const json& rho = field(doc, "rho");
  try {
    if (rho.contains("p")) {
      o.approximant = {get_long(rho, "p"), get_long(rho, "q")};
      o.rho = RotationNumber::from_rational(o.approximant);
    } else {
      const json& name = field(rho, "name");
      if (!name.is_string()) throw SchemaError("orbit document: 'rho.name' must be a string");
      o.rho = RotationNumber::from_irrational(get_double(rho, "value"), static_cast<int>(get_long(rho, "depth")),
                                              name.get<std::string>());
      const json& conv = field(rho, "convergent");
      o.approximant = {get_long(conv, "p"), get_long(conv, "q")};
    }
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("orbit document: bad rotation number: ") + e.what());
  }
  o.thetas = get_doubles(doc, "thetas");
  o.rs = get_doubles(doc, "rs");
  if (o.thetas.size() != o.rs.size() || static_cast<long>(o.thetas.size()) != o.approximant.q) {
    throw SchemaError("orbit document: thetas and rs must both hold q entries");
  }
  const json& diag = field(doc, "diagnostics");
  o.grad_norm = get_double(diag, "grad_norm");
  o.lipschitz_bound = get_double(diag, "lipschitz");
  o.closure_residual = get_double(diag, "closure_residual");
  const json& h = field(diag, "hausdorff_proxy");
  if (h.is_number()) {
    o.hausdorff_proxy = h.get<double>();
  } else if (!h.is_null()) {
    throw SchemaError("orbit document: 'hausdorff_proxy' must be a number or null");
  }
  return o;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

namespace {

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace

void write_json_file(const std::string& path, const json& doc) {
  ensure_parent(path);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << doc.dump(2) << '\n';
}

std::string csv_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  ensure_parent(path);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  auto line = [&f](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& c = cells[i];
      const bool quote = c.find_first_of(",\"\n") != std::string::npos;
      if (i) f << ',';
      if (quote) {
        f << '"';
        for (char ch : c) f << (ch == '"' ? std::string("\"\"") : std::string(1, ch));
        f << '"';
      } else {
        f << c;
      }
    }
    f << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  CsvTable t;
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (ch == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      if (t.header.empty()) {
        t.header = std::move(row);
      } else {
        t.rows.push_back(std::move(row));
      }
      row.clear();
    } else {
      cell += ch;
    }
  }
  return t;
}

}  // namespace twistlab::lab
