#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "twistlab/error.hpp"
#include "twistlab/lab/commands.hpp"
#include "twistlab/lab/config.hpp"
#include "twistlab/lab/scan.hpp"
#include "twistlab/lab/serialize.hpp"
#include "twistlab/lab/verify.hpp"

using namespace twistlab;
using namespace twistlab::lab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("twistlab-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig rational_config(double K, long p, long q, const fs::path& dir) {
  ExperimentConfig c;
  c.map.K = K;
  c.rotation.kind = "rational";
  c.rotation.p = p;
  c.rotation.q = q;
  c.output.dir = dir.string();
  return c;
}

ExperimentConfig golden_config(double K, int depth, const fs::path& dir) {
  ExperimentConfig c;
  c.map.K = K;
  c.rotation.depth = depth;
  c.output.dir = dir.string();
  return c;
}

}  // namespace

TEST_CASE("config: parse, defaults and round trip") {
  const ExperimentConfig c = parse_config(
      "[map]\nK = 1.2\n[rotation]\nkind = rational\np = 13\nq = 21\n"
      "[conjugacy]\nn_list = 1, 2, 4\n[run]\nseed = 42\n");
  CHECK(c.map.K == 1.2);
  CHECK(c.rotation.kind == "rational");
  CHECK(c.rotation.q == 21);
  CHECK(c.conjugacy.n_list == std::vector<int>{1, 2, 4});
  CHECK(c.run.seed == 42);
  CHECK(c.green.n_max == GreenSection{}.n_max);

  CHECK(parse_config(to_ini(c)) == c);

  ExperimentConfig d;
  d.map.K = 0.1 + 0.2;
  d.rotation.value = 1.0 / std::numbers::pi;
  d.rotation.name.clear();
  d.map.K_min = 0.0;
  d.map.K_max = 1.0;
  d.map.K_step = 0.25;
  const ExperimentConfig back = parse_config(to_ini(d));
  CHECK(back == d);
  CHECK(back.map.K == 0.1 + 0.2);
  CHECK(back.scan_values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});

  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("config: errors") {
  CHECK_THROWS_AS(parse_config("[map]\nKK = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[maps]\nK = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("K = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[map]\nK = one\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[map]\nK = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[map]\nK_min = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[rotation]\nkind = rational\np = 2\nq = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[rotation]\nname = \nvalue = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[rotation]\nname = bronze\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[conjugacy]\nn_list = 4, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[green]\ntol_cauchy = 0\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/twistlab.ini"), ConfigError);

  ExperimentConfig c;
  apply_override(c, "green.n_max=100");
  CHECK(c.green.n_max == 100);
  CHECK_THROWS_AS(apply_override(c, "green.n_max"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "green.nmax=1"), ConfigError);
}

TEST_CASE("config: environment override of the output directory") {
  ExperimentConfig c;
  ::setenv("TWISTLAB_OUTPUT_DIR", "/tmp/elsewhere", 1);
  apply_environment(c);
  ::unsetenv("TWISTLAB_OUTPUT_DIR");
  CHECK(c.output.dir == "/tmp/elsewhere");
  ExperimentConfig d;
  apply_environment(d);
  CHECK(d.output.dir == OutputSection{}.dir);
}

TEST_CASE("orbit JSON round trip and schema errors") {
  const auto m = make_map({"standard", 1.2});
  const OrderedOrbit o = fixtures::golden(1.2, 6);
  const json doc = orbit_to_json(*m, o);
  CHECK(doc["format"] == kOrbitFormat);
  CHECK(doc["version"] == kOrbitVersion);
  const OrderedOrbit back = orbit_from_json(doc);
  CHECK(back.thetas == o.thetas);
  CHECK(back.rs == o.rs);
  CHECK(back.approximant == o.approximant);
  CHECK(back.map.K == 1.2);
  CHECK(orbit_to_json(*m, back).dump() == doc.dump());

  json wrong_version = doc;
  wrong_version["version"] = kOrbitVersion + 1;
  CHECK_THROWS_AS(orbit_from_json(wrong_version), SchemaError);
  json wrong_format = doc;
  wrong_format["format"] = "something.else";
  CHECK_THROWS_AS(orbit_from_json(wrong_format), SchemaError);
  json missing = doc;
  missing.erase("thetas");
  CHECK_THROWS_AS(orbit_from_json(missing), SchemaError);

  TempDir tmp("json");
  const std::string bad = (tmp.path / "bad.json").string();
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_AS(read_json_file(bad), SchemaError);
  CHECK_THROWS_AS(read_json_file((tmp.path / "absent.json").string()), ConfigError);

  CHECK(number_or_null(NAN).is_null());
  CHECK(csv_double(INFINITY) == "inf");
  CHECK(csv_double(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV round trip with quoting") {
  TempDir tmp("csv");
  CsvTable t{{"a", "b"}, {{"1", "x,y"}, {"2", "say \"hi\""}}};
  const std::string p = (tmp.path / "t.csv").string();
  write_csv(p, t);
  const CsvTable back = read_csv(p);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
}

TEST_CASE("orbit and green commands on the integrable map") {
  TempDir tmp("integrable");
  ExperimentConfig cfg = rational_config(0.0, 1, 2, tmp.path);
  const CommandResult r = cmd_orbit(cfg);
  REQUIRE(r.files.size() == 1);
  CHECK(r.files[0] == orbit_path(cfg));
  const json doc = read_json_file(r.files[0]);
  const OrderedOrbit o = orbit_from_json(doc);
  CHECK(o.size() == 2);
  CHECK(std::abs(o.rs[0] - 0.5) < 1e-15);
  CHECK(std::abs(centered(o.thetas[1] - o.thetas[0] - 0.5)) < 1e-12);

  const std::string first = slurp(r.files[0]);
  cmd_orbit(cfg);
  CHECK(slurp(r.files[0]) == first);

  cfg.green.n_max = 16;
  cmd_green(r.files[0], cfg);
  const json g = read_json_file(r.files[0])["green"];
  const json& pt = g["points"][0];
  for (int n = 1; n <= 16; ++n) {
    CHECK(pt["s_fwd"][n - 1].get<double>() == doctest::Approx(1.0 / n).epsilon(1e-14));
    CHECK(pt["s_bwd"][n - 1].get<double>() == doctest::Approx(-1.0 / n).epsilon(1e-14));
  }
  CHECK(g["summary"]["gap_min"].get<double>() == doctest::Approx(2.0 / 16.0));
  CHECK(g["summary"]["interlacing_ok"] == true);
}

TEST_CASE("commands on a hyperbolic orbit are idempotent") {
  TempDir tmp("hyperbolic");
  const ExperimentConfig cfg = golden_config(2.0, 7, tmp.path);
  const std::string orbit = cmd_orbit(cfg).files[0];
  cmd_green(orbit, cfg);
  cmd_lyapunov(orbit, cfg);
  const CommandResult cone = cmd_cone(orbit, cfg);
  CHECK(cone.files.size() == 2);
  CHECK(cone.files[1] == sibling_path(orbit, "cone.csv"));
  cmd_conjugacy(orbit, cfg);
  const std::string once = slurp(orbit);
  const std::string csv_once = slurp(cone.files[1]);

  const json doc = json::parse(once);
  CHECK(doc["cocycle"]["lambda"].get<double>() > 0.7);
  CHECK(doc["cocycle"]["lambda_green"].is_object());
  CHECK(doc["green"]["summary"]["gap_min"].get<double>() > 0.5);
  CHECK(doc["cone"]["csv"] == fs::path(cone.files[1]).filename().string());
  CHECK(doc["conjugacy"]["subadditivity"]["ok"] == true);

  cmd_green(orbit, cfg);
  cmd_lyapunov(orbit, cfg);
  cmd_cone(orbit, cfg);
  cmd_conjugacy(orbit, cfg);
  CHECK(slurp(orbit) == once);
  CHECK(slurp(cone.files[1]) == csv_once);

  const std::vector<std::string> keys{"format", "version", "family", "K",     "rho",     "thetas",
                                      "rs",     "diagnostics", "green", "cocycle", "cone", "conjugacy"};
  std::vector<std::string> got;
  for (auto it = doc.begin(); it != doc.end(); ++it) got.push_back(it.key());
  CHECK(got == keys);
}

TEST_CASE("command failures") {
  TempDir tmp("fail");
  const ExperimentConfig cfg = golden_config(1.2, 3, tmp.path);
  const std::string orbit = cmd_orbit(cfg).files[0];
  CHECK_THROWS_AS(cmd_cone(orbit, cfg), SparseCloud);
  CHECK_THROWS_AS(cmd_green((tmp.path / "missing.orbit.json").string(), cfg), ConfigError);

  const ExperimentConfig k0 = golden_config(0.0, 6, tmp.path);
  const std::string line = cmd_orbit(k0).files[0];
  cmd_lyapunov(line, k0);
  CHECK(read_json_file(line)["cocycle"]["lambda_green"].is_null());
}

TEST_CASE("classification rule") {
  const ClassifySection t;
  CHECK(classify(1.0, 0.01, 0.8, 0.01, t) == "hyperbolic");
  CHECK(classify(1.0, 0.2, 0.8, 0.01, t) == "inconclusive");
  CHECK(classify(1.0, 0.01, 0.02, 0.01, t) == "inconclusive");
  CHECK(classify(0.01, 0.02, 0.001, 0.01, t) == "curve-like");
  CHECK(classify(0.01, 0.02, 0.05, 0.01, t) == "inconclusive");
  CHECK(classify(NAN, 0.02, 0.0, 0.01, t) == "inconclusive");
}

TEST_CASE("scan cells at the ends of the K range") {
  ExperimentConfig cfg;
  cfg.rotation.depth = 8;
  const ScanRow k0 = scan_cell(cfg, 0.0);
  CHECK(k0.q == 55);
  CHECK(k0.error.empty());
  CHECK(k0.gap_min == doctest::Approx(2.0 / cfg.green.n_max));
  CHECK(k0.flags.find("slow-convergence") != std::string::npos);
  CHECK(k0.classification == "curve-like");
  CHECK(k0.rho_label == "golden");

  const ScanRow k2 = scan_cell(cfg, 2.0);
  CHECK(k2.classification == "hyperbolic");
  CHECK(k2.lambda_qr == doctest::Approx(0.7856).epsilon(0.01));
  CHECK(k2.gap_min > 1.0);
  CHECK(std::isfinite(k2.lambda_green));

  ExperimentConfig sparse = cfg;
  sparse.rotation.depth = 3;
  const ScanRow sp = scan_cell(sparse, 1.2);
  CHECK(sp.flags.find("sparse-cloud") != std::string::npos);
  CHECK_FALSE(sp.error.empty());
}

TEST_CASE("scan baseline: curve-like below 1, hyperbolic above") {
  TempDir tmp("scan");
  ExperimentConfig cfg;
  cfg.rotation.depth = 8;
  cfg.map.K_min = 0.0;
  cfg.map.K_max = 2.0;
  cfg.map.K_step = 0.1;
  cfg.output.dir = tmp.path.string();
  cfg.run.threads = 4;
  const ScanResult res = cmd_scan(cfg);
  REQUIRE(res.rows.size() == 21);
  for (const ScanRow& r : res.rows) {
    CHECK(r.error.empty());
    if (r.K <= 0.9 + 1e-9) CHECK(r.classification == "curve-like");
    if (r.K >= 1.1 - 1e-9) CHECK(r.classification == "hyperbolic");
  }

  // The classification is reproducible from the written CSV alone.
  const std::vector<ScanRow> back = scan_rows_from_table(read_csv(res.files[0]));
  REQUIRE(back.size() == res.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(classify(back[i].gap_min, back[i].gap_uncertainty, back[i].lambda_qr, back[i].lambda_ci,
                   cfg.classify) == res.rows[i].classification);
  }

  const std::string bytes = slurp(res.files[0]);
  cfg.run.threads = 1;
  cmd_scan(cfg);
  CHECK(slurp(res.files[0]) == bytes);
}

TEST_CASE("verify: quick level passes, fault fixtures are caught") {
  const VerifyReport rep = run_verify(VerifyLevel::quick);
  CHECK(rep.passed());
  for (const std::string& f : rep.failures()) MESSAGE(f);
  const json j = verify_to_json(rep);
  CHECK(j["passed"] == true);
  CHECK(j["level"] == "quick");

  const VerifyReport det = run_verify(VerifyLevel::quick, make_fault_fixture("det-breaking"));
  CHECK_FALSE(det.passed());
  const auto df = det.failures();
  CHECK(std::find(df.begin(), df.end(), "twistmap.det") != df.end());

  const VerifyReport twist = run_verify(VerifyLevel::quick, make_fault_fixture("twist-breaking"));
  const auto tf = twist.failures();
  CHECK(std::find(tf.begin(), tf.end(), "twistmap.twist") != tf.end());
  CHECK(std::find(tf.begin(), tf.end(), "twistmap.det") == tf.end());

  CHECK_THROWS_AS(make_fault_fixture("nope"), ConfigError);
  CHECK_THROWS_AS(parse_level("medium"), ConfigError);
}
