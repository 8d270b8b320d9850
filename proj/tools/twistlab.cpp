#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/error.hpp"
#include "twistlab/lab/commands.hpp"
#include "twistlab/lab/config.hpp"
#include "twistlab/lab/scan.hpp"
#include "twistlab/lab/verify.hpp"

namespace lab = twistlab::lab;

namespace {

struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<double> K;
  std::string rho;
  std::optional<int> depth;
  std::string output_dir;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("-c,--config", f.config_file, "experiment config (INI)")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", f.overrides, "override a config field, section.key=value")->take_all();
  cmd->add_option("--K", f.K, "map parameter, same as --set map.K=...");
  cmd->add_option("--rho", f.rho, "rotation target: p/q, a name (golden, silver) or a decimal value");
  cmd->add_option("--depth", f.depth, "convergent depth for irrational targets");
  cmd->add_option("-o,--output-dir", f.output_dir, "output directory");
}

void apply_rho(lab::ExperimentConfig& cfg, const std::string& rho) {
  if (const auto slash = rho.find('/'); slash != std::string::npos) {
    cfg.rotation.kind = "rational";
    lab::apply_override(cfg, "rotation.p=" + rho.substr(0, slash));
    lab::apply_override(cfg, "rotation.q=" + rho.substr(slash + 1));
  } else if (!rho.empty() && (std::isdigit(static_cast<unsigned char>(rho[0])) || rho[0] == '.')) {
    cfg.rotation.kind = "irrational";
    lab::apply_override(cfg, "rotation.value=" + rho);
    cfg.rotation.name.clear();
  } else {
    cfg.rotation.kind = "irrational";
    cfg.rotation.name = rho;
    cfg.rotation.value.reset();
  }
}

lab::ExperimentConfig build_config(const ConfigFlags& f) {
  lab::ExperimentConfig cfg = f.config_file.empty() ? lab::ExperimentConfig{} : lab::load_config(f.config_file);
  lab::apply_environment(cfg);
  for (const std::string& o : f.overrides) lab::apply_override(cfg, o);
  if (f.K) cfg.map.K = *f.K;
  if (!f.rho.empty()) apply_rho(cfg, f.rho);
  if (f.depth) cfg.rotation.depth = *f.depth;
  if (!f.output_dir.empty()) cfg.output.dir = f.output_dir;
  lab::validate(cfg);
  return cfg;
}

void report(const lab::CommandResult& r) {
  std::cout << r.summary << '\n';
  for (const std::string& f : r.files) std::cout << "wrote " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aubry-Mather sets, Green bundles and hyperbolicity diagnostics for twist maps"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string orbit_file;

  auto* orbit = app.add_subcommand("orbit", "compute a minimizing orbit and write its JSON document");
  add_config_flags(orbit, flags);

  std::vector<CLI::App*> on_orbit;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"green", "add Green slope limits to an orbit document"},
           {"lyapunov", "add Lyapunov exponents and Oseledets diagnostics to an orbit document"},
           {"cone", "add multiscale cone estimates (and a CSV table) to an orbit document"},
           {"conjugacy", "add the circle-conjugacy derivative cocycle estimate to an orbit document"}}) {
    auto* cmd = app.add_subcommand(name, help);
    add_config_flags(cmd, flags);
    cmd->add_option("--orbit", orbit_file, "orbit JSON document")->required()->check(CLI::ExistingFile);
    on_orbit.push_back(cmd);
  }

  auto* scan = app.add_subcommand("scan", "classify orbits over a K range and write a CSV table");
  add_config_flags(scan, flags);
  std::optional<double> k_min, k_max, k_step;
  std::optional<int> threads;
  scan->add_option("--K-min", k_min, "first K of the range");
  scan->add_option("--K-max", k_max, "last K of the range");
  scan->add_option("--K-step", k_step, "K increment");
  scan->add_option("--threads", threads, "worker threads (0: all cores)");

  auto* verify = app.add_subcommand("verify", "run the invariant and property suites");
  std::string level = "quick";
  std::string inject;
  std::string verify_out;
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--inject", inject, "replace the map under test by a fault fixture")
      ->check(CLI::IsMember({"det-breaking", "twist-breaking"}));
  verify->add_option("--output", verify_out, "also write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*orbit) {
      report(lab::cmd_orbit(build_config(flags)));
    } else if (*scan) {
      lab::ExperimentConfig cfg = build_config(flags);
      if (k_min) cfg.map.K_min = *k_min;
      if (k_max) cfg.map.K_max = *k_max;
      if (k_step) cfg.map.K_step = *k_step;
      if (threads) cfg.run.threads = *threads;
      lab::validate(cfg);
      const lab::ScanResult res = lab::cmd_scan(cfg);
      for (const lab::ScanRow& r : res.rows) {
        std::cout << "K=" << lab::format_double(r.K) << " " << r.rho_label << ": " << r.classification
                  << (r.error.empty() ? "" : " (" + r.error + ")") << '\n';
      }
      for (const std::string& f : res.files) std::cout << "wrote " << f << '\n';
    } else if (*verify) {
      const auto fault = inject.empty() ? nullptr : lab::make_fault_fixture(inject);
      const lab::VerifyReport rep = lab::run_verify(lab::parse_level(level), fault);
      const lab::json doc = lab::verify_to_json(rep);
      if (!verify_out.empty()) lab::write_json_file(verify_out, doc);
      std::cout << doc.dump(2) << '\n';
      return rep.passed() ? 0 : 1;
    } else {
      const lab::ExperimentConfig cfg = build_config(flags);
      if (*on_orbit[0]) report(lab::cmd_green(orbit_file, cfg));
      if (*on_orbit[1]) report(lab::cmd_lyapunov(orbit_file, cfg));
      if (*on_orbit[2]) report(lab::cmd_cone(orbit_file, cfg));
      if (*on_orbit[3]) report(lab::cmd_conjugacy(orbit_file, cfg));
    }
  } catch (const twistlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const twistlab::SchemaError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return 2;
  } catch (const twistlab::NonConvergence& e) {
    std::cerr << "computation failed: " << e.what() << " (residual " << lab::format_double(e.residual()) << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
