#pragma once

#include <memory>
#include <string>
#include <vector>

#include "twistlab/aubry.hpp"
#include "twistlab/lab/config.hpp"
#include "twistlab/lab/serialize.hpp"

namespace twistlab::lab {

struct CommandResult {
  std::vector<std::string> files;  // written files, JSON first
  std::string summary;             // one line for the terminal
};

// Minimizing orbit for the configured map and rotation target.
OrderedOrbit compute_orbit(const ExperimentConfig& cfg);

std::string orbit_path(const ExperimentConfig& cfg);

// Path of a sibling file: run.orbit.json -> run.<suffix>.
std::string sibling_path(const std::string& orbit_file, const std::string& suffix);

// Result blocks; each command replaces its own block in the orbit document.
json green_block(const TwistMap& map, const OrderedOrbit& orbit, const ExperimentConfig& cfg);
json cocycle_block(std::shared_ptr<const TwistMap> map, const OrderedOrbit& orbit, const ExperimentConfig& cfg);
json cone_block(const TwistMap& map, const OrderedOrbit& orbit, const ExperimentConfig& cfg, CsvTable& table);
json conjugacy_block(const TwistMap& map, const OrderedOrbit& orbit, const ExperimentConfig& cfg);

CommandResult cmd_orbit(const ExperimentConfig& cfg);
CommandResult cmd_green(const std::string& orbit_file, const ExperimentConfig& cfg);
CommandResult cmd_lyapunov(const std::string& orbit_file, const ExperimentConfig& cfg);
CommandResult cmd_cone(const std::string& orbit_file, const ExperimentConfig& cfg);
CommandResult cmd_conjugacy(const std::string& orbit_file, const ExperimentConfig& cfg);

}  // namespace twistlab::lab
