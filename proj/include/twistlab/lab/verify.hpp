#pragma once

#include <memory>
#include <string>
#include <vector>

#include "twistlab/lab/serialize.hpp"
#include "twistlab/twistmap.hpp"

namespace twistlab::lab {

enum class VerifyLevel { quick, full };

VerifyLevel parse_level(const std::string& s);

struct VerifyCheck {
  std::string name;  // module.check
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  VerifyLevel level = VerifyLevel::quick;
  std::vector<VerifyCheck> checks;
  bool passed() const;
  std::vector<std::string> failures() const;
};

// The map-level checks run on `map_override` when given, on the standard map
// otherwise; every other suite keeps the standard family.
VerifyReport run_verify(VerifyLevel level, std::shared_ptr<const TwistMap> map_override = nullptr);

json verify_to_json(const VerifyReport& rep);

// Deliberately broken maps: "det-breaking" scales the momentum by 1.01,
// "twist-breaking" reverses the twist while keeping det = 1.
std::shared_ptr<const TwistMap> make_fault_fixture(const std::string& name, double K = 1.2);

}  // namespace twistlab::lab
