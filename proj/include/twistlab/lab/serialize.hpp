#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "twistlab/aubry.hpp"
#include "twistlab/twistmap.hpp"

namespace twistlab::lab {

using json = nlohmann::ordered_json;

inline constexpr const char* kOrbitFormat = "twistlab.orbit";
inline constexpr int kOrbitVersion = 1;

json orbit_to_json(const TwistMap& map, const OrderedOrbit& orbit);

// Throws SchemaError on a wrong format tag, an unsupported version or missing
// and ill-typed fields.
OrderedOrbit orbit_from_json(const json& doc);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& doc);

// Non-finite doubles become null.
json number_or_null(double x);
json numbers(const std::vector<double>& xs);

// %.17g, with nan/inf spelled out.
std::string csv_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace twistlab::lab
