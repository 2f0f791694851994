#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "bdie/verification.hpp"

namespace bdie {

/// Everything a run needs, after defaults are applied. Field defaults match
/// configs/schema.json.
struct RunConfig {
  std::string command = "solve";
  nlohmann::json curve = {{"name", "circle"}, {"radius", 1.0}};
  nlohmann::json coefficient;  // null: the case's own field, or a = 1
  nlohmann::json data = {{"case", "laplace-dipole"}};
  DiscretizationOptions discretization;
  SolverOptions solver;
  ConditionThresholds thresholds;
  bool enforce_conditions = true;
  std::vector<RefinementLevel> levels = {{32, 0.4, 0.0}, {64, 0.2, 0.0}, {128, 0.1, 0.0}};
  std::vector<int> conditioning_n = {32, 64, 128, 256};
  std::vector<double> split_radii = {2.0, 3.0, 4.0};
  std::string output_dir = "out";
  unsigned seed = 1;
  int threads = 0;  // 0: OpenMP default

  /// Full resolved configuration, echoed into every report.
  nlohmann::json to_json() const;
};

const std::vector<std::string>& command_names();

/// Applies defaults and validates; throws a config error on unknown keys, wrong types or
/// out-of-range values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace bdie
