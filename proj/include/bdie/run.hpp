#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bdie/config.hpp"
#include "bdie/error.hpp"

namespace bdie {

/// Exit statuses: 0 success, 1 a verification assertion failed, 2 configuration or
/// geometry problems, 3 condition or compatibility failures, 4 singular system.
int exit_status(ErrorCategory c);

struct ProblemSetup {
  DirichletProblem problem;
  std::optional<ManufacturedCase> manufactured;
};
/// Resolves curve, coefficient and data from the config catalogs.
ProblemSetup build_problem(const RunConfig& cfg);

/// One verdict line. `relation` is "<=", ">=" or empty for a plain yes/no check.
struct Assertion {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;
  bool pass = false;
};
nlohmann::json to_json(const std::vector<Assertion>& checks);

/// Kernel Fourier oracles, Gauss identities and jump relations at fixed small sizes.
std::vector<Assertion> selftest_checks(int normal_sign = kInwardNormalSign);

/// Runs cfg.command, writes summary.json, timings.json and CSV tables under
/// cfg.output_dir, and returns the exit status. Progress and the pass/fail matrix go to `out`,
/// errors to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace bdie
