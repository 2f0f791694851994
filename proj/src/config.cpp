#include "bdie/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bdie/error.hpp"

namespace bdie {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCategory::config, msg); }

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(where + "." + key + " has the wrong type");
  }
}

void check(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

std::string method_name(SolveMethod m) { return m == SolveMethod::direct ? "direct" : "iterative"; }

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"solve", "verify", "convergence", "conditioning", "selftest"};
  return names;
}

nlohmann::json RunConfig::to_json() const {
  const auto& d = discretization;
  json lv = json::array();
  for (const auto& l : levels) lv.push_back({{"n_boundary", l.n}, {"h", l.h}, {"r_trunc", l.r_trunc}});
  return {
      {"command", command},
      {"curve", curve},
      {"coefficient", coefficient},
      {"data", data},
      {"discretization",
       {{"n_boundary", d.n_boundary},
        {"h", d.h},
        {"r_trunc", d.r_trunc},
        {"order", d.order},
        {"growth", d.growth},
        {"margin", d.margin},
        {"tail_tol", d.tail_tol},
        {"polar_order", d.volume.polar_order},
        {"near_factor", d.volume.near_factor}}},
      {"solver",
       {{"method", method_name(solver.method)},
        {"tolerance", solver.tolerance},
        {"max_iterations", solver.max_iterations},
        {"restart", solver.restart},
        {"singular_rcond", solver.singular_rcond}}},
      {"tolerances",
       {{"compatibility", d.compat_tol},
        {"cond2_bound", thresholds.cond2_bound},
        {"cond3_bound", thresholds.cond3_bound},
        {"cond4_tol", thresholds.cond4_tol},
        {"enforce_conditions", enforce_conditions}}},
      {"convergence", {{"levels", lv}}},
      {"conditioning", {{"n_values", conditioning_n}}},
      {"verify", {{"split_radii", split_radii}}},
      {"output_dir", output_dir},
      {"seed", seed},
      {"threads", threads},
      {"normal_sign", d.normal_sign},
  };
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  reject_unknown(j, "config",
                 {"command", "curve", "coefficient", "data", "discretization", "solver", "tolerances",
                  "convergence", "conditioning", "verify", "output_dir", "seed", "threads"});
  read(j, "command", c.command, "config");
  const auto& cmds = command_names();
  check(std::find(cmds.begin(), cmds.end(), c.command) != cmds.end(), "unknown command '" + c.command + "'");

  if (j.contains("curve")) {
    c.curve = j.at("curve");
    check(c.curve.is_object() && c.curve.contains("name"), "curve needs a name");
  }
  if (j.contains("coefficient")) {
    c.coefficient = j.at("coefficient");
    check(c.coefficient.is_null() || (c.coefficient.is_object() && c.coefficient.contains("name")),
          "coefficient needs a name");
  }
  if (j.contains("data")) {
    c.data = j.at("data");
    reject_unknown(c.data, "data", {"case", "f", "phi0"});
    const bool has_case = c.data.contains("case");
    check(has_case != (c.data.contains("f") || c.data.contains("phi0")),
          "data takes either a manufactured case or an (f, phi0) pair");
    if (!has_case) check(c.data.contains("f") && c.data.contains("phi0"), "data needs both f and phi0");
  }

  auto& d = c.discretization;
  if (j.contains("discretization")) {
    const json& s = j.at("discretization");
    reject_unknown(s, "discretization",
                   {"n_boundary", "h", "r_trunc", "order", "growth", "margin", "tail_tol", "polar_order",
                    "near_factor"});
    read(s, "n_boundary", d.n_boundary, "discretization");
    read(s, "h", d.h, "discretization");
    read(s, "r_trunc", d.r_trunc, "discretization");
    read(s, "order", d.order, "discretization");
    read(s, "growth", d.growth, "discretization");
    read(s, "margin", d.margin, "discretization");
    read(s, "tail_tol", d.tail_tol, "discretization");
    read(s, "polar_order", d.volume.polar_order, "discretization");
    read(s, "near_factor", d.volume.near_factor, "discretization");
  }
  check(d.n_boundary >= 8 && d.n_boundary <= 4096 && d.n_boundary % 2 == 0,
        "discretization.n_boundary must be even and in [8, 4096]");
  check(d.h > 0.0 && d.h <= 2.0, "discretization.h must be in (0, 2]");
  check(d.r_trunc > 0.0 && d.r_trunc <= 100.0, "discretization.r_trunc must be in (0, 100]");
  check(d.order >= 2 && d.order <= 16, "discretization.order must be in [2, 16]");
  check(d.growth >= 1.0 && d.growth <= 4.0, "discretization.growth must be in [1, 4]");
  check(d.margin >= 0.0, "discretization.margin must be nonnegative");
  check(d.tail_tol > 0.0 && d.tail_tol < 1.0, "discretization.tail_tol must be in (0, 1)");
  check(d.volume.polar_order >= 4 && d.volume.polar_order <= 64, "discretization.polar_order must be in [4, 64]");
  check(d.volume.near_factor >= 1.0, "discretization.near_factor must be at least 1");

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, "solver", {"method", "tolerance", "max_iterations", "restart", "singular_rcond"});
    std::string method = "direct";
    read(s, "method", method, "solver");
    check(method == "direct" || method == "iterative", "solver.method must be direct or iterative");
    c.solver.method = method == "direct" ? SolveMethod::direct : SolveMethod::iterative;
    read(s, "tolerance", c.solver.tolerance, "solver");
    read(s, "max_iterations", c.solver.max_iterations, "solver");
    read(s, "restart", c.solver.restart, "solver");
    read(s, "singular_rcond", c.solver.singular_rcond, "solver");
  }
  check(c.solver.tolerance > 0.0 && c.solver.tolerance < 1.0, "solver.tolerance must be in (0, 1)");
  check(c.solver.max_iterations >= 1, "solver.max_iterations must be positive");
  check(c.solver.restart >= 1, "solver.restart must be positive");
  check(c.solver.singular_rcond >= 0.0, "solver.singular_rcond must be nonnegative");

  if (j.contains("tolerances")) {
    const json& s = j.at("tolerances");
    reject_unknown(s, "tolerances", {"compatibility", "cond2_bound", "cond3_bound", "cond4_tol", "enforce_conditions"});
    read(s, "compatibility", d.compat_tol, "tolerances");
    read(s, "cond2_bound", c.thresholds.cond2_bound, "tolerances");
    read(s, "cond3_bound", c.thresholds.cond3_bound, "tolerances");
    read(s, "cond4_tol", c.thresholds.cond4_tol, "tolerances");
    read(s, "enforce_conditions", c.enforce_conditions, "tolerances");
  }
  check(d.compat_tol > 0.0, "tolerances.compatibility must be positive");

  if (j.contains("convergence")) {
    const json& s = j.at("convergence");
    reject_unknown(s, "convergence", {"levels"});
    if (s.contains("levels")) {
      c.levels.clear();
      for (const json& l : s.at("levels")) {
        reject_unknown(l, "convergence level", {"n_boundary", "h", "r_trunc"});
        RefinementLevel lvl;
        read(l, "n_boundary", lvl.n, "convergence level");
        read(l, "h", lvl.h, "convergence level");
        read(l, "r_trunc", lvl.r_trunc, "convergence level");
        check(lvl.n >= 8 && lvl.n % 2 == 0 && lvl.h > 0.0, "convergence levels need even n_boundary >= 8 and h > 0");
        c.levels.push_back(lvl);
      }
    }
  }
  check(c.levels.size() >= 2, "convergence needs at least two levels");

  if (j.contains("conditioning")) {
    const json& s = j.at("conditioning");
    reject_unknown(s, "conditioning", {"n_values"});
    read(s, "n_values", c.conditioning_n, "conditioning");
  }
  check(!c.conditioning_n.empty(), "conditioning.n_values must not be empty");
  for (int n : c.conditioning_n) check(n >= 8 && n % 2 == 0, "conditioning.n_values must be even and >= 8");

  if (j.contains("verify")) {
    const json& s = j.at("verify");
    reject_unknown(s, "verify", {"split_radii"});
    read(s, "split_radii", c.split_radii, "verify");
  }
  check(std::is_sorted(c.split_radii.begin(), c.split_radii.end()) &&
            std::adjacent_find(c.split_radii.begin(), c.split_radii.end()) == c.split_radii.end(),
        "verify.split_radii must be strictly increasing");

  read(j, "output_dir", c.output_dir, "config");
  read(j, "seed", c.seed, "config");
  read(j, "threads", c.threads, "config");
  check(c.threads >= 0, "threads must be nonnegative");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail("cannot parse '" + path + "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace bdie
