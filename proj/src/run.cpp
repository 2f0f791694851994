#include "bdie/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bdie {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Timings {
 public:
  template <typename F>
  auto time(const std::string& label, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = f();
    data_[label] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }
  void set(const std::string& label, double seconds) { data_[label] = seconds; }
  const json& data() const { return data_; }

 private:
  json data_ = json::object();
};

ScalarField make_f(const json& spec) {
  const std::string name = spec.value("name", "");
  if (name == "zero") return [](const Point&) { return 0.0; };
  const double amp = spec.value("amplitude", 1.0);
  const double sigma = spec.value("sigma", 1.0);
  if (!(sigma > 0.0)) throw Error(ErrorCategory::config, "f.sigma must be positive");
  if (name == "gaussian")
    return [amp, sigma](const Point& x) { return amp * std::exp(-x.squaredNorm() / (sigma * sigma)); };
  if (name == "gaussian-dipole")  // x-derivative of a gaussian, mean-zero by symmetry
    return [amp, sigma](const Point& x) {
      const double s2 = sigma * sigma;
      return -2.0 * amp * x.x() / s2 * std::exp(-x.squaredNorm() / s2);
    };
  throw Error(ErrorCategory::unknown_case, "unknown right-hand side '" + name + "'");
}

ScalarField make_phi0(const json& spec) {
  const std::string name = spec.value("name", "");
  const double amp = spec.value("amplitude", 1.0);
  const int mode = spec.value("mode", 1);
  if (name == "zero") return [](const Point&) { return 0.0; };
  if (name == "constant") {
    const double v = spec.value("value", 1.0);
    return [v](const Point&) { return v; };
  }
  if (name == "cos")
    return [amp, mode](const Point& x) { return amp * std::cos(mode * std::atan2(x.y(), x.x())); };
  if (name == "sin")
    return [amp, mode](const Point& x) { return amp * std::sin(mode * std::atan2(x.y(), x.x())); };
  throw Error(ErrorCategory::unknown_case, "unknown boundary datum '" + name + "'");
}

Assertion assert_le(const std::string& name, double value, double tol) {
  return {name, value, tol, "<=", std::isfinite(value) && value <= tol};
}

Assertion assert_ge(const std::string& name, double value, double bound) {
  return {name, value, bound, ">=", std::isfinite(value) && value >= bound};
}

Assertion assert_true(const std::string& name, bool ok) { return {name, 0.0, 0.0, "", ok}; }

bool all_pass(const std::vector<Assertion>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void print_checks(std::ostream& out, const std::vector<Assertion>& checks) {
  for (const auto& c : checks)
  {
    out << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(36) << c.name << std::right;
    if (!c.relation.empty())
      out << std::scientific << std::setprecision(3) << std::setw(12) << c.value << "  " << c.relation << " "
          << c.bound << std::defaultfloat;
    out << "\n";
  }
}

json point_json(const Point& p) { return json::array({p.x(), p.y()}); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream o(path);
  o << std::setw(2) << j << "\n";
}

std::ofstream open_csv(const fs::path& path, const std::string& header) {
  std::ofstream o(path);
  o << std::setprecision(17) << header << "\n";
  return o;
}

json discretization_json(const Discretization& d) {
  return {{"n_boundary", d.grid.n},
          {"mesh_nodes", d.mesh->points().size()},
          {"mesh_elements", d.mesh->elements().size()},
          {"unknown_elements", d.n_unknown_elements},
          {"n_unknown", d.n_unknown},
          {"support_radius", d.support_radius},
          {"f_mean", d.f_mean},
          {"f_abs_mean", d.f_abs_mean},
          {"f_tail", d.f_tail},
          {"curve_length", d.grid.length()}};
}

ConditionReport require_conditions(const RunConfig& cfg, const Discretization& d) {
  const ConditionReport rep = check_conditions(*d.problem.field, *d.mesh, cfg.thresholds);
  if (cfg.enforce_conditions && !rep.all()) {
    std::ostringstream msg;
    msg << "coefficient fails condition(s):";
    if (!rep.cond1) msg << " 1 (bounds/positivity)";
    if (!rep.cond2) msg << " 2 (weighted gradient)";
    if (!rep.cond3) msg << " 3 (weighted Laplacian)";
    if (!rep.cond4) msg << " 4 (decay at R_trunc)";
    throw Error(ErrorCategory::condition_check, msg.str());
  }
  return rep;
}

const ManufacturedCase& require_case(const ProblemSetup& s, const std::string& command) {
  if (!s.manufactured)
    throw Error(ErrorCategory::config, "command '" + command + "' needs data.case (a manufactured solution)");
  return *s.manufactured;
}

double remainder_max(const BdieSystem& s) {
  if (s.n_u == 0) return 0.0;
  return std::max(s.remainder_block().cwiseAbs().maxCoeff(), s.trace_remainder_block().cwiseAbs().maxCoeff());
}

// ---- commands --------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, const ProblemSetup& setup, json& summary, Timings& timings,
              std::ostream& out) {
  const fs::path dir = cfg.output_dir;
  const Discretization d = timings.time("discretize", [&] { return discretize(setup.problem, cfg.discretization); });
  summary["discretization"] = discretization_json(d);
  summary["conditions"] = require_conditions(cfg, d).to_json();
  const BdieSystem sys = timings.time("assemble", [&] { return assemble_system(d); });
  const BdieSolution sol = timings.time("solve", [&] { return solve(sys, cfg.solver); });

  const double psi_norm = std::sqrt(Eigen::Map<const Eigen::VectorXd>(d.grid.weights.data(), d.grid.n)
                                        .dot(sol.psi.cwiseAbs2()));
  const double psi_sum = Eigen::Map<const Eigen::VectorXd>(d.grid.weights.data(), d.grid.n).dot(sol.psi);
  summary["solution"] = {{"method", sol.method},
                         {"residual", sol.residual},
                         {"rcond", sol.rcond},
                         {"iterations", sol.iterations},
                         {"lambda", sol.lambda},
                         {"psi_mean", psi_norm > 0.0 ? std::abs(psi_sum) / psi_norm : 0.0},
                         {"remainder_max", remainder_max(sys)},
                         {"matrix_size", sys.size()},
                         {"layer_warning", sys.layer_warning}};

  const std::vector<Point> probes = default_probe_points(*d.grid.curve);
  const Eigen::VectorXd up = timings.time("probes", [&] { return evaluate_u_field(d, sol, probes); });
  json pj = json::array();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    json p = {{"x", point_json(probes[i])}, {"u", up[static_cast<Eigen::Index>(i)]}};
    if (setup.manufactured) p["u_exact"] = setup.manufactured->u(probes[i]);
    pj.push_back(p);
  }
  summary["probes"] = pj;

  const ManufacturedCase* mc = setup.manufactured ? &*setup.manufactured : nullptr;
  if (mc) {
    summary["case_check"] = check_case(*mc, d, cfg.seed).to_json();
    summary["errors"] = timings.time("equivalence", [&] { return equivalence_check(*mc, d, sol); }).to_json();
  }

  auto bcsv = open_csv(dir / "boundary.csv", mc ? "x,y,psi,psi_exact" : "x,y,psi");
  const Eigen::VectorXd psi_ex = mc ? mc->psi_exact(d.grid) : Eigen::VectorXd();
  for (int j = 0; j < d.grid.n; ++j) {
    bcsv << d.grid.points[j].x() << "," << d.grid.points[j].y() << "," << sol.psi[j];
    if (mc) bcsv << "," << psi_ex[j];
    bcsv << "\n";
  }
  auto dcsv = open_csv(dir / "domain.csv", mc ? "x,y,u,u_exact" : "x,y,u");
  for (int k = 0; k < d.n_unknown; ++k) {
    const Point& x = d.mesh->points()[k];
    dcsv << x.x() << "," << x.y() << "," << sol.u[k];
    if (mc) dcsv << "," << mc->u(x);
    dcsv << "\n";
  }
  out << "solve: " << sys.size() << " unknowns, residual " << sol.residual << "\n";
  if (mc) out << "psi relative error " << summary["errors"]["psi_rel"].get<double>() << ", u relative error "
              << summary["errors"]["u_rel"].get<double>() << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, const ProblemSetup& setup, json& summary, Timings& timings,
               std::ostream& out) {
  const ManufacturedCase& mc = require_case(setup, "verify");
  const Discretization d = timings.time("discretize", [&] { return discretize(setup.problem, cfg.discretization); });
  summary["discretization"] = discretization_json(d);
  summary["conditions"] = require_conditions(cfg, d).to_json();
  std::vector<Assertion> checks;

  const CaseCheck cc = check_case(mc, d, cfg.seed);
  checks.push_back(assert_le("case: f vs finite differences", cc.max_fd_rel, 1e-6));
  checks.push_back(assert_le("case: mean of f", cc.f_mean_rel, cfg.discretization.compat_tol));
  checks.push_back(assert_le("case: mean of exact psi", cc.psi_mean_rel, cfg.discretization.compat_tol));

  const GaussErrors gauss = gauss_identity_errors(d.grid.curve, d.grid.n, d.grid.normal_sign);
  checks.push_back(assert_le("gauss identity", gauss.max(), 1e-10));
  const JumpErrors jumps = timings.time("jumps", [&] { return jump_relation_errors(d.grid, *mc.field); });
  checks.push_back(assert_le("jump relations", jumps.max(), 1e-6));

  const BdieSystem sys = timings.time("assemble", [&] { return assemble_system(d); });
  const double rmax = remainder_max(sys);
  summary["remainder_max"] = rmax;
  if (mc.field->is_constant()) checks.push_back(assert_le("remainder blocks vanish", rmax, 1e-12));

  const GreenResiduals green = timings.time("green", [&] {
    return green_identity_residuals(mc, d, default_probe_points(*d.grid.curve));
  });
  checks.push_back(assert_le("third green identity", green.max_third(), 1e-5));
  checks.push_back(assert_le("third green identity on S", green.max_trace(), 1e-5));

  const ManufacturedCase partner = manufactured_case("bump-steep-dipole", mc.field);
  const SecondGreen sg = second_green_identity(mc, partner, d);
  summary["second_green"] = {{"volume", sg.volume}, {"on_curve", sg.on_curve},
                             {"on_outer_circle", sg.on_outer_circle}, {"residual", sg.residual()}};
  checks.push_back(assert_le("second green identity (relative)",
                             std::abs(sg.residual()) / std::max(1.0, std::abs(sg.volume)), 1e-5));

  const BdieSolution sol = timings.time("solve", [&] { return solve(sys, cfg.solver); });
  const EquivalenceReport eq = timings.time("equivalence", [&] { return equivalence_check(mc, d, sol); });
  summary["equivalence"] = eq.to_json();
  checks.push_back(assert_le("psi - T+u", eq.psi_error, 1e-3));
  checks.push_back(assert_le("V(psi - T+u), undivided", eq.v_residual, 1e-3));
  checks.push_back(assert_le("mean of psi", eq.psi_mean, 1e-10));
  checks.push_back(assert_le("dirichlet recovery", eq.dirichlet_error, 1e-5));
  // the stencil's own truncation error is the yardstick for the PDE residual
  checks.push_back(assert_le("pde residual beyond stencil error", std::abs(eq.pde_residual - eq.pde_floor),
                             std::max(1e-3, eq.pde_floor)));

  const SplitDecayReport split = timings.time("split_decay", [&] {
    return split_decay_study(*mc.field, *d.mesh, d.n_unknown_elements, cfg.split_radii, cfg.seed,
                             cfg.discretization.volume);
  });
  summary["split_decay"] = split.to_json();
  double split_err = 0.0;
  for (const auto& r : split.rows) split_err = std::max(split_err, r.split_error);
  checks.push_back(assert_le("R_s + R_c - R", split_err, 1e-14));
  if (!mc.field->is_constant()) {
    checks.push_back(assert_true("split norms decrease", split.norms_decreasing));
    checks.push_back(assert_true("split factors decrease", split.factors_decreasing));
    checks.push_back(assert_true("split norms <= C * factor", split.bounded));
  }
  auto csv = open_csv(fs::path(cfg.output_dir) / "split_decay.csv", "r,norm,factor");
  for (const auto& r : split.rows) csv << r.r << "," << r.norm << "," << r.factor << "\n";

  summary["assertions"] = to_json(checks);
  print_checks(out, checks);
  return all_pass(checks) ? 0 : 1;
}

int cmd_convergence(const RunConfig& cfg, const ProblemSetup& setup, json& summary, Timings& timings,
                    std::ostream& out) {
  const ManufacturedCase& mc = require_case(setup, "convergence");
  // conditions and compatibility are checked on the finest level up front
  {
    DiscretizationOptions o = cfg.discretization;
    o.n_boundary = cfg.levels.back().n;
    o.h = cfg.levels.back().h;
    if (cfg.levels.back().r_trunc > 0.0) o.r_trunc = cfg.levels.back().r_trunc;
    summary["conditions"] = require_conditions(cfg, discretize(setup.problem, o)).to_json();
  }
  const ConvergenceReport rep = timings.time("convergence", [&] {
    return convergence_study(mc, setup.problem.curve, cfg.discretization, cfg.levels, cfg.solver);
  });
  json rows = json::array();
  auto csv = open_csv(fs::path(cfg.output_dir) / "convergence.csv", "N,h,err_u,err_psi,order");
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    const double order = std::min(r.order_u, r.order_psi);
    csv << r.level.n << "," << r.level.h << "," << r.err_u << "," << r.err_psi << ",";
    if (i > 0) csv << order;
    csv << "\n";
    rows.push_back({{"n_boundary", r.level.n},
                    {"h", r.level.h},
                    {"r_trunc", r.level.r_trunc},
                    {"n_unknown", r.n_unknown},
                    {"err_u", r.err_u},
                    {"err_psi", r.err_psi},
                    {"order_u", i > 0 ? json(r.order_u) : json(nullptr)},
                    {"order_psi", i > 0 ? json(r.order_psi) : json(nullptr)},
                    {"green_residual", r.green},
                    {"psi_residual", r.psi_residual}});
    timings.set("level_" + std::to_string(i), r.seconds);
  }
  summary["levels"] = rows;
  std::vector<Assertion> checks;
  checks.push_back(assert_true("errors decrease", rep.errors_decreasing()));
  if (mc.name != "zero" && !mc.field->is_constant())
    checks.push_back(assert_ge("empirical order", rep.min_order(), 2.0));
  checks.push_back(assert_true("green residual decreases", rep.green_decreasing()));
  checks.push_back(assert_le("green residual, finest level", rep.rows.back().green, 1e-5));
  checks.push_back(assert_le("psi - T+u, finest level", rep.rows.back().psi_residual, 1e-3));
  summary["assertions"] = to_json(checks);
  print_checks(out, checks);
  return all_pass(checks) ? 0 : 1;
}

int cmd_conditioning(const RunConfig& cfg, const ProblemSetup& setup, json& summary, Timings& timings,
                     std::ostream& out) {
  {
    DiscretizationOptions o = cfg.discretization;
    o.n_boundary = cfg.conditioning_n.front();
    summary["conditions"] = require_conditions(cfg, discretize(setup.problem, o)).to_json();
  }
  const auto rows = timings.time("conditioning", [&] {
    return conditioning_study(setup.problem, cfg.discretization, cfg.conditioning_n);
  });
  json rj = json::array();
  auto csv = open_csv(fs::path(cfg.output_dir) / "conditioning.csv", "N,cond_M,sigma_min_V");
  double worst_ratio = 1.0, smin = INFINITY, smax = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv << r.n << "," << r.cond << "," << r.sigma_min_v << "\n";
    rj.push_back({{"n_boundary", r.n},
                  {"cond", r.cond},
                  {"cond_raw", r.cond_raw},
                  {"sigma_min_v", r.sigma_min_v},
                  {"sigma_min_v_raw", r.sigma_min_v_raw},
                  {"constant_mode", r.constant_mode}});
    if (i > 0) worst_ratio = std::max({worst_ratio, r.cond / rows[i - 1].cond, rows[i - 1].cond / r.cond});
    smin = std::min(smin, r.sigma_min_v);
    smax = std::max(smax, r.sigma_min_v);
  }
  summary["rows"] = rj;
  std::vector<Assertion> checks;
  checks.push_back(assert_le("cond ratio per doubling", worst_ratio, 2.0));
  checks.push_back(assert_le("sigma_min(V) spread", (smax - smin) / smax, 0.1));
  summary["assertions"] = to_json(checks);
  print_checks(out, checks);
  return all_pass(checks) ? 0 : 1;
}

}  // namespace

int exit_status(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::positivity:
    case ErrorCategory::condition_check:
    case ErrorCategory::compatibility:
      return 3;
    case ErrorCategory::singular_system:
      return 4;
    default:
      return 2;
  }
}

ProblemSetup build_problem(const RunConfig& cfg) {
  ProblemSetup s;
  s.problem.curve = make_curve(cfg.curve);
  const CoefficientPtr field = cfg.coefficient.is_null() ? nullptr : make_coefficient(cfg.coefficient);
  if (cfg.data.contains("case")) {
    const ManufacturedCase mc = manufactured_case(cfg.data.at("case").get<std::string>(), field);
    s.problem = mc.problem(s.problem.curve);
    s.manufactured = mc;
  } else {
    s.problem.field = field ? field : std::make_shared<ConstantCoefficient>(1.0);
    s.problem.f = make_f(cfg.data.at("f"));
    s.problem.phi0 = make_phi0(cfg.data.at("phi0"));
  }
  return s;
}

json to_json(const std::vector<Assertion>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    if (c.relation.empty())
      a.push_back({{"name", c.name}, {"pass", c.pass}});
    else
      a.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"bound", c.bound}, {"pass", c.pass}});
  return a;
}

std::vector<Assertion> selftest_checks(int normal_sign) {
  std::vector<Assertion> checks;
  const KernelOracleErrors k = kernel_fourier_errors(64, 8, normal_sign);
  checks.push_back(assert_le("single layer, Fourier modes", k.single, 1e-10));
  checks.push_back(assert_le("hypersingular, Fourier modes", k.hypersingular, 1e-10));
  checks.push_back(assert_le("double layer, Fourier modes", k.double_, 1e-10));
  const CurvePtr circle = std::make_shared<Circle>(1.0);
  const CurvePtr ellipse = std::make_shared<Ellipse>(2.0, 1.0);
  checks.push_back(assert_le("gauss identity, circle", gauss_identity_errors(circle, 64, normal_sign).max(), 1e-10));
  checks.push_back(assert_le("gauss identity, ellipse", gauss_identity_errors(ellipse, 128, normal_sign).max(), 1e-10));
  const GaussianBump bump;
  const BoundaryGrid grid = make_boundary_grid(circle, 64, normal_sign);
  checks.push_back(assert_le("jump relations, gaussian bump", jump_relation_errors(grid, bump).max(), 1e-6));
  return checks;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  json summary = {{"config", cfg.to_json()}};
  Timings timings;
  int status = 0;
  const fs::path dir = cfg.output_dir;
  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCategory::config, "cannot create output directory '" + dir.string() + "'");

    if (cfg.command == "selftest") {
      const auto checks = timings.time("selftest", [&] { return selftest_checks(cfg.discretization.normal_sign); });
      summary["assertions"] = to_json(checks);
      print_checks(out, checks);
      status = all_pass(checks) ? 0 : 1;
    } else {
      const ProblemSetup setup = build_problem(cfg);
      if (cfg.command == "solve") status = cmd_solve(cfg, setup, summary, timings, out);
      else if (cfg.command == "verify") status = cmd_verify(cfg, setup, summary, timings, out);
      else if (cfg.command == "convergence") status = cmd_convergence(cfg, setup, summary, timings, out);
      else status = cmd_conditioning(cfg, setup, summary, timings, out);
    }
  } catch (const Error& e) {
    status = exit_status(e.category());
    summary["error"] = {{"category", to_string(e.category())}, {"message", e.what()}};
    err << "error [" << to_string(e.category()) << "]: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    status = exit_status(ErrorCategory::config);
    summary["error"] = {{"category", to_string(ErrorCategory::config)}, {"message", e.what()}};
    err << "error [config]: " << e.what() << "\n";
  }
  summary["status"] = status;
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    write_json(dir / "summary.json", summary);
    write_json(dir / "timings.json", timings.data());
  }
  return status;
}

}  // namespace bdie
