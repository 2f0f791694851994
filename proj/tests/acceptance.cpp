// Acceptance matrix: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "bdie/run.hpp"

using namespace bdie;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

CurvePtr unit_circle() { return std::make_shared<Circle>(1.0); }

DiscretizationOptions options(int n, double h) {
  DiscretizationOptions o;
  o.n_boundary = n;
  o.h = h;
  return o;
}

// a = 1, phi0 = cos(k theta): the exterior solution is cos(k theta) / r^k and psi = k cos(k theta)
Verdict ac1() {
  double rmax = 0.0, psi_err = 0.0, worst_time = 0.0;
  for (int k : {1, 2, 3, 5}) {
    const auto t0 = Clock::now();
    DirichletProblem p;
    p.curve = unit_circle();
    p.field = std::make_shared<ConstantCoefficient>(1.0);
    p.f = [](const Point&) { return 0.0; };
    p.phi0 = [k](const Point& x) { return std::cos(k * std::atan2(x.y(), x.x())); };
    const Discretization d = discretize(p, options(128, 0.1));
    const BdieSystem s = assemble_system(d);
    const BdieSolution sol = solve(s);
    worst_time = std::max(worst_time, seconds_since(t0));
    rmax = std::max({rmax, s.remainder_block().cwiseAbs().maxCoeff(), s.trace_remainder_block().cwiseAbs().maxCoeff()});
    for (int j = 0; j < d.grid.n; ++j)
      psi_err = std::max(psi_err, std::abs(sol.psi[j] - k * std::cos(k * d.grid.t[j])));
  }
  return {rmax <= 1e-12 && psi_err <= 1e-8 && worst_time <= 10.0,
          fmt("remainder %.1e, psi error %.1e, slowest solve %.2fs", rmax, psi_err, worst_time)};
}

Verdict ac2() {
  const KernelOracleErrors e = kernel_fourier_errors(128);
  const double m = std::max({e.single, e.hypersingular, e.double_});
  return {m <= 1e-10, fmt("V %.1e, L %.1e, W %.1e", e.single, e.hypersingular, e.double_)};
}

Verdict ac3() {
  const double c = gauss_identity_errors(unit_circle(), 128).max();
  const double e = gauss_identity_errors(std::make_shared<Ellipse>(2.0, 1.0), 128).max();
  return {std::max(c, e) <= 1e-10, fmt("circle %.1e, ellipse %.1e", c, e)};
}

Verdict ac4() {
  const JumpErrors j = jump_relation_errors(make_boundary_grid(unit_circle(), 128), GaussianBump());
  return {j.max() <= 1e-6, fmt("V+ %.1e, V- %.1e, W+ %.1e, W- %.1e", j.v_plus, j.v_minus, j.w_plus, j.w_minus)};
}

// manufactured solves at N = 128, h = 0.1, shared by AC5 and AC8
struct CaseSolve {
  EquivalenceReport eq;
  double u20 = 0.0;
  double seconds = 0.0;
};

CaseSolve solve_case(const std::string& name) {
  const auto t0 = Clock::now();
  const ManufacturedCase c = manufactured_case(name);
  const Discretization d = discretize(c.problem(unit_circle()), options(128, 0.1));
  const BdieSolution sol = solve(assemble_system(d));
  CaseSolve r;
  r.u20 = evaluate_u_field(d, sol, {Point(2.0, 0.0)})[0];
  r.seconds = seconds_since(t0);
  r.eq = equivalence_check(c, d, sol);
  return r;
}

const CaseSolve& laplace_solve() {
  static const CaseSolve s = solve_case("laplace-dipole");
  return s;
}

const CaseSolve& bump_solve() {
  static const CaseSolve s = solve_case("bump-dipole");
  return s;
}

// a = 1, phi0 = cos theta: u = x / r^2 and psi = cos theta
Verdict ac5() {
  const CaseSolve& s = laplace_solve();
  const double du = std::abs(s.u20 - 0.5);
  return {s.eq.psi_rel <= 1e-6 && du <= 1e-6 && s.seconds <= 30.0,
          fmt("psi rel %.1e, |u(2,0) - 1/2| %.1e, %.2fs", s.eq.psi_rel, du, s.seconds)};
}

const ConvergenceReport& bump_convergence(double* seconds) {
  static double secs = 0.0;
  static const ConvergenceReport rep = [] {
    const auto t0 = Clock::now();
    const RunConfig cfg = parse_config(nlohmann::json::object());
    ConvergenceReport r = convergence_study(manufactured_case("bump-dipole"), unit_circle(), cfg.discretization, cfg.levels);
    secs = seconds_since(t0);
    return r;
  }();
  if (seconds) *seconds = secs;
  return rep;
}

Verdict ac6() {
  double secs = 0.0;
  const ConvergenceReport& r = bump_convergence(&secs);
  const double order = r.min_order();
  const double res = r.rows.back().psi_residual;
  return {order >= 2.0 && r.errors_decreasing() && res <= 1e-3 && secs <= 300.0,
          fmt("min order %.2f, finest psi residual %.1e, %.1fs", order, res, secs)};
}

Verdict ac7() {
  const ConvergenceReport& bump = bump_convergence(nullptr);
  const RunConfig cfg = parse_config(nlohmann::json::object());
  const ConvergenceReport flat =
      convergence_study(manufactured_case("laplace-dipole"), unit_circle(), cfg.discretization, cfg.levels);
  const double gb = bump.rows.back().green, gf = flat.rows.back().green;
  const bool ok = gb <= 1e-5 && gf <= 1e-5 && bump.green_decreasing() && flat.green_decreasing();
  return {ok, fmt("finest residual: bump %.1e, constant %.1e; decreasing %s/%s", gb, gf,
                  bump.green_decreasing() ? "yes" : "no", flat.green_decreasing() ? "yes" : "no")};
}

Verdict ac8() {
  const double mean = std::max(laplace_solve().eq.psi_mean, bump_solve().eq.psi_mean);
  RunConfig cfg = parse_config({{"data", {{"f", {{"name", "gaussian"}}}, {"phi0", {{"name", "zero"}}}}},
                                {"discretization", {{"n_boundary", 64}, {"h", 0.2}}}});
  cfg.output_dir = (std::filesystem::path(BDIE_TEST_OUT) / "acceptance_incompatible").string();
  std::ostringstream out, err;
  const int status = run(cfg, out, err);
  return {mean <= 1e-10 && status == 3, fmt("psi mean %.1e (a = 1 and bump), incompatible data status %d", mean, status)};
}

Verdict ac9() {
  const ManufacturedCase c = manufactured_case("bump-dipole");
  const Discretization d = discretize(c.problem(unit_circle()), options(64, 0.2));
  const SplitDecayReport s = split_decay_study(*c.field, *d.mesh, d.n_unknown_elements, {2.0, 3.0, 4.0});
  double split_err = 0.0;
  std::string norms;
  for (const auto& r : s.rows) {
    split_err = std::max(split_err, r.split_error);
    norms += fmt("%s%.1e", norms.empty() ? "" : " ", r.norm);
  }
  return {s.ok() && split_err <= 1e-14,
          fmt("norms %s, C %.3f, additivity %.1e", norms.c_str(), s.fitted_c, split_err)};
}

Verdict ac10() {
  const ManufacturedCase c = manufactured_case("bump-dipole");
  const auto rows = conditioning_study(c.problem(unit_circle()), options(32, 0.2), {32, 64, 128, 256});
  double ratio = 1.0, smin = INFINITY, smax = 0.0, raw = 1.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      ratio = std::max({ratio, rows[i].cond / rows[i - 1].cond, rows[i - 1].cond / rows[i].cond});
      raw = std::max(raw, rows[i].cond_raw / rows[i - 1].cond_raw);
    }
    smin = std::min(smin, rows[i].sigma_min_v);
    smax = std::max(smax, rows[i].sigma_min_v);
  }
  const double spread = (smax - smin) / smax;
  return {ratio <= 2.0 && spread <= 0.1,
          fmt("scaled cond ratio %.3f, sigma_min spread %.1e (unscaled cond ratio %.2f)", ratio, spread, raw)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << name << (std::string(name).size() == 3 ? "  " : " ") << (v.pass ? "PASS" : "FAIL") << "  "
              << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
