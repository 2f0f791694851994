#include "doctest.h"

#include <cmath>

#include "bdie/bdie_system.hpp"
#include "bdie/error.hpp"
#include "bdie/verification.hpp"

using namespace bdie;

namespace {

DiscretizationOptions small_options(int n = 64, double h = 0.2) {
  DiscretizationOptions o;
  o.n_boundary = n;
  o.h = h;
  o.r_trunc = 4.0;
  return o;
}

CurvePtr unit_circle() { return std::make_shared<Circle>(1.0); }

Eigen::VectorXd mode(const BoundaryGrid& g, int n, bool sine = false) {
  Eigen::VectorXd v(g.n);
  for (int j = 0; j < g.n; ++j) v[j] = sine ? std::sin(n * g.t[j]) : std::cos(n * g.t[j]);
  return v;
}

double weighted_sum(const BoundaryGrid& g, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (int j = 0; j < g.n; ++j) s += g.weights[j] * v[j];
  return s;
}

}  // namespace

TEST_SUITE("bdie-system") {

TEST_CASE("right-hand side F0") {
  const Discretization zero = discretize(manufactured_case("zero").problem(unit_circle()), small_options());
  const F0Data f0z = assemble_F0(zero);
  CHECK(f0z.domain.cwiseAbs().maxCoeff() == 0.0);
  CHECK(f0z.boundary.cwiseAbs().maxCoeff() == 0.0);

  const Discretization d = discretize(manufactured_case("laplace-dipole").problem(unit_circle()), small_options());
  const F0Data f0 = assemble_F0(d);
  CHECK((f0.boundary - 0.5 * mode(d.grid, 1)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(std::abs(F0_at(d, {Point(2, 0)})[0] - 0.25) < 1e-13);
}

TEST_CASE("constant coefficient: remainder blocks vanish and sizes add up") {
  const Discretization d = discretize(manufactured_case("laplace-dipole").problem(unit_circle()), small_options());
  const BdieSystem s = assemble_system(d);
  CHECK(s.size() == d.n_unknown + d.grid.n + 1);
  CHECK(s.n_u == d.n_unknown);
  CHECK(s.n_b == d.grid.n);
  CHECK(s.remainder_block().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(s.trace_remainder_block().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(d.n_unknown > 0);
}

TEST_CASE("dipole data: psi = cos theta and u = x / r^2") {
  const Discretization d = discretize(manufactured_case("laplace-dipole").problem(unit_circle()), small_options());
  const BdieSolution sol = solve(assemble_system(d));
  CHECK((sol.psi - mode(d.grid, 1)).cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::VectorXd u = evaluate_u_field(d, sol, {Point(2, 0), Point(0, 3)});
  CHECK(std::abs(u[0] - 0.5) < 1e-10);
  CHECK(std::abs(u[1]) < 1e-10);
  CHECK(sol.residual < 1e-12);
  CHECK(std::abs(weighted_sum(d.grid, sol.psi)) < 1e-12);
}

TEST_CASE("quadrupole data: psi = 2 sin 2theta and u = sin 2theta / r^2") {
  const Discretization d = discretize(manufactured_case("laplace-quadrupole").problem(unit_circle()), small_options());
  const BdieSolution sol = solve(assemble_system(d));
  CHECK((sol.psi - 2.0 * mode(d.grid, 2, true)).cwiseAbs().maxCoeff() < 1e-10);
  const double th = 0.3, r = 2.5;
  const Eigen::VectorXd u = evaluate_u_field(d, sol, {Point(r * std::cos(th), r * std::sin(th))});
  CHECK(std::abs(u[0] - std::sin(2 * th) / (r * r)) < 1e-10);
}

TEST_CASE("iterative and direct solvers agree") {
  const Discretization d = discretize(manufactured_case("bump-dipole").problem(unit_circle()), small_options(32, 0.4));
  const BdieSystem s = assemble_system(d);
  CHECK((s.matrix - s.matrix.transpose()).cwiseAbs().maxCoeff() > 1e-3);
  const BdieSolution direct = solve(s);
  SolverOptions it;
  it.method = SolveMethod::iterative;
  const BdieSolution iter = solve(s, it);
  CHECK(iter.method == "iterative");
  CHECK(iter.iterations > 0);
  CHECK(iter.residual < 1e-10);
  CHECK((iter.psi - direct.psi).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((iter.u - direct.u).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(weighted_sum(d.grid, direct.psi)) < 1e-12);

  // the representation formula reproduces the collocated values at the unknown nodes
  const std::vector<Point> pts = d.unknown_points();
  const std::vector<Point> some = {pts[0], pts[pts.size() / 2], pts.back()};
  const Eigen::VectorXd u = evaluate_u_field(d, direct, some);
  CHECK(std::abs(u[0] - direct.u[0]) < 1e-9);
  CHECK(std::abs(u[1] - direct.u[pts.size() / 2]) < 1e-9);
  CHECK(std::abs(u[2] - direct.u[pts.size() - 1]) < 1e-9);
}

TEST_CASE("homogeneous data gives the zero solution") {
  const Discretization d = discretize(manufactured_case("zero", std::make_shared<GaussianBump>()).problem(unit_circle()),
                                      small_options(32, 0.4));
  const BdieSolution sol = solve(assemble_system(d));
  CHECK(sol.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.psi.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.lambda == 0.0);
}

TEST_CASE("field evaluation: domain check and decay") {
  const Discretization d = discretize(manufactured_case("laplace-dipole").problem(unit_circle()), small_options());
  const BdieSolution sol = solve(assemble_system(d));
  try {
    evaluate_u_field(d, sol, {Point(0.2, 0.1)});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::domain);
  }
  const Eigen::VectorXd far = evaluate_u_field(d, sol, {Point(10, 0), Point(0, 100), Point(100, 0)});
  CHECK(std::abs(far[0] - 0.1) < 1e-10);
  CHECK(std::abs(far[1]) < 1e-10);
  CHECK(std::abs(far[2] - 0.01) < 1e-10);
}

TEST_CASE("incompatible source is rejected") {
  DirichletProblem p = manufactured_case("zero").problem(unit_circle());
  p.f = [](const Point& x) { return std::exp(-x.squaredNorm()); };
  try {
    discretize(p, small_options());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::compatibility);
  }
}

TEST_CASE("singular matrices are reported") {
  BdieSystem s;
  s.matrix = Eigen::MatrixXd::Zero(5, 5);
  s.matrix(0, 0) = 1.0;
  s.rhs = Eigen::VectorXd::Ones(5);
  s.n_u = 2;
  s.n_b = 2;
  try {
    solve(s);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::singular_system);
  }
}

}
