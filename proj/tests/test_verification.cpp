#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "bdie/error.hpp"
#include "bdie/verification.hpp"

using namespace bdie;

namespace {

DiscretizationOptions options(int n, double h, double r_trunc = 4.0) {
  DiscretizationOptions o;
  o.n_boundary = n;
  o.h = h;
  o.r_trunc = r_trunc;
  return o;
}

CurvePtr unit_circle() { return std::make_shared<Circle>(1.0); }

}  // namespace

TEST_SUITE("verification") {

TEST_CASE("manufactured catalog") {
  const auto names = manufactured_case_names();
  CHECK(names.size() == 5);
  for (const auto& n : names) CHECK(manufactured_case(n).name == n);
  try {
    manufactured_case("no-such-case");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::unknown_case);
  }
}

TEST_CASE("bump-dipole source in closed form") {
  const ManufacturedCase c = manufactured_case("bump-dipole");
  for (const Point x : {Point(1.5, 0.2), Point(-0.3, 2.0), Point(3.0, -3.0)}) {
    const double r2 = x.squaredNorm();
    CHECK(c.f(x) == doctest::Approx(2.0 * std::exp(-r2) * x.x() / r2).epsilon(1e-13));
    CHECK(std::abs(fd_divergence_flux(*c.field, c.u, x, 1e-3) - c.f(x)) < 1e-8);
  }
  const ManufacturedCase steep = manufactured_case("bump-steep-dipole");
  const Point y(1.2, 0.7);
  CHECK(steep.lap_u(y) == doctest::Approx(8.0 * y.x() / std::pow(y.squaredNorm(), 3)));
}

TEST_CASE("zero case has exactly vanishing residuals") {
  const ManufacturedCase c = manufactured_case("zero", std::make_shared<GaussianBump>());
  const Discretization d = discretize(c.problem(unit_circle()), options(32, 0.4));
  const GreenResiduals g = green_identity_residuals(c, d, default_probe_points(*d.grid.curve));
  CHECK(g.max_third() == 0.0);
  CHECK(g.max_trace() == 0.0);
  const CaseCheck cc = check_case(c, d);
  CHECK(cc.max_fd_rel == 0.0);
  CHECK(cc.ok());
}

TEST_CASE("Green's third identity: constant coefficient is exact to roundoff") {
  const ManufacturedCase c = manufactured_case("laplace-dipole");
  const Discretization d = discretize(c.problem(unit_circle()), options(64, 0.4));
  const GreenResiduals g = green_identity_residuals(c, d, default_probe_points(*d.grid.curve));
  CHECK(g.points.size() == 10);
  CHECK(g.max_third() <= 1e-12);
  CHECK(g.max_trace() <= 1e-10);
  try {
    green_identity_residuals(c, d, {Point(0.1, 0.0)});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::domain);
  }
}

TEST_CASE("Green's identities for the bump converge") {
  const ManufacturedCase c = manufactured_case("bump-dipole");
  const Discretization coarse = discretize(c.problem(unit_circle()), options(32, 0.4));
  const Discretization fine = discretize(c.problem(unit_circle()), options(64, 0.2));
  const auto probes = default_probe_points(Circle(1.0));
  const double g1 = green_identity_residuals(c, coarse, probes).max_third();
  const double g2 = green_identity_residuals(c, fine, probes).max_third();
  CHECK(g2 < g1);
  CHECK(g2 < 1e-4);

  const SecondGreen sg = second_green_identity(c, manufactured_case("bump-steep-dipole", c.field), fine);
  CHECK(std::abs(sg.residual()) < 1e-5 * std::max(1.0, std::abs(sg.volume)));
  CHECK(std::abs(sg.on_outer_circle) > 1e-4);
}

TEST_CASE("equivalence checks on the dipole") {
  const ManufacturedCase c = manufactured_case("laplace-dipole");
  const Discretization d = discretize(c.problem(unit_circle()), options(64, 0.4));
  const BdieSolution sol = solve(assemble_system(d));
  const EquivalenceReport e = equivalence_check(c, d, sol);
  CHECK(e.psi_error <= 1e-6);
  CHECK(e.psi_rel <= 1e-6);
  CHECK(e.u_error <= 1e-6);
  CHECK(e.v_residual <= 1e-6);
  CHECK(e.dirichlet_error <= 1e-6);
  CHECK(e.psi_mean <= 1e-10);
  CHECK(e.pde_residual <= 10.0 * e.pde_floor + 1e-6);
}

TEST_CASE("split decay: no remainder for a constant coefficient") {
  MeshOptions mo;
  mo.r_trunc = 5.0;
  mo.h = 0.4;
  const DomainMesh mesh(unit_circle(), mo);
  const int n_el = static_cast<int>(mesh.elements().size());
  const SplitDecayReport flat = split_decay_study(ConstantCoefficient(1.0), mesh, n_el, {2.0, 3.0});
  for (const auto& row : flat.rows) {
    CHECK(row.norm == 0.0);
    CHECK(row.factor == 0.0);
  }
}

TEST_CASE("split decay factor of the gaussian bump") {
  const GaussianBump bump;
  for (double r : {2.0, 3.0}) {
    const double expected = weight_eval(Point(r, 0.0)) * 2.0 * r * std::exp(-r * r);
    CHECK(weighted_gradient_tail(bump, r, 6.0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("weighted power iteration") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a.diagonal() << 0.5, 3.0, 1.0;
  CHECK(weighted_norm_estimate(a, Eigen::VectorXd::Ones(3), 60) == doctest::Approx(3.0).epsilon(1e-10));
  // a diagonal operator is unchanged by the weighting
  CHECK(weighted_norm_estimate(a, Eigen::Vector3d(1.0, 4.0, 9.0), 60) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("single layer singular values on the unit circle") {
  const int n = 32;
  const Eigen::VectorXd s = single_layer_singular_values(make_boundary_grid(unit_circle(), n));
  std::vector<double> expected;
  for (int k = 1; k < n / 2; ++k) expected.insert(expected.end(), {0.5 / k, 0.5 / k});
  expected.push_back(1.0 / n);
  expected.push_back(0.0);
  std::sort(expected.rbegin(), expected.rend());
  REQUIRE(s.size() == n);
  for (int i = 0; i < n; ++i) CHECK(std::abs(s[i] - expected[i]) < 1e-8);
}

TEST_CASE("conditioning study stays flat under refinement") {
  const ManufacturedCase c = manufactured_case("bump-dipole");
  const auto rows = conditioning_study(c.problem(unit_circle()), options(32, 0.4), {32, 64});
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].cond / rows[0].cond <= 2.0);
  CHECK(std::abs(rows[1].sigma_min_v / rows[0].sigma_min_v - 1.0) <= 0.1);
  CHECK(rows[1].cond_raw > rows[0].cond_raw);
  for (const auto& r : rows) CHECK(r.constant_mode < 1e-12);
}

TEST_CASE("single layer stays invertible on mean-zero densities for an ellipse") {
  const ManufacturedCase c = manufactured_case("laplace-dipole");
  const auto rows = conditioning_study(c.problem(std::make_shared<Ellipse>(1.5, 1.0)), options(32, 0.4), {32, 64, 128});
  double smin = INFINITY, smax = 0.0;
  for (const auto& r : rows) {
    smin = std::min(smin, r.sigma_min_v);
    smax = std::max(smax, r.sigma_min_v);
  }
  CHECK(smin > 0.05);
  CHECK((smax - smin) / smax <= 0.1);
}

}
