#include "doctest.h"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/ellint_2.hpp>

#include "bdie/error.hpp"
#include "bdie/geometry.hpp"

using namespace bdie;
using std::numbers::pi;

namespace {

ErrorCategory category_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected an Error");
  return ErrorCategory::config;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("circle orientation: normal points to the bounded side") {
  const Circle c(1.0);
  const CurvePoint p0 = curve_eval(c, 0.0);
  CHECK(p0.point.x() == doctest::Approx(1.0));
  CHECK(p0.point.y() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p0.normal.x() == doctest::Approx(-1.0));
  CHECK(std::abs(p0.normal.y()) < 1e-15);

  const CurvePoint p1 = curve_eval(c, pi / 2);
  CHECK(std::abs(p1.point.x()) < 1e-15);
  CHECK(p1.point.y() == doctest::Approx(1.0));
  CHECK(std::abs(p1.normal.x()) < 1e-15);
  CHECK(p1.normal.y() == doctest::Approx(-1.0));
  CHECK(p1.speed == doctest::Approx(1.0));
}

TEST_CASE("ellipse point, speed and normal at t = 0") {
  const Ellipse e(2.0, 1.0);
  const CurvePoint p = curve_eval(e, 0.0);
  CHECK(p.point.x() == doctest::Approx(2.0));
  CHECK(p.speed == doctest::Approx(1.0));
  CHECK(p.normal.x() == doctest::Approx(-1.0));
  CHECK(std::abs(p.normal.y()) < 1e-15);
  // x' = (0, 1) and x'' = (-2, 0): kappa = a / b^2
  CHECK(curvature(e, 0.0) == doctest::Approx(2.0));
  CHECK(curvature(Circle(2.0), 0.3) == doctest::Approx(0.5));
}

TEST_CASE("flipped normal sign reverses the normal only") {
  const Circle c(1.0);
  const CurvePoint a = curve_eval(c, 0.7, +1), b = curve_eval(c, 0.7, -1);
  CHECK((a.point - b.point).norm() == 0.0);
  CHECK((a.normal + b.normal).norm() < 1e-15);
}

TEST_CASE("boundary grid weights integrate arc length") {
  const auto circle = std::make_shared<Circle>(1.0);
  const BoundaryGrid g = make_boundary_grid(circle, 64);
  double s = 0.0;
  for (double w : g.weights) s += w;
  CHECK(std::abs(s - 2 * pi) < 1e-12);

  const BoundaryGrid ge = make_boundary_grid(std::make_shared<Ellipse>(2.0, 1.0), 256);
  const double perimeter = 8.0 * boost::math::ellint_2(std::sqrt(3.0) / 2.0);
  CHECK(std::abs(ge.length() - perimeter) < 1e-12);
  CHECK(std::abs(ge.length() - 9.688448220547676) < 1e-12);
}

TEST_CASE("grid size must be even and at least 8") {
  const auto circle = std::make_shared<Circle>(1.0);
  CHECK(category_of([&] { make_boundary_grid(circle, 7); }) == ErrorCategory::discretization);
  CHECK(category_of([&] { make_boundary_grid(circle, 6); }) == ErrorCategory::discretization);
  CHECK_NOTHROW(make_boundary_grid(circle, 8));
}

TEST_CASE("curve catalog and validation") {
  CHECK(make_curve({{"name", "ellipse"}, {"a", 1.5}, {"b", 1.0}})->circumradius() == doctest::Approx(1.5));
  CHECK(category_of([] { make_curve({{"name", "square"}}); }) == ErrorCategory::config);
  CHECK_NOTHROW(validate_curve(Star(0.2, 5)));
  CHECK(category_of([] { validate_curve(Star(1.2, 5)); }) == ErrorCategory::geometry);
  CHECK(Circle(1.0).encloses(Point(0.2, 0.3)));
  CHECK_FALSE(Circle(1.0).encloses(Point(1.2, 0.0)));
}

TEST_CASE("annulus mesh area") {
  MeshOptions o;
  o.r_trunc = 4.0;
  o.h = 0.2;
  const DomainMesh m(std::make_shared<Circle>(1.0), o);
  CHECK(std::abs(m.total_weight() - 15.0 * pi) < 1e-10);
  CHECK(m.min_node_clearance() > 0.0);
}

TEST_CASE("truncation radius inside the curve is rejected") {
  MeshOptions o;
  o.r_trunc = 0.5;
  CHECK(category_of([&] { DomainMesh(std::make_shared<Circle>(1.0), o); }) == ErrorCategory::geometry);
  o.r_trunc = 4.0;
  o.h = -1.0;
  CHECK(category_of([&] { DomainMesh(std::make_shared<Circle>(1.0), o); }) == ErrorCategory::discretization);
}

TEST_CASE("ellipse mesh area converges under h refinement") {
  const auto e = std::make_shared<Ellipse>(1.5, 1.0);
  const double exact = pi * 16.0 - pi * 1.5;
  double prev = INFINITY;
  for (double h : {0.8, 0.4, 0.2, 0.1}) {
    MeshOptions o;
    o.r_trunc = 4.0;
    o.h = h;
    o.order = 4;
    const double err = std::abs(DomainMesh(e, o).total_weight() - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("mesh nodes: inverse map, ordering and support prefix") {
  MeshOptions o;
  o.r_trunc = 5.0;
  o.h = 0.3;
  o.support_radius = 2.5;
  const DomainMesh m(std::make_shared<Ellipse>(1.5, 1.0), o);
  const int p2 = m.order() * m.order();
  bool seen_outside = false;
  for (const auto& el : m.elements()) {
    if (!el.support) seen_outside = true;
    CHECK_FALSE((el.support && seen_outside));
  }
  for (std::size_t k = 0; k < m.size(); k += 37) {
    const auto loc = m.locate(m.points()[k]);
    REQUIRE(loc.has_value());
    CHECK(loc->element == static_cast<int>(k) / p2);
    CHECK((m.map(loc->element, loc->xi, loc->eta) - m.points()[k]).norm() < 1e-12);
    CHECK_FALSE(m.curve().encloses(m.points()[k]));
  }
  CHECK_FALSE(m.locate(Point(0.1, 0.1)).has_value());
  CHECK_FALSE(m.locate(Point(6.0, 0.0)).has_value());
}

}
