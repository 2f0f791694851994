#include "doctest.h"

#include <cmath>

#include "bdie/coefficient.hpp"
#include "bdie/error.hpp"

using namespace bdie;

TEST_SUITE("coefficient") {

TEST_CASE("constant field") {
  const ConstantCoefficient one(1.0);
  const CoeffValue v = one.eval(Point(3.0, -2.0));
  CHECK(v.a == 1.0);
  CHECK(v.grad.norm() == 0.0);
  CHECK(v.lap == 0.0);
  CHECK(one.is_constant());
  CHECK(one.support_radius() == 0.0);
}

TEST_CASE("gaussian bump closed forms") {
  const GaussianBump g;
  const CoeffValue v0 = g.eval(Point(0.0, 0.0));
  CHECK(v0.a == doctest::Approx(2.0));
  CHECK(v0.grad.norm() == 0.0);
  CHECK(v0.lap == doctest::Approx(-4.0));

  const CoeffValue v1 = g.eval(Point(1.0, 0.0));
  CHECK(v1.a == doctest::Approx(1.0 + std::exp(-1.0)));
  CHECK(v1.grad.x() == doctest::Approx(-2.0 * std::exp(-1.0)));
  CHECK(std::abs(v1.grad.y()) < 1e-16);
  // lap e^{-r^2} = (4r^2 - 4) e^{-r^2} vanishes on the unit circle
  CHECK(std::abs(v1.lap) < 1e-15);
}

TEST_CASE("declared derivatives agree with finite differences") {
  const std::vector<Point> pts = {{0.3, 0.1}, {1.2, -0.7}, {-2.0, 0.5}, {0.0, 1.4}};
  for (const CoefficientPtr& f : {CoefficientPtr(std::make_shared<GaussianBump>(1.0, 1.0)),
                                  CoefficientPtr(std::make_shared<GaussianBump>(0.5, 1.3, Point(0.2, -0.1))),
                                  CoefficientPtr(std::make_shared<CompactBump>(1.0, 1.5)),
                                  CoefficientPtr(std::make_shared<LinearCoefficient>(2.0, Point(1.0, 0.0)))}) {
    const ConsistencyReport r = finite_difference_consistency(*f, pts);
    CHECK(r.grad_rel < 1e-6);
    CHECK(r.lap_rel < 1e-4);
  }
}

TEST_CASE("weight function") {
  CHECK(weight_eval(Point(0.0, 0.0)) == doctest::Approx(std::log(2.0)));
  CHECK(weight_eval(Point(0.0, 0.0)) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(weight_eval(Point(1.0, 0.0)) == doctest::Approx(std::sqrt(2.0) * std::log(3.0)));
  CHECK(weight_eval(Point(2.0, 0.0)) > weight_eval(Point(1.0, 0.0)));
  for (const Point x : {Point(0.1, 0.2), Point(3.0, -4.0), Point(50.0, 1.0)})
    CHECK(weight_eval_logexp(x) == doctest::Approx(weight_eval(x)).epsilon(1e-13));
}

TEST_CASE("positivity is enforced on evaluation") {
  const LinearCoefficient lin(2.0, Point(1.0, 0.0));
  CHECK(lin.eval(Point(0.0, 0.0)).a == doctest::Approx(2.0));
  try {
    lin.eval(Point(-3.0, 0.0));
    FAIL("no positivity error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::positivity);
  }
}

TEST_CASE("support radius") {
  const double r = GaussianBump().support_radius(1e-10);
  CHECK(r > 4.5);
  CHECK(r < 5.6);
  CHECK(CompactBump(1.0, 1.5).support_radius() <= 1.5 + 0.02);
  CHECK(std::isinf(LinearCoefficient(2.0, Point(1.0, 0.0)).support_radius()));
}

TEST_CASE("coefficient catalog") {
  CHECK(make_coefficient({{"name", "gaussian-bump"}, {"beta", 0.5}})->eval(Point(0, 0)).a == doctest::Approx(1.5));
  CHECK(make_coefficient({{"name", "constant"}, {"value", 3.0}})->is_constant());
  try {
    make_coefficient({{"name", "nope"}});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::config);
  }
}

TEST_CASE("conditions 1-4") {
  MeshOptions o;
  o.r_trunc = 5.0;
  o.h = 0.4;
  const DomainMesh mesh(std::make_shared<Circle>(1.0), o);

  const ConditionReport c1 = check_conditions(ConstantCoefficient(1.0), mesh);
  CHECK(c1.all());
  CHECK(c1.sup_w_grad == 0.0);
  CHECK(c1.sup_w2_lap == 0.0);
  CHECK(c1.outer_ring == 0.0);

  const ConditionReport g = check_conditions(GaussianBump(), mesh);
  CHECK(g.all());
  CHECK(std::isfinite(g.sup_w_grad));
  CHECK(std::isfinite(g.sup_w2_lap));
  CHECK(g.outer_ring < 1e-6);

  // a = 2 + x1 stays positive on this smaller mesh; its weighted gradient grows outward
  MeshOptions small = o;
  small.r_trunc = 1.8;
  small.h = 0.2;
  const DomainMesh m2(std::make_shared<Circle>(1.0), small);
  const ConditionReport lin = check_conditions(LinearCoefficient(2.0, Point(1.0, 0.0)), m2);
  CHECK_FALSE(lin.cond2);
  CHECK_FALSE(lin.cond1);
  CHECK_FALSE(lin.all());
}

}
