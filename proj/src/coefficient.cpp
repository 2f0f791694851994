#include "bdie/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bdie/error.hpp"

namespace bdie {

namespace {

Point json_point(const nlohmann::json& spec, const char* key) {
  if (!spec.contains(key)) return Point::Zero();
  const auto& v = spec.at(key);
  if (!v.is_array() || v.size() != 2)
    throw Error(ErrorCategory::config, std::string("'") + key + "' must be a 2-vector");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

CoeffValue CoefficientField::eval(const Point& x) const {
  CoeffValue v = eval_raw(x);
  if (!(v.a > 0.0)) {
    std::ostringstream msg;
    msg << "coefficient " << name() << " is not positive at (" << x.x() << ", " << x.y()
        << "): a = " << v.a;
    throw Error(ErrorCategory::positivity, msg.str());
  }
  return v;
}

double CoefficientField::support_radius(double tail_tol) const {
  if (is_constant()) return 0.0;
  constexpr double kStep = 0.01, kMax = 100.0;
  constexpr int kAngles = 64;
  double last_active = -1.0;
  for (double r = 0.0; r <= kMax; r += kStep) {
    for (int k = 0; k < kAngles; ++k) {
      const double th = 2.0 * std::numbers::pi * k / kAngles;
      const CoeffValue v = eval_raw(r * Point(std::cos(th), std::sin(th)));
      if (v.grad.norm() >= tail_tol || std::abs(v.lap) >= tail_tol) {
        last_active = r;
        break;
      }
    }
  }
  if (last_active < 0.0) return 0.0;
  if (last_active > kMax - 2 * kStep) return std::numeric_limits<double>::infinity();
  return last_active + kStep;
}

ConstantCoefficient::ConstantCoefficient(double value) : value_(value) {
  if (!(value > 0.0)) throw Error(ErrorCategory::positivity, "constant coefficient must be positive");
}

nlohmann::json ConstantCoefficient::describe() const {
  return {{"name", "constant"}, {"value", value_}};
}

GaussianBump::GaussianBump(double beta, double sigma, Point center)
    : beta_(beta), sigma_(sigma), center_(center) {
  if (!(sigma > 0.0)) throw Error(ErrorCategory::config, "gaussian-bump sigma must be positive");
  if (!(1.0 + beta > 0.0)) throw Error(ErrorCategory::positivity, "gaussian-bump needs 1 + beta > 0");
}

CoeffValue GaussianBump::eval_raw(const Point& x) const {
  const Point d = x - center_;
  const double s2 = sigma_ * sigma_;
  const double e = beta_ * std::exp(-d.squaredNorm() / s2);
  return {1.0 + e, -2.0 * e / s2 * d, e * (4.0 * d.squaredNorm() / (s2 * s2) - 4.0 / s2)};
}

nlohmann::json GaussianBump::describe() const {
  return {{"name", "gaussian-bump"},
          {"beta", beta_},
          {"sigma", sigma_},
          {"center", {center_.x(), center_.y()}}};
}

CompactBump::CompactBump(double beta, double sigma, Point center)
    : beta_(beta), sigma_(sigma), center_(center) {
  if (!(sigma > 0.0)) throw Error(ErrorCategory::config, "compact-bump sigma must be positive");
  if (!(1.0 + beta > 0.0)) throw Error(ErrorCategory::positivity, "compact-bump needs 1 + beta > 0");
}

CoeffValue CompactBump::eval_raw(const Point& x) const {
  const Point d = x - center_;
  const double s2 = sigma_ * sigma_;
  const double u = 1.0 - d.squaredNorm() / s2;
  if (u <= 0.0) return {1.0, Point::Zero(), 0.0};
  const double u2 = u * u, u3 = u2 * u;
  const double lap = 48.0 * u2 * d.squaredNorm() / (s2 * s2) - 16.0 * u3 / s2;
  return {1.0 + beta_ * u2 * u2, beta_ * (-8.0 * u3 / s2) * d, beta_ * lap};
}

nlohmann::json CompactBump::describe() const {
  return {{"name", "compact-bump"},
          {"beta", beta_},
          {"sigma", sigma_},
          {"center", {center_.x(), center_.y()}}};
}

LinearCoefficient::LinearCoefficient(double a0, Point gradient) : a0_(a0), g_(gradient) {}

nlohmann::json LinearCoefficient::describe() const {
  return {{"name", "linear"}, {"a0", a0_}, {"gradient", {g_.x(), g_.y()}}};
}

CoefficientPtr make_coefficient(const nlohmann::json& spec) {
  const std::string name = spec.value("name", std::string("constant"));
  if (name == "constant") return std::make_shared<ConstantCoefficient>(spec.value("value", 1.0));
  if (name == "gaussian-bump")
    return std::make_shared<GaussianBump>(spec.value("beta", 1.0), spec.value("sigma", 1.0),
                                          json_point(spec, "center"));
  if (name == "compact-bump")
    return std::make_shared<CompactBump>(spec.value("beta", 1.0), spec.value("sigma", 1.5),
                                         json_point(spec, "center"));
  if (name == "linear") {
    Point g = spec.contains("gradient") ? json_point(spec, "gradient") : Point(1.0, 0.0);
    return std::make_shared<LinearCoefficient>(spec.value("a0", 2.0), g);
  }
  throw Error(ErrorCategory::config, "unknown coefficient '" + name + "'");
}

double weight_eval(const Point& x) {
  const double r2 = x.squaredNorm();
  return std::sqrt(1.0 + r2) * std::log(2.0 + r2);
}

double weight_eval_logexp(const Point& x) {
  const double r2 = x.x() * x.x() + x.y() * x.y();
  return std::exp(0.5 * std::log1p(r2) + std::log(std::log(2.0 + r2)));
}

ConsistencyReport finite_difference_consistency(const CoefficientField& field,
                                                const std::vector<Point>& points, double step) {
  ConsistencyReport rep;
  for (const Point& x : points) {
    const CoeffValue v = field.eval_raw(x);
    const Point ex(step, 0.0), ey(0.0, step);
    const double axp = field.eval_raw(x + ex).a, axm = field.eval_raw(x - ex).a;
    const double ayp = field.eval_raw(x + ey).a, aym = field.eval_raw(x - ey).a;
    const Point g_fd((axp - axm) / (2 * step), (ayp - aym) / (2 * step));
    // the Laplacian uses a larger step; the second difference loses digits quickly
    const double hl = 1e-3;
    const Point lx(hl, 0.0), ly(0.0, hl);
    const double lap_fd = (field.eval_raw(x + lx).a + field.eval_raw(x - lx).a +
                           field.eval_raw(x + ly).a + field.eval_raw(x - ly).a - 4.0 * v.a) /
                          (hl * hl);
    const double gscale = std::max(v.grad.norm(), 1e-3 * v.a);
    const double lscale = std::max(std::abs(v.lap), 1e-3 * v.a);
    rep.grad_rel = std::max(rep.grad_rel, (g_fd - v.grad).norm() / gscale);
    rep.lap_rel = std::max(rep.lap_rel, std::abs(lap_fd - v.lap) / lscale);
  }
  return rep;
}

nlohmann::json ConditionReport::to_json() const {
  return {{"a_min", a_min},       {"a_max", a_max},         {"sup_w_grad", sup_w_grad},
          {"sup_w2_lap", sup_w2_lap}, {"outer_ring", outer_ring}, {"half_ring", half_ring},
          {"cond1", cond1},       {"cond2", cond2},         {"cond3", cond3},
          {"cond4", cond4}};
}

ConditionReport check_conditions(const CoefficientField& field, const DomainMesh& mesh,
                                 const ConditionThresholds& thresholds) {
  ConditionReport rep;
  rep.a_min = std::numeric_limits<double>::infinity();
  rep.a_max = -std::numeric_limits<double>::infinity();
  auto visit = [&](const Point& x) {
    const CoeffValue v = field.eval_raw(x);
    const double w = weight_eval(x);
    rep.a_min = std::min(rep.a_min, v.a);
    rep.a_max = std::max(rep.a_max, v.a);
    rep.sup_w_grad = std::max(rep.sup_w_grad, w * v.grad.norm());
    rep.sup_w2_lap = std::max(rep.sup_w2_lap, w * w * std::abs(v.lap));
  };
  for (const Point& x : mesh.points()) visit(x);
  for (int i = 0; i < 512; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 512;
    visit(mesh.curve().position(t));
  }

  auto ring = [&](double radius) {
    double m = 0.0;
    for (int k = 0; k < 256; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 256;
      const Point x = radius * Point(std::cos(th), std::sin(th));
      visit(x);
      m = std::max(m, weight_eval(x) * field.eval_raw(x).grad.norm());
    }
    return m;
  };
  rep.outer_ring = ring(mesh.r_trunc());
  rep.half_ring = ring(0.5 * mesh.r_trunc());

  rep.cond1 = rep.a_min > 0.0 && rep.a_min >= field.lower_bound() * (1 - 1e-12) &&
              rep.a_max <= field.upper_bound() * (1 + 1e-12) &&
              std::isfinite(field.lower_bound()) && std::isfinite(field.upper_bound());
  // a growing weighted gradient is the signature of an unbounded product
  rep.cond2 = rep.sup_w_grad <= thresholds.cond2_bound &&
              rep.outer_ring <= std::max(rep.half_ring, thresholds.cond4_tol);
  rep.cond3 = rep.sup_w2_lap <= thresholds.cond3_bound;
  rep.cond4 = rep.outer_ring <= thresholds.cond4_tol;
  return rep;
}

}  // namespace bdie
