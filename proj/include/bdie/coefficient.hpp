#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bdie/geometry.hpp"

namespace bdie {

struct CoeffValue {
  double a = 1.0;
  Point grad = Point::Zero();
  double lap = 0.0;

  Point grad_log() const { return grad / a; }
  double lap_log() const { return lap / a - grad.squaredNorm() / (a * a); }
};

/// Scalar diffusion coefficient with closed-form gradient and Laplacian.
class CoefficientField {
 public:
  virtual ~CoefficientField() = default;

  /// Unchecked evaluation.
  virtual CoeffValue eval_raw(const Point& x) const = 0;
  virtual std::string name() const = 0;
  virtual nlohmann::json describe() const = 0;
  /// Declared bounds 0 < C1 <= a <= C2 (may be infinite for unbounded fields).
  virtual double lower_bound() const = 0;
  virtual double upper_bound() const = 0;
  virtual bool is_constant() const { return false; }

  /// Evaluation that rejects a <= 0 with a positivity error.
  CoeffValue eval(const Point& x) const;

  /// Radius outside which |grad a| and |lap a| stay below `tail_tol` (0 for constants,
  /// infinity if never reached within a generous search radius).
  double support_radius(double tail_tol = 1e-10) const;
};

using CoefficientPtr = std::shared_ptr<const CoefficientField>;

class ConstantCoefficient final : public CoefficientField {
 public:
  explicit ConstantCoefficient(double value = 1.0);
  CoeffValue eval_raw(const Point&) const override { return {value_, Point::Zero(), 0.0}; }
  std::string name() const override { return "constant"; }
  nlohmann::json describe() const override;
  double lower_bound() const override { return value_; }
  double upper_bound() const override { return value_; }
  bool is_constant() const override { return true; }

 private:
  double value_;
};

/// 1 + beta exp(-|x - c|^2 / sigma^2)
class GaussianBump final : public CoefficientField {
 public:
  GaussianBump(double beta = 1.0, double sigma = 1.0, Point center = Point::Zero());
  CoeffValue eval_raw(const Point& x) const override;
  std::string name() const override { return "gaussian-bump"; }
  nlohmann::json describe() const override;
  double lower_bound() const override { return std::min(1.0, 1.0 + beta_); }
  double upper_bound() const override { return std::max(1.0, 1.0 + beta_); }

 private:
  double beta_, sigma_;
  Point center_;
};

/// 1 + beta q(|x - c| / sigma) with q(s) = (1 - s^2)^4 on s < 1, zero outside.
class CompactBump final : public CoefficientField {
 public:
  CompactBump(double beta = 1.0, double sigma = 1.5, Point center = Point::Zero());
  CoeffValue eval_raw(const Point& x) const override;
  std::string name() const override { return "compact-bump"; }
  nlohmann::json describe() const override;
  double lower_bound() const override { return std::min(1.0, 1.0 + beta_); }
  double upper_bound() const override { return std::max(1.0, 1.0 + beta_); }

 private:
  double beta_, sigma_;
  Point center_;
};

/// a0 + g . x. Unbounded; exists to exercise the condition checks.
class LinearCoefficient final : public CoefficientField {
 public:
  LinearCoefficient(double a0, Point gradient);
  CoeffValue eval_raw(const Point& x) const override { return {a0_ + g_.dot(x), g_, 0.0}; }
  std::string name() const override { return "linear"; }
  nlohmann::json describe() const override;
  double lower_bound() const override { return -std::numeric_limits<double>::infinity(); }
  double upper_bound() const override { return std::numeric_limits<double>::infinity(); }

 private:
  double a0_;
  Point g_;
};

CoefficientPtr make_coefficient(const nlohmann::json& spec);

/// omega_2(x) = (1 + |x|^2)^{1/2} ln(2 + |x|^2)
double weight_eval(const Point& x);
/// Same weight through exp/log, used to cross-check the direct formula.
double weight_eval_logexp(const Point& x);

/// Largest relative mismatch between the declared gradient/Laplacian and central
/// differences of the value map (step `step`) over the given points.
struct ConsistencyReport {
  double grad_rel = 0.0;
  double lap_rel = 0.0;
};
ConsistencyReport finite_difference_consistency(const CoefficientField& field,
                                                const std::vector<Point>& points,
                                                double step = 1e-5);

struct ConditionThresholds {
  double cond2_bound = 1e3;   // sup omega_2 |grad a|
  double cond3_bound = 1e3;   // sup omega_2^2 |lap a|
  double cond4_tol = 1e-6;    // omega_2 |grad a| on the outer ring
};

struct ConditionReport {
  double a_min = 0.0, a_max = 0.0;
  double sup_w_grad = 0.0;      // condition 2
  double sup_w2_lap = 0.0;      // condition 3
  double outer_ring = 0.0;      // condition 4 (omega_2 |grad a| at R_trunc)
  double half_ring = 0.0;       // same quantity at R_trunc / 2, for the growth test
  bool cond1 = false, cond2 = false, cond3 = false, cond4 = false;

  bool all() const { return cond1 && cond2 && cond3 && cond4; }
  nlohmann::json to_json() const;
};

ConditionReport check_conditions(const CoefficientField& field, const DomainMesh& mesh,
                                 const ConditionThresholds& thresholds = {});

}  // namespace bdie
