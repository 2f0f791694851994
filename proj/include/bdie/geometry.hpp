#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace bdie {

using Point = Eigen::Vector2d;

/// Normals point out of the unbounded domain, i.e. into the bounded complement.
/// For a counterclockwise parametrization that is the left-hand rotation of the
/// tangent; flipping this sign is only used as a negative control in the self test.
inline constexpr int kInwardNormalSign = +1;

/// Smooth closed curve x(t), t in [0, 2pi), counterclockwise and star-shaped with
/// respect to the origin. The polar description r_S(theta) is used by the domain mesh.
class Curve {
 public:
  virtual ~Curve() = default;

  virtual Point position(double t) const = 0;
  virtual Point first_derivative(double t) const = 0;
  virtual Point second_derivative(double t) const = 0;

  /// Radius of the curve along the ray of polar angle theta.
  virtual double polar_radius(double theta) const = 0;
  virtual double polar_radius_derivative(double theta) const = 0;

  virtual std::string name() const = 0;
  virtual nlohmann::json describe() const = 0;

  /// All built-in curves are real-analytic; Nystrom accuracy claims rely on it.
  virtual bool analytic() const { return true; }

  double circumradius() const;
  double min_polar_radius() const;
  /// True if y lies in the bounded complement (strictly inside the curve).
  bool encloses(const Point& y) const;
};

using CurvePtr = std::shared_ptr<const Curve>;

class Circle final : public Curve {
 public:
  explicit Circle(double radius = 1.0);
  Point position(double t) const override;
  Point first_derivative(double t) const override;
  Point second_derivative(double t) const override;
  double polar_radius(double) const override { return radius_; }
  double polar_radius_derivative(double) const override { return 0.0; }
  std::string name() const override { return "circle"; }
  nlohmann::json describe() const override;

 private:
  double radius_;
};

/// (a cos t, b sin t)
class Ellipse final : public Curve {
 public:
  Ellipse(double a, double b);
  Point position(double t) const override;
  Point first_derivative(double t) const override;
  Point second_derivative(double t) const override;
  double polar_radius(double theta) const override;
  double polar_radius_derivative(double theta) const override;
  std::string name() const override { return "ellipse"; }
  nlohmann::json describe() const override;

 private:
  double a_, b_;
};

/// r(t) = 1 + alpha cos(k t), x(t) = r(t) (cos t, sin t)
class Star final : public Curve {
 public:
  Star(double alpha, int k);
  Point position(double t) const override;
  Point first_derivative(double t) const override;
  Point second_derivative(double t) const override;
  double polar_radius(double theta) const override;
  double polar_radius_derivative(double theta) const override;
  std::string name() const override { return "star"; }
  nlohmann::json describe() const override;

 private:
  double alpha_;
  int k_;
};

/// Builds a curve from {"name": ..., params}. Throws Error(config) on unknown names.
CurvePtr make_curve(const nlohmann::json& spec);

/// Checks closure, regularity and simplicity on a sample grid; throws Error(geometry).
void validate_curve(const Curve& curve, int samples = 512);

struct CurvePoint {
  Point point;
  Point tangent;  // unit
  Point normal;   // unit, into the bounded complement
  double speed;
};

CurvePoint curve_eval(const Curve& curve, double t, int normal_sign = kInwardNormalSign);

/// Signed curvature of a counterclockwise curve (positive where convex).
double curvature(const Curve& curve, double t);

/// Equispaced Nystrom grid on S with trapezoidal arc-length weights.
struct BoundaryGrid {
  CurvePtr curve;
  int n = 0;
  int normal_sign = kInwardNormalSign;
  std::vector<double> t;
  std::vector<Point> points;
  std::vector<Point> normals;
  std::vector<Point> tangents;
  std::vector<double> speeds;
  std::vector<double> curvatures;
  std::vector<double> weights;  // (2pi / N) |x'(t_j)|

  double param_step() const;
  double length() const;
  /// Discrete arc-length inner product <u, v>_S.
  double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
};

BoundaryGrid make_boundary_grid(CurvePtr curve, int n, int normal_sign = kInwardNormalSign);

/// A radial level r(theta) = (1 - beta) r_S(theta) + beta rho. Collar levels blend the
/// curve into the circle of radius rho; polar levels have beta = 1.
struct RadialLevel {
  double beta;
  double rho;
};

struct MeshOptions {
  double r_trunc = 4.0;
  double h = 0.1;            // target node spacing
  int order = 8;             // Gauss-Legendre nodes per panel direction
  double growth = 1.5;       // radial panel growth factor outside the collar
  double support_radius = std::numeric_limits<double>::infinity();
};

/// Boundary-fitted polar tensor mesh of Omega ∩ B(0, R_trunc). Elements are
/// (angular panel) x (radial panel) with order x order Gauss-Legendre nodes.
class DomainMesh {
 public:
  struct Element {
    int angular;        // angular panel index
    int radial;         // radial panel index
    int first_node;     // nodes first_node .. first_node + order^2 - 1, row-major (radial, angular)
    bool support;       // inside the coefficient-perturbation support region
  };

  struct Local {
    int element;
    double xi;   // angular local coordinate in [-1, 1]
    double eta;  // radial local coordinate in [-1, 1]
  };

  DomainMesh(CurvePtr curve, const MeshOptions& options);

  const Curve& curve() const { return *curve_; }
  const CurvePtr& curve_ptr() const { return curve_; }
  const MeshOptions& options() const { return options_; }
  int order() const { return options_.order; }
  double r_trunc() const { return options_.r_trunc; }

  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<char>& support_flags() const { return support_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<double>& angular_breaks() const { return theta_breaks_; }
  const std::vector<RadialLevel>& radial_levels() const { return levels_; }

  double level_radius(int level, double theta) const;
  double level_radius_derivative(int level, double theta) const;

  /// Physical position of element-local coordinates and the local area Jacobian.
  Point map(int element, double xi, double eta) const;
  double jacobian(int element, double xi, double eta) const;
  /// Columns: d x / d xi, d x / d eta.
  Eigen::Matrix2d tangent_map(int element, double xi, double eta) const;

  /// Element-local coordinates of y relative to a given element (may lie outside [-1, 1]).
  Local local_coordinates(int element, const Point& y) const;
  /// Element containing y, if y lies in the meshed region.
  std::optional<Local> locate(const Point& y) const;

  double total_weight() const;
  /// Smallest distance from a node to the curve, sampled on the node's own ray.
  double min_node_clearance() const;

 private:
  CurvePtr curve_;
  MeshOptions options_;
  std::vector<double> theta_breaks_;
  std::vector<RadialLevel> levels_;
  std::vector<Element> elements_;
  std::vector<Point> points_;
  std::vector<double> weights_;
  std::vector<char> support_;
};

}  // namespace bdie
