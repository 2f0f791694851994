#include "bdie/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bdie/error.hpp"
#include "bdie/quadrature.hpp"

namespace bdie {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

// segment-segment proper intersection test
bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  auto orient = [](const Point& a, const Point& b, const Point& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  };
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace

double Curve::circumradius() const {
  double r = 0.0;
  for (int i = 0; i < 2048; ++i) r = std::max(r, polar_radius(kTwoPi * i / 2048));
  return r;
}

double Curve::min_polar_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2048; ++i) r = std::min(r, polar_radius(kTwoPi * i / 2048));
  return r;
}

bool Curve::encloses(const Point& y) const {
  return y.norm() < polar_radius(wrap_angle(std::atan2(y.y(), y.x())));
}

// ---------------------------------------------------------------------------

Circle::Circle(double radius) : radius_(radius) {
  if (!(radius > 0.0)) throw Error(ErrorCategory::geometry, "circle radius must be positive");
}

Point Circle::position(double t) const { return radius_ * Point(std::cos(t), std::sin(t)); }
Point Circle::first_derivative(double t) const { return radius_ * Point(-std::sin(t), std::cos(t)); }
Point Circle::second_derivative(double t) const { return -position(t); }
nlohmann::json Circle::describe() const { return {{"name", "circle"}, {"radius", radius_}}; }

Ellipse::Ellipse(double a, double b) : a_(a), b_(b) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCategory::geometry, "ellipse semi-axes must be positive");
}

Point Ellipse::position(double t) const { return {a_ * std::cos(t), b_ * std::sin(t)}; }
Point Ellipse::first_derivative(double t) const { return {-a_ * std::sin(t), b_ * std::cos(t)}; }
Point Ellipse::second_derivative(double t) const { return -position(t); }

double Ellipse::polar_radius(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return a_ * b_ / std::sqrt(b_ * b_ * c * c + a_ * a_ * s * s);
}

double Ellipse::polar_radius_derivative(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  const double d = b_ * b_ * c * c + a_ * a_ * s * s;
  return -a_ * b_ * (a_ * a_ - b_ * b_) * s * c / (d * std::sqrt(d));
}

nlohmann::json Ellipse::describe() const { return {{"name", "ellipse"}, {"a", a_}, {"b", b_}}; }

Star::Star(double alpha, int k) : alpha_(alpha), k_(k) {
  if (!(alpha >= 0.0 && alpha < 1.0) || k < 1)
    throw Error(ErrorCategory::geometry, "star needs 0 <= alpha < 1 and k >= 1");
}

Point Star::position(double t) const {
  const double r = 1.0 + alpha_ * std::cos(k_ * t);
  return r * Point(std::cos(t), std::sin(t));
}

Point Star::first_derivative(double t) const {
  const double r = 1.0 + alpha_ * std::cos(k_ * t);
  const double dr = -alpha_ * k_ * std::sin(k_ * t);
  const Point er(std::cos(t), std::sin(t)), et(-std::sin(t), std::cos(t));
  return dr * er + r * et;
}

Point Star::second_derivative(double t) const {
  const double r = 1.0 + alpha_ * std::cos(k_ * t);
  const double dr = -alpha_ * k_ * std::sin(k_ * t);
  const double ddr = -alpha_ * k_ * k_ * std::cos(k_ * t);
  const Point er(std::cos(t), std::sin(t)), et(-std::sin(t), std::cos(t));
  return (ddr - r) * er + 2.0 * dr * et;
}

double Star::polar_radius(double theta) const { return 1.0 + alpha_ * std::cos(k_ * theta); }
double Star::polar_radius_derivative(double theta) const {
  return -alpha_ * k_ * std::sin(k_ * theta);
}

nlohmann::json Star::describe() const { return {{"name", "star"}, {"alpha", alpha_}, {"k", k_}}; }

CurvePtr make_curve(const nlohmann::json& spec) {
  const std::string name = spec.value("name", std::string("circle"));
  if (name == "circle") return std::make_shared<Circle>(spec.value("radius", 1.0));
  if (name == "ellipse") return std::make_shared<Ellipse>(spec.value("a", 2.0), spec.value("b", 1.0));
  if (name == "star") return std::make_shared<Star>(spec.value("alpha", 0.2), spec.value("k", 5));
  throw Error(ErrorCategory::config, "unknown curve '" + name + "'");
}

void validate_curve(const Curve& curve, int samples) {
  const Point p0 = curve.position(0.0), p1 = curve.position(kTwoPi);
  const double scale = curve.circumradius();
  if ((p0 - p1).norm() > 1e-12 * scale)
    throw Error(ErrorCategory::geometry, "curve is not closed");

  std::vector<Point> pts(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = kTwoPi * i / samples;
    if (!(curve.first_derivative(t).norm() > 1e-12 * scale)) {
      std::ostringstream msg;
      msg << "degenerate parametrization: zero speed at t = " << t;
      throw Error(ErrorCategory::geometry, msg.str());
    }
    pts[i] = curve.position(t);
    // the mesh relies on the polar description agreeing with the parametrization
    const double theta = wrap_angle(std::atan2(pts[i].y(), pts[i].x()));
    if (std::abs(curve.polar_radius(theta) - pts[i].norm()) > 1e-10 * scale)
      throw Error(ErrorCategory::geometry, "curve is not star-shaped about the origin");
  }
  for (int i = 0; i < samples; ++i)
    for (int j = i + 2; j < samples; ++j) {
      if (i == 0 && j == samples - 1) continue;
      if (segments_cross(pts[i], pts[(i + 1) % samples], pts[j], pts[(j + 1) % samples]))
        throw Error(ErrorCategory::geometry, "curve self-intersects");
    }
}

CurvePoint curve_eval(const Curve& curve, double t, int normal_sign) {
  const Point d = curve.first_derivative(t);
  const double speed = d.norm();
  if (!(speed > 0.0)) throw Error(ErrorCategory::geometry, "degenerate parametrization: zero speed");
  const Point tangent = d / speed;
  return {curve.position(t), tangent, normal_sign * Point(-tangent.y(), tangent.x()), speed};
}

double curvature(const Curve& curve, double t) {
  const Point d1 = curve.first_derivative(t), d2 = curve.second_derivative(t);
  const double s = d1.norm();
  return (d1.x() * d2.y() - d1.y() * d2.x()) / (s * s * s);
}

double BoundaryGrid::param_step() const { return kTwoPi / n; }

double BoundaryGrid::length() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

double BoundaryGrid::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += weights[j] * u[j] * v[j];
  return sum;
}

BoundaryGrid make_boundary_grid(CurvePtr curve, int n, int normal_sign) {
  if (n < 8 || n % 2 != 0) {
    throw Error(ErrorCategory::discretization,
                "boundary node count must be even and at least 8, got " + std::to_string(n));
  }
  BoundaryGrid g;
  g.curve = curve;
  g.n = n;
  g.normal_sign = normal_sign;
  g.t.resize(n);
  g.points.resize(n);
  g.normals.resize(n);
  g.tangents.resize(n);
  g.speeds.resize(n);
  g.curvatures.resize(n);
  g.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = kTwoPi * j / n;
    const CurvePoint cp = curve_eval(*curve, t, normal_sign);
    g.t[j] = t;
    g.points[j] = cp.point;
    g.normals[j] = cp.normal;
    g.tangents[j] = cp.tangent;
    g.speeds[j] = cp.speed;
    g.curvatures[j] = curvature(*curve, t);
    g.weights[j] = kTwoPi / n * cp.speed;
  }
  return g;
}

// ---------------------------------------------------------------------------

DomainMesh::DomainMesh(CurvePtr curve, const MeshOptions& options)
    : curve_(std::move(curve)), options_(options) {
  const double r_max = curve_->circumradius();
  const double r_min = curve_->min_polar_radius();
  if (!(options_.r_trunc > r_max)) {
    std::ostringstream msg;
    msg << "truncation radius " << options_.r_trunc << " does not exceed the curve circumradius "
        << r_max;
    throw Error(ErrorCategory::geometry, msg.str());
  }
  if (!(options_.h > 0.0) || options_.order < 2 || !(options_.growth >= 1.0))
    throw Error(ErrorCategory::discretization, "mesh needs h > 0, order >= 2, growth >= 1");

  const int p = options_.order;
  const double panel = p * options_.h;

  // angular panels, a multiple of 4 so the mesh shares the symmetries of the test curves
  double perimeter = 0.0;
  for (int i = 0; i < 1024; ++i) perimeter += curve_->first_derivative(kTwoPi * i / 1024).norm();
  perimeter *= kTwoPi / 1024;
  int m_theta = std::max(4, static_cast<int>(std::ceil(perimeter / panel)));
  m_theta = (m_theta + 3) / 4 * 4;
  theta_breaks_.resize(m_theta + 1);
  for (int k = 0; k <= m_theta; ++k) theta_breaks_[k] = kTwoPi * k / m_theta;

  // collar: blend from the curve to the circle r = r_c
  const double r_c = std::min(r_max + panel, options_.r_trunc);
  const int n_collar = std::max(1, static_cast<int>(std::ceil((r_c - r_min) / panel - 1e-9)));
  for (int i = 0; i <= n_collar; ++i) levels_.push_back({static_cast<double>(i) / n_collar, r_c});
  // polar shells with geometric growth
  double r = r_c, w = panel;
  while (r < options_.r_trunc * (1.0 - 1e-12)) {
    double next = r + w;
    if (next > options_.r_trunc - 0.5 * w) next = options_.r_trunc;
    levels_.push_back({1.0, next});
    r = next;
    w *= options_.growth;
  }

  const GaussRule& gl = gauss_legendre(p);
  const int n_radial = static_cast<int>(levels_.size()) - 1;
  for (int ir = 0; ir < n_radial; ++ir) {
    // inner boundary of this radial panel, worst case over theta
    double inner = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 256; ++s) inner = std::min(inner, level_radius(ir, kTwoPi * s / 256));
    const bool in_support = inner < options_.support_radius;
    for (int ia = 0; ia < m_theta; ++ia) {
      Element e{ia, ir, static_cast<int>(points_.size()), in_support};
      const int id = static_cast<int>(elements_.size());
      elements_.push_back(e);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
          const double xi = gl.nodes[j], eta = gl.nodes[i];
          points_.push_back(map(id, xi, eta));
          weights_.push_back(jacobian(id, xi, eta) * gl.weights[i] * gl.weights[j]);
          support_.push_back(in_support ? 1 : 0);
        }
    }
  }

  // spacing actually achieved next to S; a tight R_trunc can force it below h
  double first_width = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 256; ++s) {
    const double th = kTwoPi * s / 256;
    first_width = std::min(first_width, level_radius(1, th) - level_radius(0, th));
  }
  const double spacing = std::min(options_.h, first_width / p);
  if (min_node_clearance() <= spacing / 10.0)
    throw Error(ErrorCategory::discretization, "domain mesh nodes too close to the boundary");
}

double DomainMesh::level_radius(int level, double theta) const {
  const RadialLevel& l = levels_[level];
  if (l.beta == 1.0) return l.rho;
  return (1.0 - l.beta) * curve_->polar_radius(theta) + l.beta * l.rho;
}

double DomainMesh::level_radius_derivative(int level, double theta) const {
  const RadialLevel& l = levels_[level];
  if (l.beta == 1.0) return 0.0;
  return (1.0 - l.beta) * curve_->polar_radius_derivative(theta);
}

Point DomainMesh::map(int element, double xi, double eta) const {
  const Element& e = elements_[element];
  const double ta = theta_breaks_[e.angular], tb = theta_breaks_[e.angular + 1];
  const double theta = ta + 0.5 * (xi + 1.0) * (tb - ta);
  const double r_in = level_radius(e.radial, theta), r_out = level_radius(e.radial + 1, theta);
  const double r = r_in + 0.5 * (eta + 1.0) * (r_out - r_in);
  return r * Point(std::cos(theta), std::sin(theta));
}

double DomainMesh::jacobian(int element, double xi, double eta) const {
  const Element& e = elements_[element];
  const double ta = theta_breaks_[e.angular], tb = theta_breaks_[e.angular + 1];
  const double theta = ta + 0.5 * (xi + 1.0) * (tb - ta);
  const double r_in = level_radius(e.radial, theta), r_out = level_radius(e.radial + 1, theta);
  const double r = r_in + 0.5 * (eta + 1.0) * (r_out - r_in);
  return r * 0.5 * (tb - ta) * 0.5 * (r_out - r_in);
}

Eigen::Matrix2d DomainMesh::tangent_map(int element, double xi, double eta) const {
  const Element& e = elements_[element];
  const double ta = theta_breaks_[e.angular], tb = theta_breaks_[e.angular + 1];
  const double theta = ta + 0.5 * (xi + 1.0) * (tb - ta);
  const double s = 0.5 * (eta + 1.0);
  const double r_in = level_radius(e.radial, theta), r_out = level_radius(e.radial + 1, theta);
  const double dr_in = level_radius_derivative(e.radial, theta);
  const double dr_out = level_radius_derivative(e.radial + 1, theta);
  const double r = r_in + s * (r_out - r_in);
  const double dr = dr_in + s * (dr_out - dr_in);
  const Point er(std::cos(theta), std::sin(theta)), et(-std::sin(theta), std::cos(theta));
  Eigen::Matrix2d m;
  m.col(0) = 0.5 * (tb - ta) * (dr * er + r * et);
  m.col(1) = 0.5 * (r_out - r_in) * er;
  return m;
}

DomainMesh::Local DomainMesh::local_coordinates(int element, const Point& y) const {
  const Element& e = elements_[element];
  const double ta = theta_breaks_[e.angular], tb = theta_breaks_[e.angular + 1];
  const double mid = 0.5 * (ta + tb);
  double theta = std::atan2(y.y(), y.x());
  theta = mid + std::remainder(theta - mid, kTwoPi);
  const double r_in = level_radius(e.radial, theta), r_out = level_radius(e.radial + 1, theta);
  const double xi = 2.0 * (theta - ta) / (tb - ta) - 1.0;
  const double eta = 2.0 * (y.norm() - r_in) / (r_out - r_in) - 1.0;
  return {element, xi, eta};
}

std::optional<DomainMesh::Local> DomainMesh::locate(const Point& y) const {
  const double theta = wrap_angle(std::atan2(y.y(), y.x()));
  const double r = y.norm();
  const int m_theta = static_cast<int>(theta_breaks_.size()) - 1;
  const int ia = std::min(m_theta - 1, static_cast<int>(theta / (kTwoPi / m_theta)));
  const int n_radial = static_cast<int>(levels_.size()) - 1;
  if (r < level_radius(0, theta) || r > level_radius(n_radial, theta)) return std::nullopt;
  int ir = 0;
  while (ir + 1 < n_radial && r >= level_radius(ir + 1, theta)) ++ir;
  return local_coordinates(ir * m_theta + ia, y);
}

double DomainMesh::total_weight() const {
  double sum = 0.0;
  for (double w : weights_) sum += w;
  return sum;
}

double DomainMesh::min_node_clearance() const {
  constexpr int kSamples = 4096;
  std::vector<Point> s(kSamples);
  for (int i = 0; i < kSamples; ++i) s[i] = curve_->position(kTwoPi * i / kSamples);
  double best = std::numeric_limits<double>::infinity();
  // only the innermost collar ring can be close to S
  const int m_theta = static_cast<int>(theta_breaks_.size()) - 1;
  const std::size_t limit = std::min(points_.size(),
                                     static_cast<std::size_t>(m_theta) * options_.order * options_.order);
  for (std::size_t k = 0; k < limit; ++k)
    for (const Point& q : s) best = std::min(best, (points_[k] - q).norm());
  return best;
}

}  // namespace bdie
