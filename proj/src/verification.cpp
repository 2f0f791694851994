#include "bdie/verification.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "bdie/error.hpp"
#include "bdie/quadrature.hpp"

namespace bdie {

namespace {

constexpr double kPi = std::numbers::pi;

double apply_operator(const CoefficientField& field, const ManufacturedCase& c, const Point& x) {
  const CoeffValue v = field.eval(x);
  return v.grad.dot(c.grad_u(x)) + v.a * c.lap_u(x);
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

void require_exterior(const Curve& curve, const std::vector<Point>& points) {
  for (const Point& y : points)
    if (curve.encloses(y)) {
      std::ostringstream msg;
      msg << "point (" << y.x() << ", " << y.y() << ") lies inside the curve";
      throw Error(ErrorCategory::domain, msg.str());
    }
}

Eigen::VectorXd newtonian_values(const DomainMesh& mesh, const Eigen::VectorXd& density,
                                 const std::vector<Point>& targets, const VolumeQuadOptions& opt) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(targets.size()));
  if (density.size() == 0 || density.cwiseAbs().maxCoeff() == 0.0) return out;
  const auto vals = newtonian_potential(mesh, density, targets, opt);
  for (std::size_t i = 0; i < targets.size(); ++i) out[static_cast<Eigen::Index>(i)] = vals[i].value;
  return out;
}

Eigen::Map<const Eigen::VectorXd> curve_weights(const BoundaryGrid& grid) {
  return {grid.weights.data(), grid.n};
}

double l2_on_curve(const BoundaryGrid& grid, const Eigen::VectorXd& v) {
  return std::sqrt((curve_weights(grid).array() * v.array().square()).sum());
}

}  // namespace

// ---- manufactured cases -------------------------------------------------------------

DirichletProblem ManufacturedCase::problem(CurvePtr curve) const {
  return DirichletProblem{std::move(curve), field, f, u};
}

Eigen::VectorXd ManufacturedCase::psi_exact(const BoundaryGrid& grid) const {
  return conormal_derivative(grad_u, grid, *field);
}

Eigen::VectorXd ManufacturedCase::u_at(const std::vector<Point>& points) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) v[static_cast<Eigen::Index>(i)] = u(points[i]);
  return v;
}

std::vector<std::string> manufactured_case_names() {
  return {"laplace-dipole", "laplace-quadrupole", "bump-dipole", "bump-steep-dipole", "zero"};
}

ManufacturedCase manufactured_case(const std::string& name, const nlohmann::json& params) {
  CoefficientPtr field;
  if (params.is_object() && params.contains("coefficient")) field = make_coefficient(params.at("coefficient"));
  return manufactured_case(name, field);
}

ManufacturedCase manufactured_case(const std::string& name, CoefficientPtr field_override) {
  ManufacturedCase c;
  c.name = name;
  const auto zero_grad = [](const Point&) { return Point(0.0, 0.0); };
  const auto zero = [](const Point&) { return 0.0; };

  // x / r^2 = cos(theta) / r
  const auto dipole = [](const Point& x) { return x.x() / x.squaredNorm(); };
  const auto dipole_grad = [](const Point& x) {
    const double r2 = x.squaredNorm(), r4 = r2 * r2;
    return Point((r2 - 2.0 * x.x() * x.x()) / r4, -2.0 * x.x() * x.y() / r4);
  };

  if (name == "laplace-dipole" || name == "bump-dipole") {
    c.u = dipole;
    c.grad_u = dipole_grad;
    c.lap_u = zero;
    c.decay_power = 1.0;
  } else if (name == "laplace-quadrupole") {
    // 2xy / r^4 = sin(2 theta) / r^2
    c.u = [](const Point& x) { const double r2 = x.squaredNorm(); return 2.0 * x.x() * x.y() / (r2 * r2); };
    c.grad_u = [](const Point& x) {
      const double r2 = x.squaredNorm(), r4 = r2 * r2, r6 = r4 * r2;
      return Point(2.0 * x.y() / r4 - 8.0 * x.x() * x.x() * x.y() / r6,
                   2.0 * x.x() / r4 - 8.0 * x.x() * x.y() * x.y() / r6);
    };
    c.lap_u = zero;
    c.decay_power = 2.0;
  } else if (name == "bump-steep-dipole") {
    // x / r^4 = cos(theta) / r^3, not harmonic
    c.u = [](const Point& x) { const double r2 = x.squaredNorm(); return x.x() / (r2 * r2); };
    c.grad_u = [](const Point& x) {
      const double r2 = x.squaredNorm(), r4 = r2 * r2, r6 = r4 * r2;
      return Point(1.0 / r4 - 4.0 * x.x() * x.x() / r6, -4.0 * x.x() * x.y() / r6);
    };
    c.lap_u = [](const Point& x) { const double r2 = x.squaredNorm(); return 8.0 * x.x() / (r2 * r2 * r2); };
    c.decay_power = 3.0;
  } else if (name == "zero") {
    c.u = zero;
    c.grad_u = zero_grad;
    c.lap_u = zero;
    c.decay_power = std::numeric_limits<double>::infinity();
  } else {
    throw Error(ErrorCategory::unknown_case, "unknown manufactured case '" + name + "'");
  }

  if (field_override)
    c.field = field_override;
  else if (name.starts_with("bump-"))
    c.field = std::make_shared<GaussianBump>(1.0, 1.0);
  else
    c.field = std::make_shared<ConstantCoefficient>(1.0);

  const CoefficientPtr field = c.field;
  const GradientField grad = c.grad_u;
  const ScalarField lap = c.lap_u;
  c.f = [field, grad, lap](const Point& x) {
    const CoeffValue v = field->eval(x);
    return v.grad.dot(grad(x)) + v.a * lap(x);
  };
  return c;
}

double fd_divergence_flux(const CoefficientField& field, const ScalarField& u, const Point& x,
                          double step) {
  const auto stencil = [&](double s) {
    const double u0 = u(x);
    double acc = 0.0;
    for (const Point& e : {Point(1.0, 0.0), Point(0.0, 1.0)}) {
      const double ap = field.eval(x + 0.5 * s * e).a;
      const double am = field.eval(x - 0.5 * s * e).a;
      acc += ap * (u(x + s * e) - u0) - am * (u0 - u(x - s * e));
    }
    return acc / (s * s);
  };
  return (4.0 * stencil(0.5 * step) - stencil(step)) / 3.0;
}

bool CaseCheck::ok(double fd_tol, double mean_tol) const {
  return max_fd_rel <= fd_tol && f_mean_rel <= mean_tol && psi_mean_rel <= mean_tol;
}

nlohmann::json CaseCheck::to_json() const {
  return {{"max_fd_rel", max_fd_rel}, {"f_mean_rel", f_mean_rel}, {"psi_mean_rel", psi_mean_rel}};
}

CaseCheck check_case(const ManufacturedCase& c, const Discretization& d, unsigned seed, int n_points) {
  CaseCheck out;
  const double rc = d.grid.curve->circumradius();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> radius(1.2 * rc, 4.0 * rc), angle(0.0, 2.0 * kPi);
  for (int i = 0; i < n_points; ++i) {
    const double r = radius(rng), th = angle(rng);
    const Point x(r * std::cos(th), r * std::sin(th));
    const double fd = fd_divergence_flux(*c.field, c.u, x, 2e-3);
    const double exact = c.f(x);
    // natural size of second derivatives, so harmonic cases with f = 0 are still judged
    const double scale = std::max(std::abs(exact), c.field->eval(x).a * c.grad_u(x).norm() / r);
    if (scale > 0.0) out.max_fd_rel = std::max(out.max_fd_rel, std::abs(fd - exact) / scale);
  }
  out.f_mean_rel = safe_ratio(std::abs(d.f_mean), d.f_abs_mean);
  const Eigen::VectorXd psi = c.psi_exact(d.grid);
  out.psi_mean_rel = safe_ratio(std::abs(curve_weights(d.grid).dot(psi)),
                                curve_weights(d.grid).dot(psi.cwiseAbs()));
  return out;
}

// ---- kernel-level oracles ----------------------------------------------------------

KernelOracleErrors kernel_fourier_errors(int n, int max_mode, int normal_sign) {
  const BoundaryGrid grid = make_boundary_grid(std::make_shared<Circle>(1.0), n, normal_sign);
  const Eigen::MatrixXd v = single_layer_matrix(grid);
  const Eigen::MatrixXd w = double_layer_matrix(grid);
  const Eigen::MatrixXd l = hypersingular_matrix(grid);
  KernelOracleErrors e;
  for (int m = 1; m <= max_mode; ++m) {
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c[j] = std::cos(m * grid.t[j]);
    e.single = std::max(e.single, (v * c - c / (2.0 * m)).cwiseAbs().maxCoeff());
    e.hypersingular = std::max(e.hypersingular, (l * c - 0.5 * m * c).cwiseAbs().maxCoeff());
    e.double_ = std::max(e.double_, (w * c).cwiseAbs().maxCoeff());
  }
  return e;
}

GaussErrors gauss_identity_errors(CurvePtr curve, int n, int normal_sign) {
  const BoundaryGrid grid = make_boundary_grid(curve, n, normal_sign);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  const double rin = curve->min_polar_radius(), rc = curve->circumradius();
  std::vector<Point> inside, outside;
  for (int k = 0; k < 8; ++k) {
    const double th = 0.3 + 2.0 * kPi * k / 8;
    const Point e(std::cos(th), std::sin(th));
    inside.push_back((0.2 + 0.1 * (k % 4)) * rin * e);
    outside.push_back((1.2 + 0.5 * k) * rc * e);
  }
  GaussErrors g;
  g.inside = (layer_matrix(grid, LayerKind::double_, inside) * one - Eigen::VectorXd::Ones(8)).cwiseAbs().maxCoeff();
  g.outside = (layer_matrix(grid, LayerKind::double_, outside) * one).cwiseAbs().maxCoeff();
  g.on_curve = (double_layer_matrix(grid) * one - 0.5 * one).cwiseAbs().maxCoeff();
  return g;
}

JumpErrors jump_relation_errors(const BoundaryGrid& grid, const CoefficientField& field) {
  const BoundaryCoefficient bc = sample_boundary(grid, field);
  const Eigen::MatrixXd vb = boundary_V_matrix(grid, bc);
  const Eigen::MatrixXd wb = boundary_W_matrix(grid, bc);
  JumpErrors e;
  for (int m : {0, 1, 2}) {
    Eigen::VectorXd rho(grid.n);
    for (int j = 0; j < grid.n; ++j) rho[j] = m == 0 ? 1.0 : (m == 1 ? std::cos(grid.t[j]) : std::sin(2.0 * grid.t[j]));
    const Eigen::VectorXd v_direct = vb * rho;
    const Eigen::VectorXd w_direct = wb * rho;
    const Eigen::VectorXd rho_a = rho.cwiseQuotient(bc.a);
    const Eigen::VectorXd sigma = rho.cwiseProduct(bc.dn_log_a);
    for (int side : {+1, -1}) {
      const Eigen::VectorXd v = layer_trace_limit(grid, rho_a, LayerKind::single, side);
      const Eigen::VectorXd w = layer_trace_limit(grid, rho, LayerKind::double_, side) -
                                layer_trace_limit(grid, sigma, LayerKind::single, side);
      const double ev = (v - v_direct).cwiseAbs().maxCoeff();
      const double ew = (w - (-0.5 * side * rho + w_direct)).cwiseAbs().maxCoeff();
      (side > 0 ? e.v_plus : e.v_minus) = std::max(side > 0 ? e.v_plus : e.v_minus, ev);
      (side > 0 ? e.w_plus : e.w_minus) = std::max(side > 0 ? e.w_plus : e.w_minus, ew);
    }
  }
  return e;
}

// ---- Green identities ----------------------------------------------------------------

double GreenResiduals::max_third() const { return third.size() ? third.cwiseAbs().maxCoeff() : 0.0; }
double GreenResiduals::max_trace() const { return trace.size() ? trace.cwiseAbs().maxCoeff() : 0.0; }

GreenResiduals green_identity_residuals(const ManufacturedCase& c, const Discretization& d,
                                        const std::vector<Point>& points) {
  require_exterior(*d.grid.curve, points);
  const DomainMesh& mesh = *d.mesh;
  const auto& opt = d.options.volume;
  const std::vector<Point>& nodes = mesh.points();

  const Eigen::VectorXd u_nodes = c.u_at(nodes);
  Eigen::VectorXd f_over_a(u_nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k)
    f_over_a[static_cast<Eigen::Index>(k)] = c.f(nodes[k]) / c.field->eval(nodes[k]).a;

  const Eigen::VectorXd psi = c.psi_exact(d.grid);
  const Eigen::VectorXd phi = c.u_at(d.grid.points);

  GreenResiduals g;
  g.points = points;
  g.third = c.u_at(points) + remainder_matrix(mesh, *c.field, points, -1, opt) * u_nodes -
            layer_V_matrix(d.grid, d.bc, points) * psi + layer_W_matrix(d.grid, d.bc, points) * phi -
            newtonian_values(mesh, f_over_a, points, opt);
  g.trace = 0.5 * phi + remainder_matrix(mesh, *c.field, d.grid.points, -1, opt) * u_nodes -
            boundary_V_matrix(d.grid, d.bc) * psi + boundary_W_matrix(d.grid, d.bc) * phi -
            newtonian_values(mesh, f_over_a, d.grid.points, opt);
  return g;
}

SecondGreen second_green_identity(const ManufacturedCase& u, const ManufacturedCase& v,
                                  const Discretization& d, int outer_samples) {
  const CoefficientField& field = *u.field;
  const DomainMesh& mesh = *d.mesh;
  SecondGreen s;
  for (std::size_t k = 0; k < mesh.points().size(); ++k) {
    const Point& x = mesh.points()[k];
    s.volume += mesh.weights()[k] *
                (u.u(x) * apply_operator(field, v, x) - v.u(x) * apply_operator(field, u, x));
  }
  // the normal points out of Omega on S
  for (int j = 0; j < d.grid.n; ++j) {
    const Point& x = d.grid.points[j];
    const Point& n = d.grid.normals[j];
    s.on_curve += d.grid.weights[j] * field.eval(x).a *
                  (u.u(x) * n.dot(v.grad_u(x)) - v.u(x) * n.dot(u.grad_u(x)));
  }
  const double r = mesh.r_trunc();
  for (int k = 0; k < outer_samples; ++k) {
    const double th = 2.0 * kPi * k / outer_samples;
    const Point e(std::cos(th), std::sin(th));
    const Point x = r * e;
    s.on_outer_circle += (2.0 * kPi * r / outer_samples) * field.eval(x).a *
                         (u.u(x) * e.dot(v.grad_u(x)) - v.u(x) * e.dot(u.grad_u(x)));
  }
  return s;
}

std::vector<Point> default_probe_points(const Curve& curve) {
  const double rc = curve.circumradius();
  std::vector<Point> pts;
  for (int k = 0; k < 10; ++k) {
    const double r = rc * (1.3 + 2.7 * k / 9.0);
    const double th = 0.7 + 2.399963229728653 * k;  // golden angle
    pts.emplace_back(r * std::cos(th), r * std::sin(th));
  }
  return pts;
}

// ---- equivalence ----------------------------------------------------------------------

nlohmann::json EquivalenceReport::to_json() const {
  return {{"psi_error", psi_error},         {"psi_rel", psi_rel},
          {"u_error", u_error},             {"u_rel", u_rel},
          {"v_residual", v_residual},       {"pde_residual", pde_residual},
          {"pde_floor", pde_floor},         {"dirichlet_error", dirichlet_error},
          {"psi_mean", psi_mean}};
}

EquivalenceReport equivalence_check(const ManufacturedCase& c, const Discretization& d,
                                    const BdieSolution& sol, int dirichlet_samples) {
  EquivalenceReport rep;
  const BoundaryGrid& grid = d.grid;
  const Eigen::VectorXd psi = c.psi_exact(grid);
  const Eigen::VectorXd dpsi = sol.psi - psi;
  rep.psi_error = l2_on_curve(grid, dpsi);
  rep.psi_rel = safe_ratio(rep.psi_error, l2_on_curve(grid, psi));
  rep.v_residual = l2_on_curve(grid, single_layer_matrix(grid) * dpsi);
  rep.psi_mean = safe_ratio(std::abs(curve_weights(grid).dot(sol.psi)), l2_on_curve(grid, sol.psi));

  double eu = 0.0, nu = 0.0;
  for (int k = 0; k < d.n_unknown; ++k) {
    const double w = d.mesh->weights()[k];
    const double ue = c.u(d.mesh->points()[k]);
    eu += w * (sol.u[k] - ue) * (sol.u[k] - ue);
    nu += w * ue * ue;
  }
  rep.u_error = std::sqrt(eu);
  rep.u_rel = safe_ratio(rep.u_error, std::sqrt(nu));

  // five-point flux stencil at step h/2 on the reconstructed field
  const double s = 0.5 * d.options.h;
  std::vector<Point> centers = default_probe_points(*grid.curve);
  centers.erase(centers.begin(), centers.begin() + 2);
  centers.resize(6);
  const Point ex(1.0, 0.0), ey(0.0, 1.0);
  std::vector<Point> stencil;
  for (const Point& x : centers)
    for (const Point& p : {x, Point(x + s * ex), Point(x - s * ex), Point(x + s * ey), Point(x - s * ey)})
      stencil.push_back(p);
  const Eigen::VectorXd uh = evaluate_u_field(d, sol, stencil);
  const auto& field = *c.field;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Point& x = centers[i];
    const auto apply = [&](const double* v) {
      return (field.eval(x + 0.5 * s * ex).a * (v[1] - v[0]) - field.eval(x - 0.5 * s * ex).a * (v[0] - v[2]) +
              field.eval(x + 0.5 * s * ey).a * (v[3] - v[0]) - field.eval(x - 0.5 * s * ey).a * (v[0] - v[4])) /
             (s * s);
    };
    double vh[5], ve[5];
    for (int m = 0; m < 5; ++m) {
      vh[m] = uh[static_cast<Eigen::Index>(5 * i + m)];
      ve[m] = c.u(stencil[5 * i + m]);
    }
    const double f = c.f(x);
    rep.pde_residual = std::max(rep.pde_residual, std::abs(apply(vh) - f));
    rep.pde_floor = std::max(rep.pde_floor, std::abs(apply(ve) - f));
  }

  // Dirichlet recovery through extrapolated one-sided limits
  const int levels = 5;
  std::vector<double> eps(levels);
  for (int k = 0; k < levels; ++k) eps[k] = 0.05 / std::pow(2.0, k);
  std::vector<Point> near;
  std::vector<int> nodes;
  for (int m = 0; m < dirichlet_samples; ++m) {
    const int j = m * grid.n / dirichlet_samples;
    nodes.push_back(j);
    const Point into_omega = -static_cast<double>(grid.normal_sign) * grid.normals[j];
    for (double e : eps) near.push_back(grid.points[j] + e * into_omega);
  }
  const Eigen::VectorXd un = evaluate_u_field(d, sol, near);
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    std::vector<double> vals(levels);
    for (int k = 0; k < levels; ++k) vals[k] = un[static_cast<Eigen::Index>(m * levels + k)];
    const double trace = extrapolate_to_zero(eps, vals);
    rep.dirichlet_error = std::max(rep.dirichlet_error, std::abs(trace - d.phi0[nodes[m]]));
  }
  return rep;
}

// ---- remainder split --------------------------------------------------------------------

double weighted_norm_estimate(const Eigen::MatrixXd& a, const Eigen::VectorXd& weights,
                              int iterations, unsigned seed) {
  if (a.rows() != a.cols() || a.rows() != weights.size())
    throw Error(ErrorCategory::discretization, "norm estimate needs a square operator on the weighted nodes");
  const Eigen::VectorXd sw = weights.cwiseSqrt();
  const Eigen::MatrixXd b = sw.asDiagonal() * a * sw.cwiseInverse().asDiagonal();
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(a.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd z = b.transpose() * (b * x);
    lambda = x.dot(z);
    const double zn = z.norm();
    if (zn == 0.0) return 0.0;
    x = z / zn;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double weighted_gradient_tail(const CoefficientField& field, double r, double s_max, double ds,
                              int angles) {
  double m = 0.0;
  for (double s = r; s <= s_max + 0.5 * ds; s += ds)
    for (int k = 0; k < angles; ++k) {
      const double th = 2.0 * kPi * k / angles;
      const Point x(s * std::cos(th), s * std::sin(th));
      m = std::max(m, weight_eval(x) * field.eval_raw(x).grad.norm());
    }
  return m;
}

nlohmann::json SplitDecayReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows)
    rows_json.push_back({{"r", row.r}, {"norm", row.norm}, {"factor", row.factor}, {"split_error", row.split_error}});
  return {{"rows", rows_json},
          {"fitted_c", fitted_c},
          {"norms_decreasing", norms_decreasing},
          {"factors_decreasing", factors_decreasing},
          {"bounded", bounded}};
}

SplitDecayReport split_decay_study(const CoefficientField& field, const DomainMesh& mesh,
                                   int n_elements, const std::vector<double>& radii, unsigned seed,
                                   const VolumeQuadOptions& opt) {
  const int nn = n_elements * mesh.order() * mesh.order();
  const std::vector<Point> nodes(mesh.points().begin(), mesh.points().begin() + nn);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(mesh.weights().data(), nn);
  const Eigen::MatrixXd r_full = remainder_matrix(mesh, field, nodes, n_elements, opt);

  SplitDecayReport rep;
  for (double r : radii) {
    const RemainderSplit split = remainder_split(mesh, r_full, r);
    SplitDecayRow row;
    row.r = r;
    row.norm = weighted_norm_estimate(split.smooth_part, w, 20, seed);
    row.factor = weighted_gradient_tail(field, r, mesh.r_trunc());
    row.split_error = (split.smooth_part + split.compact_part - r_full).cwiseAbs().maxCoeff();
    rep.rows.push_back(row);
  }
  rep.norms_decreasing = rep.factors_decreasing = !rep.rows.empty();
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    rep.norms_decreasing = rep.norms_decreasing && rep.rows[i].norm < rep.rows[i - 1].norm;
    rep.factors_decreasing = rep.factors_decreasing && rep.rows[i].factor < rep.rows[i - 1].factor;
  }
  // C is fitted at the smallest radius and must then hold everywhere else
  if (!rep.rows.empty() && rep.rows.front().factor > 0.0) {
    rep.fitted_c = rep.rows.front().norm / rep.rows.front().factor;
    rep.bounded = true;
    for (const auto& row : rep.rows)
      rep.bounded = rep.bounded && row.norm <= rep.fitted_c * row.factor * (1.0 + 1e-9);
  } else {
    rep.bounded = true;
    for (const auto& row : rep.rows) rep.bounded = rep.bounded && row.norm == 0.0;
  }
  return rep;
}

// ---- conditioning ------------------------------------------------------------------------

Eigen::VectorXd single_layer_singular_values(const BoundaryGrid& grid) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(single_layer_matrix(grid)).singularValues();
}

namespace {

double sigma_min(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
  return s[s.size() - 1];
}

double condition_number(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
  return s[0] / s[s.size() - 1];
}

// Orthonormal basis of the complement of g.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& g) {
  const Eigen::Index n = g.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - 1);
}

}  // namespace

std::vector<ConditioningRow> conditioning_study(const DirichletProblem& problem,
                                                const DiscretizationOptions& base,
                                                const std::vector<int>& ns) {
  std::vector<ConditioningRow> rows;
  for (int n : ns) {
    DiscretizationOptions opt = base;
    opt.n_boundary = n;
    const Discretization d = discretize(problem, opt);
    const BdieSystem sys = assemble_system(d);
    const int nu = sys.n_u;

    // u in L2(Omega); psi in H^-1/2 and boundary residuals in H^1/2 through Fourier weights
    std::vector<int> freq;
    const Eigen::MatrixXd q = real_fourier_basis(n, freq);
    Eigen::VectorXd lam(n);
    for (int k = 0; k < n; ++k) lam[k] = std::pow(1.0 + static_cast<double>(freq[k]) * freq[k], 0.25);
    const double scale = std::sqrt(n / (2.0 * kPi));
    const Eigen::MatrixXd col_b = scale * q * lam.asDiagonal();
    const Eigen::MatrixXd row_b = (1.0 / scale) * lam.asDiagonal() * q.transpose();
    const Eigen::VectorXd sw = Eigen::Map<const Eigen::VectorXd>(d.mesh->weights().data(), nu).cwiseSqrt();

    Eigen::MatrixXd col = Eigen::MatrixXd::Zero(sys.size(), sys.size());
    Eigen::MatrixXd row = col;
    col.topLeftCorner(nu, nu) = sw.cwiseInverse().asDiagonal();
    row.topLeftCorner(nu, nu) = sw.asDiagonal();
    col.block(nu, nu, n, n) = col_b;
    row.block(nu, nu, n, n) = row_b;
    col(sys.size() - 1, sys.size() - 1) = row(sys.size() - 1, sys.size() - 1) = 1.0;

    ConditioningRow r;
    r.n = n;
    r.cond = condition_number(row * sys.matrix * col);
    r.cond_raw = condition_number(sys.matrix);

    const Eigen::MatrixXd v = sys.single_layer_block();
    const Eigen::VectorXd w = curve_weights(d.grid);
    r.sigma_min_v = sigma_min(row_b * v * col_b * complement_basis(col_b.transpose() * w));
    r.sigma_min_v_raw = sigma_min(v * complement_basis(w));
    r.constant_mode = (v * Eigen::VectorXd::Ones(n)).norm() / std::sqrt(static_cast<double>(n));
    rows.push_back(r);
  }
  return rows;
}

// ---- convergence ---------------------------------------------------------------------------

double ConvergenceReport::min_order() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) m = std::min({m, rows[i].order_u, rows[i].order_psi});
  return m;
}

bool ConvergenceReport::errors_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].err_u < rows[i - 1].err_u && rows[i].err_psi < rows[i - 1].err_psi)) return false;
  return true;
}

bool ConvergenceReport::green_decreasing(double floor) const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].green < rows[i - 1].green || rows[i].green <= floor)) return false;
  return true;
}

ConvergenceReport convergence_study(const ManufacturedCase& c, CurvePtr curve,
                                    const DiscretizationOptions& base,
                                    const std::vector<RefinementLevel>& levels,
                                    const SolverOptions& solver) {
  ConvergenceReport rep;
  const DirichletProblem problem = c.problem(curve);
  const std::vector<Point> probes = default_probe_points(*curve);
  for (const RefinementLevel& lvl : levels) {
    const auto t0 = std::chrono::steady_clock::now();
    DiscretizationOptions opt = base;
    opt.n_boundary = lvl.n;
    opt.h = lvl.h;
    if (lvl.r_trunc > 0.0) opt.r_trunc = lvl.r_trunc;
    const Discretization d = discretize(problem, opt);
    const BdieSolution sol = solve(assemble_system(d), solver);
    const EquivalenceReport eq = equivalence_check(c, d, sol, 0);

    ConvergenceRow row;
    row.level = {lvl.n, lvl.h, opt.r_trunc};
    row.n_unknown = d.n_unknown;
    row.err_u = eq.u_rel;
    row.err_psi = eq.psi_rel;
    row.psi_residual = eq.psi_error;
    row.green = green_identity_residuals(c, d, probes).max_third();
    row.order_u = row.order_psi = std::numeric_limits<double>::quiet_NaN();
    if (!rep.rows.empty()) {
      const ConvergenceRow& prev = rep.rows.back();
      const double lh = std::log(prev.level.h / lvl.h);
      row.order_u = std::log(prev.err_u / row.err_u) / lh;
      row.order_psi = std::log(prev.err_psi / row.err_psi) / lh;
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace bdie
