#include "bdie/bdie_system.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/IterativeSolvers>

#include "bdie/error.hpp"

namespace bdie {

namespace {

// Exact inverse of the system with the remainder blocks dropped, i.e. of the
// constant-coefficient decoupled system: a boundary solve followed by explicit u.
class DecoupledPreconditioner {
 public:
  using StorageIndex = Eigen::Index;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  DecoupledPreconditioner() = default;
  template <typename M>
  explicit DecoupledPreconditioner(const M&) {}

  void setup(const BdieSystem& s) {
    n_u_ = s.n_u;
    n_b_ = s.n_b;
    v_dom_ = -s.matrix.block(0, n_u_, n_u_, n_b_);
    boundary_.compute(s.matrix.bottomRightCorner(n_b_ + 1, n_b_ + 1));
    rcond_ = boundary_.rcond();
  }
  double rcond() const { return rcond_; }

  template <typename M>
  DecoupledPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  DecoupledPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  DecoupledPreconditioner& compute(const M&) { return *this; }

  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& r) const {
    Eigen::VectorXd x(n_u_ + n_b_ + 1);
    const Eigen::VectorXd pl = boundary_.solve(r.tail(n_b_ + 1).eval());
    x.tail(n_b_ + 1) = pl;
    x.head(n_u_) = r.head(n_u_) + v_dom_ * pl.head(n_b_) -
                   Eigen::VectorXd::Constant(n_u_, pl[n_b_]);
    return x;
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  int n_u_ = 0, n_b_ = 0;
  Eigen::MatrixXd v_dom_;
  Eigen::PartialPivLU<Eigen::MatrixXd> boundary_;
  double rcond_ = 1.0;
};

}  // namespace

std::vector<Point> Discretization::unknown_points() const {
  return {mesh->points().begin(), mesh->points().begin() + n_unknown};
}

Discretization discretize(const DirichletProblem& problem, const DiscretizationOptions& options) {
  validate_curve(*problem.curve);
  Discretization d;
  d.problem = problem;
  d.options = options;
  d.grid = make_boundary_grid(problem.curve, options.n_boundary, options.normal_sign);
  d.support_radius = problem.field->support_radius(options.tail_tol);

  MeshOptions mo;
  mo.r_trunc = options.r_trunc;
  mo.h = options.h;
  mo.order = options.order;
  mo.growth = options.growth;
  mo.support_radius = d.support_radius + options.margin;
  d.mesh = std::make_shared<const DomainMesh>(problem.curve, mo);

  // the support flag is monotone in the radial ring, so the unknowns form a prefix;
  // the first ring is always kept so u next to S is part of the solve
  const int m_theta = static_cast<int>(d.mesh->angular_breaks().size()) - 1;
  int ne = 0;
  for (const auto& e : d.mesh->elements())
    if (e.support) ++ne;
  d.n_unknown_elements = std::max(ne, m_theta);
  d.n_unknown = d.n_unknown_elements * options.order * options.order;

  d.bc = sample_boundary(d.grid, *problem.field);
  d.phi0.resize(d.grid.n);
  for (int j = 0; j < d.grid.n; ++j) d.phi0[j] = problem.phi0(d.grid.points[j]);

  const auto& pts = d.mesh->points();
  const auto& w = d.mesh->weights();
  d.f_nodes.resize(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    d.f_nodes[k] = problem.f(pts[k]);
    d.f_mean += w[k] * d.f_nodes[k];
    d.f_abs_mean += w[k] * std::abs(d.f_nodes[k]);
  }
  for (int k = 0; k < 256; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 256;
    d.f_tail = std::max(d.f_tail, std::abs(problem.f(options.r_trunc * Point(std::cos(th), std::sin(th)))));
  }
  if (!compatible(d)) {
    std::ostringstream msg;
    msg << "right-hand side is not mean-zero: <f,1> = " << d.f_mean << " (<|f|,1> = "
        << d.f_abs_mean << ", tolerance " << options.compat_tol << ")";
    throw Error(ErrorCategory::compatibility, msg.str());
  }
  return d;
}

bool compatible(const Discretization& d) {
  return std::abs(d.f_mean) <= d.options.compat_tol * d.f_abs_mean;
}

namespace {

Eigen::VectorXd f_over_a(const Discretization& d) {
  Eigen::VectorXd q(d.f_nodes.size());
  for (Eigen::Index k = 0; k < q.size(); ++k)
    q[k] = d.f_nodes[k] / d.problem.field->eval(d.mesh->points()[k]).a;
  return q;
}

Eigen::VectorXd newtonian_values(const Discretization& d, const std::vector<Point>& targets) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(targets.size()));
  if (d.f_nodes.cwiseAbs().maxCoeff() == 0.0) return out;
  const auto vals = newtonian_potential(*d.mesh, f_over_a(d), targets, d.options.volume);
  for (std::size_t i = 0; i < targets.size(); ++i) out[static_cast<Eigen::Index>(i)] = vals[i].value;
  return out;
}

void check_exterior(const Discretization& d, const std::vector<Point>& points) {
  for (const Point& y : points)
    if (d.problem.curve->encloses(y)) {
      std::ostringstream msg;
      msg << "point (" << y.x() << ", " << y.y() << ") lies inside the curve";
      throw Error(ErrorCategory::domain, msg.str());
    }
}

}  // namespace

F0Data assemble_F0(const Discretization& d) {
  F0Data out;
  const std::vector<Point> dom = d.unknown_points();
  bool warn = false;
  out.domain = newtonian_values(d, dom) - layer_W_matrix(d.grid, d.bc, dom, &warn) * d.phi0;
  const Eigen::VectorXd w_phi = boundary_W_matrix(d.grid, d.bc) * d.phi0;
  out.boundary = newtonian_values(d, d.grid.points) - (-0.5 * d.phi0 + w_phi);
  return out;
}

Eigen::VectorXd F0_at(const Discretization& d, const std::vector<Point>& points) {
  check_exterior(d, points);
  return newtonian_values(d, points) - layer_W_matrix(d.grid, d.bc, points) * d.phi0;
}

BdieSystem assemble_system(const Discretization& d) {
  BdieSystem s;
  s.n_u = d.n_unknown;
  s.n_b = d.grid.n;
  const int n = s.n_u + s.n_b + 1;
  s.matrix = Eigen::MatrixXd::Zero(n, n);
  s.rhs = Eigen::VectorXd::Zero(n);

  const std::vector<Point> dom = d.unknown_points();
  const auto& field = *d.problem.field;
  const int ne = d.n_unknown_elements;

  s.matrix.topLeftCorner(s.n_u, s.n_u) =
      Eigen::MatrixXd::Identity(s.n_u, s.n_u) + remainder_matrix(*d.mesh, field, dom, ne, d.options.volume);
  s.matrix.block(0, s.n_u, s.n_u, s.n_b) = -layer_V_matrix(d.grid, d.bc, dom, &s.layer_warning);
  s.matrix.block(s.n_u, 0, s.n_b, s.n_u) =
      remainder_matrix(*d.mesh, field, d.grid.points, ne, d.options.volume);
  s.matrix.block(s.n_u, s.n_u, s.n_b, s.n_b) = -boundary_V_matrix(d.grid, d.bc);
  s.matrix.block(0, n - 1, n - 1, 1).setOnes();
  for (int j = 0; j < s.n_b; ++j) s.matrix(n - 1, s.n_u + j) = d.grid.weights[j];

  const F0Data f0 = assemble_F0(d);
  s.rhs.head(s.n_u) = f0.domain;
  s.rhs.segment(s.n_u, s.n_b) = f0.boundary - d.phi0;
  return s;
}

BdieSolution solve(const BdieSystem& system, const SolverOptions& options) {
  BdieSolution sol;
  const Eigen::MatrixXd& a = system.matrix;
  const Eigen::VectorXd& b = system.rhs;
  Eigen::VectorXd x;
  if (options.method == SolveMethod::direct) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    sol.rcond = lu.rcond();
    // the estimator breaks down on exactly zero pivots
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (!pivots.allFinite() || pivots.minCoeff() == 0.0) sol.rcond = 0.0;
    if (!(sol.rcond > options.singular_rcond)) {
      std::ostringstream msg;
      msg << "system matrix is singular to working precision (rcond = " << sol.rcond
          << "); check the coefficient conditions and the mean-zero constraint";
      throw Error(ErrorCategory::singular_system, msg.str());
    }
    x = lu.solve(b);
    sol.method = "direct";
  } else {
    Eigen::GMRES<Eigen::MatrixXd, DecoupledPreconditioner> gmres;
    gmres.preconditioner().setup(system);
    if (!(gmres.preconditioner().rcond() > options.singular_rcond))
      throw Error(ErrorCategory::singular_system, "boundary block of the preconditioner is singular");
    gmres.setTolerance(options.tolerance);
    gmres.setMaxIterations(options.max_iterations);
    gmres.set_restart(options.restart);
    gmres.compute(a);
    x = gmres.solve(b);
    sol.iterations = static_cast<int>(gmres.iterations());
    sol.method = "iterative";
  }
  const double bn = b.norm();
  sol.residual = (a * x - b).norm() / (bn > 0.0 ? bn : 1.0);
  sol.u = x.head(system.n_u);
  sol.psi = x.segment(system.n_u, system.n_b);
  sol.lambda = x[system.n_u + system.n_b];
  return sol;
}

Eigen::VectorXd evaluate_u_field(const Discretization& d, const BdieSolution& sol,
                                 const std::vector<Point>& points) {
  check_exterior(d, points);
  Eigen::VectorXd u = F0_at(d, points);
  u -= remainder_matrix(*d.mesh, *d.problem.field, points, d.n_unknown_elements, d.options.volume) * sol.u;
  u += layer_V_matrix(d.grid, d.bc, points) * sol.psi;
  u.array() -= sol.lambda;
  return u;
}

}  // namespace bdie
