#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "bdie/parametrix.hpp"

namespace bdie {

using ScalarField = std::function<double(const Point&)>;

/// Exterior Dirichlet problem div(a grad u) = f in Omega, u = phi0 on S.
struct DirichletProblem {
  CurvePtr curve;
  CoefficientPtr field;
  ScalarField f;
  ScalarField phi0;
};

struct DiscretizationOptions {
  int n_boundary = 128;
  double h = 0.1;
  double r_trunc = 6.0;
  int order = 8;
  double growth = 1.5;
  double margin = 0.5;          // unknown region is B(0, r_a + margin)
  double tail_tol = 1e-10;      // defines r_a
  double compat_tol = 1e-8;     // relative tolerance on the discrete mean of f
  int normal_sign = kInwardNormalSign;
  VolumeQuadOptions volume;
};

/// Grids, sampled data and the unknown-support bookkeeping shared by assembly,
/// solve and post-processing.
struct Discretization {
  DirichletProblem problem;
  DiscretizationOptions options;
  BoundaryGrid grid;
  std::shared_ptr<const DomainMesh> mesh;
  BoundaryCoefficient bc;
  double support_radius = 0.0;   // r_a
  int n_unknown_elements = 0;
  int n_unknown = 0;             // domain unknowns: the first n_unknown mesh nodes
  Eigen::VectorXd f_nodes;       // f at every mesh node
  Eigen::VectorXd phi0;          // at the boundary nodes
  double f_mean = 0.0;           // discrete <f, 1>
  double f_abs_mean = 0.0;       // discrete <|f|, 1>
  double f_tail = 0.0;           // max |f| on the truncation circle

  std::vector<Point> unknown_points() const;
};

/// Builds grids and samples data. Throws on invalid geometry/discretization and on
/// incompatible data (discrete mean of f above tolerance).
Discretization discretize(const DirichletProblem& problem, const DiscretizationOptions& options);

/// Relative discrete mean of f; compatible data have |<f,1>| <= tol <|f|,1>.
bool compatible(const Discretization& d);

struct F0Data {
  Eigen::VectorXd domain;    // F0 at the domain unknowns
  Eigen::VectorXd boundary;  // gamma+ F0 at the boundary nodes
};

/// F0 = P f - W phi0 with its trace from the jump relation of W.
F0Data assemble_F0(const Discretization& d);
/// F0 at arbitrary exterior points.
Eigen::VectorXd F0_at(const Discretization& d, const std::vector<Point>& points);

/// Augmented collocation system in the unknowns (u, psi, lambda):
///   u + R u - V psi + lambda = F0                 at domain unknowns
///   gamma+ R u - V psi + lambda = gamma+ F0 - phi0 on S
///   sum_j w_j psi_j = 0
/// lambda absorbs the additive constant that the mean-zero condition on psi removes.
struct BdieSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  int n_u = 0;
  int n_b = 0;
  bool layer_warning = false;

  Eigen::Index size() const { return matrix.rows(); }
  Eigen::MatrixXd remainder_block() const { return matrix.topLeftCorner(n_u, n_u) - Eigen::MatrixXd::Identity(n_u, n_u); }
  Eigen::MatrixXd trace_remainder_block() const { return matrix.block(n_u, 0, n_b, n_u); }
  Eigen::MatrixXd single_layer_block() const { return -matrix.block(n_u, n_u, n_b, n_b); }
};

BdieSystem assemble_system(const Discretization& d);

enum class SolveMethod { direct, iterative };

struct SolverOptions {
  SolveMethod method = SolveMethod::direct;
  double tolerance = 1e-12;
  int max_iterations = 500;
  int restart = 60;
  double singular_rcond = 1e-13;
};

struct BdieSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd psi;
  double lambda = 0.0;
  double residual = 0.0;        // relative residual ||M x - b|| / ||b||
  double rcond = 0.0;           // reciprocal 1-norm condition estimate (direct path)
  int iterations = 0;
  std::string method;
};

BdieSolution solve(const BdieSystem& system, const SolverOptions& options = {});

/// u(y) = F0(y) - R u(y) + V psi(y) - lambda. Throws a domain error inside the curve.
Eigen::VectorXd evaluate_u_field(const Discretization& d, const BdieSolution& sol,
                                 const std::vector<Point>& points);

}  // namespace bdie
