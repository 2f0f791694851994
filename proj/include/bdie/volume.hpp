#pragma once

#include <Eigen/Dense>

#include "bdie/geometry.hpp"

namespace bdie {

struct VolumeQuadOptions {
  double near_factor = 3.0;   // element treated as near when |y - c| < near_factor * radius
  int polar_order = 24;       // Gauss points per direction on each singular triangle
  int max_depth = 40;         // adaptive subdivision depth for near elements
  double closure_tol = 1e-10; // local-coordinate slack when deciding if y lies on an element
};

/// Quadrature weights of the Newtonian potential at a single target y:
///   int P(x - y) g(x) dx ~ log . g,   int grad_y P(x - y) g(x) dx ~ (gx . g, gy . g)
/// with P(z) = (1/2pi) log|z|. Only the first `n_elements` elements are integrated (the
/// mesh is ordered radially, so a prefix is a disc-like sub-region). Weights are indexed
/// like the mesh nodes of that prefix.
struct NewtonianRow {
  Eigen::VectorXd log, gx, gy;
};

NewtonianRow newtonian_row(const DomainMesh& mesh, const Point& y, int n_elements = -1,
                           const VolumeQuadOptions& opt = {});

struct NewtonianValue {
  double value;
  Point gradient;
};

/// Newtonian potential of nodal data g at an arbitrary point y (value and y-gradient).
NewtonianValue newtonian_potential(const DomainMesh& mesh, const Eigen::VectorXd& g,
                                   const Point& y, const VolumeQuadOptions& opt = {});

/// Same at many targets; rows computed in parallel, only their products with g are kept.
std::vector<NewtonianValue> newtonian_potential(const DomainMesh& mesh, const Eigen::VectorXd& g,
                                                const std::vector<Point>& targets,
                                                const VolumeQuadOptions& opt = {});

/// Dense targets x nodes matrix with entries
///   c_log[k] * log_tk + c_gx[k] * gx_tk + c_gy[k] * gy_tk
/// over the first `n_elements` elements; the per-node factors have that prefix's length.
Eigen::MatrixXd newtonian_combination(const DomainMesh& mesh, const std::vector<Point>& targets,
                                      int n_elements, const Eigen::VectorXd& c_log,
                                      const Eigen::VectorXd& c_gx, const Eigen::VectorXd& c_gy,
                                      const VolumeQuadOptions& opt = {});

}  // namespace bdie
