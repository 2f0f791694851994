#pragma once

#include <Eigen/Dense>

#include "bdie/geometry.hpp"

namespace bdie {

struct FundamentalValue {
  double value;
  Point grad_x;
  Point grad_y;
};

/// P(x - y) = (1/2pi) log|x - y|. Throws singular_evaluation when x == y.
FundamentalValue fundamental_solution(const Point& x, const Point& y);

enum class LayerKind { single, double_ };

/// Off-boundary layer potentials
///   V rho(y) = -int_S P(x - y) rho(x) dS(x),   W tau(y) = -int_S d_{n(x)} P(x - y) tau(x) dS(x).
/// Targets close to S are handled by trigonometric upsampling of the density until the
/// trapezoidal rule resolves the near singularity; `accuracy_warning` is raised if the
/// upsampling cap was hit.
struct LayerEvalOptions {
  double resolution = 36.0;  // required (fine nodes) x (parameter distance)
  int max_level = 9;         // at most N * 2^max_level fine nodes
};

Eigen::RowVectorXd layer_row(const BoundaryGrid& grid, LayerKind kind, const Point& y,
                             bool* accuracy_warning = nullptr, const LayerEvalOptions& opt = {});

double layer_potential_offboundary(const BoundaryGrid& grid, const Eigen::VectorXd& density,
                                   LayerKind kind, const Point& y,
                                   bool* accuracy_warning = nullptr,
                                   const LayerEvalOptions& opt = {});

/// Rows of the layer operator at many targets, assembled in parallel.
Eigen::MatrixXd layer_matrix(const BoundaryGrid& grid, LayerKind kind,
                             const std::vector<Point>& targets, bool* accuracy_warning = nullptr,
                             const LayerEvalOptions& opt = {});

/// Boundary operators as dense N x N matrices acting on nodal values.
Eigen::MatrixXd single_layer_matrix(const BoundaryGrid& grid);           // direct value of V
Eigen::MatrixXd double_layer_matrix(const BoundaryGrid& grid);           // direct value of W
Eigen::MatrixXd adjoint_double_layer_matrix(const BoundaryGrid& grid);   // W'
/// Hypersingular operator in Maue form -D_s V D_s; symbol +|n|/2 on the unit circle.
Eigen::MatrixXd hypersingular_matrix(const BoundaryGrid& grid);

Eigen::VectorXd boundary_single_layer(const BoundaryGrid& grid, const Eigen::VectorXd& rho);
enum class DoubleLayerSide { direct, adjoint };
Eigen::VectorXd boundary_double_layer(const BoundaryGrid& grid, const Eigen::VectorXd& tau,
                                      DoubleLayerSide side = DoubleLayerSide::direct);
Eigen::VectorXd hypersingular(const BoundaryGrid& grid, const Eigen::VectorXd& tau);

/// Arc-length derivative d/ds on the grid (spectral).
Eigen::MatrixXd arclength_diff_matrix(const BoundaryGrid& grid);

/// One-sided limits gamma^{+} (side = +1, from the unbounded domain) or gamma^{-}
/// (side = -1) of a layer potential, by Neville extrapolation of values at x_i -/+ eps n_i.
Eigen::VectorXd layer_trace_limit(const BoundaryGrid& grid, const Eigen::VectorXd& density,
                                  LayerKind kind, int side, double eps0 = 0.05, int levels = 5,
                                  bool* accuracy_warning = nullptr);

}  // namespace bdie
