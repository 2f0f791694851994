#pragma once

#include <functional>

#include <Eigen/Dense>

#include "bdie/coefficient.hpp"
#include "bdie/laplace.hpp"
#include "bdie/volume.hpp"

namespace bdie {

/// P(x, y) = P_Delta(x - y) / a(x).
double parametrix_P(const Point& x, const Point& y, const CoefficientField& field);

/// Coefficient data sampled on the boundary nodes.
struct BoundaryCoefficient {
  Eigen::VectorXd a;
  Eigen::VectorXd dn_log_a;  // n . grad a / a
};
BoundaryCoefficient sample_boundary(const BoundaryGrid& grid, const CoefficientField& field);

/// Per-node factors of the remainder, as used by newtonian_combination.
struct RemainderFactors {
  Eigen::VectorXd c_log, c_gx, c_gy;
};
RemainderFactors remainder_factors(const DomainMesh& mesh, const CoefficientField& field,
                                   int n_elements);

// ---- volume operators -------------------------------------------------------

/// P rho(y) = P_Delta(rho / a)(y).
double volume_P(const DomainMesh& mesh, const Eigen::VectorXd& rho, const CoefficientField& field,
                const Point& y, const VolumeQuadOptions& opt = {});

/// R rho(y) = div P_Delta(rho grad ln a)(y) - P_Delta(rho lap ln a)(y), evaluated through the
/// gradient of the Newtonian potential. rho lives on the first n_elements elements.
Eigen::MatrixXd remainder_matrix(const DomainMesh& mesh, const CoefficientField& field,
                                 const std::vector<Point>& targets, int n_elements = -1,
                                 const VolumeQuadOptions& opt = {});
double remainder_R(const DomainMesh& mesh, const Eigen::VectorXd& rho,
                   const CoefficientField& field, const Point& y, const VolumeQuadOptions& opt = {});
Eigen::VectorXd trace_remainder(const DomainMesh& mesh, const Eigen::VectorXd& rho,
                                const CoefficientField& field, const BoundaryGrid& grid,
                                const VolumeQuadOptions& opt = {});

// ---- layer operators ----------------------------------------------------------

/// V rho = V_Delta(rho / a)
double layer_V(const BoundaryGrid& grid, const Eigen::VectorXd& rho, const CoefficientField& field,
               const Point& y);
Eigen::VectorXd boundary_V(const BoundaryGrid& grid, const Eigen::VectorXd& rho,
                           const CoefficientField& field);
/// W tau = W_Delta tau - V_Delta(tau d_n ln a)
double layer_W(const BoundaryGrid& grid, const Eigen::VectorXd& tau, const CoefficientField& field,
               const Point& y);
Eigen::VectorXd boundary_W(const BoundaryGrid& grid, const Eigen::VectorXd& tau,
                           const CoefficientField& field);

/// Matrix forms (targets x N) used by the system assembly.
Eigen::MatrixXd layer_V_matrix(const BoundaryGrid& grid, const BoundaryCoefficient& bc,
                               const std::vector<Point>& targets, bool* warn = nullptr);
Eigen::MatrixXd layer_W_matrix(const BoundaryGrid& grid, const BoundaryCoefficient& bc,
                               const std::vector<Point>& targets, bool* warn = nullptr);
Eigen::MatrixXd boundary_V_matrix(const BoundaryGrid& grid, const BoundaryCoefficient& bc);
Eigen::MatrixXd boundary_W_matrix(const BoundaryGrid& grid, const BoundaryCoefficient& bc);

/// Conormal-type operators on S.
///   W' rho  = a W'_Delta(rho / a)
///   L^ rho  = a L_Delta rho
///   L+- rho = L^ rho - a (+-sigma/2 + W'_Delta sigma),  sigma = rho d_n ln a
struct ConormalOps {
  Eigen::VectorXd w_adjoint, l_hat, l_plus, l_minus;
};
ConormalOps conormal_ops(const BoundaryGrid& grid, const Eigen::VectorXd& rho,
                         const CoefficientField& field);

/// T+ u = a n . grad u at the boundary nodes.
Eigen::VectorXd conormal_derivative(const std::function<Point(const Point&)>& grad_u,
                                    const BoundaryGrid& grid, const CoefficientField& field);

// ---- remainder split -----------------------------------------------------------

/// Radial cutoff: 1 on B_r, 0 outside B_2r, quintic smoothstep in between.
double cutoff_chi(double radius, double r);

struct RemainderSplit {
  Eigen::MatrixXd smooth_part;   // R_s = R (1 - chi)
  Eigen::MatrixXd compact_part;  // R_c = R chi
  Eigen::VectorXd chi;
};
/// Splits a remainder matrix whose columns are the first nodes of `mesh`.
RemainderSplit remainder_split(const DomainMesh& mesh, const Eigen::MatrixXd& remainder, double r);

}  // namespace bdie
