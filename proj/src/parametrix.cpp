#include "bdie/parametrix.hpp"

#include "bdie/error.hpp"

namespace bdie {

double parametrix_P(const Point& x, const Point& y, const CoefficientField& field) {
  return fundamental_solution(x, y).value / field.eval(x).a;
}

BoundaryCoefficient sample_boundary(const BoundaryGrid& grid, const CoefficientField& field) {
  BoundaryCoefficient bc{Eigen::VectorXd(grid.n), Eigen::VectorXd(grid.n)};
  for (int j = 0; j < grid.n; ++j) {
    const CoeffValue v = field.eval(grid.points[j]);
    bc.a[j] = v.a;
    bc.dn_log_a[j] = grid.normals[j].dot(v.grad) / v.a;
  }
  return bc;
}

RemainderFactors remainder_factors(const DomainMesh& mesh, const CoefficientField& field,
                                   int n_elements) {
  const int ne = n_elements < 0 ? static_cast<int>(mesh.elements().size()) : n_elements;
  const int nn = ne * mesh.order() * mesh.order();
  RemainderFactors f{Eigen::VectorXd(nn), Eigen::VectorXd(nn), Eigen::VectorXd(nn)};
  for (int k = 0; k < nn; ++k) {
    const CoeffValue v = field.eval(mesh.points()[k]);
    const Point g = v.grad_log();
    f.c_gx[k] = g.x();
    f.c_gy[k] = g.y();
    f.c_log[k] = -v.lap_log();
  }
  return f;
}

double volume_P(const DomainMesh& mesh, const Eigen::VectorXd& rho, const CoefficientField& field,
                const Point& y, const VolumeQuadOptions& opt) {
  Eigen::VectorXd q(rho.size());
  for (Eigen::Index k = 0; k < rho.size(); ++k) q[k] = rho[k] / field.eval(mesh.points()[k]).a;
  return newtonian_potential(mesh, q, y, opt).value;
}

Eigen::MatrixXd remainder_matrix(const DomainMesh& mesh, const CoefficientField& field,
                                 const std::vector<Point>& targets, int n_elements,
                                 const VolumeQuadOptions& opt) {
  const int ne = n_elements < 0 ? static_cast<int>(mesh.elements().size()) : n_elements;
  const int nn = ne * mesh.order() * mesh.order();
  if (field.is_constant()) return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(targets.size()), nn);
  const RemainderFactors f = remainder_factors(mesh, field, ne);
  return newtonian_combination(mesh, targets, ne, f.c_log, f.c_gx, f.c_gy, opt);
}

double remainder_R(const DomainMesh& mesh, const Eigen::VectorXd& rho,
                   const CoefficientField& field, const Point& y, const VolumeQuadOptions& opt) {
  const int ne = static_cast<int>(rho.size()) / (mesh.order() * mesh.order());
  return (remainder_matrix(mesh, field, {y}, ne, opt) * rho)[0];
}

Eigen::VectorXd trace_remainder(const DomainMesh& mesh, const Eigen::VectorXd& rho,
                                const CoefficientField& field, const BoundaryGrid& grid,
                                const VolumeQuadOptions& opt) {
  const int ne = static_cast<int>(rho.size()) / (mesh.order() * mesh.order());
  return remainder_matrix(mesh, field, grid.points, ne, opt) * rho;
}

double layer_V(const BoundaryGrid& grid, const Eigen::VectorXd& rho, const CoefficientField& field,
               const Point& y) {
  const BoundaryCoefficient bc = sample_boundary(grid, field);
  return layer_potential_offboundary(grid, rho.cwiseQuotient(bc.a), LayerKind::single, y);
}

Eigen::VectorXd boundary_V(const BoundaryGrid& grid, const Eigen::VectorXd& rho,
                           const CoefficientField& field) {
  return boundary_V_matrix(grid, sample_boundary(grid, field)) * rho;
}

double layer_W(const BoundaryGrid& grid, const Eigen::VectorXd& tau, const CoefficientField& field,
               const Point& y) {
  const BoundaryCoefficient bc = sample_boundary(grid, field);
  return layer_potential_offboundary(grid, tau, LayerKind::double_, y) -
         layer_potential_offboundary(grid, tau.cwiseProduct(bc.dn_log_a), LayerKind::single, y);
}

Eigen::VectorXd boundary_W(const BoundaryGrid& grid, const Eigen::VectorXd& tau,
                           const CoefficientField& field) {
  return boundary_W_matrix(grid, sample_boundary(grid, field)) * tau;
}

Eigen::MatrixXd layer_V_matrix(const BoundaryGrid& grid, const BoundaryCoefficient& bc,
                               const std::vector<Point>& targets, bool* warn) {
  return layer_matrix(grid, LayerKind::single, targets, warn) * bc.a.cwiseInverse().asDiagonal();
}

Eigen::MatrixXd layer_W_matrix(const BoundaryGrid& grid, const BoundaryCoefficient& bc,
                               const std::vector<Point>& targets, bool* warn) {
  Eigen::MatrixXd w = layer_matrix(grid, LayerKind::double_, targets, warn);
  if (bc.dn_log_a.cwiseAbs().maxCoeff() > 0.0)
    w -= layer_matrix(grid, LayerKind::single, targets, warn) * bc.dn_log_a.asDiagonal();
  return w;
}

Eigen::MatrixXd boundary_V_matrix(const BoundaryGrid& grid, const BoundaryCoefficient& bc) {
  return single_layer_matrix(grid) * bc.a.cwiseInverse().asDiagonal();
}

Eigen::MatrixXd boundary_W_matrix(const BoundaryGrid& grid, const BoundaryCoefficient& bc) {
  return double_layer_matrix(grid) - single_layer_matrix(grid) * bc.dn_log_a.asDiagonal();
}

ConormalOps conormal_ops(const BoundaryGrid& grid, const Eigen::VectorXd& rho,
                         const CoefficientField& field) {
  const BoundaryCoefficient bc = sample_boundary(grid, field);
  const Eigen::MatrixXd wa = adjoint_double_layer_matrix(grid);
  ConormalOps ops;
  ops.w_adjoint = bc.a.cwiseProduct(wa * rho.cwiseQuotient(bc.a));
  ops.l_hat = bc.a.cwiseProduct(hypersingular(grid, rho));
  const Eigen::VectorXd sigma = rho.cwiseProduct(bc.dn_log_a);
  const Eigen::VectorXd wsig = wa * sigma;
  ops.l_plus = ops.l_hat - bc.a.cwiseProduct(0.5 * sigma + wsig);
  ops.l_minus = ops.l_hat - bc.a.cwiseProduct(-0.5 * sigma + wsig);
  return ops;
}

Eigen::VectorXd conormal_derivative(const std::function<Point(const Point&)>& grad_u,
                                    const BoundaryGrid& grid, const CoefficientField& field) {
  Eigen::VectorXd t(grid.n);
  for (int j = 0; j < grid.n; ++j)
    t[j] = field.eval(grid.points[j]).a * grid.normals[j].dot(grad_u(grid.points[j]));
  return t;
}

double cutoff_chi(double radius, double r) {
  if (r <= radius) return 1.0;
  if (r >= 2.0 * radius) return 0.0;
  const double s = (r - radius) / radius;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

RemainderSplit remainder_split(const DomainMesh& mesh, const Eigen::MatrixXd& remainder, double r) {
  if (!(r > mesh.curve().circumradius()))
    throw Error(ErrorCategory::geometry, "cutoff radius must exceed the curve circumradius");
  RemainderSplit s;
  const Eigen::Index n = remainder.cols();
  s.chi.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) s.chi[k] = cutoff_chi(r, mesh.points()[k].norm());
  s.compact_part = remainder * s.chi.asDiagonal();
  s.smooth_part = remainder * (Eigen::VectorXd::Ones(n) - s.chi).asDiagonal();
  return s;
}

}  // namespace bdie
