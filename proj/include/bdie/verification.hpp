#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "bdie/bdie_system.hpp"

namespace bdie {

using GradientField = std::function<Point(const Point&)>;

/// A decaying exact solution with its coefficient and the data it induces.
struct ManufacturedCase {
  std::string name;
  CoefficientPtr field;
  ScalarField u;
  GradientField grad_u;
  ScalarField lap_u;
  ScalarField f;          // div(a grad u) = grad a . grad u + a lap u
  double decay_power = 0; // u = O(|x|^-decay_power)

  DirichletProblem problem(CurvePtr curve) const;
  Eigen::VectorXd psi_exact(const BoundaryGrid& grid) const;  // T+ u
  Eigen::VectorXd u_at(const std::vector<Point>& points) const;
};

/// Catalog: laplace-dipole, laplace-quadrupole, bump-dipole, bump-steep-dipole, zero.
/// params may carry a "coefficient" object that replaces the case's default field.
ManufacturedCase manufactured_case(const std::string& name, const nlohmann::json& params = {});
/// Same catalog entry on an explicit coefficient.
ManufacturedCase manufactured_case(const std::string& name, CoefficientPtr field);
std::vector<std::string> manufactured_case_names();

/// Flux-form finite difference of div(a grad u), Richardson-extrapolated in the step.
double fd_divergence_flux(const CoefficientField& field, const ScalarField& u, const Point& x,
                          double step);

struct CaseCheck {
  double max_fd_rel = 0.0;    // f vs finite-difference div(a grad u) at random exterior points
  double f_mean_rel = 0.0;    // |<f,1>| / <|f|,1> on the mesh
  double psi_mean_rel = 0.0;  // |<psi,1>| / <|psi|,1> on S
  bool ok(double fd_tol = 1e-6, double mean_tol = 1e-8) const;
  nlohmann::json to_json() const;
};
CaseCheck check_case(const ManufacturedCase& c, const Discretization& d, unsigned seed = 7,
                     int n_points = 20);

// ---- kernel-level oracles -----------------------------------------------------------

/// Max errors of V(cos n t) = cos(n t)/2n, L(cos n t) = (n/2) cos(n t) and W(cos n t) = 0
/// on the unit circle, n = 1..max_mode.
struct KernelOracleErrors {
  double single = 0.0, hypersingular = 0.0, double_ = 0.0;
};
KernelOracleErrors kernel_fourier_errors(int n, int max_mode = 8, int normal_sign = kInwardNormalSign);

/// Double layer of the unit density: 1 inside the curve, 1/2 on it, 0 outside.
struct GaussErrors {
  double inside = 0.0, on_curve = 0.0, outside = 0.0;
  double max() const { return std::max({inside, on_curve, outside}); }
};
GaussErrors gauss_identity_errors(CurvePtr curve, int n, int normal_sign = kInwardNormalSign);

/// Jump relations of the parametrix-based potentials, max over densities 1, cos t, sin 2t:
///   gamma+- V rho = V rho on S,  gamma+- W tau = -+tau/2 + W tau on S.
struct JumpErrors {
  double v_plus = 0.0, v_minus = 0.0, w_plus = 0.0, w_minus = 0.0;
  double max() const { return std::max({v_plus, v_minus, w_plus, w_minus}); }
};
JumpErrors jump_relation_errors(const BoundaryGrid& grid, const CoefficientField& field);

// ---- Green identities ------------------------------------------------------------

struct GreenResiduals {
  std::vector<Point> points;
  Eigen::VectorXd third;  // u + R u - V T+u + W gamma+u - P f at the points
  Eigen::VectorXd trace;  // u/2 + gamma+ R u - V T+u + W gamma+u - P f on the boundary nodes
  double max_third() const;
  double max_trace() const;
};
GreenResiduals green_identity_residuals(const ManufacturedCase& c, const Discretization& d,
                                        const std::vector<Point>& points);

/// int_Omega (u A v - v A u) against the boundary terms on S and on |x| = R_trunc.
struct SecondGreen {
  double volume = 0.0;
  double on_curve = 0.0;
  double on_outer_circle = 0.0;  // what remains of the contribution at infinity
  double residual() const { return volume - on_curve - on_outer_circle; }
};
/// Both fields must share a coefficient; the coefficient of `u` is used.
SecondGreen second_green_identity(const ManufacturedCase& u, const ManufacturedCase& v,
                                  const Discretization& d, int outer_samples = 512);

/// Ten fixed points spread over r in [1.3, 4] times the curve's circumradius.
std::vector<Point> default_probe_points(const Curve& curve);

// ---- equivalence -------------------------------------------------------------------

struct EquivalenceReport {
  double psi_error = 0.0, psi_rel = 0.0;  // discrete L2(S)
  double u_error = 0.0, u_rel = 0.0;      // weighted L2 over the domain unknowns
  double v_residual = 0.0;                // ||V(psi - T+u)||_L2(S), undivided
  double pde_residual = 0.0;              // max |FD A u_h - f| at check points
  double pde_floor = 0.0;                 // same stencil applied to the exact u
  double dirichlet_error = 0.0;           // max |gamma+ u_h - phi0| on sampled nodes
  double psi_mean = 0.0;                  // |<psi,1>| / ||psi||
  nlohmann::json to_json() const;
};
EquivalenceReport equivalence_check(const ManufacturedCase& c, const Discretization& d,
                                    const BdieSolution& sol, int dirichlet_samples = 16);

// ---- remainder split -----------------------------------------------------------------

/// Largest singular value of W^1/2 A W^-1/2 by power iteration on its normal matrix.
double weighted_norm_estimate(const Eigen::MatrixXd& a, const Eigen::VectorXd& weights,
                              int iterations = 20, unsigned seed = 1);

/// sup of w2 |grad a| over rings |x| = s, r <= s <= s_max.
double weighted_gradient_tail(const CoefficientField& field, double r, double s_max,
                              double ds = 0.01, int angles = 64);

struct SplitDecayRow {
  double r = 0.0;
  double norm = 0.0;    // ||R_s|| estimate
  double factor = 0.0;  // ||w2 grad a||_Linf(|x| >= r), sampled
  double split_error = 0.0;  // max |R_s + R_c - R|
};
struct SplitDecayReport {
  std::vector<SplitDecayRow> rows;
  double fitted_c = 0.0;
  bool norms_decreasing = false;
  bool factors_decreasing = false;
  bool bounded = false;
  bool ok() const { return norms_decreasing && factors_decreasing && bounded; }
  nlohmann::json to_json() const;
};
/// The remainder acts on the first n_elements elements of the mesh (targets = their nodes).
SplitDecayReport split_decay_study(const CoefficientField& field, const DomainMesh& mesh,
                                   int n_elements, const std::vector<double>& radii,
                                   unsigned seed = 1, const VolumeQuadOptions& opt = {});

// ---- conditioning ---------------------------------------------------------------------

struct ConditioningRow {
  int n = 0;
  double cond = 0.0;         // Sobolev-scaled: L2 on the domain, H^-1/2 -> H^1/2 on S
  double cond_raw = 0.0;     // plain Euclidean
  double sigma_min_v = 0.0;  // scaled single layer on mean-zero densities
  double sigma_min_v_raw = 0.0;
  double constant_mode = 0.0;  // ||V 1|| / ||1||, the direction the constraint removes
};
std::vector<ConditioningRow> conditioning_study(const DirichletProblem& problem,
                                                const DiscretizationOptions& base,
                                                const std::vector<int>& ns);

/// Singular values of the bare single-layer matrix, descending.
Eigen::VectorXd single_layer_singular_values(const BoundaryGrid& grid);

// ---- convergence ------------------------------------------------------------------------

struct RefinementLevel {
  int n = 0;
  double h = 0.0;
  double r_trunc = 0.0;
};
struct ConvergenceRow {
  RefinementLevel level;
  int n_unknown = 0;
  double err_u = 0.0, err_psi = 0.0;
  double order_u = 0.0, order_psi = 0.0;  // NaN on the first level
  double green = 0.0;                     // max third-identity residual at the probes
  double psi_residual = 0.0;              // ||psi - T+u||_L2(S), absolute
  double seconds = 0.0;
};
struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double min_order() const;
  bool errors_decreasing() const;
  /// Strictly decreasing, except that values below `floor` count as converged.
  bool green_decreasing(double floor = 1e-12) const;
};
ConvergenceReport convergence_study(const ManufacturedCase& c, CurvePtr curve,
                                    const DiscretizationOptions& base,
                                    const std::vector<RefinementLevel>& levels,
                                    const SolverOptions& solver = {});

}  // namespace bdie
