#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bdie {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on P_n, accurate to ~1e-15).
/// Rules are cached, so repeated calls with the same n are cheap and thread-safe.
const GaussRule& gauss_legendre(int n);

/// Barycentric weights for Lagrange interpolation on arbitrary distinct nodes.
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// Values of the Lagrange basis polynomials at x. Writes nodes.size() entries.
void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double x,
                    std::span<double> out);

/// Periodic sinc (Dirichlet) kernel for trigonometric interpolation on N equispaced
/// nodes of [0, 2pi), N even: S_N(t) = sin(N t / 2) cot(t / 2) / N, S_N(0) = 1.
double periodic_sinc(int n, double t);

/// Matrix (M x N) interpolating values on N equispaced nodes onto M = N * 2^level nodes.
Eigen::MatrixXd trig_upsample_matrix(int n, int m);

/// Trigonometric interpolation of equispaced samples onto m equispaced nodes.
Eigen::VectorXd trig_upsample(const Eigen::VectorXd& values, int m);

/// Spectral differentiation matrix d/dt on N equispaced periodic nodes (N even).
Eigen::MatrixXd periodic_diff_matrix(int n);

/// Real orthonormal Fourier basis on N equispaced nodes, returned as an orthogonal
/// matrix whose columns are ordered by frequency; `freq` receives each column's |k|.
Eigen::MatrixXd real_fourier_basis(int n, std::vector<int>& freq);

/// Neville polynomial extrapolation of samples f(h_i) to h = 0.
double extrapolate_to_zero(std::span<const double> h, std::span<const double> f);

}  // namespace bdie
