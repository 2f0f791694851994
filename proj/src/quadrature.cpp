#include "bdie/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace bdie {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_gauss_legendre(n));
  return *slot;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  const auto n = nodes.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) w[j] /= (nodes[j] - nodes[k]);
  return w;
}

void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double x,
                    std::span<double> out) {
  const auto n = nodes.size();
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = x - nodes[j];
    if (d == 0.0) {
      for (std::size_t k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
      return;
    }
    out[j] = bary[j] / d;
    denom += out[j];
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= denom;
}

double periodic_sinc(int n, double t) {
  const double half = 0.5 * t;
  const double s = std::sin(half);
  if (std::abs(s) < 1e-14) {
    // t is a multiple of 2pi: the kernel is 1 there (n even, t = 2pi k).
    return 1.0;
  }
  return std::sin(n * half) * std::cos(half) / (s * n);
}

Eigen::MatrixXd trig_upsample_matrix(int n, int m) {
  if (m % n != 0) throw std::invalid_argument("trig_upsample_matrix: m must be a multiple of n");
  const int ratio = m / n;
  // entries depend only on the fine offset (i - j * ratio) mod m
  std::vector<double> kernel(m);
  for (int d = 0; d < m; ++d) {
    if (d % ratio == 0) {
      kernel[d] = (d == 0) ? 1.0 : 0.0;
    } else {
      kernel[d] = periodic_sinc(n, 2.0 * std::numbers::pi * d / m);
    }
  }
  Eigen::MatrixXd interp(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) interp(i, j) = kernel[((i - j * ratio) % m + m) % m];
  return interp;
}

Eigen::VectorXd trig_upsample(const Eigen::VectorXd& values, int m) {
  const int n = static_cast<int>(values.size());
  // discrete Fourier coefficients, then evaluate the (Nyquist-symmetric) series
  const int half = n / 2;
  std::vector<double> a(half + 1, 0.0), b(half + 1, 0.0);
  for (int k = 0; k <= half; ++k) {
    double sa = 0.0, sb = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * std::numbers::pi * j / n;
      sa += values[j] * std::cos(k * t);
      sb += values[j] * std::sin(k * t);
    }
    a[k] = 2.0 * sa / n;
    b[k] = 2.0 * sb / n;
  }
  Eigen::VectorXd out(m);
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * std::numbers::pi * i / m;
    double v = 0.5 * a[0];
    for (int k = 1; k < half; ++k) v += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
    v += 0.5 * a[half] * std::cos(half * t);
    out[i] = v;
  }
  return out;
}

Eigen::MatrixXd periodic_diff_matrix(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = 0.5 * sign / std::tan(0.5 * k * h);
    }
  return d;
}

Eigen::MatrixXd real_fourier_basis(int n, std::vector<int>& freq) {
  Eigen::MatrixXd q(n, n);
  freq.assign(n, 0);
  const double h = 2.0 * std::numbers::pi / n;
  int col = 0;
  q.col(col).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  freq[col++] = 0;
  for (int k = 1; k < n / 2; ++k) {
    for (int j = 0; j < n; ++j) {
      q(j, col) = std::sqrt(2.0 / n) * std::cos(k * j * h);
      q(j, col + 1) = std::sqrt(2.0 / n) * std::sin(k * j * h);
    }
    freq[col] = k;
    freq[col + 1] = k;
    col += 2;
  }
  for (int j = 0; j < n; ++j) q(j, col) = ((j % 2 == 0) ? 1.0 : -1.0) / std::sqrt(static_cast<double>(n));
  freq[col] = n / 2;
  return q;
}

double extrapolate_to_zero(std::span<const double> h, std::span<const double> f) {
  std::vector<double> p(f.begin(), f.end());
  const auto n = p.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
  return p[0];
}

}  // namespace bdie
