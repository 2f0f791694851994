#include "bdie/laplace.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "bdie/error.hpp"
#include "bdie/quadrature.hpp"

namespace bdie {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv2Pi = 0.5 / std::numbers::pi;

// Geometry on N * 2^level equispaced nodes plus the interpolation kernel back to N nodes.
struct FineCurve {
  int m = 0, ratio = 1;
  std::vector<Point> points, normals;
  std::vector<double> weights;
  std::vector<double> sinc;  // sinc[(i - j * ratio) mod m] maps coarse node j to fine node i
};

FineCurve make_fine_curve(const BoundaryGrid& grid, int level) {
  FineCurve f;
  f.ratio = 1 << level;
  f.m = grid.n * f.ratio;
  f.points.resize(f.m);
  f.normals.resize(f.m);
  f.weights.resize(f.m);
  for (int i = 0; i < f.m; ++i) {
    const double t = 2.0 * kPi * i / f.m;
    const CurvePoint cp = curve_eval(*grid.curve, t, grid.normal_sign);
    f.points[i] = cp.point;
    f.normals[i] = cp.normal;
    f.weights[i] = 2.0 * kPi / f.m * cp.speed;
  }
  f.sinc.resize(f.m);
  for (int d = 0; d < f.m; ++d)
    f.sinc[d] = (d % f.ratio == 0) ? (d == 0 ? 1.0 : 0.0) : periodic_sinc(grid.n, 2.0 * kPi * d / f.m);
  return f;
}

// Distance from y to S and the local speed there (nearest sample, then Newton on t).
std::pair<double, double> nearest_on_curve(const BoundaryGrid& grid, const Point& y) {
  const Curve& c = *grid.curve;
  const int samples = 8 * grid.n;
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double d = (c.position(2.0 * kPi * i / samples) - y).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  double t = 2.0 * kPi * best / samples;
  for (int it = 0; it < 8; ++it) {
    const Point r = c.position(t) - y, d1 = c.first_derivative(t), d2 = c.second_derivative(t);
    const double g = r.dot(d1), dg = d1.squaredNorm() + r.dot(d2);
    if (dg <= 0.0) break;
    const double step = g / dg;
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return {(c.position(t) - y).norm(), c.first_derivative(t).norm()};
}

int required_level(const BoundaryGrid& grid, const Point& y, const LayerEvalOptions& opt,
                   bool* warn) {
  // Coarse trapezoid is already converged well away from S.
  const auto [d, speed] = nearest_on_curve(grid, y);
  if (d == 0.0) throw Error(ErrorCategory::singular_evaluation, "layer potential target lies on S");
  const double need = opt.resolution * speed / d;
  int level = 0;
  while (grid.n * static_cast<double>(1 << level) < need && level < opt.max_level) ++level;
  if (grid.n * static_cast<double>(1 << level) < need && warn) *warn = true;
  return level;
}

double kernel(LayerKind kind, const Point& x, const Point& nx, const Point& y) {
  const Point r = x - y;
  if (kind == LayerKind::single) return -kInv2Pi * 0.5 * std::log(r.squaredNorm());
  return -kInv2Pi * r.dot(nx) / r.squaredNorm();
}

Eigen::RowVectorXd row_at_level(const BoundaryGrid& grid, const FineCurve* fine, LayerKind kind,
                                const Point& y) {
  const int n = grid.n;
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
  if (!fine) {
    for (int j = 0; j < n; ++j)
      row[j] = kernel(kind, grid.points[j], grid.normals[j], y) * grid.weights[j];
    return row;
  }
  const int m = fine->m;
  std::vector<double> k(m);
  int nearest = 0;
  double nearest_d = std::numeric_limits<double>::infinity();
  double ksum = 0.0;
  for (int i = 0; i < m; ++i) {
    k[i] = kernel(kind, fine->points[i], fine->normals[i], y) * fine->weights[i];
    ksum += k[i];
    const double d = (fine->points[i] - y).squaredNorm();
    if (d < nearest_d) {
      nearest_d = d;
      nearest = i;
    }
  }
  if (kind == LayerKind::double_) {
    // W tau = W(tau - tau*) + tau* W(1), and W(1) is known exactly off S
    const double w1 = grid.curve->encloses(y) ? grid.normal_sign : 0.0;
    k[nearest] += w1 - ksum;
  }
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    const int off = j * fine->ratio;
    for (int i = 0; i < m; ++i) {
      int d = i - off;
      if (d < 0) d += m;
      s += k[i] * fine->sinc[d];
    }
    row[j] = s;
  }
  return row;
}

}  // namespace

FundamentalValue fundamental_solution(const Point& x, const Point& y) {
  const Point r = x - y;
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) throw Error(ErrorCategory::singular_evaluation, "fundamental solution at x == y");
  const Point g = kInv2Pi * r / r2;
  return {kInv2Pi * 0.5 * std::log(r2), g, -g};
}

Eigen::RowVectorXd layer_row(const BoundaryGrid& grid, LayerKind kind, const Point& y,
                             bool* accuracy_warning, const LayerEvalOptions& opt) {
  const int level = required_level(grid, y, opt, accuracy_warning);
  if (level == 0) return row_at_level(grid, nullptr, kind, y);
  const FineCurve fine = make_fine_curve(grid, level);
  return row_at_level(grid, &fine, kind, y);
}

double layer_potential_offboundary(const BoundaryGrid& grid, const Eigen::VectorXd& density,
                                   LayerKind kind, const Point& y, bool* accuracy_warning,
                                   const LayerEvalOptions& opt) {
  return layer_row(grid, kind, y, accuracy_warning, opt).dot(density);
}

Eigen::MatrixXd layer_matrix(const BoundaryGrid& grid, LayerKind kind,
                             const std::vector<Point>& targets, bool* accuracy_warning,
                             const LayerEvalOptions& opt) {
  const int nt = static_cast<int>(targets.size());
  std::vector<int> level(nt);
  bool warn = false;
  for (int i = 0; i < nt; ++i) level[i] = required_level(grid, targets[i], opt, &warn);
  if (warn && accuracy_warning) *accuracy_warning = true;

  std::vector<std::optional<FineCurve>> fine(opt.max_level + 1);
  for (int i = 0; i < nt; ++i)
    if (level[i] > 0 && !fine[level[i]]) fine[level[i]] = make_fine_curve(grid, level[i]);

  Eigen::MatrixXd out(nt, grid.n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < nt; ++i) {
    const FineCurve* f = level[i] > 0 ? &*fine[level[i]] : nullptr;
    out.row(i) = row_at_level(grid, f, kind, targets[i]);
  }
  return out;
}

Eigen::MatrixXd single_layer_matrix(const BoundaryGrid& grid) {
  const int n = grid.n;
  // Kress weights for int log(4 sin^2((t - tau)/2)) f(tau) dtau, depending on i - j only
  std::vector<double> r(n);
  for (int k = 0; k < n; ++k) {
    const double d = 2.0 * kPi * k / n;
    double s = 0.0;
    for (int m = 1; m < n / 2; ++m) s += std::cos(m * d) / m;
    r[k] = -4.0 * kPi / n * s - 4.0 * kPi / (static_cast<double>(n) * n) * std::cos(0.5 * n * d);
  }
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double smooth;
      if (i == j) {
        smooth = std::log(grid.speeds[i]);
      } else {
        const double half = 0.5 * (grid.t[i] - grid.t[j]);
        smooth = 0.5 * std::log((grid.points[i] - grid.points[j]).squaredNorm()) -
                 0.5 * std::log(4.0 * std::sin(half) * std::sin(half));
      }
      v(i, j) = -kInv2Pi * (0.5 * r[(i - j + n) % n] + 2.0 * kPi / n * smooth) * grid.speeds[j];
    }
  return v;
}

Eigen::MatrixXd double_layer_matrix(const BoundaryGrid& grid) {
  const int n = grid.n;
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        // limit of (x_j - x_i).n_j / |x_j - x_i|^2 is -sign * kappa / 2
        w(i, j) = grid.normal_sign * grid.curvatures[i] * grid.weights[i] / (4.0 * kPi);
      } else {
        w(i, j) = kernel(LayerKind::double_, grid.points[j], grid.normals[j], grid.points[i]) *
                  grid.weights[j];
      }
    }
  return w;
}

Eigen::MatrixXd adjoint_double_layer_matrix(const BoundaryGrid& grid) {
  const int n = grid.n;
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        w(i, j) = grid.normal_sign * grid.curvatures[i] * grid.weights[i] / (4.0 * kPi);
      } else {
        const Point r = grid.points[i] - grid.points[j];
        w(i, j) = -kInv2Pi * r.dot(grid.normals[i]) / r.squaredNorm() * grid.weights[j];
      }
    }
  return w;
}

Eigen::MatrixXd arclength_diff_matrix(const BoundaryGrid& grid) {
  Eigen::MatrixXd d = periodic_diff_matrix(grid.n);
  for (int i = 0; i < grid.n; ++i) d.row(i) /= grid.speeds[i];
  return d;
}

Eigen::MatrixXd hypersingular_matrix(const BoundaryGrid& grid) {
  const Eigen::MatrixXd ds = arclength_diff_matrix(grid);
  return -ds * single_layer_matrix(grid) * ds;
}

Eigen::VectorXd boundary_single_layer(const BoundaryGrid& grid, const Eigen::VectorXd& rho) {
  return single_layer_matrix(grid) * rho;
}

Eigen::VectorXd boundary_double_layer(const BoundaryGrid& grid, const Eigen::VectorXd& tau,
                                      DoubleLayerSide side) {
  if (side == DoubleLayerSide::direct) return double_layer_matrix(grid) * tau;
  return adjoint_double_layer_matrix(grid) * tau;
}

Eigen::VectorXd hypersingular(const BoundaryGrid& grid, const Eigen::VectorXd& tau) {
  return hypersingular_matrix(grid) * tau;
}

Eigen::VectorXd layer_trace_limit(const BoundaryGrid& grid, const Eigen::VectorXd& density,
                                  LayerKind kind, int side, double eps0, int levels,
                                  bool* accuracy_warning) {
  Eigen::VectorXd out(grid.n);
  std::vector<double> eps(levels);
  for (int k = 0; k < levels; ++k) eps[k] = eps0 / (1 << k);
  std::vector<std::vector<Point>> targets(levels, std::vector<Point>(grid.n));
  for (int k = 0; k < levels; ++k)
    for (int i = 0; i < grid.n; ++i)
      targets[k][i] = grid.points[i] - side * eps[k] * grid.normals[i];
  std::vector<Eigen::VectorXd> vals(levels);
  for (int k = 0; k < levels; ++k)
    vals[k] = layer_matrix(grid, kind, targets[k], accuracy_warning) * density;
  std::vector<double> f(levels);
  for (int i = 0; i < grid.n; ++i) {
    for (int k = 0; k < levels; ++k) f[k] = vals[k][i];
    out[i] = extrapolate_to_zero(eps, f);
  }
  return out;
}

}  // namespace bdie
