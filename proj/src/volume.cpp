#include "bdie/volume.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "bdie/quadrature.hpp"

namespace bdie {

namespace {

constexpr double kInv2Pi = 0.5 / std::numbers::pi;

struct ElementBounds {
  std::vector<Point> center;
  std::vector<double> radius;
};

ElementBounds element_bounds(const DomainMesh& mesh) {
  const auto n = mesh.elements().size();
  ElementBounds b;
  b.center.resize(n);
  b.radius.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    const int id = static_cast<int>(e);
    b.center[e] = mesh.map(id, 0.0, 0.0);
    double r = 0.0;
    for (int k = -2; k <= 2; ++k) {
      const double s = 0.5 * k;
      for (const auto& [xi, eta] : std::array<std::pair<double, double>, 4>{
               {{s, -1.0}, {s, 1.0}, {-1.0, s}, {1.0, s}}})
        r = std::max(r, (mesh.map(id, xi, eta) - b.center[e]).norm());
    }
    b.radius[e] = r;
  }
  return b;
}

class RowBuilder {
 public:
  RowBuilder(const DomainMesh& mesh, const VolumeQuadOptions& opt)
      : mesh_(mesh),
        opt_(opt),
        p_(mesh.order()),
        native_(gauss_legendre(p_)),
        polar_(gauss_legendre(opt.polar_order)),
        bary_(barycentric_weights(native_.nodes)) {}

  void add_element(int e, const Point& y, const ElementBounds& bounds, NewtonianRow& row) const {
    const double dist = (y - bounds.center[e]).norm();
    const int first = mesh_.elements()[e].first_node;
    if (dist >= opt_.near_factor * bounds.radius[e]) {
      for (int k = 0; k < p_ * p_; ++k) {
        const int node = first + k;
        accumulate(mesh_.points()[node], y, mesh_.weights()[node], row.log[node], row.gx[node],
                   row.gy[node]);
      }
      return;
    }
    Eigen::MatrixXd cl = Eigen::MatrixXd::Zero(p_, p_), cx = cl, cy = cl;
    bool inside = false;
    DomainMesh::Local loc{e, 0.0, 0.0};
    if (dist <= 1.5 * bounds.radius[e]) {
      loc = mesh_.local_coordinates(e, y);
      const double lim = 1.0 + opt_.closure_tol;
      inside = std::abs(loc.xi) <= lim && std::abs(loc.eta) <= lim;
    }
    if (inside) {
      singular(e, y, std::clamp(loc.xi, -1.0, 1.0), std::clamp(loc.eta, -1.0, 1.0), cl, cx, cy);
    } else {
      adaptive(e, y, -1.0, 1.0, -1.0, 1.0, 0, cl, cx, cy);
    }
    for (int a = 0; a < p_; ++a)
      for (int b = 0; b < p_; ++b) {
        const int node = first + a * p_ + b;
        row.log[node] += cl(a, b);
        row.gx[node] += cx(a, b);
        row.gy[node] += cy(a, b);
      }
  }

 private:
  static void accumulate(const Point& x, const Point& y, double w, double& l, double& gx,
                         double& gy) {
    const Point r = x - y;
    const double r2 = r.squaredNorm();
    if (r2 == 0.0) return;  // measure-zero point; only reachable through degenerate input
    l += w * 0.5 * kInv2Pi * std::log(r2);
    gx -= w * kInv2Pi * r.x() / r2;
    gy -= w * kInv2Pi * r.y() / r2;
  }

  void basis(double t, std::span<double> out) const { lagrange_basis(native_.nodes, bary_, t, out); }

  // Tensor Gauss rule on a sub-square, interpolated back to the element nodes.
  void leaf(int e, const Point& y, double xa, double xb, double ya, double yb, Eigen::MatrixXd& cl,
            Eigen::MatrixXd& cx, Eigen::MatrixXd& cy) const {
    const int q = p_;
    Eigen::MatrixXd lxi(q, p_), leta(q, p_);
    Eigen::MatrixXd ml(q, q), mx(q, q), my(q, q);
    std::vector<double> tmp(p_);
    std::vector<double> xi(q), eta(q);
    for (int i = 0; i < q; ++i) {
      xi[i] = xa + 0.5 * (xb - xa) * (native_.nodes[i] + 1.0);
      eta[i] = ya + 0.5 * (yb - ya) * (native_.nodes[i] + 1.0);
      basis(xi[i], tmp);
      for (int b = 0; b < p_; ++b) lxi(i, b) = tmp[b];
      basis(eta[i], tmp);
      for (int b = 0; b < p_; ++b) leta(i, b) = tmp[b];
    }
    const double scale = 0.25 * (xb - xa) * (yb - ya);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        const double w = native_.weights[i] * native_.weights[j] * scale *
                         mesh_.jacobian(e, xi[j], eta[i]);
        double l = 0.0, gx = 0.0, gy = 0.0;
        accumulate(mesh_.map(e, xi[j], eta[i]), y, w, l, gx, gy);
        ml(i, j) = l;
        mx(i, j) = gx;
        my(i, j) = gy;
      }
    cl.noalias() += leta.transpose() * ml * lxi;
    cx.noalias() += leta.transpose() * mx * lxi;
    cy.noalias() += leta.transpose() * my * lxi;
  }

  void adaptive(int e, const Point& y, double xa, double xb, double ya, double yb, int depth,
                Eigen::MatrixXd& cl, Eigen::MatrixXd& cx, Eigen::MatrixXd& cy) const {
    const double xm = 0.5 * (xa + xb), ym = 0.5 * (ya + yb);
    const Point c = mesh_.map(e, xm, ym);
    double r = 0.0;
    for (double sx : {xa, xm, xb})
      for (double sy : {ya, ym, yb}) r = std::max(r, (mesh_.map(e, sx, sy) - c).norm());
    if ((y - c).norm() >= opt_.near_factor * r || depth >= opt_.max_depth) {
      leaf(e, y, xa, xb, ya, yb, cl, cx, cy);
      return;
    }
    adaptive(e, y, xa, xm, ya, ym, depth + 1, cl, cx, cy);
    adaptive(e, y, xm, xb, ya, ym, depth + 1, cl, cx, cy);
    adaptive(e, y, xa, xm, ym, yb, depth + 1, cl, cx, cy);
    adaptive(e, y, xm, xb, ym, yb, depth + 1, cl, cx, cy);
  }

  // Target inside (or on the closure of) the element: one triangle per edge with its apex
  // at the target. Radial coordinate lambda = v^3 smooths the log factor; along the edge a
  // sinh map clusters points near the foot of the perpendicular from the apex.
  void singular(int e, const Point& y, double x0, double y0, Eigen::MatrixXd& cl,
                Eigen::MatrixXd& cx, Eigen::MatrixXd& cy) const {
    static constexpr std::array<std::array<double, 4>, 4> edges{{
        {-1.0, -1.0, 1.0, -1.0}, {1.0, -1.0, 1.0, 1.0}, {1.0, 1.0, -1.0, 1.0}, {-1.0, 1.0, -1.0, -1.0}}};
    const int n = opt_.polar_order;
    std::vector<double> bx(p_), by(p_);
    for (const auto& ed : edges) {
      const double ax = ed[0], ay = ed[1], ex = ed[2] - ed[0], ey = ed[3] - ed[1];
      const double len2 = ex * ex + ey * ey;
      const double cross = std::abs((ax - x0) * ey - (ay - y0) * ex);  // 2 * triangle area
      if (cross < 1e-13) continue;
      const double tau0 = ((x0 - ax) * ex + (y0 - ay) * ey) / len2;
      const double hs = cross / len2;  // apex height in units of the edge parameter
      const double wa = std::asinh((0.0 - tau0) / hs), wb = std::asinh((1.0 - tau0) / hs);
      for (int it = 0; it < n; ++it) {
        const double w = 0.5 * (wa + wb) + 0.5 * (wb - wa) * polar_.nodes[it];
        const double tau = tau0 + hs * std::sinh(w);
        const double dtau = hs * std::cosh(w) * 0.5 * (wb - wa) * polar_.weights[it];
        const double qx = ax + tau * ex - x0, qy = ay + tau * ey - y0;
        for (int iv = 0; iv < n; ++iv) {
          const double v = 0.5 * (polar_.nodes[iv] + 1.0);
          const double lam = v * v * v;
          const double dlam = 3.0 * v * v * 0.5 * polar_.weights[iv];
          const double xi = x0 + lam * qx, eta = y0 + lam * qy;
          const double weight = dtau * dlam * lam * cross * mesh_.jacobian(e, xi, eta);
          double l = 0.0, gx = 0.0, gy = 0.0;
          accumulate(mesh_.map(e, xi, eta), y, weight, l, gx, gy);
          basis(xi, bx);
          basis(eta, by);
          for (int a = 0; a < p_; ++a)
            for (int b = 0; b < p_; ++b) {
              const double phi = by[a] * bx[b];
              cl(a, b) += l * phi;
              cx(a, b) += gx * phi;
              cy(a, b) += gy * phi;
            }
        }
      }
    }
  }

  const DomainMesh& mesh_;
  VolumeQuadOptions opt_;
  int p_;
  const GaussRule& native_;
  const GaussRule& polar_;
  std::vector<double> bary_;
};

NewtonianRow row_with_bounds(const DomainMesh& mesh, const Point& y, int n_elements,
                             const ElementBounds& bounds, const RowBuilder& builder) {
  const int ne = n_elements < 0 ? static_cast<int>(mesh.elements().size()) : n_elements;
  const int nn = ne * mesh.order() * mesh.order();
  NewtonianRow row{Eigen::VectorXd::Zero(nn), Eigen::VectorXd::Zero(nn), Eigen::VectorXd::Zero(nn)};
  for (int e = 0; e < ne; ++e) builder.add_element(e, y, bounds, row);
  return row;
}

}  // namespace

NewtonianRow newtonian_row(const DomainMesh& mesh, const Point& y, int n_elements,
                           const VolumeQuadOptions& opt) {
  const ElementBounds bounds = element_bounds(mesh);
  const RowBuilder builder(mesh, opt);
  return row_with_bounds(mesh, y, n_elements, bounds, builder);
}

NewtonianValue newtonian_potential(const DomainMesh& mesh, const Eigen::VectorXd& g,
                                   const Point& y, const VolumeQuadOptions& opt) {
  const NewtonianRow row = newtonian_row(mesh, y, -1, opt);
  return {row.log.dot(g), Point(row.gx.dot(g), row.gy.dot(g))};
}

std::vector<NewtonianValue> newtonian_potential(const DomainMesh& mesh, const Eigen::VectorXd& g,
                                                const std::vector<Point>& targets,
                                                const VolumeQuadOptions& opt) {
  const ElementBounds bounds = element_bounds(mesh);
  const RowBuilder builder(mesh, opt);
  std::vector<NewtonianValue> out(targets.size());
  const int nt = static_cast<int>(targets.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < nt; ++i) {
    const NewtonianRow row = row_with_bounds(mesh, targets[i], -1, bounds, builder);
    out[i] = {row.log.dot(g), Point(row.gx.dot(g), row.gy.dot(g))};
  }
  return out;
}

Eigen::MatrixXd newtonian_combination(const DomainMesh& mesh, const std::vector<Point>& targets,
                                      int n_elements, const Eigen::VectorXd& c_log,
                                      const Eigen::VectorXd& c_gx, const Eigen::VectorXd& c_gy,
                                      const VolumeQuadOptions& opt) {
  const ElementBounds bounds = element_bounds(mesh);
  const RowBuilder builder(mesh, opt);
  const int nt = static_cast<int>(targets.size());
  Eigen::MatrixXd out(nt, c_log.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < nt; ++i) {
    const NewtonianRow row = row_with_bounds(mesh, targets[i], n_elements, bounds, builder);
    out.row(i) = (c_log.cwiseProduct(row.log) + c_gx.cwiseProduct(row.gx) +
                  c_gy.cwiseProduct(row.gy)).transpose();
  }
  return out;
}

}  // namespace bdie
