#include "pattern_gauge/fem/fields.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::fem {

using geometry::Vec2;

namespace {

std::vector<std::vector<int>> vertex_neighbours(const geometry::Mesh& mesh) {
  std::vector<std::vector<int>> nb(mesh.num_vertices());
  for (const auto& tr : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      nb[tr[i]].push_back(tr[(i + 1) % 3]);
      nb[tr[i]].push_back(tr[(i + 2) % 3]);
    }
  for (auto& n : nb) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return nb;
}

Vec2 triangle_gradient(const geometry::Mesh& mesh, int t, const FieldVector& u) {
  const auto& tr = mesh.triangles[t];
  const Vec2& p0 = mesh.vertices[tr[0]];
  const Vec2& p1 = mesh.vertices[tr[1]];
  const Vec2& p2 = mesh.vertices[tr[2]];
  Vec2 e1 = p1 - p0, e2 = p2 - p0;
  double det = e1.x() * e2.y() - e1.y() * e2.x();
  double du1 = u[tr[1]] - u[tr[0]], du2 = u[tr[2]] - u[tr[0]];
  return Vec2((du1 * e2.y() - du2 * e1.y()) / det, (du2 * e1.x() - du1 * e2.x()) / det);
}

}  // namespace

void recover_gradient(const geometry::Mesh& mesh, const FieldVector& u, FieldVector& gx, FieldVector& gy) {
  const int nv = mesh.num_vertices();
  if (u.size() != nv) throw MismatchError("field length does not match the mesh");
  gx = FieldVector::Zero(nv);
  gy = FieldVector::Zero(nv);
  // Area-weighted averages serve as the fallback when a patch is too degenerate to fit.
  FieldVector w = FieldVector::Zero(nv);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 g = triangle_gradient(mesh, t, u);
    double a = mesh.triangle_area(t);
    for (int v : mesh.triangles[t]) {
      gx[v] += a * g.x();
      gy[v] += a * g.y();
      w[v] += a;
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (w[v] > 0) {
      gx[v] /= w[v];
      gy[v] /= w[v];
    }
  }

  const auto nb = vertex_neighbours(mesh);
  std::vector<int> patch;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  for (int v = 0; v < nv; ++v) {
    patch.assign(nb[v].begin(), nb[v].end());
    for (int w1 : nb[v]) patch.insert(patch.end(), nb[w1].begin(), nb[w1].end());
    patch.push_back(v);
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
    if (patch.size() < 8) continue;
    const Vec2 c = mesh.vertices[v];
    double scale = 0.0;
    for (int q : patch) scale = std::max(scale, (mesh.vertices[q] - c).norm());
    if (scale <= 0.0) continue;
    A.resize(patch.size(), 6);
    b.resize(patch.size());
    for (std::size_t r = 0; r < patch.size(); ++r) {
      Vec2 d = (mesh.vertices[patch[r]] - c) / scale;
      A.row(r) << 1.0, d.x(), d.y(), d.x() * d.x(), d.x() * d.y(), d.y() * d.y();
      b[r] = u[patch[r]];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < 6) continue;
    Eigen::VectorXd x = qr.solve(b);
    if (!x.allFinite()) continue;
    gx[v] = x[1] / scale;
    gy[v] = x[2] / scale;
  }
}

GradientFields gradient_fields(const geometry::Mesh& mesh, const FieldVector& u) {
  GradientFields g;
  if (u.size() != mesh.num_vertices()) throw MismatchError("field length does not match the mesh");
  g.per_triangle.reserve(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) g.per_triangle.push_back(triangle_gradient(mesh, t, u));
  recover_gradient(mesh, u, g.gx, g.gy);
  return g;
}

HessianField hessian_recovery(const geometry::Mesh& mesh, const FieldVector& u) {
  FieldVector gx, gy, gxx, gxy, gyx, gyy;
  recover_gradient(mesh, u, gx, gy);
  recover_gradient(mesh, gx, gxx, gxy);
  recover_gradient(mesh, gy, gyx, gyy);
  HessianField H;
  H.xx = gxx;
  H.yy = gyy;
  H.xy = 0.5 * (gxy + gyx);
  return H;
}

FieldNorms norms_and_integrals(const geometry::Mesh& mesh, const OperatorBundle& bundle, const FieldVector& u,
                               const std::function<double(double)>& f) {
  if (u.size() != bundle.n) throw MismatchError("field length does not match the operators");
  if (!u.allFinite()) throw NonFiniteFieldError("field contains NaN or Inf");
  FieldNorms n;
  n.grad_sq = u.dot(bundle.K * u);
  n.l2_sq = u.dot(bundle.M * u);
  FieldVector gx, gy;
  recover_gradient(mesh, u, gx, gy);
  n.hessian_sq = gx.dot(bundle.K * gx) + gy.dot(bundle.K * gy);
  FieldVector mag = (gx.array().square() + gy.array().square()).sqrt().matrix();
  n.grad_abs_grad_sq = mag.dot(bundle.K * mag);
  if (f) {
    n.f_sq = integrate(bundle, u, [&](double s) {
      double v = f(s);
      return v * v;
    });
    n.f_int = integrate(bundle, u, f);
  }
  n.u_min = u.minCoeff();
  n.u_max = u.maxCoeff();
  n.osc = n.u_max - n.u_min;
  return n;
}

void write_field_csv(std::ostream& os, const geometry::Mesh& mesh, const FieldVector& field) {
  if (field.size() != mesh.num_vertices()) throw MismatchError("field length does not match the mesh");
  os << "vertex_index,x,y,value\n";
  os.precision(17);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    os << v << ',' << mesh.vertices[v].x() << ',' << mesh.vertices[v].y() << ',' << field[v] << '\n';
}

}  // namespace pattern_gauge::fem
