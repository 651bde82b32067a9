#include "pattern_gauge/fem/assembly.hpp"

#include <cmath>
#include <string>

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::fem {

using Triplet = Eigen::Triplet<double>;

double OperatorBundle::area() const {
  double s = 0.0;
  for (double a : areas) s += a;
  return s;
}

FieldVector OperatorBundle::lumped_mass() const {
  FieldVector d = FieldVector::Zero(n);
  for (std::size_t t = 0; t < triangles.size(); ++t)
    for (int v : triangles[t]) d[v] += areas[t] / 3.0;
  return d;
}

SparseSymMatrix boundary_mass(const geometry::Mesh& mesh, const geometry::CurvatureField& curvature,
                              const std::function<double(const geometry::CurvatureSample&)>& weight) {
  if (curvature.num_edges != static_cast<int>(mesh.boundary_edges.size()) ||
      curvature.samples.size() != 2 * mesh.boundary_edges.size())
    throw MismatchError("curvature field does not match the mesh boundary (" +
                        std::to_string(curvature.num_edges) + " vs " +
                        std::to_string(mesh.boundary_edges.size()) + " edges)");
  std::vector<Triplet> trip;
  trip.reserve(4 * curvature.samples.size());
  for (const auto& s : curvature.samples) {
    const auto& e = mesh.boundary_edges[s.edge];
    double w = weight(s) * s.ds;
    double pa = 1.0 - s.s, pb = s.s;
    trip.emplace_back(e.a, e.a, w * pa * pa);
    trip.emplace_back(e.a, e.b, w * pa * pb);
    trip.emplace_back(e.b, e.a, w * pa * pb);
    trip.emplace_back(e.b, e.b, w * pb * pb);
  }
  SparseSymMatrix B(mesh.num_vertices(), mesh.num_vertices());
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

OperatorBundle assemble(const geometry::Mesh& mesh, const geometry::CurvatureField& curvature, double a) {
  if (!(a >= 0.0)) throw ParameterError("assemble: boundary weight multiplier a must be >= 0");
  OperatorBundle ob;
  ob.a = a;
  ob.n = mesh.num_vertices();
  ob.triangles = mesh.triangles;
  ob.areas.resize(mesh.triangles.size());
  std::vector<Triplet> kt, mt;
  kt.reserve(9 * mesh.triangles.size());
  mt.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    const geometry::Vec2& p0 = mesh.vertices[tr[0]];
    const geometry::Vec2& p1 = mesh.vertices[tr[1]];
    const geometry::Vec2& p2 = mesh.vertices[tr[2]];
    const double area = mesh.triangle_area(t);
    ob.areas[t] = area;
    // Gradients of the barycentric coordinates are rotated opposite edges over 2|T|.
    geometry::Vec2 e[3] = {p2 - p1, p0 - p2, p1 - p0};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(tr[i], tr[j], e[i].dot(e[j]) / (4.0 * area));
        mt.emplace_back(tr[i], tr[j], area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
      }
    }
  }
  ob.K.resize(ob.n, ob.n);
  ob.K.setFromTriplets(kt.begin(), kt.end());
  ob.M.resize(ob.n, ob.n);
  ob.M.setFromTriplets(mt.begin(), mt.end());
  ob.B = boundary_mass(mesh, curvature, [a](const geometry::CurvatureSample& s) { return a * s.gamma; });
  return ob;
}

SparseSymMatrix coefficient_mass(const OperatorBundle& bundle, const FieldVector& c) {
  if (c.size() != bundle.n) throw MismatchError("coefficient field length does not match the mesh");
  std::vector<Triplet> trip;
  trip.reserve(9 * bundle.triangles.size());
  for (std::size_t t = 0; t < bundle.triangles.size(); ++t) {
    const auto& tr = bundle.triangles[t];
    const double A = bundle.areas[t];
    const double ci[3] = {c[tr[0]], c[tr[1]], c[tr[2]]};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        int k = 3 - i - j;
        double v;
        if (i == j) {
          // int phi_i^3 = |T|/10, int phi_i^2 phi_k = |T|/30
          v = A * (ci[i] / 10.0 + (ci[(i + 1) % 3] + ci[(i + 2) % 3]) / 30.0);
        } else {
          // int phi_i^2 phi_j = |T|/30, int phi_i phi_j phi_k = |T|/60
          v = A * ((ci[i] + ci[j]) / 30.0 + ci[k] / 60.0);
        }
        trip.emplace_back(tr[i], tr[j], v);
      }
    }
  }
  SparseSymMatrix Mc(bundle.n, bundle.n);
  Mc.setFromTriplets(trip.begin(), trip.end());
  return Mc;
}

double integrate(const OperatorBundle& bundle, const FieldVector& u, const std::function<double(double)>& g) {
  double s = 0.0;
  for (std::size_t t = 0; t < bundle.triangles.size(); ++t) {
    const auto& tr = bundle.triangles[t];
    double a = u[tr[0]], b = u[tr[1]], c = u[tr[2]];
    s += bundle.areas[t] / 3.0 * (g(0.5 * (a + b)) + g(0.5 * (b + c)) + g(0.5 * (c + a)));
  }
  return s;
}

FieldVector load_vector(const OperatorBundle& bundle, const FieldVector& u, const std::function<double(double)>& g) {
  FieldVector b = FieldVector::Zero(bundle.n);
  for (std::size_t t = 0; t < bundle.triangles.size(); ++t) {
    const auto& tr = bundle.triangles[t];
    const double w = bundle.areas[t] / 3.0;
    for (int e = 0; e < 3; ++e) {
      int i = tr[e], j = tr[(e + 1) % 3];
      double val = g(0.5 * (u[i] + u[j])) * w;
      // Both edge endpoints have basis value 1/2 at the midpoint; the opposite vertex has 0.
      b[i] += 0.5 * val;
      b[j] += 0.5 * val;
    }
  }
  return b;
}

}  // namespace pattern_gauge::fem
