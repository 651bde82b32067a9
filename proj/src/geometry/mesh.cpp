#include "pattern_gauge/geometry/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <unordered_map>

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::geometry {

namespace {

std::uint64_t edge_key(int a, int b) {
  auto lo = static_cast<std::uint64_t>(std::min(a, b)), hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double angle_at(const Vec2& p, const Vec2& q, const Vec2& r) {
  Vec2 u = q - p, v = r - p;
  return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
}

}  // namespace

double Mesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  const Vec2& a = vertices[tr[0]];
  const Vec2& b = vertices[tr[1]];
  const Vec2& c = vertices[tr[2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double Mesh::area() const {
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += triangle_area(t);
  return s;
}

std::vector<char> Mesh::boundary_mask() const {
  std::vector<char> m(vertices.size(), 0);
  for (const auto& e : boundary_edges) m[e.a] = m[e.b] = 1;
  return m;
}

double Mesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& t : triangles)
    for (int i = 0; i < 3; ++i) h = std::max(h, (vertices[t[i]] - vertices[t[(i + 1) % 3]]).norm());
  return h;
}

double Mesh::max_interior_edge_length() const {
  std::unordered_map<std::uint64_t, int> count;
  for (const auto& t : triangles)
    for (int i = 0; i < 3; ++i) ++count[edge_key(t[i], t[(i + 1) % 3])];
  double h = 0.0;
  for (const auto& t : triangles)
    for (int i = 0; i < 3; ++i)
      if (count[edge_key(t[i], t[(i + 1) % 3])] == 2)
        h = std::max(h, (vertices[t[i]] - vertices[t[(i + 1) % 3]]).norm());
  return h;
}

double Mesh::min_angle_degrees() const {
  double m = 180.0;
  for (const auto& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      double a = angle_at(vertices[t[i]], vertices[t[(i + 1) % 3]], vertices[t[(i + 2) % 3]]);
      m = std::min(m, a * 180.0 / std::numbers::pi);
    }
  }
  return m;
}

void validate_mesh(const Mesh& mesh, const DomainSpec& spec, double boundary_tol_rel) {
  const int nv = mesh.num_vertices();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int v : mesh.triangles[t])
      if (v < 0 || v >= nv) throw MeshingError("triangle " + std::to_string(t) + " references a missing vertex");
    if (!(mesh.triangle_area(t) > 0.0))
      throw MeshingError("triangle " + std::to_string(t) + " has non-positive area");
  }
  // Conformity: each directed edge at most once, each undirected edge in one or two triangles.
  std::unordered_map<std::uint64_t, int> directed;
  std::unordered_map<std::uint64_t, int> undirected;
  for (const auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      auto key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
      if (++directed[key] > 1) throw MeshingError("non-conforming mesh: repeated edge " + std::to_string(a) + "->" + std::to_string(b));
      ++undirected[edge_key(a, b)];
    }
  }
  std::size_t open_edges = 0;
  for (const auto& [k, c] : undirected)
    if (c == 1) ++open_edges;
  if (open_edges != mesh.boundary_edges.size())
    throw MeshingError("boundary edge list does not match the open edges of the triangulation");
  const double tol = boundary_tol_rel * spec.diameter();
  std::vector<int> out_deg(nv, 0), in_deg(nv, 0);
  for (const auto& e : mesh.boundary_edges) {
    auto key = (static_cast<std::uint64_t>(e.a) << 32) | static_cast<std::uint64_t>(e.b);
    if (!directed.count(key) || undirected[edge_key(e.a, e.b)] != 1)
      throw MeshingError("boundary edge " + std::to_string(e.a) + "->" + std::to_string(e.b) + " is not an open triangle edge");
    if (e.loop < 0 || e.loop >= static_cast<int>(spec.loops.size()))
      throw MeshingError("boundary edge references a missing loop");
    if (!(e.t1 > e.t0)) throw MeshingError("boundary edge has an empty parameter interval");
    const auto& loop = spec.loops[e.loop];
    if ((loop.position(e.t0) - mesh.vertices[e.a]).norm() > tol ||
        (loop.position(e.t1) - mesh.vertices[e.b]).norm() > tol)
      throw MeshingError("boundary vertex off its loop near edge " + std::to_string(e.a) + "->" + std::to_string(e.b));
    ++out_deg[e.a];
    ++in_deg[e.b];
  }
  for (int v = 0; v < nv; ++v)
    if (out_deg[v] != in_deg[v] || out_deg[v] > 1) throw MeshingError("boundary edges do not form closed cycles");
}

Mesh scale_mesh(const Mesh& mesh, double eta) {
  if (!(eta > 0.0)) throw ParameterError("scale factor must be > 0");
  Mesh out = mesh;
  for (auto& v : out.vertices) v *= eta;
  out.h_target *= eta;
  return out;
}

Mesh refine_uniform(const Mesh& mesh, const DomainSpec& spec, std::vector<std::array<int, 2>>* parents) {
  Mesh out;
  if (parents) parents->clear();
  out.vertices = mesh.vertices;
  out.h_target = 0.5 * mesh.h_target;
  std::unordered_map<std::uint64_t, int> mid;
  auto midpoint = [&](int a, int b) {
    auto key = edge_key(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    if (parents) parents->push_back({a, b});
    mid.emplace(key, id);
    return id;
  };
  for (const auto& e : mesh.boundary_edges) {
    int m = midpoint(e.a, e.b);
    double tm = 0.5 * (e.t0 + e.t1);
    out.vertices[m] = spec.loops[e.loop].position(tm);
    out.boundary_edges.push_back({e.a, m, e.loop, e.t0, tm});
    out.boundary_edges.push_back({m, e.b, e.loop, tm, e.t1});
  }
  for (const auto& t : mesh.triangles) {
    int a = t[0], b = t[1], c = t[2];
    int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }
  for (int t = 0; t < out.num_triangles(); ++t)
    if (!(out.triangle_area(t) > 0.0)) throw MeshingError("uniform refinement produced an inverted triangle");
  return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' ' << mesh.boundary_edges.size() << '\n';
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) os << e.a << ' ' << e.b << ' ' << e.loop << ' ' << e.t0 << ' ' << e.t1 << '\n';
}

Mesh read_mesh(std::istream& is) {
  Mesh m;
  std::size_t nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb)) throw MeshingError("mesh file: malformed header");
  m.vertices.resize(nv);
  m.triangles.resize(nt);
  m.boundary_edges.resize(nb);
  for (auto& v : m.vertices)
    if (!(is >> v.x() >> v.y())) throw MeshingError("mesh file: truncated vertex block");
  for (auto& t : m.triangles)
    if (!(is >> t[0] >> t[1] >> t[2])) throw MeshingError("mesh file: truncated triangle block");
  for (auto& e : m.boundary_edges)
    if (!(is >> e.a >> e.b >> e.loop >> e.t0 >> e.t1)) throw MeshingError("mesh file: truncated boundary block");
  return m;
}

}  // namespace pattern_gauge::geometry
