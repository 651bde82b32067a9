#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "pattern_gauge/geometry/domain.hpp"

namespace pattern_gauge::geometry {

// Directed boundary edge a -> b with the domain on the left. The edge covers
// loop parameters [t0, t1] with t0 < t1 (t1 may equal 1 on the closing edge).
struct BoundaryEdge {
  int a = 0;
  int b = 0;
  int loop = 0;
  double t0 = 0.0;
  double t1 = 0.0;
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  double h_target = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double area() const;
  std::vector<char> boundary_mask() const;
  double max_edge_length() const;
  double max_interior_edge_length() const;
  double min_angle_degrees() const;
};

// Throws MeshingError describing the first violated invariant.
void validate_mesh(const Mesh& mesh, const DomainSpec& spec, double boundary_tol_rel = 1e-10);

Mesh scale_mesh(const Mesh& mesh, double eta);

// Splits each triangle into four; new boundary vertices sit at parametric midpoints.
// When given, parents receives the coarse edge (a, b) of every new vertex, in order.
Mesh refine_uniform(const Mesh& mesh, const DomainSpec& spec, std::vector<std::array<int, 2>>* parents = nullptr);

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace pattern_gauge::geometry
