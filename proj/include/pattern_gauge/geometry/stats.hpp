#pragma once

#include <vector>

#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesh.hpp"

namespace pattern_gauge::geometry {

// Two Gauss points per boundary edge, taken in the loop parameter.
struct CurvatureSample {
  int edge = 0;      // index into Mesh::boundary_edges
  double s = 0.0;    // local coordinate in [0,1] along the edge
  double t = 0.0;    // loop parameter
  double gamma = 0.0;
  double ds = 0.0;   // quadrature weight times arc-length element
};

struct CurvatureField {
  std::vector<CurvatureSample> samples;
  double gamma_min = 0.0;
  double total = 0.0;  // integral of gamma over the boundary
  int num_edges = 0;
};

CurvatureField sample_curvature(const Mesh& mesh, const DomainSpec& spec);

struct GeometryStats {
  double area = 0.0;
  double perimeter = 0.0;
  double in_radius = 0.0;
  double in_radius_resolution = 0.0;
  double gamma_min = 0.0;
  double gauss_bonnet_total = 0.0;
  bool convex = false;
  bool corner_flag = false;  // boundary is only piecewise smooth
  double tol_convex = 0.0;
};

GeometryStats geometry_stats(const Mesh& mesh, const DomainSpec& spec, const CurvatureField& curvature);
GeometryStats geometry_stats(const Mesh& mesh, const DomainSpec& spec);

// Distance from p to the nearest point of any loop, by dense sampling and Newton polishing.
double distance_to_boundary(const DomainSpec& spec, const Vec2& p, int samples_per_loop = 4096);

}  // namespace pattern_gauge::geometry
