#pragma once

#include <vector>

#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesh.hpp"

namespace pattern_gauge::geometry {

struct MesherOptions {
  // Boundary spacing is h, reduced to h / (|kappa| * l) where |kappa| * l > 1,
  // with l = curvature_length * diameter.
  double curvature_length = 0.125;
  double refine_min_angle_deg = 25.0;
  double max_circumradius_factor = 0.62;  // times h
  double accept_min_angle_deg = 20.0;
  int smoothing_sweeps = 10;
  int max_vertices = 600000;
};

// Boundary sample parameters of one loop, starting at t = 0 and including every corner.
std::vector<double> sample_loop(const BoundaryLoop& loop, double h, double curvature_length);

Mesh mesh_domain(const DomainSpec& spec, double h, const MesherOptions& opts = {});

// Structured right-triangle mesh of an axis-aligned rectangle loop.
Mesh mesh_rectangle(const DomainSpec& spec, double h);

// Smart Laplacian smoothing of interior vertices; a move is kept only if no
// incident triangle inverts and the smallest incident angle does not drop.
void smooth_mesh(Mesh& mesh, int sweeps);

}  // namespace pattern_gauge::geometry
