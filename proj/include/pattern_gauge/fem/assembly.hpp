#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "pattern_gauge/geometry/mesh.hpp"
#include "pattern_gauge/geometry/stats.hpp"

namespace pattern_gauge::fem {

using SparseSymMatrix = Eigen::SparseMatrix<double>;
using FieldVector = Eigen::VectorXd;

struct OperatorBundle {
  SparseSymMatrix K;  // stiffness
  SparseSymMatrix M;  // consistent mass
  SparseSymMatrix B;  // boundary mass weighted by a * gamma
  double a = 1.0;
  int n = 0;
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> areas;

  double area() const;
  FieldVector lumped_mass() const;
};

OperatorBundle assemble(const geometry::Mesh& mesh, const geometry::CurvatureField& curvature, double a = 1.0);

// Boundary mass with weight w evaluated at every curvature sample (w = a * gamma for B).
SparseSymMatrix boundary_mass(const geometry::Mesh& mesh, const geometry::CurvatureField& curvature,
                              const std::function<double(const geometry::CurvatureSample&)>& weight);

// Integral of c psi_i psi_j with c interpolated linearly; exact for the cubic integrand.
SparseSymMatrix coefficient_mass(const OperatorBundle& bundle, const FieldVector& c);

// 3-point edge-midpoint rule for the integral of g(u_h).
double integrate(const OperatorBundle& bundle, const FieldVector& u, const std::function<double(double)>& g);

// Load vector with entries the integral of g(u_h) psi_i, by the same rule.
FieldVector load_vector(const OperatorBundle& bundle, const FieldVector& u, const std::function<double(double)>& g);

}  // namespace pattern_gauge::fem
