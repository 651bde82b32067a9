#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pattern_gauge/fem/assembly.hpp"

namespace pattern_gauge::fem {

struct GradientFields {
  std::vector<geometry::Vec2> per_triangle;  // exact P1 gradients
  FieldVector gx, gy;                         // recovered nodal gradients
};

GradientFields gradient_fields(const geometry::Mesh& mesh, const FieldVector& u);

// Recovered nodal gradient: derivative at the vertex of the least-squares quadratic
// through the two-ring patch, so quadratics are reproduced exactly.
void recover_gradient(const geometry::Mesh& mesh, const FieldVector& u, FieldVector& gx, FieldVector& gy);

struct HessianField {
  FieldVector xx, xy, yy;
};

HessianField hessian_recovery(const geometry::Mesh& mesh, const FieldVector& u);

struct FieldNorms {
  double grad_sq = 0.0;          // ||grad u||^2
  double l2_sq = 0.0;            // ||u||^2
  double hessian_sq = 0.0;       // ||D^2 u||^2 from recovered gradients
  double grad_abs_grad_sq = 0.0; // ||grad |grad u| ||^2
  double f_sq = 0.0;             // int f(u)^2
  double f_int = 0.0;            // int f(u)
  double osc = 0.0;              // max u - min u
  double u_min = 0.0, u_max = 0.0;
};

FieldNorms norms_and_integrals(const geometry::Mesh& mesh, const OperatorBundle& bundle, const FieldVector& u,
                               const std::function<double(double)>& f);

// Writes vertex_index,x,y,value with one row per vertex.
void write_field_csv(std::ostream& os, const geometry::Mesh& mesh, const FieldVector& field);

}  // namespace pattern_gauge::fem
