#pragma once

#include "pattern_gauge/fem/assembly.hpp"
#include "pattern_gauge/semilinear/nonlinearity.hpp"
#include "pattern_gauge/spectral/eigensolver.hpp"

namespace pattern_gauge::spectral {

enum class Variant { neumann, robin_curvature };

// Eigenpairs of (K + a B_gamma, M). The bundle's own B already carries its multiplier,
// so a is applied relative to bundle.a.
SpectralResult mu_curvature(const fem::OperatorBundle& bundle, double a, int k = 2, const SolverOptions& opts = {});
SpectralResult mu_curvature(const geometry::Mesh& mesh, const geometry::CurvatureField& curvature, double a,
                            int k = 2, const SolverOptions& opts = {});

// Eigenpairs of (K - M_{f'(u)} [+ a B_gamma], M).
SpectralResult lambda_stability(const fem::OperatorBundle& bundle, const FieldVector& u,
                                const semilinear::Nonlinearity& f, Variant variant, double a = 1.0, int k = 2,
                                const SolverOptions& opts = {});
SpectralResult lambda_stability(const geometry::Mesh& mesh, const geometry::CurvatureField& curvature,
                                const FieldVector& u, const semilinear::Nonlinearity& f, Variant variant,
                                double a = 1.0, int k = 2, const SolverOptions& opts = {});

// Second smallest eigenvalue of (K, M).
double neumann_gap(const fem::OperatorBundle& bundle, const SolverOptions& opts = {});

}  // namespace pattern_gauge::spectral
