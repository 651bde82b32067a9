#include "pattern_gauge/spectral/operators.hpp"

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::spectral {

namespace {

SparseSymMatrix boundary_term(const fem::OperatorBundle& bundle, double a) {
  if (!(a >= 0.0)) throw ParameterError("boundary multiplier a must be >= 0");
  if (bundle.a == 0.0) {
    if (a != 0.0) throw ParameterError("operator bundle was assembled with a = 0; reassemble with a > 0");
    return bundle.B;
  }
  return (a / bundle.a) * bundle.B;
}

}  // namespace

SpectralResult mu_curvature(const fem::OperatorBundle& bundle, double a, int k, const SolverOptions& opts) {
  OperatorSpec spec;
  spec.A = bundle.K + boundary_term(bundle, a);
  spec.M = bundle.M;
  spec.k = k;
  return smallest_eigs(spec, opts);
}

SpectralResult mu_curvature(const geometry::Mesh& mesh, const geometry::CurvatureField& curvature, double a, int k,
                            const SolverOptions& opts) {
  return mu_curvature(fem::assemble(mesh, curvature, 1.0), a, k, opts);
}

SpectralResult lambda_stability(const fem::OperatorBundle& bundle, const FieldVector& u,
                                const semilinear::Nonlinearity& f, Variant variant, double a, int k,
                                const SolverOptions& opts) {
  if (u.size() != bundle.n) throw MismatchError("state length does not match the operators");
  if (!u.allFinite()) throw NonFiniteFieldError("state contains NaN or Inf");
  FieldVector c(u.size());
  for (int i = 0; i < u.size(); ++i) c[i] = f.fprime(u[i]);
  OperatorSpec spec;
  spec.A = bundle.K - fem::coefficient_mass(bundle, c);
  if (variant == Variant::robin_curvature) spec.A += boundary_term(bundle, a);
  spec.M = bundle.M;
  spec.k = k;
  return smallest_eigs(spec, opts);
}

SpectralResult lambda_stability(const geometry::Mesh& mesh, const geometry::CurvatureField& curvature,
                                const FieldVector& u, const semilinear::Nonlinearity& f, Variant variant, double a,
                                int k, const SolverOptions& opts) {
  return lambda_stability(fem::assemble(mesh, curvature, 1.0), u, f, variant, a, k, opts);
}

double neumann_gap(const fem::OperatorBundle& bundle, const SolverOptions& opts) {
  OperatorSpec spec;
  spec.A = bundle.K;
  spec.M = bundle.M;
  spec.k = 2;
  return smallest_eigs(spec, opts).values[1];
}

}  // namespace pattern_gauge::spectral
