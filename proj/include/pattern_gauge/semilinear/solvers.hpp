#pragma once

#include <string>
#include <vector>

#include "pattern_gauge/fem/assembly.hpp"
#include "pattern_gauge/semilinear/nonlinearity.hpp"
#include "pattern_gauge/spectral/eigensolver.hpp"

namespace pattern_gauge::semilinear {

using fem::FieldVector;

struct FlowConfig {
  double tau0 = 1e-3;
  double grow = 2.0;
  double shrink = 0.5;
  int grow_after = 5;        // consecutive accepted steps before tau grows
  double tol = 1e-8;         // on the lumped residual
  int max_steps = 20000;
  double tau_max = 1e4;
  double tau_min = 1e-14;
  bool confine = true;       // reject steps leaving [min root, max root] when u0 starts inside
};

struct NewtonConfig {
  double tol = 1e-10;
  int max_steps = 30;
  double damping_min = 1.0 / 1024.0;
};

struct SolverTrace {
  int steps = 0;
  int accepted = 0;
  int rejected = 0;
  std::vector<double> tau;       // per accepted step
  std::vector<double> energy;    // initial value, then per accepted step
  std::vector<double> residual;  // initial value, then per accepted step
  std::vector<double> damping;   // Newton step lengths
  bool quadratic_tail = false;
  bool crawl = false;            // Newton needed many damped or linearly converging steps
  bool confined = false;         // confinement was active
};

struct SteadyState {
  FieldVector u;
  double residual_norm = 0.0;    // ||Ku - M f(u)|| / (||M f(u)|| + ||Ku|| + floor)
  bool converged = false;
  bool pattern = false;
  double osc = 0.0;
  double delta_pattern = 0.0;
  std::string method;
  SolverTrace trace;
};

double residual_norm(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u);

// The same residual with each vector measured in the discrete dual norm sqrt(x'(K + M)^{-1} x). On unstructured
// meshes the nodal norm of an interpolated smooth solution decays only like h; this one like h^2.
double residual_dual_norm(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u);

// Semi-implicit flow (M_L + tau K) u+ = M_L (u + tau f(u)) with row-lumped mass M_L.
// Accepted steps do not increase the lumped energy 1/2 u'Ku - sum m_i F(u_i).
SteadyState gradient_flow(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u0,
                          const FlowConfig& cfg = {});

// Damped Newton on R(u) = Ku - M f(u) with Jacobian K - M diag(f'(u)).
SteadyState newton_refine(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u0,
                          const NewtonConfig& cfg = {});

// Integral of 1/2 |grad u|^2 - F(u); robin_curvature adds the boundary integral of gamma u^2.
double energy(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u,
              bool robin_curvature = false);

double lumped_energy(const fem::OperatorBundle& bundle, const FieldVector& lumped, const Nonlinearity& f,
                     const FieldVector& u);

// Pattern test: osc(u) > 1e-4 * root span.
bool is_pattern(const Nonlinearity& f, const FieldVector& u);

struct SearchConfig {
  FlowConfig flow;
  NewtonConfig newton;
  double saddle_tol = 1e-4;      // lambda_0 below -saddle_tol counts as unstable
  int max_escapes = 4;
  double escape_amplitude = 0.05;  // times the root span
  spectral::SolverOptions eig;
};

struct SearchResult {
  SteadyState state;
  double lambda0 = 0.0;
  int escapes = 0;
  bool newton_ok = false;
  std::vector<std::string> notes;
};

// Flow, Newton polish, then perturb along the principal Neumann mode and re-flow while lambda_0 < -saddle_tol.
SearchResult find_stable_state(const fem::OperatorBundle& bundle, const Nonlinearity& f, const FieldVector& u0,
                               const SearchConfig& cfg = {});

}  // namespace pattern_gauge::semilinear
