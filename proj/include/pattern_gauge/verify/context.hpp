#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pattern_gauge/fem/assembly.hpp"
#include "pattern_gauge/fem/fields.hpp"
#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesh.hpp"
#include "pattern_gauge/geometry/mesher.hpp"
#include "pattern_gauge/geometry/stats.hpp"
#include "pattern_gauge/semilinear/initial_data.hpp"
#include "pattern_gauge/semilinear/nonlinearity.hpp"
#include "pattern_gauge/semilinear/solvers.hpp"
#include "pattern_gauge/spectral/eigensolver.hpp"

namespace pattern_gauge::verify {

using fem::FieldVector;

struct VerifyConfig {
  std::vector<double> a_grid{1.0, 1.5, 2.0, 4.0, 8.0};
  std::vector<double> eta_grid{0.5, 1.0, 2.0};
  double certify_tol = 1e-8;        // residual certificate for computed states
  double supplied_certify_tol = 1e-8;  // same for supplied closed-form states
  double tol_eig_rel = 1e-6;        // tol_eig = tol_eig_rel * (1 + |scale|)
  double saddle_tol = 1e-4;         // lambda_0 >= -saddle_tol counts as stable
  double recovery_constant = 2.0;   // tol_recovery = C (h / diameter) * scale
  int sweep_points = 720;
  bool refinement_band = true;      // solve once more on the uniformly refined mesh
  std::optional<std::pair<double, double>> sup_interval;
  spectral::SolverOptions eig;
  semilinear::NewtonConfig newton;
};

// Mesh, curvature, geometry statistics and operators for one domain, plus memoized spectra.
class ProblemContext {
 public:
  ProblemContext(geometry::DomainSpec spec, double h, const geometry::MesherOptions& opts = {});
  ProblemContext(geometry::DomainSpec spec, geometry::Mesh mesh);

  const geometry::DomainSpec& spec() const { return spec_; }
  const geometry::Mesh& mesh() const { return mesh_; }
  const geometry::CurvatureField& curvature() const { return curvature_; }
  const geometry::GeometryStats& stats() const { return stats_; }
  const fem::OperatorBundle& ops() const { return ops_; }
  double h() const { return mesh_.h_target; }

  // Eigenpairs of (K + a B_gamma, M), k = 2, memoized by a.
  const spectral::SpectralResult& mu(double a, const spectral::SolverOptions& opts = {}) const;
  double neumann_gap(const spectral::SolverOptions& opts = {}) const;

  // Uniform 4-split refinement of this context, built on first use.
  const ProblemContext& refined() const;
  // Coarse-to-fine linear interpolation matching refined().
  FieldVector prolong(const FieldVector& u) const;

 private:
  void finish();

  geometry::DomainSpec spec_;
  geometry::Mesh mesh_;
  geometry::CurvatureField curvature_;
  geometry::GeometryStats stats_;
  fem::OperatorBundle ops_;
  mutable std::map<double, spectral::SpectralResult> mu_cache_;
  mutable std::optional<double> gap_;
  mutable std::unique_ptr<ProblemContext> refined_;
  mutable std::vector<std::array<int, 2>> parents_;
};

// A steady state handed to the harness: computed by the solvers or supplied analytically.
struct StateInput {
  std::string label;
  FieldVector u;
  bool supplied = false;
  std::optional<semilinear::InitialData> descriptor;  // set for supplied closed-form states
  std::string method;
  int steps = 0;
  int escapes = 0;
  bool newton_ok = false;
  std::vector<std::string> notes;
};

// Everything the checks need about one state, computed once.
struct StateAnalysis {
  const StateInput* state = nullptr;
  double residual_norm = 0.0;
  double residual_dual_norm = 0.0;
  bool certified = false;
  bool pattern = false;
  double osc = 0.0;
  spectral::SpectralResult lambda0;       // Neumann linearization, k = 2
  spectral::SpectralResult lambda_gamma;  // Robin-curvature linearization, k = 2
  fem::FieldNorms norms;
  FieldVector gx, gy;                     // recovered nodal gradient
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();  // int d_i u d_j u, exact for P1
  semilinear::SupValue sup;
  int morse_index = 0;                    // negative lambda_{0,k} among those computed
  bool stable = false;                    // lambda_0 >= -saddle_tol

  // Refinement pair for recovered second-order quantities.
  bool has_band = false;
  double q_fine = 0.0;                    // (||grad|grad u|||^2 - ||D^2 u||^2) / ||grad u||^2 on h/2
  double lambda_gamma_fine = 0.0;
  double remark13_lhs_fine = 0.0;
  double remark13_rhs_fine = 0.0;
  std::vector<std::string> notes;

  double q() const;  // same quotient on h
};

StateAnalysis analyze_state(const ProblemContext& ctx, const StateInput& state, const semilinear::Nonlinearity& f,
                            const VerifyConfig& cfg);

}  // namespace pattern_gauge::verify
