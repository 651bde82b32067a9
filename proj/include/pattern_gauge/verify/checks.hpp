#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pattern_gauge/verify/context.hpp"

namespace pattern_gauge::verify {

enum class Severity {
  hard,  // counts toward the exit code
  soft,  // resolution-limited quantity; reported and flagged, never fatal
  info,
};

const char* to_string(Severity s);

struct CheckOutcome {
  std::string id;
  std::string state;      // label of the steady state, empty for geometry-only checks
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;    // rhs - lhs; consistent when margin >= -tolerance
  double tolerance = 0.0; // negative for strict inequalities
  bool pass = false;
  Severity severity = Severity::hard;
  std::string status;     // pass, fail, degenerate_consistent, info
  std::vector<std::string> provenance;
  std::vector<std::string> notes;
  std::map<std::string, double> values;
  std::string interpretation;
};

// lhs <= rhs within tolerance.
CheckOutcome make_outcome(std::string id, double lhs, double rhs, double tolerance,
                          Severity severity = Severity::hard);
// lhs < rhs beyond tol; when both sides vanish (or, with allow_equal, coincide) within tol
// the outcome is reported as degenerate_consistent.
CheckOutcome make_strict(std::string id, double lhs, double rhs, double tol, bool allow_equal = false,
                         Severity severity = Severity::hard);

double tol_eig(const VerifyConfig& cfg, double scale);

// A check that could not be evaluated on this input, with the reason.
struct Skipped {
  std::string id;
  std::string state;
  std::string reason;
};

struct FlatnessResult {
  std::string id;          // which inequality family the direction serves
  std::string state;
  std::string op;          // G_gamma, F_gamma, F_0, G_a_gamma
  std::string method;      // eigenfunction-projection or angle-sweep
  double a = 1.0;
  double angle = 0.0;      // e = (cos angle, sin angle), angle in [0, pi)
  double ex = 1.0, ey = 0.0;
  double ratio = 0.0;      // ||grad u . e||^2 / ||grad u||^2
  double bound = 0.0;
  double projection = 0.0; // <grad u . e, phi> with ||phi|| = 1
};

struct CheckBatch {
  std::vector<CheckOutcome> outcomes;
  std::vector<FlatnessResult> flatness;
  std::vector<Skipped> skipped;

  void append(CheckBatch other);
};

// Flatness ratio for the direction at angle theta, and the maximizing angle over [0, pi).
double flatness_ratio(const Eigen::Matrix2d& G, double theta);
double sweep_max_angle(const Eigen::Matrix2d& G, int points);

CheckBatch check_residual(const ProblemContext& ctx, const StateAnalysis& an, const semilinear::Nonlinearity& f,
                          const VerifyConfig& cfg);
CheckBatch check_theorem1(const ProblemContext& ctx, const StateAnalysis& an, const semilinear::Nonlinearity& f,
                          const VerifyConfig& cfg);
CheckBatch check_breakdown(const ProblemContext& ctx, const StateAnalysis& an, const semilinear::Nonlinearity& f,
                           const VerifyConfig& cfg);
CheckBatch check_cacciopoli(const ProblemContext& ctx, const StateAnalysis& an, const semilinear::Nonlinearity& f,
                            const VerifyConfig& cfg);
CheckBatch check_flatness(const ProblemContext& ctx, const StateAnalysis& an, const semilinear::Nonlinearity& f,
                          const VerifyConfig& cfg);
CheckBatch check_lemma_identities(const ProblemContext& ctx, const StateAnalysis& an,
                                  const semilinear::Nonlinearity& f, const VerifyConfig& cfg);
// Convex-domain consequences for one state: strict lambda_gamma > lambda_0, no stable pattern,
// and the lambda_0 bound with a = 2.
CheckBatch check_convex_state(const ProblemContext& ctx, const StateAnalysis& an, const semilinear::Nonlinearity& f,
                              const VerifyConfig& cfg);

// Lower bound on mu_{a gamma} for convex domains, in-radius error bar applied; eigenvalue scaling
// under dilation; mu_gamma < lambda_2^N. Throws ConvexityRequiredError only when require_convex is set
// and the domain is not convex; otherwise the convex-only checks are skipped.
CheckBatch check_convex_bounds(const ProblemContext& ctx, const semilinear::Nonlinearity* f, const VerifyConfig& cfg,
                               bool require_convex = false);

// (pi^2 a g) / (4 R^2 a g + pi^2 R)
double savo_bound(double a, double gamma_min, double R);

struct PerturbationConfig {
  double r = 1.0;
  int k = 6;
  std::vector<double> deltas{0.0, 0.01, 0.02};
  double h = 0.05;
  std::vector<semilinear::InitialData> initial;
  semilinear::SearchConfig search;
  // Interface width below which stable patterns in star-shaped perturbations are not excluded.
  double robustness_eps = 0.1;
};

CheckBatch check_perturbation_robustness(const PerturbationConfig& pc, const semilinear::Nonlinearity& f,
                                         const VerifyConfig& cfg);

}  // namespace pattern_gauge::verify
