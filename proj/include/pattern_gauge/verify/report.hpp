#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pattern_gauge/verify/checks.hpp"

namespace pattern_gauge::verify {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Check families that can be switched on and off from a scenario.
const std::vector<std::string>& check_families();

struct StateSummary {
  std::string label;
  bool supplied = false;
  double residual_norm = 0.0;
  double residual_dual_norm = 0.0;
  bool certified = false;
  double osc = 0.0;
  bool pattern = false;
  bool stable = false;
  int morse_index = 0;
  std::vector<double> lambda0;
  std::vector<double> lambda_gamma;
  std::string method;
  int steps = 0;
  int escapes = 0;
  bool newton_ok = false;
  std::vector<std::string> notes;
};

struct VerificationReport {
  std::string version = kToolkitVersion;
  std::string domain;
  std::map<std::string, double> domain_params;
  double h = 0.0;
  int vertices = 0;
  int triangles = 0;
  double min_angle_deg = 0.0;
  double max_edge = 0.0;
  geometry::GeometryStats stats;
  std::string nonlinearity;
  std::map<std::string, double> nonlinearity_params;
  double sup_fprime = 0.0;
  bool sup_restricted = false;
  std::map<double, std::vector<double>> mu;  // a -> first eigenvalues of K + a B_gamma
  double lambda2_neumann = 0.0;
  std::vector<StateSummary> states;
  CheckBatch checks;
  bool stable_pattern_found = false;
  std::string summary;

  bool hard_checks_pass() const;
};

// Runs every enabled check family on each state and on the domain itself.
VerificationReport verify_states(const ProblemContext& ctx, const std::vector<StateInput>& states,
                                 const semilinear::Nonlinearity& f, const VerifyConfig& cfg,
                                 const std::set<std::string>& enabled,
                                 std::vector<StateAnalysis>* analyses = nullptr);

}  // namespace pattern_gauge::verify
