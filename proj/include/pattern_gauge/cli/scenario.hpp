#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesher.hpp"
#include "pattern_gauge/semilinear/initial_data.hpp"
#include "pattern_gauge/semilinear/solvers.hpp"
#include "pattern_gauge/verify/checks.hpp"

namespace pattern_gauge::cli {

struct DomainConfig {
  std::string gallery;                         // gallery id, or empty for a spline domain
  std::map<std::string, double> params;
  std::vector<geometry::Vec2> spline_outer;
  std::vector<std::vector<geometry::Vec2>> spline_holes;
  std::string mesh_file;                       // optional precomputed mesh of the same domain
};

struct MeshConfig {
  double h = 0.05;
  geometry::MesherOptions options;
};

struct NonlinearityConfig {
  std::string id;
  std::map<std::string, double> params;
};

struct InitialSpec {
  semilinear::InitialData data;
  bool seed_given = false;  // random data without an explicit seed derive one from the run seed
};

struct SweepConfig {
  std::string axis;  // epsilon, d, eta, a
  std::vector<double> values;
};

struct OutputConfig {
  std::string dir = "out";
  bool fields = true;
  bool mesh = true;
};

struct ScenarioConfig {
  std::string name = "scenario";
  DomainConfig domain;
  MeshConfig mesh;
  std::optional<NonlinearityConfig> nonlinearity;
  std::vector<InitialSpec> initial;
  std::vector<semilinear::InitialData> supplied;
  semilinear::SearchConfig search;
  verify::VerifyConfig verify;
  std::set<std::string> checks;  // enabled check families
  std::optional<verify::PerturbationConfig> perturbation;
  std::optional<SweepConfig> sweep;
  OutputConfig output;
  std::uint64_t seed = 1;
  std::string source_dir = ".";  // directory of the config file, for relative paths
};

// Parses a scenario document. Unknown keys and type errors raise ConfigError naming the
// JSON path of the offending field.
ScenarioConfig parse_scenario(const std::string& text, const std::string& source_dir = ".");
ScenarioConfig load_scenario(const std::string& path);

geometry::DomainSpec build_domain(const DomainConfig& cfg);
semilinear::Nonlinearity build_nonlinearity(const NonlinearityConfig& cfg);

// Initial data with run-seed-derived seeds filled in.
std::vector<semilinear::InitialData> resolve_initial(const ScenarioConfig& cfg);

}  // namespace pattern_gauge::cli
