#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pattern_gauge/cli/scenario.hpp"

namespace pattern_gauge::cli {

enum ExitCode { kExitPass = 0, kExitError = 1, kExitCheckFailed = 2 };

struct RunOverrides {
  std::optional<std::string> out;
  std::optional<double> h;
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  int exit_code = kExitPass;
  std::string dir;                 // output directory
  std::vector<std::string> files;  // written artifacts, relative to dir
  std::string summary;
};

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& ov);

RunResult run_verify(const ScenarioConfig& cfg, std::ostream& log);
RunResult run_sweep(const ScenarioConfig& cfg, std::ostream& log);
RunResult run_mesh(const ScenarioConfig& cfg, std::ostream& log);
RunResult run_spectrum(const ScenarioConfig& cfg, std::ostream& log);

// Loads the config, applies overrides and runs the command; errors map to exit code 1
// with the message written to err.
int dispatch(const std::string& command, const std::string& config_path, const RunOverrides& ov, std::ostream& log,
             std::ostream& err);

}  // namespace pattern_gauge::cli
