#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pattern_gauge/cli/runner.hpp"

int main(int argc, char** argv) {
  namespace cli = pattern_gauge::cli;

  CLI::App app{"pattern-gauge: spectral checks for stable patterns of semilinear Neumann problems"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  std::string out, config;
  double h = 0.0;
  std::uint64_t seed = 0;
  app.add_option("--out", out, "output directory (overrides output.dir)");
  app.add_option("--h", h, "target mesh size (overrides mesh.h)");
  app.add_option("--seed", seed, "random seed (overrides seed)");
  app.fallthrough();

  const char* commands[][2] = {{"verify", "solve for steady states and run the verification checks"},
                               {"sweep", "run a parameter sweep and write sweep.csv"},
                               {"mesh", "mesh the domain only"},
                               {"spectrum", "compute the Robin and Neumann spectra only"}};
  for (auto& c : commands) app.add_subcommand(c[0], c[1])->add_option("config", config, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitError;
  }

  cli::RunOverrides ov;
  if (app.count("--out")) ov.out = out;
  if (app.count("--h")) ov.h = h;
  if (app.count("--seed")) ov.seed = seed;
  const std::string command = app.get_subcommands().front()->get_name();
  return cli::dispatch(command, config, ov, std::cout, std::cerr);
}
