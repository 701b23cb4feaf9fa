#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "motorflux/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"motorflux: structure-preserving drift-diffusion-reaction solver"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool reversible = false;

  const char* commands[][2] = {
      {"simulate", "Evolve the system and write snapshot CSVs plus a manifest"},
      {"steady", "Compute the stationary state"},
      {"verify-contraction", "Check L1 contraction between two trajectories"},
      {"verify-comparison", "Check ordering and positivity of two ordered trajectories"},
      {"verify-convergence", "Check convergence to the mass-matched stationary state"},
      {"oracle-compare", "Compare implicit stepping with the dense matrix exponential"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Run configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    sub->add_option("--tol", tol, "Steady: iteration tolerance; convergence: threshold");
    sub->add_option("--seed", seed, "Seed for random initial data");
    if (std::string(name) == "steady") {
      sub->add_flag("--reversible", reversible,
                    "Constant pair of the two-species reversible reaction");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : motorflux::cli::kExitConfig;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  motorflux::cli::CommandOptions opts;
  if (chosen->count("--out")) opts.out_dir = out_dir;
  if (chosen->count("--tol")) opts.tol = tol;
  opts.seed = seed;
  opts.reversible = reversible;
  return motorflux::cli::dispatch(chosen->get_name(), config, opts, std::cout, std::cerr);
}
