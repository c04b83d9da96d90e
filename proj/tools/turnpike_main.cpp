#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "turnpike/errors.hpp"
#include "turnpike/io/commands.hpp"
#include "turnpike/io/config.hpp"

namespace {

using turnpike::io::ExperimentConfig;

struct Overrides {
  std::string config_path;
  std::string preset;
  std::optional<double> horizon;
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::vector<double> horizons;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--T", o.horizon, "Horizon of the solve grid");
  cmd->add_option("--steps", o.steps, "Grid steps per horizon");
  cmd->add_option("--seed", o.seed, "Seed for random problems");
  cmd->add_option("--out", o.out, "Output directory");
}

void add_config(CLI::App* cmd, Overrides& o) {
  cmd->add_option("config", o.config_path, "Experiment configuration (JSON)");
  cmd->add_option("--preset", o.preset, "Start from a preset instead of a file");
  cmd->add_option("--mode", o.mode, "free or fixed")->check(CLI::IsMember({"free", "fixed"}));
  cmd->add_option("--horizons", o.horizons, "Sweep horizons")->delimiter(',');
  add_common(cmd, o);
}

ExperimentConfig resolve(const Overrides& o, bool default_out) {
  if (o.config_path.empty() == o.preset.empty()) {
    throw turnpike::ConfigError("give exactly one of a config file or --preset");
  }
  ExperimentConfig cfg =
      o.preset.empty() ? turnpike::io::load_config(o.config_path) : turnpike::io::preset(o.preset);
  if (o.horizon) cfg.grid.horizon = *o.horizon;
  if (o.steps) cfg.grid.steps = *o.steps;
  if (o.seed) cfg.seed = *o.seed;
  if (o.mode) cfg.mode = *o.mode == "free" ? turnpike::io::SolveMode::free : turnpike::io::SolveMode::fixed;
  if (!o.horizons.empty()) cfg.horizons = o.horizons;
  if (o.out) {
    cfg.output_dir = *o.out;
  } else if (default_out && cfg.output_dir.empty()) {
    cfg.output_dir = std::filesystem::path("turnpike_out") / cfg.name;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turnpike analysis of linear-quadratic optimal control problems"};
  app.require_subcommand(1);
  Overrides analyze_o, solve_o, sweep_o, reproduce_o;
  std::string reproduce_name;

  CLI::App* analyze = app.add_subcommand("analyze", "Subspaces, predicates and the Riccati solution");
  add_config(analyze, analyze_o);
  CLI::App* solve = app.add_subcommand("solve", "Solve one horizon and write the trajectory");
  add_config(solve, solve_o);
  CLI::App* sweep = app.add_subcommand("sweep", "Turnpike verdict across horizons");
  add_config(sweep, sweep_o);
  CLI::App* reproduce = app.add_subcommand("reproduce", "Run a preset end to end");
  reproduce->add_option("name", reproduce_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(turnpike::io::preset_names()));
  add_common(reproduce, reproduce_o);

  CLI11_PARSE(app, argc, argv);

  try {
    turnpike::io::configure_logging_from_env();
    turnpike::io::CommandOutput result;
    if (*analyze) {
      result = turnpike::io::cmd_analyze(resolve(analyze_o, false));
    } else if (*solve) {
      result = turnpike::io::cmd_solve(resolve(solve_o, true));
    } else if (*sweep) {
      result = turnpike::io::cmd_sweep(resolve(sweep_o, true));
    } else {
      reproduce_o.preset = reproduce_name;
      result = turnpike::io::cmd_reproduce(resolve(reproduce_o, true));
    }
    std::cout << result.summary.dump(2) << "\n";
    for (const auto& path : result.files) spdlog::info("wrote {}", path.string());
    return 0;
  } catch (const turnpike::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
