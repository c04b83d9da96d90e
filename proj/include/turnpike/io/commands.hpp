#pragma once

#include <filesystem>
#include <vector>

#include "turnpike/io/config.hpp"
#include "turnpike/io/json_io.hpp"

namespace turnpike::io {

/// Result of a subcommand: the summary document (also printed by the CLI)
/// and every file written. Nothing is written when output_dir is empty.
struct CommandOutput {
  Json summary;
  std::vector<std::filesystem::path> files;
};

/// Subspace dimensions, D and R, C-stabilizability, weak Hautus,
/// controllability, the antistrong ARE solution and its residual, the steady
/// optimum, and for PDE problems the modal predicate with witness modes.
CommandOutput cmd_analyze(const ExperimentConfig& config);

/// Solves one horizon (config.grid) in the configured mode and writes
/// trajectory.csv, summary.json and plots of u and C x.
CommandOutput cmd_solve(const ExperimentConfig& config);

/// Runs every horizon of config.horizons (at least three). Free mode judges
/// the C-turnpike; fixed mode reports the velocity turnpike when
/// ker A ∩ ker C is nontrivial and the full-state turnpike otherwise.
/// Writes per-horizon deviation CSVs, an overlaid log-scale SVG and sweep.json.
CommandOutput cmd_sweep(const ExperimentConfig& config);

/// Runs analyze, solve and sweep for a configuration (normally a preset) into
/// one bundle and writes verdict.json.
CommandOutput cmd_reproduce(const ExperimentConfig& config);

/// Reads TURNPIKE_LOG (error, info or debug; default error) and sets the
/// global log level. Throws ConfigError on other values.
void configure_logging_from_env();

}  // namespace turnpike::io
