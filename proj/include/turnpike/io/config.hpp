#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "turnpike/io/json_io.hpp"
#include "turnpike/system_model.hpp"

namespace turnpike::io {

enum class SolveMode { free, fixed };

/// A seeded random system; resolved with the config's seed.
struct RandomSpec {
  /// stable | controllable | c_stabilizable | not_c_stabilizable | triple
  std::string family = "stable";
  int n = 4;
  int m = 1;
  int p = 1;
};

/// One experiment: a problem, a grid, sweep horizons and output settings.
struct ExperimentConfig {
  std::variant<SystemSpec, PdeSpec, RandomSpec> problem;
  GridSpec grid{10.0, 2000};
  std::vector<double> horizons{10.0, 20.0, 40.0};
  SolveMode mode = SolveMode::free;
  /// Terminal state for fixed-endpoint runs of PDE problems.
  std::optional<Vector> x1;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::string name = "experiment";

  /// The problem as matrices, with x1 attached in fixed mode.
  SystemSpec system() const;
  /// Throws ConfigError when the pieces are inconsistent.
  void validate() const;
};

/// Parses a configuration document. Syntax errors report the line and
/// column; semantic errors report the JSON path of the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

Json to_json(const ExperimentConfig& config);

/// Paper configurations: "heat", "wave", "double-integrator", plus the
/// predicate-true heat variant "heat-stable".
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

std::string to_string(SolveMode mode);

}  // namespace turnpike::io
