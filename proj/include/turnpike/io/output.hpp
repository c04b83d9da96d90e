#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "turnpike/horizon_solver.hpp"
#include "turnpike/io/json_io.hpp"

namespace turnpike::io {

/// Trajectory table with header t,u_1..u_m,x_1..x_n,p_1..p_n; every value is
/// printed with 17 significant digits so files round-trip exactly.
std::string trajectory_csv(const Trajectory& traj);

/// Deviation table t,e,entry_model,exit_model for one horizon; model columns
/// are empty when the corresponding fit is absent.
std::string deviation_csv(const Vector& t, const Vector& e, const std::optional<TurnpikeFit>& entry,
                          const std::optional<TurnpikeFit>& exit);

struct Series {
  std::string label;
  Vector x;
  Vector y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 440;
};

/// Minimal static SVG line plot. On a log axis nonpositive samples are
/// dropped and each series is split at the gaps.
std::string svg_line_plot(const std::vector<Series>& series, const PlotOptions& options);

/// Writes `content` to `path`, creating parent directories. Writes are
/// serialized across threads.
void write_file(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace turnpike::io
