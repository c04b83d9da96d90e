#include "turnpike/io/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>

#include <fmt/format.h>

#include "turnpike/errors.hpp"

namespace turnpike::io {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw PreconditionError(message);
}

std::string number(double v) { return fmt::format("{:.17g}", v); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (Eigen::Index j = 0; j < traj.u.cols(); ++j) out += fmt::format(",u_{}", j + 1);
  for (Eigen::Index j = 0; j < traj.x.cols(); ++j) out += fmt::format(",x_{}", j + 1);
  for (Eigen::Index j = 0; j < traj.p.cols(); ++j) out += fmt::format(",p_{}", j + 1);
  out += '\n';
  for (Eigen::Index k = 0; k < traj.nodes(); ++k) {
    out += number(traj.t(k));
    for (Eigen::Index j = 0; j < traj.u.cols(); ++j) out += ',' + number(traj.u(k, j));
    for (Eigen::Index j = 0; j < traj.x.cols(); ++j) out += ',' + number(traj.x(k, j));
    for (Eigen::Index j = 0; j < traj.p.cols(); ++j) out += ',' + number(traj.p(k, j));
    out += '\n';
  }
  return out;
}

std::string deviation_csv(const Vector& t, const Vector& e, const std::optional<TurnpikeFit>& entry,
                          const std::optional<TurnpikeFit>& exit) {
  require(t.size() == e.size(), "deviation_csv: t and e differ in length");
  const double T = t.size() ? t(t.size() - 1) : 0.0;
  std::string out = "t,e,entry_model,exit_model\n";
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    out += number(t(k)) + ',' + number(e(k)) + ',';
    if (entry) out += number(entry->model(t(k), T));
    out += ',';
    if (exit) out += number(exit->model(t(k), T));
    out += '\n';
  }
  return out;
}

std::string svg_line_plot(const std::vector<Series>& series, const PlotOptions& o) {
  const double left = 80, right = 160, top = 40, bottom = 56;
  const double pw = o.width - left - right, ph = o.height - top - bottom;
  auto ty = [&](double y) { return o.log_y ? std::log10(y) : y; };
  auto usable = [&](double y) { return std::isfinite(y) && (!o.log_y || y > 0.0); };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    require(s.x.size() == s.y.size(), "svg_line_plot: series '" + s.label + "' is ragged");
    for (Eigen::Index k = 0; k < s.x.size(); ++k) {
      if (!usable(s.y(k)) || !std::isfinite(s.x(k))) continue;
      xmin = std::min(xmin, s.x(k));
      xmax = std::max(xmax, s.x(k));
      ymin = std::min(ymin, ty(s.y(k)));
      ymax = std::max(ymax, ty(s.y(k)));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (o.log_y) {
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
  }
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - ymin) / (ymax - ymin)) * ph; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      o.width, o.height);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", o.width, o.height);
  out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     left + pw / 2, escape(o.title));
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      left, top, pw, ph);

  // Ticks: decades on a log axis, five even divisions otherwise.
  const int yticks = o.log_y ? static_cast<int>(ymax - ymin) : 5;
  const int ystride = std::max(1, yticks / 10);
  for (int i = 0; i <= yticks; i += ystride) {
    const double v = ymin + (ymax - ymin) * i / yticks;
    const double y = top + (1.0 - (v - ymin) / (ymax - ymin)) * ph;
    const std::string label = o.log_y ? fmt::format("1e{}", static_cast<int>(v)) : fmt::format("{:.3g}", v);
    out += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n",
                       left, y, left + pw, y);
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", left - 6,
                       y + 4, label);
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = xmin + (xmax - xmin) * i / 5;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n", px(v),
                       top + ph + 18, v);
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                     o.height - 12, escape(o.x_label));
  out += fmt::format(
      "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
      top + ph / 2, top + ph / 2, escape(o.y_label));

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                           color, points);
      }
      points.clear();
    };
    const Series& ser = series[s];
    for (Eigen::Index k = 0; k < ser.x.size(); ++k) {
      if (!usable(ser.y(k)) || !std::isfinite(ser.x(k))) {
        flush();
        continue;
      }
      points += fmt::format("{:.2f},{:.2f} ", px(ser.x(k)), py(ser.y(k)));
    }
    flush();
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       left + pw + 12, ly - 4, left + pw + 32, ly - 4, color);
    out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", left + pw + 38, ly, escape(ser.label));
  }
  out += "</svg>\n";
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_file(path, j.dump(2) + "\n");
}

}  // namespace turnpike::io
