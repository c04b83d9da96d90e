#include "turnpike/io/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "turnpike/errors.hpp"
#include "turnpike/random_systems.hpp"

namespace turnpike::io {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(where + "/" + it.key() + ": unknown field");
  }
}

double number(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "/" + key + ": expected a number");
  return v.get<double>();
}

int integer(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "/" + key + ": expected an integer");
  return v.get<int>();
}

std::string text(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "/" + key + ": expected a string");
  return v.get<std::string>();
}

PdeSpec parse_pde(const Json& j, PdeKind kind, const std::string& where) {
  reject_unknown(j, {"kind", "modes", "length", "potential", "x_con", "x_obs", "target", "x0"},
                 where);
  PdeSpec spec;
  spec.kind = kind;
  if (j.contains("modes")) spec.modes = integer(j, "modes", where);
  if (j.contains("length")) spec.length = number(j, "length", where);
  if (j.contains("potential")) {
    if (kind == PdeKind::wave) throw ConfigError(where + "/potential: not used by the wave model");
    spec.potential = number(j, "potential", where);
  }
  spec.x_con = j.contains("x_con") ? number(j, "x_con", where) : spec.length / 2.0;
  spec.x_obs = j.contains("x_obs") ? number(j, "x_obs", where) : spec.length / 2.0;
  if (j.contains("target")) spec.target = number(j, "target", where);
  if (j.contains("x0")) spec.x0 = vector_from_json(j.at("x0"), where + "/x0");
  try {
    spec.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

SystemSpec parse_matrix(const Json& j, const std::string& where) {
  reject_unknown(j, {"kind", "A", "B", "C", "z", "x0", "x1"}, where);
  for (const char* key : {"A", "B", "C"}) {
    if (!j.contains(key)) throw ConfigError(where + "/" + key + ": missing");
  }
  SystemSpec sys;
  sys.A = matrix_from_json(j.at("A"), where + "/A");
  sys.B = matrix_from_json(j.at("B"), where + "/B");
  sys.C = matrix_from_json(j.at("C"), where + "/C");
  const Eigen::Index n = sys.A.rows();
  // Empty rows cannot carry a column count: 0 x k blocks need explicit shapes.
  if (sys.B.rows() == 0) sys.B = Matrix(n, 0);
  if (sys.C.rows() == 0) sys.C = Matrix(0, n);
  sys.z = j.contains("z") ? vector_from_json(j.at("z"), where + "/z") : Vector::Zero(sys.C.rows());
  sys.x0 = j.contains("x0") ? vector_from_json(j.at("x0"), where + "/x0") : Vector::Zero(n);
  if (j.contains("x1")) sys.x1 = vector_from_json(j.at("x1"), where + "/x1");
  try {
    sys.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return sys;
}

RandomSpec parse_random(const Json& j, const std::string& where) {
  reject_unknown(j, {"kind", "family", "n", "m", "p"}, where);
  RandomSpec spec;
  if (j.contains("family")) spec.family = text(j, "family", where);
  if (j.contains("n")) spec.n = integer(j, "n", where);
  if (j.contains("m")) spec.m = integer(j, "m", where);
  if (j.contains("p")) spec.p = integer(j, "p", where);
  static const std::set<std::string> families{"stable", "controllable", "c_stabilizable",
                                              "not_c_stabilizable", "triple"};
  if (!families.count(spec.family)) throw ConfigError(where + "/family: unknown family '" + spec.family + "'");
  if (spec.n < 1 || spec.m < 0 || spec.p < 0) throw ConfigError(where + ": invalid dimensions");
  if ((spec.family == "c_stabilizable" || spec.family == "not_c_stabilizable") && spec.n != 4) {
    throw ConfigError(where + "/n: the C-stabilizability families are 4-dimensional");
  }
  return spec;
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& s, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, s.size()); ++i) {
    if (s[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string to_string(SolveMode mode) { return mode == SolveMode::free ? "free" : "fixed"; }

SystemSpec ExperimentConfig::system() const {
  SystemSpec sys;
  if (const auto* pde = std::get_if<PdeSpec>(&problem)) {
    sys = build_system(*pde);
    if (x1) sys.x1 = x1;
  } else if (const auto* random = std::get_if<RandomSpec>(&problem)) {
    random::Rng rng(seed);
    const auto& f = random->family;
    if (f == "stable") {
      sys = random::stable_system(rng, random->n, random->m, random->p);
    } else if (f == "controllable") {
      sys = random::controllable_system(rng, random->n, random->m, random->p);
    } else if (f == "c_stabilizable" || f == "not_c_stabilizable") {
      sys = random::c_stabilizability_case(rng, f == "c_stabilizable");
    } else {
      sys = random::triple(rng, random->n, random->m, random->p);
    }
    if (x1) sys.x1 = x1;
  } else {
    sys = std::get<SystemSpec>(problem);
    if (x1) sys.x1 = x1;
  }
  if (mode == SolveMode::free) {
    sys.x1.reset();
  } else if (!sys.x1) {
    sys.x1 = Vector::Zero(sys.n());
  }
  return sys;
}

void ExperimentConfig::validate() const {
  try {
    grid.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("/grid: ") + e.what());
  }
  if (horizons.empty()) throw ConfigError("/horizons: must not be empty");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0) || (i > 0 && !(horizons[i] > horizons[i - 1]))) {
      throw ConfigError("/horizons: must be positive and strictly ascending");
    }
  }
  const SystemSpec sys = system();
  if (x1 && x1->size() != sys.n()) {
    throw ConfigError("/x1: expected " + std::to_string(sys.n()) + " entries");
  }
}

ExperimentConfig parse_config(const std::string& source) {
  Json j;
  try {
    j = Json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_and_column(source, e.byte == 0 ? 0 : e.byte - 1);
    // Keep only the reason; nlohmann's own prefix repeats the position.
    std::string reason = e.what();
    if (const auto pos = reason.find(": "); pos != std::string::npos) reason = reason.substr(pos + 2);
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + reason);
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j, {"name", "preset", "problem", "grid", "horizons", "mode", "x1",
                     "output_dir", "seed"},
                 "");

  ExperimentConfig cfg;
  try {
    if (j.contains("preset")) {
      cfg = preset(text(j, "preset", ""));
    } else if (!j.contains("problem")) {
      throw ConfigError("/problem: missing (or give a preset)");
    }
    if (j.contains("name")) cfg.name = text(j, "name", "");
    if (j.contains("problem")) {
      const Json& p = j.at("problem");
      if (!p.is_object()) throw ConfigError("/problem: expected an object");
      const std::string kind = p.contains("kind") ? text(p, "kind", "/problem") : "matrix";
      if (kind == "heat" || kind == "wave") {
        cfg.problem = parse_pde(p, pde_kind_from_string(kind), "/problem");
      } else if (kind == "matrix") {
        cfg.problem = parse_matrix(p, "/problem");
      } else if (kind == "random") {
        cfg.problem = parse_random(p, "/problem");
      } else {
        throw ConfigError("/problem/kind: unknown kind '" + kind + "'");
      }
    }
    if (j.contains("grid")) {
      const Json& g = j.at("grid");
      if (!g.is_object()) throw ConfigError("/grid: expected an object");
      reject_unknown(g, {"T", "steps"}, "/grid");
      if (g.contains("T")) cfg.grid.horizon = number(g, "T", "/grid");
      if (g.contains("steps")) cfg.grid.steps = integer(g, "steps", "/grid");
    }
    if (j.contains("horizons")) {
      const Vector h = vector_from_json(j.at("horizons"), "/horizons");
      cfg.horizons.assign(h.data(), h.data() + h.size());
    }
    if (j.contains("mode")) {
      const std::string mode = text(j, "mode", "");
      if (mode != "free" && mode != "fixed") throw ConfigError("/mode: expected 'free' or 'fixed'");
      cfg.mode = mode == "free" ? SolveMode::free : SolveMode::fixed;
    }
    if (j.contains("x1")) cfg.x1 = vector_from_json(j.at("x1"), "/x1");
    if (j.contains("output_dir")) cfg.output_dir = text(j, "output_dir", "");
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("/seed: expected a nonnegative integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  if (const auto* pde = std::get_if<PdeSpec>(&cfg.problem)) {
    j["problem"] = to_json(*pde);
  } else if (const auto* random = std::get_if<RandomSpec>(&cfg.problem)) {
    j["problem"] = {{"kind", "random"},
                    {"family", random->family},
                    {"n", random->n},
                    {"m", random->m},
                    {"p", random->p}};
  } else {
    j["problem"] = to_json(std::get<SystemSpec>(cfg.problem));
  }
  j["grid"] = {{"T", cfg.grid.horizon}, {"steps", cfg.grid.steps}};
  j["horizons"] = cfg.horizons;
  j["mode"] = to_string(cfg.mode);
  if (cfg.x1) j["x1"] = vector_json(*cfg.x1);
  j["seed"] = cfg.seed;
  return j;
}

std::vector<std::string> preset_names() {
  return {"heat", "heat-stable", "wave", "double-integrator"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  if (name == "heat") {
    PdeSpec spec;
    spec.kind = PdeKind::heat;
    spec.modes = 16;
    spec.length = 10.0;
    spec.potential = -std::pow(2.0 * M_PI / 10.0, 2) - 1.0;
    spec.x_con = 10.0 / 3.0;
    spec.x_obs = 5.0;
    spec.target = 1.0;
    cfg.problem = spec;
    // The unobserved second mode grows like e^t, so T = 30 trips the
    // overflow guard; T = 20 keeps the single solve finite.
    cfg.grid = {20.0, 2000};
  } else if (name == "heat-stable") {
    PdeSpec spec;
    spec.kind = PdeKind::heat;
    spec.modes = 16;
    spec.length = M_PI;
    spec.potential = 0.0;
    spec.x_con = M_PI / 3.0;
    spec.x_obs = M_PI / 5.0;
    spec.target = 1.0;
    cfg.problem = spec;
    cfg.grid = {30.0, 3000};
  } else if (name == "wave") {
    PdeSpec spec;
    spec.kind = PdeKind::wave;
    spec.modes = 16;
    spec.length = 10.0;
    spec.x_con = 5.0;
    spec.x_obs = 5.0;
    spec.target = 1.0;
    cfg.problem = spec;
    // The unobserved second mode grows like e^t, so T = 30 trips the
    // overflow guard; T = 20 keeps the single solve finite.
    cfg.grid = {20.0, 2000};
  } else if (name == "double-integrator") {
    SystemSpec sys;
    sys.A = Matrix::Zero(2, 2);
    sys.A(0, 1) = 1.0;
    sys.B = Matrix::Zero(2, 1);
    sys.B(1, 0) = 1.0;
    sys.C = Matrix::Zero(1, 2);
    sys.C(0, 1) = 1.0;
    sys.z = Vector::Zero(1);
    // The endpoints are free choices; (1, 0) -> (0, 1) needs net transport
    // along the kernel direction, which exhibits the velocity turnpike.
    sys.x0 = Vector::Unit(2, 0);
    sys.x1 = Vector::Unit(2, 1);
    cfg.problem = sys;
    cfg.mode = SolveMode::fixed;
    cfg.grid = {40.0, 4000};
    cfg.horizons = {10.0, 20.0, 40.0, 80.0};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return cfg;
}

}  // namespace turnpike::io
