#include "turnpike/io/json_io.hpp"

#include "turnpike/errors.hpp"

namespace turnpike::io {

namespace {

Json optional_fit(const std::optional<TurnpikeFit>& fit) {
  return fit ? to_json(*fit) : Json(nullptr);
}

}  // namespace

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

Json to_json(const std::vector<std::complex<double>>& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw ConfigError(where + "/0: expected an array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    const std::string at = where + "/" + std::to_string(i);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(at + ": expected " + std::to_string(cols) + " numbers");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ConfigError(at + "/" + std::to_string(c) + ": expected a number");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where + "/" + std::to_string(i) + ": expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json to_json(const PdeSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  j["modes"] = spec.modes;
  j["length"] = spec.length;
  if (spec.kind == PdeKind::heat) j["potential"] = spec.potential;
  j["x_con"] = spec.x_con;
  j["x_obs"] = spec.x_obs;
  j["target"] = spec.target;
  if (spec.x0) j["x0"] = vector_json(*spec.x0);
  return j;
}

Json to_json(const SystemSpec& sys) {
  Json j;
  j["kind"] = "matrix";
  j["A"] = to_json(sys.A);
  j["B"] = to_json(sys.B);
  j["C"] = to_json(sys.C);
  j["z"] = vector_json(sys.z);
  j["x0"] = vector_json(sys.x0);
  if (sys.x1) j["x1"] = vector_json(*sys.x1);
  return j;
}

Json to_json(const SubspaceReport& r) {
  Json j;
  j["dims"] = {{"stable", r.stable.dim()},
               {"critical", r.critical.dim()},
               {"antistable", r.antistable.dim()},
               {"unobservable", r.unobservable.dim()},
               {"undetectable", r.undetectable.dim()},
               {"critical_unobservable", r.critical_unobservable.dim()},
               {"detectable", r.detectable.dim()}};
  j["D"] = to_json(r.D);
  j["R"] = to_json(r.R);
  return j;
}

Json to_json(const PredicateResult& result) {
  return {{"holds", result.holds}, {"witnesses", result.witnesses}};
}

Json to_json(const SteadySolution& s) {
  Json j;
  j["u_bar"] = vector_json(s.u_bar);
  j["x_bar"] = vector_json(s.x_bar);
  j["p_bar"] = s.p_bar ? vector_json(*s.p_bar) : Json(nullptr);
  j["J"] = s.j_value;
  j["kernel_dim"] = s.kernel_dir.cols();
  return j;
}

Json to_json(const RiccatiResult& r) {
  Json j;
  j["E_hat"] = to_json(r.E_hat);
  j["residual"] = r.residual;
  j["critical_dim"] = r.critical_dim;
  j["graph_condition"] = r.graph_condition;
  j["A_plus_spectrum"] = to_json(linalg::eigenvalues(r.A_plus));
  return j;
}

Json to_json(const TurnpikeFit& fit) {
  Json j;
  j["side"] = to_string(fit.side);
  j["K"] = fit.K;
  j["mu"] = fit.mu;
  j["r2"] = fit.r2;
  j["window"] = {fit.window.first, fit.window.second};
  j["samples"] = fit.samples;
  j["flagged"] = fit.flagged;
  return j;
}

Json to_json(const CTurnpikeReport& report) {
  Json runs = Json::array();
  for (const HorizonRun& run : report.runs) {
    Json r;
    r["T"] = run.horizon;
    r["blew_up"] = run.blew_up;
    if (run.blew_up) r["failure"] = run.failure;
    r["entry"] = optional_fit(run.entry);
    r["exit"] = optional_fit(run.exit);
    r["midpoint_deviation"] = run.midpoint_deviation;
    r["noise_floor"] = run.noise_floor;
    r["envelope_K"] = run.envelope_K;
    runs.push_back(std::move(r));
  }
  Json j;
  j["verdict"] = report.verdict;
  j["c_stabilizable"] = report.predicate;
  j["agrees"] = report.agrees;
  j["mu_star"] = report.mu_star;
  j["mu_spread"] = report.mu_spread;
  j["K_ratio"] = report.K_ratio;
  j["midpoint_ratios"] = report.midpoint_ratios;
  j["low_r2"] = report.low_r2;
  j["diagnostics"] = report.diagnostics;
  j["runs"] = std::move(runs);
  return j;
}

Json to_json(const VelocityReport& r) {
  Json j;
  j["u_hat"] = vector_json(r.u_hat);
  j["x_hat"] = vector_json(r.x_hat);
  j["q_hat"] = vector_json(r.q_hat);
  j["ramp_slope"] = vector_json(r.ramp_slope);
  j["fitted_slope"] = vector_json(r.fitted_slope);
  j["ramp_r2"] = r.ramp_r2;
  j["dist_sq_to_argmin"] = r.dist_sq_to_argmin;
  j["q_hat_defect"] = r.q_hat_defect;
  j["x_hat_defect"] = r.x_hat_defect;
  j["entry"] = optional_fit(r.entry);
  j["exit"] = optional_fit(r.exit);
  // The hat quantities are estimated from the trajectory, not defined
  // constructively; see the README.
  j["estimator"] = "q_hat: kernel projection of q(T); x_hat: mean of P2 x on [0.4T, 0.6T]";
  return j;
}

}  // namespace turnpike::io
