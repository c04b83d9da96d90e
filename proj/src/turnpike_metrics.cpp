#include "turnpike/turnpike_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "turnpike/errors.hpp"
#include "turnpike/subspace_lab.hpp"

namespace turnpike {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;
};

LineFit fit_line(const std::vector<double>& s, const std::vector<double>& y) {
  const double count = static_cast<double>(s.size());
  double ms = 0.0, my = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    ms += s[i];
    my += y[i];
  }
  ms /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  LineFit out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sxx += (s[i] - ms) * (s[i] - ms);
    sxy += (s[i] - ms) * (y[i] - my);
    out.ss_tot += (y[i] - my) * (y[i] - my);
  }
  out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  out.intercept = my - out.slope * ms;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = y[i] - (out.intercept + out.slope * s[i]);
    out.ss_res += r * r;
  }
  return out;
}

Eigen::Index midpoint_node(const Vector& t) {
  const double half = 0.5 * (t(0) + t(t.size() - 1));
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < t.size(); ++k) {
    if (std::abs(t(k) - half) < std::abs(t(best) - half)) best = k;
  }
  return best;
}

double max_row_norm(const Matrix& m) {
  return m.rows() == 0 || m.cols() == 0 ? 0.0 : m.rowwise().norm().maxCoeff();
}

/// Fit of a component series, or nothing when it is negligible against `scale`.
std::optional<TurnpikeFit> fit_if_present(const Vector& t, const Vector& e, FitSide side,
                                          double scale) {
  if (!(e.maxCoeff() > 1e-12 * scale)) return std::nullopt;
  return fit_exponential(t, e, side);
}

HorizonRun run_horizon(const SystemSpec& sys, const SteadySolution& steady,
                       const Matrix& D, double horizon, int steps) {
  HorizonRun run;
  run.horizon = horizon;
  Trajectory traj;
  try {
    traj = solve_free_endpoint(sys, GridSpec{horizon, steps});
  } catch (const BlowUpError& e) {
    run.blew_up = true;
    run.failure = e.what();
    return run;
  }
  run.t = traj.t;
  run.deviation = deviation_curve(traj, steady, D);
  const double scale =
      std::max({1.0, max_row_norm(traj.x), max_row_norm(traj.u), run.deviation.maxCoeff()});
  run.noise_floor = 1e-9 * scale;
  run.midpoint_deviation = run.deviation(midpoint_node(run.t));
  if (run.deviation.maxCoeff() > run.noise_floor) {
    run.entry = fit_exponential(run.t, run.deviation, FitSide::entry);
    run.exit = fit_exponential(run.t, run.deviation, FitSide::exit);
  }
  return run;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double TurnpikeFit::model(double t, double T) const {
  return side == FitSide::entry ? K * std::exp(-mu * t) : K * std::exp(-mu * (T - t));
}

std::string to_string(FitSide side) { return side == FitSide::entry ? "entry" : "exit"; }

Vector deviation_curve(const Trajectory& traj, const SteadySolution& steady,
                       const Matrix& D) {
  if (traj.u.cols() != steady.u_bar.size() || traj.x.cols() != steady.x_bar.size() ||
      D.rows() != D.cols() || D.cols() != traj.x.cols()) {
    throw PreconditionError("deviation_curve: inconsistent dimensions");
  }
  const Vector dx_bar = D * steady.x_bar;
  Vector e(traj.nodes());
  for (Eigen::Index k = 0; k < traj.nodes(); ++k) {
    e(k) = (traj.u.row(k).transpose() - steady.u_bar).norm() +
           (D * traj.x.row(k).transpose() - dx_bar).norm();
  }
  return e;
}

TurnpikeFit fit_exponential(const Vector& t, const Vector& e, FitSide side) {
  if (t.size() != e.size() || t.size() < 2) {
    throw PreconditionError("fit_exponential: need matching t and e with >= 2 samples");
  }
  const double emax = e.maxCoeff();
  if (!(emax > 0.0) || !std::isfinite(emax)) {
    throw PreconditionError("fit_exponential: series is identically zero, fit undefined");
  }
  const double t0 = t(0);
  const double T = t(t.size() - 1) - t0;
  TurnpikeFit fit;
  fit.side = side;
  fit.window = side == FitSide::entry ? std::make_pair(t0 + 0.05 * T, t0 + 0.5 * T)
                                      : std::make_pair(t0 + 0.5 * T, t0 + 0.95 * T);
  const double floor = kFitFloorRel * emax;
  const double noise = kFitNoiseRel * emax;

  std::vector<double> s_all, y_all, s_clean, y_clean;
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    if (t(k) < fit.window.first - 1e-12 * T || t(k) > fit.window.second + 1e-12 * T) continue;
    const double s = side == FitSide::entry ? t(k) - t0 : T - (t(k) - t0);
    const double y = std::log(std::max(e(k), floor));
    s_all.push_back(s);
    y_all.push_back(y);
    if (e(k) >= noise) {
      s_clean.push_back(s);
      y_clean.push_back(y);
    }
  }
  if (s_all.size() < 2) throw PreconditionError("fit_exponential: window holds < 2 samples");
  const bool clean = s_clean.size() >= 3;
  const auto& s = clean ? s_clean : s_all;
  const auto& y = clean ? y_clean : y_all;
  const LineFit line = fit_line(s, y);
  fit.samples = static_cast<int>(s.size());
  fit.mu = -line.slope;
  fit.K = std::exp(line.intercept);
  // A flat log-series carries no evidence of decay.
  const double tiny = 1e-20 * static_cast<double>(s.size());
  fit.r2 = line.ss_tot > tiny ? std::clamp(1.0 - line.ss_res / line.ss_tot, 0.0, 1.0) : 0.0;
  fit.flagged = fit.r2 < kMinR2 || !(fit.mu > 0.0);
  return fit;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw PreconditionError("fit_power_law: need >= 2 matching samples");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw PreconditionError("fit_power_law: samples must be positive");
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const LineFit line = fit_line(lx, ly);
  PowerLawFit out;
  out.alpha = line.slope;
  out.c = std::exp(line.intercept);
  out.r2 = line.ss_tot > 0.0 ? std::clamp(1.0 - line.ss_res / line.ss_tot, 0.0, 1.0) : 1.0;
  return out;
}

double expected_turnpike_rate(const Matrix& A, const Matrix& B, const Matrix& C) {
  const ReducedSystem reduced = kalman_reduce(A, B, C);
  if (reduced.Ar.rows() == 0) return 0.0;
  const Matrix ham = build_hamiltonian(reduced.Ar, reduced.Br, reduced.Cr);
  const ComplexVector ev = linalg::eigenvalues(ham);
  const double tau = linalg::classification_tolerance(ham);
  double rate = INFINITY;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i).real()) > tau) rate = std::min(rate, std::abs(ev(i).real()));
  }
  return std::isfinite(rate) ? rate : 0.0;
}

CTurnpikeReport verify_c_turnpike(const SystemSpec& sys_in, const SteadySolution& steady,
                                  const std::vector<double>& horizons,
                                  const VerifyOptions& options) {
  if (horizons.size() < 3) {
    throw PreconditionError("verify_c_turnpike: at least 3 horizons required");
  }
  if (!std::is_sorted(horizons.begin(), horizons.end()) ||
      std::adjacent_find(horizons.begin(), horizons.end()) != horizons.end()) {
    throw PreconditionError("verify_c_turnpike: horizons must be strictly ascending");
  }
  SystemSpec sys = sys_in;
  sys.x1.reset();
  sys.validate();
  const Matrix D = detectable_projections(sys.A, sys.C).D;

  CTurnpikeReport report;
  if (options.parallel) {
    std::vector<std::future<HorizonRun>> futures;
    for (const double T : horizons) {
      futures.push_back(std::async(std::launch::async, run_horizon, std::cref(sys),
                                   std::cref(steady), std::cref(D), T, options.steps));
    }
    for (auto& f : futures) report.runs.push_back(f.get());
  } else {
    for (const double T : horizons) {
      report.runs.push_back(run_horizon(sys, steady, D, T, options.steps));
    }
  }

  bool ok = true;
  auto fail = [&](const std::string& why) {
    ok = false;
    report.diagnostics.push_back(why);
  };
  std::vector<const TurnpikeFit*> entries;
  for (const HorizonRun& run : report.runs) {
    const std::string tag = "T=" + format_double(run.horizon) + ": ";
    if (run.blew_up) {
      fail(tag + "blow-up: " + run.failure);
      continue;
    }
    if (run.exit && run.exit->flagged) {
      report.diagnostics.push_back(tag + "exit layer not exponential (r2=" +
                                   format_double(run.exit->r2) +
                                   ", mu=" + format_double(run.exit->mu) + "), informative only");
    }
    if (!run.entry) continue;  // deviation already at the noise floor
    if (run.entry->flagged) {
      report.low_r2 = true;
      fail(tag + "entry decay not exponential (r2=" + format_double(run.entry->r2) +
           ", mu=" + format_double(run.entry->mu) + ")");
      continue;
    }
    entries.push_back(&*run.entry);
  }
  if (!entries.empty()) {
    double mu_max = 0.0;
    report.mu_star = INFINITY;
    for (const TurnpikeFit* f : entries) {
      report.mu_star = std::min(report.mu_star, f->mu);
      mu_max = std::max(mu_max, f->mu);
    }
    report.mu_spread = (mu_max - report.mu_star) / mu_max;
    if (report.mu_spread > options.max_mu_spread) {
      report.diagnostics.push_back("entry rates drift across horizons (spread " +
                                   format_double(report.mu_spread) +
                                   "), informative only");
    }
    // Smallest K per horizon with e(t) <= K [exp(-mu* t) + exp(-mu* (T - t))]
    // on the resolved nodes; a turnpike keeps it bounded as T grows.
    double k_min = INFINITY, k_max = 0.0;
    for (HorizonRun& run : report.runs) {
      if (run.blew_up || !run.entry) continue;
      const double T = run.horizon;
      double k = 0.0;
      for (Eigen::Index i = 0; i < run.t.size(); ++i) {
        if (run.deviation(i) <= run.noise_floor) continue;
        const double shape = std::exp(-report.mu_star * run.t(i)) +
                             std::exp(-report.mu_star * (T - run.t(i)));
        k = std::max(k, run.deviation(i) / shape);
      }
      run.envelope_K = k;
      k_min = std::min(k_min, k);
      k_max = std::max(k_max, k);
    }
    report.K_ratio = k_min > 0.0 ? k_max / k_min : 1.0;
    if (report.K_ratio > options.max_K_ratio) {
      fail("no horizon-independent envelope K [exp(-mu t) + exp(-mu (T - t))] with mu = " +
           format_double(report.mu_star) + " (K ratio " + format_double(report.K_ratio) +
           ")");
    }
  }
  for (std::size_t i = 0; i + 1 < report.runs.size(); ++i) {
    const HorizonRun& a = report.runs[i];
    const HorizonRun& b = report.runs[i + 1];
    if (a.blew_up || b.blew_up) continue;
    const double ratio =
        a.midpoint_deviation > 0.0 ? b.midpoint_deviation / a.midpoint_deviation : 0.0;
    report.midpoint_ratios.push_back(ratio);
    if (ratio > options.max_midpoint_ratio && b.midpoint_deviation > b.noise_floor) {
      fail("midpoint deviation does not decay from T=" + format_double(a.horizon) +
           " to T=" + format_double(b.horizon) + " (ratio " + format_double(ratio) + ")");
    }
  }
  report.verdict = ok;
  report.predicate = is_C_stabilizable(sys.A, sys.B, sys.C).holds;
  report.agrees = report.verdict == report.predicate;
  return report;
}

VelocityReport velocity_report(const Trajectory& traj, const SystemSpec& sys,
                               const RiccatiResult& riccati,
                               const VelocityProjections& proj,
                               const SteadySolution& steady) {
  const Eigen::Index n = sys.n();
  if (traj.x.cols() != n || traj.nodes() < 3 || riccati.E_hat.rows() != n) {
    throw PreconditionError("velocity_report: inconsistent dimensions");
  }
  const Matrix q = traj.q ? *traj.q : Matrix(traj.p - traj.x * riccati.E_hat);
  const Eigen::Index last = traj.nodes() - 1;
  const double T = traj.horizon();

  VelocityReport out;
  out.q_hat = proj.Q1 * q.row(last).transpose();
  out.x_hat = Vector::Zero(n);
  int count = 0;
  for (Eigen::Index k = 0; k <= last; ++k) {
    if (traj.t(k) >= 0.4 * T && traj.t(k) <= 0.6 * T) {
      out.x_hat += proj.P2 * traj.x.row(k).transpose();
      ++count;
    }
  }
  if (count == 0) throw PreconditionError("velocity_report: grid too coarse");
  out.x_hat /= count;
  out.u_hat = -sys.B.transpose() * riccati.E_hat * out.x_hat - sys.B.transpose() * out.q_hat;
  out.ramp_slope = -proj.P1 * sys.B * sys.B.transpose() * out.q_hat;
  out.q_hat_defect = (riccati.A_plus.transpose() * out.q_hat).norm();
  out.x_hat_defect =
      linalg::inclusion_defect(proj.stable_basis, out.x_hat.normalized()) * out.x_hat.norm();

  // Linear-ramp regression of P1 x on [0.1T, 0.9T], pooled over components.
  std::vector<double> s;
  std::vector<Eigen::Index> nodes;
  for (Eigen::Index k = 0; k <= last; ++k) {
    if (traj.t(k) >= 0.1 * T && traj.t(k) <= 0.9 * T) {
      s.push_back(traj.t(k));
      nodes.push_back(k);
    }
  }
  out.fitted_slope = Vector::Zero(n);
  double ss_res = 0.0, ss_tot = 0.0, scale = 0.0;
  const Matrix p1x = traj.x * proj.P1.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> y;
    for (const Eigen::Index k : nodes) y.push_back(p1x(k, i));
    const LineFit line = fit_line(s, y);
    out.fitted_slope(i) = line.slope;
    ss_res += line.ss_res;
    ss_tot += line.ss_tot;
    for (const double v : y) scale = std::max(scale, std::abs(v));
  }
  const double negligible = 1e-20 * static_cast<double>(s.size()) * std::max(1.0, scale * scale);
  // A constant P1 x is an exact (zero-slope) ramp.
  out.ramp_r2 = ss_tot > negligible ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;

  const Matrix& kernel = steady.kernel_dir;
  Vector gap = out.x_hat - steady.x_bar;
  if (kernel.cols() > 0) gap -= kernel * (kernel.transpose() * gap);
  out.dist_sq_to_argmin = (out.u_hat - steady.u_bar).squaredNorm() + gap.squaredNorm();

  out.deviation.resize(traj.nodes());
  for (Eigen::Index k = 0; k <= last; ++k) {
    out.deviation(k) = (traj.u.row(k).transpose() - out.u_hat).norm() +
                       (proj.P2 * traj.x.row(k).transpose() - out.x_hat).norm();
  }
  if (out.deviation.maxCoeff() > 0.0) {
    out.entry = fit_exponential(traj.t, out.deviation, FitSide::entry);
    out.exit = fit_exponential(traj.t, out.deviation, FitSide::exit);
  }
  return out;
}

SplitDecayReport spectral_split_decay(const Vector& t, const Matrix& y, const Matrix& H,
                                      double defect_tol) {
  const Eigen::Index dim = H.rows();
  if (H.cols() != dim || y.cols() != dim || y.rows() != t.size() || t.size() < 3) {
    throw PreconditionError("spectral_split_decay: inconsistent dimensions");
  }
  const double y_scale = std::max(max_row_norm(y), 1e-300);
  const double h_norm = std::max(1.0, linalg::spectral_norm(H));

  SplitDecayReport out;
  for (Eigen::Index k = 0; k + 1 < t.size(); ++k) {
    const double h = t(k + 1) - t(k);
    const Vector d = (y.row(k + 1) - y.row(k)).transpose() / h -
                     H * (0.5 * (y.row(k) + y.row(k + 1)).transpose());
    out.defect = std::max(out.defect, d.norm() / (h_norm * y_scale));
  }
  if (out.defect > defect_tol) {
    throw PreconditionError("spectral_split_decay: input is not a solution of y' = H y "
                            "(relative defect " + format_double(out.defect) + ")");
  }

  const Matrix vm = spectral_subspace(H, SpectralClass::negative).basis;
  const Matrix v0 = spectral_subspace(H, SpectralClass::zero).basis;
  const Matrix vp = spectral_subspace(H, SpectralClass::positive).basis;
  Matrix v(dim, dim);
  v << vm, v0, vp;
  const Eigen::PartialPivLU<Matrix> lu(v);
  const Matrix coords = lu.solve(y.transpose());  // dim x nodes
  const Eigen::Index km = vm.cols(), k0 = v0.cols(), kp = vp.cols();

  Vector stable(t.size()), antistable(t.size());
  out.distance.resize(t.size());
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    stable(k) = (vm * coords.col(k).head(km)).norm();
    antistable(k) = (vp * coords.col(k).tail(kp)).norm();
    Vector yk = y.row(k).transpose();
    if (k0 > 0) yk -= v0 * (v0.transpose() * yk);
    out.distance(k) = yk.norm();
  }
  if (km > 0) out.stable = fit_if_present(t, stable, FitSide::entry, y_scale);
  if (kp > 0) out.antistable = fit_if_present(t, antistable, FitSide::exit, y_scale);

  const ComplexVector ev = linalg::eigenvalues(H);
  const double tau = linalg::classification_tolerance(H);
  out.stable_rate_reference = INFINITY;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i).real() < -tau) out.stable_rate_reference = std::min(out.stable_rate_reference, -ev(i).real());
  }
  if (!std::isfinite(out.stable_rate_reference)) out.stable_rate_reference = 0.0;

  const double T = t(t.size() - 1);
  const double floor = 1e-9 * y_scale;
  out.bound_holds = true;
  for (const auto* fit : {&out.stable, &out.antistable}) {
    if (*fit && !((*fit)->mu > 0.0)) out.bound_holds = false;
  }
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    double bound = floor;
    if (out.stable) bound += 1.5 * out.stable->model(t(k), T);
    if (out.antistable) bound += 1.5 * out.antistable->model(t(k), T);
    out.bound_ratio = std::max(out.bound_ratio, out.distance(k) / bound);
  }
  if (out.bound_ratio > 1.0) out.bound_holds = false;
  return out;
}

}  // namespace turnpike
