#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "turnpike/horizon_solver.hpp"
#include "turnpike/linalg.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/steady_solver.hpp"
#include "turnpike/system_model.hpp"

namespace turnpike {

enum class FitSide { entry, exit };

/// e(t) ≈ K exp(-mu t) on the entry window [0.05T, 0.5T], or
/// e(t) ≈ K exp(-mu (T - t)) on the exit window [0.5T, 0.95T].
struct TurnpikeFit {
  double K = 0.0;
  double mu = 0.0;
  double r2 = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  FitSide side = FitSide::entry;
  int samples = 0;
  /// Set when r2 < 0.5 or mu <= 0: the series does not look like an
  /// exponential decay.
  bool flagged = false;

  /// Model value at time t of a horizon T.
  double model(double t, double T) const;
};

inline constexpr double kFitFloorRel = 1e-14;
/// Samples below this fraction of max(e) sit at the solver noise floor and
/// are left out of the regression.
inline constexpr double kFitNoiseRel = 1e-11;
inline constexpr double kMinR2 = 0.5;

/// e(t_k) = |u(t_k) - u_bar| + |D x(t_k) - D x_bar|.
Vector deviation_curve(const Trajectory& traj, const SteadySolution& steady,
                       const Matrix& D);

/// Log-linear least squares of ln max(e, floor) against t (entry) or T - t
/// (exit). Throws PreconditionError when e vanishes identically.
TurnpikeFit fit_exponential(const Vector& t, const Vector& e, FitSide side);

/// y ≈ c x^alpha by least squares in log-log coordinates.
struct PowerLawFit {
  double c = 0.0;
  double alpha = 0.0;
  double r2 = 0.0;
};

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Slowest decay rate min |Re lambda| over the eigenvalues off the imaginary
/// axis of the Hamiltonian of the system reduced to the detectable space W.
/// Deviation curves decay at this rate; 0 when there is no such eigenvalue.
double expected_turnpike_rate(const Matrix& A, const Matrix& B, const Matrix& C);

struct HorizonRun {
  double horizon = 0.0;
  bool blew_up = false;
  std::string failure;  ///< blow-up description, empty otherwise
  Vector t;
  Vector deviation;
  std::optional<TurnpikeFit> entry;
  std::optional<TurnpikeFit> exit;
  double midpoint_deviation = 0.0;
  /// Roundoff level of the deviation for this run.
  double noise_floor = 0.0;
  /// Smallest K with e(t) <= K [exp(-mu* t) + exp(-mu* (T - t))] on the
  /// nodes above the noise floor, mu* being the report's common rate.
  double envelope_K = 0.0;
};

struct CTurnpikeReport {
  std::vector<HorizonRun> runs;
  bool verdict = false;
  bool predicate = false;  ///< is_C_stabilizable
  bool agrees = false;
  /// Common rate: the smallest fitted entry rate over the horizons.
  double mu_star = 0.0;
  /// (max - min) / max over entry rates. Rates of multi-rate systems drift
  /// with T because the fit windows scale with T, so this is informative.
  double mu_spread = 0.0;
  double K_ratio = 0.0;    ///< max / min envelope_K over the horizons
  std::vector<double> midpoint_ratios;
  bool low_r2 = false;     ///< some fit was flagged non-exponential
  std::vector<std::string> diagnostics;
};

struct VerifyOptions {
  int steps = 4000;  ///< grid steps for every horizon
  bool parallel = true;
  double max_mu_spread = 0.25;
  double max_K_ratio = 10.0;
  double max_midpoint_ratio = 0.5;
};

/// Solves the free-endpoint problem for every horizon and judges whether the
/// deviation from the steady optimum decays like a C-turnpike: no blow-up,
/// exponential entry decay (mu > 0, r2 >= 0.5), one envelope
/// K [exp(-mu* t) + exp(-mu* (T - t))] bounding every horizon with K bounded
/// in T, and geometric decay of e(T/2). Blow-ups are recorded as evidence of
/// failure.
CTurnpikeReport verify_c_turnpike(const SystemSpec& sys, const SteadySolution& steady,
                                  const std::vector<double>& horizons,
                                  const VerifyOptions& options = {});

/// Velocity-turnpike quantities extracted from a fixed-endpoint run.
struct VelocityReport {
  Vector u_hat;
  Vector x_hat;       ///< plateau of P2 x over [0.4T, 0.6T]
  Vector q_hat;       ///< projection of q(T) onto ker(A_plus^T)
  Vector ramp_slope;  ///< predicted slope of P1 x, -P1 B B^T q_hat
  Vector fitted_slope;  ///< least-squares slope of P1 x on [0.1T, 0.9T]
  double ramp_r2 = 0.0;
  double dist_sq_to_argmin = 0.0;
  double q_hat_defect = 0.0;  ///< |A_plus^T q_hat|
  double x_hat_defect = 0.0;  ///< distance of x_hat from L^-(A_plus)
  /// |u - u_hat| + |P2 x - x_hat| over time.
  Vector deviation;
  std::optional<TurnpikeFit> entry;
  std::optional<TurnpikeFit> exit;
};

VelocityReport velocity_report(const Trajectory& traj, const SystemSpec& sys,
                               const RiccatiResult& riccati,
                               const VelocityProjections& proj,
                               const SteadySolution& steady);

struct SplitDecayReport {
  std::optional<TurnpikeFit> stable;      ///< forward decay of the L^- part
  std::optional<TurnpikeFit> antistable;  ///< backward decay of the L^+ part
  Vector distance;  ///< dist(y(t), L^0(H)), orthogonal
  /// Smallest |Re lambda| over the stable spectrum of H (0 if none).
  double stable_rate_reference = 0.0;
  double defect = 0.0;
  /// max over nodes of distance / bound; <= 1 means the bound holds.
  double bound_ratio = 0.0;
  bool bound_holds = true;
};

/// y has one row per node of t. Throws PreconditionError when y is not an
/// implicit-midpoint solution of y' = H y up to `defect_tol` (relative).
SplitDecayReport spectral_split_decay(const Vector& t, const Matrix& y, const Matrix& H,
                                      double defect_tol = 1e-3);

std::string to_string(FitSide side);

}  // namespace turnpike
