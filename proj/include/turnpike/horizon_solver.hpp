#pragma once

#include <optional>
#include <string>
#include <vector>

#include "turnpike/linalg.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/system_model.hpp"

namespace turnpike {

/// Sampled solution of a finite-horizon optimality system on a uniform grid.
/// Row k of u, x, p holds the value at time t(k).
struct Trajectory {
  Vector t;
  Matrix u;
  Matrix x;
  Matrix p;
  /// q = p - E x, filled by the fixed-endpoint solver.
  std::optional<Matrix> q;
  /// Largest implicit-midpoint defect of the optimality system (per unit time).
  double residual = 0.0;
  /// |x(T) - x1| for fixed-endpoint problems, 0 otherwise.
  double boundary_error = 0.0;
  std::string solver_tag;

  double horizon() const { return t.size() ? t(t.size() - 1) : 0.0; }
  Eigen::Index nodes() const { return t.size(); }
  double step() const { return t.size() > 1 ? t(1) - t(0) : 0.0; }
};

/// State norm above which integration is declared to have blown up.
inline constexpr double kOverflowGuard = 1e12;

/// Free endpoint: x(0) = x0, p(T) = 0. The implicit-midpoint discretization
/// of the optimality system is solved exactly by a backward discrete Riccati
/// sweep (p_k = P_k x_k + r_k) followed by a forward state pass.
Trajectory solve_free_endpoint(const SystemSpec& sys, const GridSpec& grid);

/// Fixed endpoint: x(0) = x0, x(T) = x1, in the decoupled variables
/// (x, q = p - E x). q runs backward under A_plus^T and x forward under
/// A_plus, so every sweep only sees modes with Re <= 0.
Trajectory solve_fixed_endpoint(const SystemSpec& sys, const GridSpec& grid);
Trajectory solve_fixed_endpoint(const SystemSpec& sys, const GridSpec& grid,
                                const RiccatiResult& riccati);

struct CgOptions {
  /// Relative residual of the normal equations. The right-hand side grows
  /// with the penalty, so this must sit near machine precision.
  double tolerance = 1e-14;
  int max_iterations = 20000;
  std::vector<double> penalties{1e2, 1e4, 1e6};
};

struct CgResult {
  Trajectory trajectory;
  double gradient_norm = 0.0;
  int iterations = 0;
  /// Discrete cost after every CG iteration (all continuation stages).
  std::vector<double> cost_history;
};

/// Conjugate gradient on piecewise-constant controls for the implicit-midpoint
/// discretization of the state equation and the midpoint-rule cost, with an
/// adjoint gradient. Node values of p follow from the step multipliers by the
/// half steps of the discrete adjoint equation and u = -B^T p. Fixed endpoints (sys.x1) are enforced by the penalty
/// rho |x(T) - x1|^2 with continuation over options.penalties.
CgResult solve_cg_oracle(const SystemSpec& sys, const GridSpec& grid,
                         const CgOptions& options = {});

/// J^T = 1/2 ∫ |u|^2 + |C x - z|^2 dt, trapezoid rule over the nodes.
double trajectory_cost(const Trajectory& traj, const Matrix& C, const Vector& z);

/// Central-difference (explicit midpoint rule) defect of both differential
/// lines of the optimality system, maximized over interior nodes.
double midpoint_rule_defect(const Trajectory& traj, const SystemSpec& sys);

/// Minimal-energy control steering x' = A x + B u from xa to xb on [0, 1].
struct SteeringControl {
  Vector s;          ///< quadrature nodes on [0, 1]
  Matrix u;          ///< control samples, one row per node
  Matrix gramian;
  Vector weights;    ///< G^{-1} (xb - e^A xa); u(s) = B^T e^{A^T (1-s)} weights
  double condition = 1.0;
  double endpoint_error = 0.0;
  /// K with |u|_{L^2} <= K (|xa| + |xb|).
  double gain_bound = 0.0;
  double l2_norm = 0.0;

  Vector at(const Matrix& A, const Matrix& B, double s) const;
};

SteeringControl steering_control(const Matrix& A, const Matrix& B, const Vector& xa,
                                 const Vector& xb, int intervals = 1000);

}  // namespace turnpike
