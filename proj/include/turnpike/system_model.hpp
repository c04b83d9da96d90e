#pragma once

#include <optional>
#include <string>
#include <vector>

#include "turnpike/linalg.hpp"

namespace turnpike {

/// A linear-quadratic problem instance:
///   minimize 1/2 ∫ |u|^2 + |C x - z|^2 dt  subject to  x' = A x + B u,
///   x(0) = x0 and, for fixed-endpoint problems, x(T) = x1.
struct SystemSpec {
  Matrix A;
  Matrix B;
  Matrix C;
  Vector z;
  Vector x0;
  std::optional<Vector> x1;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }

  /// Throws PreconditionError on inconsistent dimensions or non-finite data.
  void validate() const;
};

enum class PdeKind { heat, wave };

/// Fourier (sine) projection of a pointwise-controlled, pointwise-observed
/// PDE on the interval (0, L) with Dirichlet conditions.
struct PdeSpec {
  PdeKind kind = PdeKind::heat;
  int modes = 1;
  double length = 1.0;
  double potential = 0.0;  ///< constant c in -y_xx + c y; heat only
  double x_con = 0.5;
  double x_obs = 0.5;
  double target = 0.0;
  std::optional<Vector> x0;

  void validate() const;
};

struct GridSpec {
  double horizon = 1.0;
  int steps = 100;

  void validate() const;
  double step() const { return horizon / steps; }
};

/// phi_k(x) = sqrt(2/L) sin(k pi x / L), k >= 1.
double eigenfunction(int k, double length, double x);

/// Dirichlet eigenvalue (k pi / L)^2 + c.
double eigenvalue(int k, double length, double potential);

/// |phi| below this counts as a zero of the eigenfunction.
double eigenfunction_zero_tolerance(double length);

SystemSpec build_heat(const PdeSpec& spec);
SystemSpec build_wave(const PdeSpec& spec);
SystemSpec build_system(const PdeSpec& spec);

struct PredicateResult {
  bool holds = true;
  /// 1-based mode indices violating the condition.
  std::vector<int> witnesses;
};

/// Heat: every observed mode is controlled or stable (lambda_i > 0).
PredicateResult heat_turnpike_predicate(const PdeSpec& spec);

/// Wave: every observed mode is controlled.
PredicateResult wave_turnpike_predicate(const PdeSpec& spec);

std::string to_string(PdeKind kind);
PdeKind pde_kind_from_string(const std::string& s);

}  // namespace turnpike
