#include "turnpike/system_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "turnpike/errors.hpp"

namespace turnpike {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw PreconditionError(message);
}

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void check_pde(const PdeSpec& spec, PdeKind expected, const char* op) {
  require(spec.kind == expected,
          std::string(op) + ": expected a " + to_string(expected) + " problem, got " +
              to_string(spec.kind));
  spec.validate();
}

Vector default_x0(const PdeSpec& spec, Eigen::Index n) {
  if (!spec.x0) return Vector::Ones(n);
  require(spec.x0->size() == n, "x0 has " + std::to_string(spec.x0->size()) +
                                    " entries, expected " + std::to_string(n));
  return *spec.x0;
}

}  // namespace

void SystemSpec::validate() const {
  const Eigen::Index n = A.rows();
  require(A.cols() == n, "A must be square, got " + shape(A));
  require(B.rows() == n, "B must have " + std::to_string(n) + " rows, got " + shape(B));
  require(C.cols() == n, "C must have " + std::to_string(n) + " columns, got " + shape(C));
  require(z.size() == C.rows(), "z must have " + std::to_string(C.rows()) +
                                    " entries, got " + std::to_string(z.size()));
  require(x0.size() == n, "x0 must have " + std::to_string(n) + " entries, got " +
                              std::to_string(x0.size()));
  if (x1) {
    require(x1->size() == n, "x1 must have " + std::to_string(n) + " entries, got " +
                                 std::to_string(x1->size()));
    require(x1->allFinite(), "x1 has non-finite entries");
  }
  require(A.allFinite() && B.allFinite() && C.allFinite() && z.allFinite() &&
              x0.allFinite(),
          "system data has non-finite entries");
}

void PdeSpec::validate() const {
  require(modes >= 1, "mode count N must be >= 1");
  require(length > 0.0 && std::isfinite(length), "interval length must be positive");
  require(x_con > 0.0 && x_con < length, "x_con must lie in (0, L)");
  require(x_obs > 0.0 && x_obs < length, "x_obs must lie in (0, L)");
  require(std::isfinite(potential) && std::isfinite(target), "non-finite PDE data");
}

void GridSpec::validate() const {
  require(horizon > 0.0 && std::isfinite(horizon), "horizon T must be positive");
  require(steps >= 2, "grid needs at least 2 steps");
}

double eigenfunction(int k, double length, double x) {
  return std::sqrt(2.0 / length) * std::sin(k * std::numbers::pi * x / length);
}

double eigenvalue(int k, double length, double potential) {
  const double w = k * std::numbers::pi / length;
  return w * w + potential;
}

double eigenfunction_zero_tolerance(double length) {
  return 1e-9 * std::sqrt(2.0 / length);
}

SystemSpec build_heat(const PdeSpec& spec) {
  check_pde(spec, PdeKind::heat, "build_heat");
  const int n = spec.modes;
  SystemSpec sys;
  sys.A = Matrix::Zero(n, n);
  sys.B = Matrix(n, 1);
  sys.C = Matrix(1, n);
  for (int k = 1; k <= n; ++k) {
    sys.A(k - 1, k - 1) = -eigenvalue(k, spec.length, spec.potential);
    sys.B(k - 1, 0) = eigenfunction(k, spec.length, spec.x_con);
    sys.C(0, k - 1) = eigenfunction(k, spec.length, spec.x_obs);
  }
  sys.z = Vector::Constant(1, spec.target);
  sys.x0 = default_x0(spec, n);
  return sys;
}

SystemSpec build_wave(const PdeSpec& spec) {
  check_pde(spec, PdeKind::wave, "build_wave");
  const int n = spec.modes;
  SystemSpec sys;
  sys.A = Matrix::Zero(2 * n, 2 * n);
  sys.A.topRightCorner(n, n).setIdentity();
  sys.B = Matrix::Zero(2 * n, 1);
  sys.C = Matrix::Zero(1, 2 * n);
  for (int k = 1; k <= n; ++k) {
    sys.A(n + k - 1, k - 1) = -eigenvalue(k, spec.length, 0.0);
    sys.B(n + k - 1, 0) = eigenfunction(k, spec.length, spec.x_con);
    sys.C(0, k - 1) = eigenfunction(k, spec.length, spec.x_obs);
  }
  sys.z = Vector::Constant(1, spec.target);
  sys.x0 = default_x0(spec, 2 * n);
  return sys;
}

SystemSpec build_system(const PdeSpec& spec) {
  return spec.kind == PdeKind::heat ? build_heat(spec) : build_wave(spec);
}

PredicateResult heat_turnpike_predicate(const PdeSpec& spec) {
  check_pde(spec, PdeKind::heat, "heat_turnpike_predicate");
  const double zero = eigenfunction_zero_tolerance(spec.length);
  PredicateResult out;
  for (int k = 1; k <= spec.modes; ++k) {
    const bool observed = std::abs(eigenfunction(k, spec.length, spec.x_obs)) > zero;
    const bool controlled = std::abs(eigenfunction(k, spec.length, spec.x_con)) > zero;
    const bool stable = eigenvalue(k, spec.length, spec.potential) > 0.0;
    if (observed && !controlled && !stable) out.witnesses.push_back(k);
  }
  out.holds = out.witnesses.empty();
  return out;
}

PredicateResult wave_turnpike_predicate(const PdeSpec& spec) {
  check_pde(spec, PdeKind::wave, "wave_turnpike_predicate");
  const double zero = eigenfunction_zero_tolerance(spec.length);
  PredicateResult out;
  for (int k = 1; k <= spec.modes; ++k) {
    const bool observed = std::abs(eigenfunction(k, spec.length, spec.x_obs)) > zero;
    const bool controlled = std::abs(eigenfunction(k, spec.length, spec.x_con)) > zero;
    if (observed && !controlled) out.witnesses.push_back(k);
  }
  out.holds = out.witnesses.empty();
  return out;
}

std::string to_string(PdeKind kind) {
  return kind == PdeKind::heat ? "heat" : "wave";
}

PdeKind pde_kind_from_string(const std::string& s) {
  if (s == "heat") return PdeKind::heat;
  if (s == "wave") return PdeKind::wave;
  throw ConfigError("unknown PDE kind '" + s + "' (expected heat or wave)");
}

}  // namespace turnpike
