#pragma once

#include <stdexcept>
#include <string>

namespace turnpike {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs violate an operation's documented precondition (dimensions,
/// stabilizability, controllability, structural hypotheses).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed: non-convergence, singular systems, loss of
/// the graph property of an invariant subspace.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised by the horizon solvers when a state norm exceeds the overflow
/// guard. Carries a description of the responsible unstable modes.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double time, double norm)
      : NumericalError(what), time_(time), norm_(norm) {}
  double time() const { return time_; }
  double norm() const { return norm_; }

 private:
  double time_;
  double norm_;
};

/// Malformed configuration documents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace turnpike
