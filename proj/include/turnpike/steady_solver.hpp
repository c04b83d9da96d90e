#pragma once

#include <optional>

#include "turnpike/linalg.hpp"

namespace turnpike {

/// A minimizer of J_s(u, x) = 1/2 (|u|^2 + |C x - z|^2) subject to
/// A x + B u = 0. The full minimizer set is (u_bar, x_bar) + {0} x span(kernel_dir).
struct SteadySolution {
  Vector u_bar;
  Vector x_bar;  ///< minimal-norm representative
  std::optional<Vector> p_bar;
  double j_value = 0.0;
  Matrix kernel_dir;  ///< orthonormal basis of ker(A) ∩ ker(C)
};

double steady_cost(const Matrix& C, const Vector& z, const Vector& u, const Vector& x);

SteadySolution solve_steady(const Matrix& A, const Matrix& B, const Matrix& C,
                            const Vector& z);

struct HamiltonianKernelRange {
  Matrix kernel;  ///< [ker A ∩ ker C] x [ker A^T ∩ ker B^T]
  Matrix range;   ///< [range A + range B] x [range A^T + range C^T]
  /// Largest principal-angle sines against bases read off a direct SVD of Ham.
  double kernel_gap = 0.0;
  double range_gap = 0.0;
};

HamiltonianKernelRange hamiltonian_kernel_range(const Matrix& A, const Matrix& B,
                                                const Matrix& C);

struct SteadySystemSolution {
  bool solvable = false;
  Vector x_bar;
  Vector p_bar;
  double residual = 0.0;
  bool unique = false;
};

/// Solves A x - B B^T p = 0, -A^T p - C^T (C x - z) = 0 in the least-squares
/// sense with minimal norm, and reports whether [0; C^T z] ∈ range(Ham).
SteadySystemSolution steady_system_solvable(const Matrix& A, const Matrix& B,
                                            const Matrix& C, const Vector& z);

}  // namespace turnpike
