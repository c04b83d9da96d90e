#pragma once

#include "turnpike/linalg.hpp"

namespace turnpike {

/// Ham = [A, -B B^T; -C^T C, -A^T].
Matrix build_hamiltonian(const Matrix& A, const Matrix& B, const Matrix& C);

/// The antistrong solution of E A + A^T E - E B B^T E + C^T C = 0: symmetric,
/// positive semidefinite, with A - B B^T E having no eigenvalue in Re > 0.
struct RiccatiResult {
  Matrix E_hat;
  Matrix A_plus;
  Matrix Ham;
  Matrix Lambda;  ///< [I, 0; -E, I]
  double residual = 0.0;
  /// Dimension of NO^0(C, A) = L^0(A_plus), the critical block kept in the
  /// invariant subspace.
  int critical_dim = 0;
  /// Condition number of the top block of the invariant-subspace basis.
  double graph_condition = 1.0;
  ComplexVector ham_spectrum;
};

/// Throws PreconditionError when (A, B) is not stabilizable and
/// NumericalError when the selected invariant subspace is not a graph.
RiccatiResult solve_are_antistrong(const Matrix& A, const Matrix& B, const Matrix& C);

/// || E A + A^T E - E B B^T E + C^T C ||_2
double are_residual(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& E);

struct TriangularForm {
  Matrix transformed;  ///< Lambda Ham Lambda^{-1}
  double defect = 0.0; ///< norm of the lower-left block
};

TriangularForm lambda_triangularize(const RiccatiResult& result);

struct HautusEquivalence {
  int critical_ham_dim = 0;  ///< dim L^0(Ham)
  bool l0_trivial = true;
  bool hautus = true;
  bool agree = true;
};

HautusEquivalence check_weak_hautus_equivalence(const Matrix& A, const Matrix& B,
                                                const Matrix& C);

/// Oblique projectors for R^n = NO^0(C, A) ⊕ L^-(A_plus).
struct VelocityProjections {
  Matrix P1;
  Matrix P2;
  Matrix critical_basis;      ///< NO^0(C, A)
  Matrix stable_basis;        ///< L^-(A_plus)
  Matrix adjoint_kernel;      ///< ker(A_plus^T)
  Matrix adjoint_stable;      ///< L^-(A_plus^T)
  Matrix Q1;  ///< projector onto ker(A_plus^T) along L^-(A_plus^T)
  double condition = 1.0;
};

/// Requires NO^0(C, A) ⊆ ker(A); throws PreconditionError otherwise.
VelocityProjections velocity_projections(const Matrix& A, const Matrix& B,
                                         const Matrix& C, const RiccatiResult& result);

}  // namespace turnpike
