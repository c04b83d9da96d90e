#pragma once

#include <complex>
#include <vector>

#include "turnpike/linalg.hpp"

namespace turnpike {

/// Orthonormal basis of a subspace of R^n (n x dim).
struct SubspaceBasis {
  Matrix basis;

  Eigen::Index dim() const { return basis.cols(); }
  Eigen::Index ambient() const { return basis.rows(); }
  Matrix projector() const { return linalg::projector(basis, basis.rows()); }
};

enum class SpectralClass { negative, zero, positive, nonnegative };

/// Invariant subspace of A for eigenvalues with Re < -tau, |Re| <= tau,
/// Re > tau or Re >= -tau, tau = classification_tolerance(A). Computed from
/// a reordered real Schur form, so defective eigenvalues are handled.
SubspaceBasis spectral_subspace(const Matrix& A, SpectralClass cls);

/// NO(C, A): the intersection of ker(C A^i), i < n.
SubspaceBasis unobservable_space(const Matrix& A, const Matrix& C);

/// NO^{0+}(C, A): unobservable modes that are not asymptotically stable.
SubspaceBasis undetectable_space(const Matrix& A, const Matrix& C);

/// NO^0(C, A): unobservable modes on the imaginary axis.
SubspaceBasis critical_unobservable_space(const Matrix& A, const Matrix& C);

/// Spectral, observability and detectability subspaces of (A, C), with the
/// orthogonal projectors D (onto the detectable space W) and R = I - D.
struct SubspaceReport {
  SubspaceBasis stable;       ///< L^-(A)
  SubspaceBasis critical;     ///< L^0(A)
  SubspaceBasis antistable;   ///< L^+(A)
  SubspaceBasis unobservable; ///< NO(C, A)
  SubspaceBasis undetectable; ///< NO^{0+}(C, A)
  SubspaceBasis critical_unobservable;  ///< NO^0(C, A)
  SubspaceBasis detectable;   ///< W = NO^{0+}(C, A)^perp
  Matrix D;
  Matrix R;
};

SubspaceReport detectable_projections(const Matrix& A, const Matrix& C);

/// S(A, B) = sum_i range(A^i B) + L^-(A).
SubspaceBasis stabilizable_subspace(const Matrix& A, const Matrix& B);

struct CStabilizability {
  bool holds = false;
  /// || (I - P_S) P_W ||_2
  double defect = 0.0;
};

/// (A, B) is C-stabilizable iff W ⊆ S(A, B).
CStabilizability is_C_stabilizable(const Matrix& A, const Matrix& B, const Matrix& C);

struct HautusResult {
  bool holds = true;
  std::vector<std::complex<double>> failing_eigenvalues;
};

/// rank [A - i beta I; C] = n for every purely imaginary eigenvalue i beta.
HautusResult weak_hautus(const Matrix& A, const Matrix& C);

bool is_controllable(const Matrix& A, const Matrix& B);

bool is_stabilizable(const Matrix& A, const Matrix& B);

/// (D A, D B, C) restricted to W and written in an orthonormal W-basis Q:
///   eta' = Ar eta + Br u,  C x = Cr eta  with eta = Q^T x.
struct ReducedSystem {
  Matrix Ar;
  Matrix Br;
  Matrix Cr;
  Matrix basis;  ///< Q, n x dim W
};

ReducedSystem kalman_reduce(const Matrix& A, const Matrix& B, const Matrix& C);

}  // namespace turnpike
