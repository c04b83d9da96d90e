#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace turnpike {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

namespace linalg {

/// Singular values below kRankRelTol * sigma_max count as zero.
inline constexpr double kRankRelTol = 1e-10;
/// Tolerance on projector defects for subspace inclusion and intersection.
inline constexpr double kInclusionTol = 1e-8;
/// Relative radius used to merge numerically split eigenvalue clusters
/// (defective eigenvalues split by O(eps^(1/k)) under roundoff).
inline constexpr double kClusterRelRadius = 1e-5;

double spectral_norm(const Matrix& m);

/// Real-part classification threshold: 1e-8 * max(1, ||A||_2).
double classification_tolerance(const Matrix& a);

/// Orthonormal basis of ker(m), n x d.
Matrix null_space(const Matrix& m, double rel_tol = kRankRelTol);

/// Orthonormal basis of range(m).
Matrix range_basis(const Matrix& m, double rel_tol = kRankRelTol);

/// Numerical rank using the same relative tolerance.
int rank(const Matrix& m, double rel_tol = kRankRelTol);

/// Orthogonal projector Q Q^T for a matrix with orthonormal columns.
Matrix projector(const Matrix& basis, Eigen::Index ambient);

/// Orthogonal complement of span(basis) in R^ambient.
Matrix complement(const Matrix& basis, Eigen::Index ambient);

/// Orthonormal basis of span(u) + span(v).
Matrix subspace_sum(const Matrix& u, const Matrix& v);

/// U ∩ V as the kernel of [(I - P_U); (I - P_V)].
Matrix intersect(const Matrix& u, const Matrix& v, double tol = kInclusionTol);

/// || (I - P_U) Q_V ||_2: zero iff span(v) ⊆ span(u).
double inclusion_defect(const Matrix& u, const Matrix& v);

/// Sine of the largest principal angle. Returns 1 for dimension mismatch.
double subspace_gap(const Matrix& u, const Matrix& v);

/// Smallest A-invariant subspace containing range(B) (orthonormal),
/// grown one Krylov block at a time so that powers of A are never formed.
Matrix reachable_subspace(const Matrix& a, const Matrix& b);

/// Largest A-invariant subspace contained in ker(C).
Matrix unobservable_subspace(const Matrix& a, const Matrix& c);

/// Real Schur form A = Q T Q^T.
struct SchurForm {
  Matrix q;
  Matrix t;
  ComplexVector eigenvalues;
};

SchurForm real_schur(const Matrix& a);

/// Reorders a Schur form so that the eigenvalues flagged in `select`
/// (indexed like schur.eigenvalues) lead. Conjugate pairs are moved together.
/// Returns the number of leading eigenvalues.
int reorder_schur(SchurForm& schur, const std::vector<bool>& select);

/// Groups eigenvalues into clusters whose members lie within
/// kClusterRelRadius * max(1, scale) of each other and returns, for every
/// eigenvalue, the mean of its cluster.
ComplexVector cluster_means(const ComplexVector& eigenvalues, double scale);

/// Orthonormal basis of the A-invariant subspace spanned by the generalized
/// eigenvectors whose cluster-mean eigenvalue satisfies `keep`.
Matrix invariant_subspace(
    const Matrix& a,
    const std::function<bool(std::complex<double>)>& keep);

/// Oblique projector onto span(v1) along span(v2), for complementary v1, v2.
/// `condition` receives the 2-norm condition number of [v1 v2].
Matrix oblique_projector(const Matrix& v1, const Matrix& v2,
                         double* condition = nullptr);

ComplexVector eigenvalues(const Matrix& a);

}  // namespace linalg
}  // namespace turnpike
