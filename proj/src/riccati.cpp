#include "turnpike/riccati.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "turnpike/errors.hpp"
#include "turnpike/subspace_lab.hpp"

namespace turnpike {

namespace {

void check_dims(const Matrix& A, const Matrix& B, const Matrix& C, const char* op) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || C.cols() != n) {
    throw PreconditionError(std::string(op) + ": inconsistent dimensions");
  }
}

}  // namespace

Matrix build_hamiltonian(const Matrix& A, const Matrix& B, const Matrix& C) {
  check_dims(A, B, C, "build_hamiltonian");
  const Eigen::Index n = A.rows();
  Matrix ham(2 * n, 2 * n);
  ham << A, -B * B.transpose(), -C.transpose() * C, -A.transpose();
  return ham;
}

double are_residual(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& E) {
  return linalg::spectral_norm(E * A + A.transpose() * E -
                               E * B * B.transpose() * E + C.transpose() * C);
}

RiccatiResult solve_are_antistrong(const Matrix& A, const Matrix& B, const Matrix& C) {
  check_dims(A, B, C, "solve_are_antistrong");
  const Eigen::Index n = A.rows();
  if (!is_stabilizable(A, B)) {
    throw PreconditionError("solve_are_antistrong: (A, B) is not stabilizable");
  }

  RiccatiResult out;
  out.Ham = build_hamiltonian(A, B, C);
  out.Lambda = Matrix::Identity(2 * n, 2 * n);
  if (n == 0) {
    out.E_hat = out.A_plus = Matrix(0, 0);
    return out;
  }

  // The graph of the antistrong solution is L^-(Ham) ⊕ (NO^0(C, A) x {0}):
  // NO^0(C, A) x {0} is Ham-invariant, and NO^0(C, A) ⊆ ker(E).
  const Matrix critical = critical_unobservable_space(A, C).basis;
  const Eigen::Index k = critical.cols();
  const Eigen::Index n_stable = n - k;
  out.critical_dim = static_cast<int>(k);

  linalg::SchurForm schur = linalg::real_schur(out.Ham);
  out.ham_spectrum = schur.eigenvalues;
  const double tau = linalg::classification_tolerance(out.Ham);
  const ComplexVector means =
      linalg::cluster_means(schur.eigenvalues, linalg::spectral_norm(out.Ham));

  std::vector<Eigen::Index> order(2 * n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (means(a).real() != means(b).real()) return means(a).real() < means(b).real();
    return std::abs(means(a).imag()) < std::abs(means(b).imag());
  });
  std::vector<bool> select(2 * n, false);
  for (Eigen::Index i = 0; i < n_stable; ++i) select[order[i]] = true;
  if (n_stable > 0 && !(means(order[n_stable - 1]).real() < -tau)) {
    throw NumericalError(
        "solve_are_antistrong: Hamiltonian has fewer than n - dim NO^0(C,A) = " +
        std::to_string(n_stable) + " stable eigenvalues");
  }
  if (n_stable < 2 * n && means(order[n_stable]).real() < -tau) {
    throw NumericalError(
        "solve_are_antistrong: more stable Hamiltonian eigenvalues than expected");
  }

  Matrix basis(2 * n, n);
  if (n_stable > 0) {
    const int m = linalg::reorder_schur(schur, select);
    if (m != n_stable) {
      throw NumericalError("solve_are_antistrong: stable cluster split a conjugate pair");
    }
    basis.leftCols(n_stable) = schur.q.leftCols(n_stable);
  }
  basis.rightCols(k).setZero();
  basis.block(0, n_stable, n, k) = critical;

  const Matrix x1 = basis.topRows(n);
  const Matrix x2 = basis.bottomRows(n);
  Eigen::JacobiSVD<Matrix> svd(x1);
  const auto& sv = svd.singularValues();
  out.graph_condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : INFINITY;
  if (!(out.graph_condition < 1e12)) {
    throw NumericalError(
        "solve_are_antistrong: invariant subspace is not a graph over the state "
        "coordinates (cond(X1) = " +
        std::to_string(out.graph_condition) + ")");
  }
  Matrix e = x1.transpose().partialPivLu().solve(x2.transpose()).transpose();
  out.E_hat = 0.5 * (e + e.transpose());
  out.A_plus = A - B * B.transpose() * out.E_hat;
  out.residual = are_residual(A, B, C, out.E_hat);
  out.Lambda.bottomLeftCorner(n, n) = -out.E_hat;
  return out;
}

TriangularForm lambda_triangularize(const RiccatiResult& result) {
  const Eigen::Index n = result.E_hat.rows();
  Matrix inverse = Matrix::Identity(2 * n, 2 * n);
  inverse.bottomLeftCorner(n, n) = result.E_hat;
  TriangularForm out;
  out.transformed = result.Lambda * result.Ham * inverse;
  out.defect = linalg::spectral_norm(out.transformed.bottomLeftCorner(n, n));
  return out;
}

HautusEquivalence check_weak_hautus_equivalence(const Matrix& A, const Matrix& B,
                                                const Matrix& C) {
  check_dims(A, B, C, "check_weak_hautus_equivalence");
  if (!is_stabilizable(A, B)) {
    throw PreconditionError("check_weak_hautus_equivalence: (A, B) is not stabilizable");
  }
  const Matrix ham = build_hamiltonian(A, B, C);
  HautusEquivalence out;
  out.critical_ham_dim =
      static_cast<int>(spectral_subspace(ham, SpectralClass::zero).dim());
  out.l0_trivial = out.critical_ham_dim == 0;
  out.hautus = weak_hautus(A, C).holds;
  out.agree = out.l0_trivial == out.hautus;
  return out;
}

VelocityProjections velocity_projections(const Matrix& A, const Matrix& B,
                                         const Matrix& C, const RiccatiResult& result) {
  check_dims(A, B, C, "velocity_projections");
  VelocityProjections out;
  out.critical_basis = critical_unobservable_space(A, C).basis;
  const double kernel_defect = (A * out.critical_basis).norm();
  if (kernel_defect > 1e-8 * std::max(1.0, linalg::spectral_norm(A))) {
    throw PreconditionError(
        "velocity_projections: NO^0(C,A) is not contained in ker(A) (|A V| = " +
        std::to_string(kernel_defect) + ")");
  }
  out.stable_basis = spectral_subspace(result.A_plus, SpectralClass::negative).basis;
  out.P1 = linalg::oblique_projector(out.critical_basis, out.stable_basis, &out.condition);
  out.P2 = Matrix::Identity(A.rows(), A.rows()) - out.P1;

  const Matrix adjoint = result.A_plus.transpose();
  out.adjoint_kernel = spectral_subspace(adjoint, SpectralClass::zero).basis;
  out.adjoint_stable = spectral_subspace(adjoint, SpectralClass::negative).basis;
  out.Q1 = linalg::oblique_projector(out.adjoint_kernel, out.adjoint_stable);
  return out;
}

}  // namespace turnpike
