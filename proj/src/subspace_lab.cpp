#include "turnpike/subspace_lab.hpp"

#include <algorithm>
#include <cmath>

#include "turnpike/errors.hpp"

namespace turnpike {

namespace {

void check_pair(const Matrix& A, const Matrix& other, bool rows, const char* op) {
  if (A.rows() != A.cols()) throw PreconditionError(std::string(op) + ": A must be square");
  const bool ok = rows ? other.rows() == A.rows() : other.cols() == A.rows();
  if (!ok) throw PreconditionError(std::string(op) + ": incompatible dimensions");
}

bool in_class(std::complex<double> ev, SpectralClass cls, double tau) {
  switch (cls) {
    case SpectralClass::negative:
      return ev.real() < -tau;
    case SpectralClass::zero:
      return std::abs(ev.real()) <= tau;
    case SpectralClass::positive:
      return ev.real() > tau;
    case SpectralClass::nonnegative:
      return ev.real() >= -tau;
  }
  return false;
}

// Spectral subspace of `m` with a tolerance inherited from a parent matrix.
Matrix classified(const Matrix& m, SpectralClass cls, double tau) {
  return linalg::invariant_subspace(
      m, [&](std::complex<double> ev) { return in_class(ev, cls, tau); });
}

// Subspace of span(q) (q A-invariant, orthonormal) in spectral class `cls`.
SubspaceBasis restrict_to_class(const Matrix& A, const Matrix& q, SpectralClass cls) {
  if (q.cols() == 0) return {Matrix(A.rows(), 0)};
  const Matrix restricted = q.transpose() * A * q;
  const Matrix local = classified(restricted, cls, linalg::classification_tolerance(A));
  return {q * local};
}

}  // namespace

SubspaceBasis spectral_subspace(const Matrix& A, SpectralClass cls) {
  if (A.rows() != A.cols()) throw PreconditionError("spectral_subspace: A must be square");
  if (!A.allFinite()) throw PreconditionError("spectral_subspace: non-finite entries");
  return {classified(A, cls, linalg::classification_tolerance(A))};
}

SubspaceBasis unobservable_space(const Matrix& A, const Matrix& C) {
  check_pair(A, C, false, "unobservable_space");
  return {linalg::unobservable_subspace(A, C)};
}

SubspaceBasis undetectable_space(const Matrix& A, const Matrix& C) {
  check_pair(A, C, false, "undetectable_space");
  // NO(C, A) is A-invariant, so its intersection with L^{0,+}(A) is the
  // nonnegative spectral subspace of the restriction of A to it.
  return restrict_to_class(A, linalg::unobservable_subspace(A, C),
                           SpectralClass::nonnegative);
}

SubspaceBasis critical_unobservable_space(const Matrix& A, const Matrix& C) {
  check_pair(A, C, false, "critical_unobservable_space");
  return restrict_to_class(A, linalg::unobservable_subspace(A, C), SpectralClass::zero);
}

SubspaceReport detectable_projections(const Matrix& A, const Matrix& C) {
  check_pair(A, C, false, "detectable_projections");
  const Eigen::Index n = A.rows();
  SubspaceReport r;
  r.stable = spectral_subspace(A, SpectralClass::negative);
  r.critical = spectral_subspace(A, SpectralClass::zero);
  r.antistable = spectral_subspace(A, SpectralClass::positive);
  r.unobservable = {linalg::unobservable_subspace(A, C)};
  r.undetectable =
      restrict_to_class(A, r.unobservable.basis, SpectralClass::nonnegative);
  r.critical_unobservable =
      restrict_to_class(A, r.unobservable.basis, SpectralClass::zero);
  r.detectable = {linalg::complement(r.undetectable.basis, n)};
  r.R = r.undetectable.projector();
  r.D = r.detectable.projector();
  return r;
}

SubspaceBasis stabilizable_subspace(const Matrix& A, const Matrix& B) {
  check_pair(A, B, true, "stabilizable_subspace");
  const Matrix reach = linalg::reachable_subspace(A, B);
  const Matrix stable = spectral_subspace(A, SpectralClass::negative).basis;
  return {linalg::subspace_sum(reach, stable)};
}

CStabilizability is_C_stabilizable(const Matrix& A, const Matrix& B, const Matrix& C) {
  check_pair(A, B, true, "is_C_stabilizable");
  check_pair(A, C, false, "is_C_stabilizable");
  const Eigen::Index n = A.rows();
  const Matrix s = stabilizable_subspace(A, B).basis;
  const Matrix w = linalg::complement(undetectable_space(A, C).basis, n);
  CStabilizability out;
  out.defect = linalg::inclusion_defect(s, w);
  out.holds = out.defect <= linalg::kInclusionTol;
  return out;
}

HautusResult weak_hautus(const Matrix& A, const Matrix& C) {
  check_pair(A, C, false, "weak_hautus");
  const Eigen::Index n = A.rows();
  const Eigen::Index p = C.rows();
  HautusResult out;
  if (n == 0) return out;
  const double tau = linalg::classification_tolerance(A);
  const ComplexVector means =
      linalg::cluster_means(linalg::eigenvalues(A), linalg::spectral_norm(A));
  std::vector<std::complex<double>> tested;
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    if (std::abs(means(i).real()) > tau) continue;
    const std::complex<double> ib(0.0, means(i).imag());
    const bool seen = std::any_of(tested.begin(), tested.end(), [&](auto v) {
      return std::abs(v - ib) <= linalg::kClusterRelRadius * std::max(1.0, std::abs(ib));
    });
    if (seen) continue;
    tested.push_back(ib);
    Eigen::MatrixXcd stacked(n + p, n);
    stacked.topRows(n) = A.cast<std::complex<double>>();
    stacked.topRows(n).diagonal().array() -= ib;
    stacked.bottomRows(p) = C.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (sv.size() < n || smin <= linalg::kRankRelTol * std::max(1.0, sv(0))) {
      out.holds = false;
      out.failing_eigenvalues.push_back(ib);
    }
  }
  return out;
}

bool is_controllable(const Matrix& A, const Matrix& B) {
  check_pair(A, B, true, "is_controllable");
  return linalg::reachable_subspace(A, B).cols() == A.rows();
}

bool is_stabilizable(const Matrix& A, const Matrix& B) {
  return stabilizable_subspace(A, B).dim() == A.rows();
}

ReducedSystem kalman_reduce(const Matrix& A, const Matrix& B, const Matrix& C) {
  check_pair(A, B, true, "kalman_reduce");
  check_pair(A, C, false, "kalman_reduce");
  const Matrix q = linalg::complement(undetectable_space(A, C).basis, A.rows());
  ReducedSystem r;
  r.basis = q;
  r.Ar = q.transpose() * A * q;
  r.Br = q.transpose() * B;
  r.Cr = C * q;
  return r;
}

}  // namespace turnpike
