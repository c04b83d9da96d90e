#include "turnpike/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <lapacke.h>

#include "turnpike/errors.hpp"

namespace turnpike::linalg {

namespace {

Eigen::JacobiSVD<Matrix> full_svd(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

int count_above(const Vector& sv, double rel_tol) {
  if (sv.size() == 0) return 0;
  const double cut = rel_tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut && sv(i) > 0.0) ++r;
  }
  return r;
}

}  // namespace

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double classification_tolerance(const Matrix& a) {
  return 1e-8 * std::max(1.0, spectral_norm(a));
}

Matrix null_space(const Matrix& m, double rel_tol) {
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0 || cols == 0) return Matrix::Identity(cols, cols);
  auto svd = full_svd(m);
  const int r = count_above(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(cols - r);
}

Matrix range_basis(const Matrix& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix(m.rows(), 0);
  auto svd = full_svd(m);
  const int r = count_above(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

int rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return count_above(svd.singularValues(), rel_tol);
}

Matrix projector(const Matrix& basis, Eigen::Index ambient) {
  if (basis.cols() == 0) return Matrix::Zero(ambient, ambient);
  return basis * basis.transpose();
}

Matrix complement(const Matrix& basis, Eigen::Index ambient) {
  if (basis.cols() == 0) return Matrix::Identity(ambient, ambient);
  return null_space(basis.transpose());
}

Matrix subspace_sum(const Matrix& u, const Matrix& v) {
  Matrix stacked(u.rows(), u.cols() + v.cols());
  stacked << u, v;
  return range_basis(stacked);
}

Matrix intersect(const Matrix& u, const Matrix& v, double tol) {
  const Eigen::Index n = u.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix stacked(2 * n, n);
  stacked << id - projector(u, n), id - projector(v, n);
  auto svd = full_svd(stacked);
  const Vector& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++r;
  }
  return svd.matrixV().rightCols(n - r);
}

double inclusion_defect(const Matrix& u, const Matrix& v) {
  if (v.cols() == 0) return 0.0;
  const Eigen::Index n = v.rows();
  return spectral_norm((Matrix::Identity(n, n) - projector(u, n)) * v);
}

double subspace_gap(const Matrix& u, const Matrix& v) {
  if (u.cols() != v.cols()) return 1.0;
  if (u.cols() == 0) return 0.0;
  return std::max(inclusion_defect(u, v), inclusion_defect(v, u));
}

Matrix reachable_subspace(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  Matrix q = range_basis(b);
  const double scale = std::max(1.0, spectral_norm(a));
  Matrix frontier = q;
  while (q.cols() < n && frontier.cols() > 0) {
    Matrix image = a * frontier;
    image -= q * (q.transpose() * image);
    if (image.size() == 0) break;
    auto svd = full_svd(image);
    const Vector& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > kRankRelTol * scale) ++r;
    }
    if (r == 0) break;
    frontier = svd.matrixU().leftCols(r);
    // One re-orthogonalization pass keeps Q orthonormal to working precision.
    frontier -= q * (q.transpose() * frontier);
    frontier = range_basis(frontier);
    Matrix grown(n, q.cols() + frontier.cols());
    grown << q, frontier;
    q = grown;
  }
  return q;
}

Matrix unobservable_subspace(const Matrix& a, const Matrix& c) {
  const Eigen::Index n = a.rows();
  Matrix observable = reachable_subspace(a.transpose(), c.transpose());
  return complement(observable, n);
}

SchurForm real_schur(const Matrix& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SchurForm out;
  out.t = a;
  out.q = Matrix::Identity(n, n);
  out.eigenvalues.resize(n);
  if (n == 0) return out;
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  const lapack_int info =
      LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, out.t.data(), n,
                    &sdim, wr.data(), wi.data(), out.q.data(), n);
  if (info != 0) {
    throw NumericalError("real Schur decomposition failed to converge (dgees info=" +
                         std::to_string(info) + ")");
  }
  for (lapack_int i = 0; i < n; ++i) out.eigenvalues(i) = {wr[i], wi[i]};
  return out;
}

int reorder_schur(SchurForm& schur, const std::vector<bool>& select) {
  const lapack_int n = static_cast<lapack_int>(schur.t.rows());
  if (n == 0) return 0;
  std::vector<lapack_logical> sel(n, 0);
  for (lapack_int i = 0; i < n; ++i) sel[i] = select[i] ? 1 : 0;
  // Conjugate pairs occupy consecutive slots; select both or neither.
  for (lapack_int i = 0; i + 1 < n; ++i) {
    if (schur.eigenvalues(i).imag() != 0.0 &&
        schur.eigenvalues(i + 1) == std::conj(schur.eigenvalues(i))) {
      const lapack_logical either = (sel[i] || sel[i + 1]) ? 1 : 0;
      sel[i] = sel[i + 1] = either;
      ++i;
    }
  }
  // Called through the Fortran interface: the LAPACKE wrapper passes a null
  // integer workspace for job = 'N', which the routine still writes to.
  std::vector<double> wr(n), wi(n), work(std::max<lapack_int>(1, n));
  std::vector<lapack_int> iwork(1);
  const lapack_int lwork = static_cast<lapack_int>(work.size());
  const lapack_int liwork = 1;
  lapack_int m = 0;
  lapack_int info = 0;
  double s = 0.0, sep = 0.0;
  const char job = 'N', compq = 'V';
  LAPACK_dtrsen(&job, &compq, sel.data(), &n, schur.t.data(), &n, schur.q.data(), &n,
                wr.data(), wi.data(), &m, &s, &sep, work.data(), &lwork, iwork.data(),
                &liwork, &info);
  if (info != 0) {
    throw NumericalError("Schur reordering failed (dtrsen info=" +
                         std::to_string(info) +
                         "); eigenvalues too close to separate");
  }
  for (lapack_int i = 0; i < n; ++i) schur.eigenvalues(i) = {wr[i], wi[i]};
  return static_cast<int>(m);
}

ComplexVector cluster_means(const ComplexVector& ev, double scale) {
  const Eigen::Index n = ev.size();
  const double radius = kClusterRelRadius * std::max(1.0, scale);
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<Eigen::Index(Eigen::Index)> find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(ev(i) - ev(j)) <= radius) parent[find(i)] = find(j);
    }
  }
  ComplexVector sum = ComplexVector::Zero(n);
  Eigen::VectorXi count = Eigen::VectorXi::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sum(find(i)) += ev(i);
    count(find(i)) += 1;
  }
  ComplexVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index root = find(i);
    out(i) = sum(root) / static_cast<double>(count(root));
  }
  return out;
}

Matrix invariant_subspace(const Matrix& a,
                          const std::function<bool(std::complex<double>)>& keep) {
  const Eigen::Index n = a.rows();
  if (n == 0) return Matrix(0, 0);
  SchurForm schur = real_schur(a);
  const ComplexVector means = cluster_means(schur.eigenvalues, spectral_norm(a));
  std::vector<bool> select(n);
  int wanted = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    select[i] = keep(means(i));
    if (select[i]) ++wanted;
  }
  if (wanted == 0) return Matrix(n, 0);
  if (wanted == n) return Matrix::Identity(n, n);
  const int m = reorder_schur(schur, select);
  return schur.q.leftCols(m);
}

Matrix oblique_projector(const Matrix& v1, const Matrix& v2, double* condition) {
  const Eigen::Index n = v1.rows();
  if (v1.cols() + v2.cols() != n) {
    throw PreconditionError("oblique_projector: subspaces are not complementary (" +
                            std::to_string(v1.cols()) + " + " +
                            std::to_string(v2.cols()) + " != " + std::to_string(n) +
                            ")");
  }
  Matrix m(n, n);
  m << v1, v2;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double cond = n == 0 ? 1.0 : sv(0) / sv(n - 1);
  if (condition != nullptr) *condition = cond;
  if (!std::isfinite(cond) || cond > 1e12) {
    throw NumericalError("oblique_projector: subspaces are not complementary (cond=" +
                         std::to_string(cond) + ")");
  }
  Matrix selector = Matrix::Zero(n, n);
  selector.topLeftCorner(v1.cols(), v1.cols()).setIdentity();
  return m * selector * m.inverse();
}

ComplexVector eigenvalues(const Matrix& a) {
  if (a.rows() == 0) return ComplexVector(0);
  return real_schur(a).eigenvalues;
}

}  // namespace turnpike::linalg
