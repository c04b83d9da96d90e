#include "turnpike/steady_solver.hpp"

#include "turnpike/errors.hpp"
#include "turnpike/riccati.hpp"

namespace turnpike {

namespace {

void check_dims(const Matrix& A, const Matrix& B, const Matrix& C, const char* op) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || C.cols() != n) {
    throw PreconditionError(std::string(op) + ": inconsistent dimensions");
  }
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Vector min_norm_lstsq(const Matrix& m, const Vector& rhs) {
  if (m.cols() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(linalg::kRankRelTol);
  return svd.solve(rhs);
}

}  // namespace

double steady_cost(const Matrix& C, const Vector& z, const Vector& u, const Vector& x) {
  return 0.5 * (u.squaredNorm() + (C * x - z).squaredNorm());
}

SteadySolution solve_steady(const Matrix& A, const Matrix& B, const Matrix& C,
                            const Vector& z) {
  check_dims(A, B, C, "solve_steady");
  if (z.size() != C.rows()) throw PreconditionError("solve_steady: z has wrong size");
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();

  // Feasible set M = ker [B A] acting on (u; x), parametrized by w.
  const Matrix feasible = linalg::null_space(hstack(B, A));
  const Matrix nu = feasible.topRows(m);
  const Matrix nx = feasible.bottomRows(n);

  // J_s = 1/2 | G w - h |^2 with G = [N_u; C N_x], h = [0; z].
  const Matrix g = vstack(nu, C * nx);
  Vector h = Vector::Zero(m + C.rows());
  h.tail(C.rows()) = z;
  Vector w = min_norm_lstsq(g, h);

  // Minimizers form w + ker G; select the one with the smallest |x|.
  const Matrix kg = linalg::null_space(g);
  if (kg.cols() > 0) {
    const Vector shift = min_norm_lstsq(nx * kg, -(nx * w));
    w += kg * shift;
  }

  SteadySolution out;
  out.u_bar = nu * w;
  out.x_bar = nx * w;
  out.j_value = steady_cost(C, z, out.u_bar, out.x_bar);
  out.kernel_dir = linalg::null_space(vstack(A, C));
  if (out.kernel_dir.rows() != n) out.kernel_dir = Matrix(n, 0);

  const SteadySystemSolution os = steady_system_solvable(A, B, C, z);
  if (os.solvable) out.p_bar = os.p_bar;
  return out;
}

HamiltonianKernelRange hamiltonian_kernel_range(const Matrix& A, const Matrix& B,
                                                const Matrix& C) {
  check_dims(A, B, C, "hamiltonian_kernel_range");
  const Eigen::Index n = A.rows();
  HamiltonianKernelRange out;
  out.kernel = block_diag(linalg::null_space(vstack(A, C)),
                          linalg::null_space(vstack(A.transpose(), B.transpose())));
  out.range = block_diag(linalg::range_basis(hstack(A, B)),
                         linalg::range_basis(hstack(A.transpose(), C.transpose())));
  if (n == 0) return out;

  const Matrix ham = build_hamiltonian(A, B, C);
  Eigen::JacobiSVD<Matrix> svd(ham, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const int r = linalg::rank(ham);
  out.kernel_gap = linalg::subspace_gap(out.kernel, svd.matrixV().rightCols(2 * n - r));
  out.range_gap = linalg::subspace_gap(out.range, svd.matrixU().leftCols(r));
  return out;
}

SteadySystemSolution steady_system_solvable(const Matrix& A, const Matrix& B,
                                            const Matrix& C, const Vector& z) {
  check_dims(A, B, C, "steady_system_solvable");
  const Eigen::Index n = A.rows();
  const Matrix ham = build_hamiltonian(A, B, C);
  Vector rhs = Vector::Zero(2 * n);
  rhs.tail(n) = -(C.transpose() * z);

  SteadySystemSolution out;
  const Vector y = min_norm_lstsq(ham, rhs);
  out.x_bar = y.head(n);
  out.p_bar = y.tail(n);
  out.residual = n == 0 ? 0.0 : (ham * y - rhs).norm();
  out.solvable = out.residual <= 1e-8 * (1.0 + z.norm());
  out.unique = linalg::rank(ham) == 2 * n;
  return out;
}

}  // namespace turnpike
