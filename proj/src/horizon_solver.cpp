#include "turnpike/horizon_solver.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "turnpike/errors.hpp"
#include "turnpike/subspace_lab.hpp"

namespace turnpike {

namespace {

using Lu = Eigen::PartialPivLU<Matrix>;

Vector uniform_grid(const GridSpec& grid) {
  return Vector::LinSpaced(grid.steps + 1, 0.0, grid.horizon);
}

[[noreturn]] void blow_up(const SystemSpec& sys, double t, double norm) {
  std::ostringstream os;
  os << "state norm " << norm << " exceeded the overflow guard at t = " << t;
  const ComplexVector ev = linalg::eigenvalues(sys.A);
  const double tau = linalg::classification_tolerance(sys.A);
  bool first = true;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i).real() < -tau) continue;
    os << (first ? "; non-decaying modes of A: " : ", ") << ev(i).real();
    if (ev(i).imag() != 0.0) os << (ev(i).imag() > 0 ? "+" : "") << ev(i).imag() << "i";
    first = false;
  }
  throw BlowUpError(os.str(), t, norm);
}

void guard(const SystemSpec& sys, double t, const Vector& x) {
  const double norm = x.norm();
  if (!(norm <= kOverflowGuard)) blow_up(sys, t, norm);
}

/// max_k | (I - h/2 H) y_{k+1} - (I + h/2 H) y_k - h g | / h
double implicit_midpoint_defect(const Trajectory& traj, const Matrix& ham,
                                const Vector& g) {
  const Eigen::Index n = traj.x.cols();
  const double h = traj.step();
  double worst = 0.0;
  Vector y0(2 * n), y1(2 * n);
  for (Eigen::Index k = 0; k + 1 < traj.nodes(); ++k) {
    y0 << traj.x.row(k).transpose(), traj.p.row(k).transpose();
    y1 << traj.x.row(k + 1).transpose(), traj.p.row(k + 1).transpose();
    const Vector d = (y1 - y0) / h - ham * (0.5 * (y0 + y1)) - g;
    worst = std::max(worst, d.norm());
  }
  return worst;
}

Vector forcing(const SystemSpec& sys) {
  const Eigen::Index n = sys.n();
  Vector g = Vector::Zero(2 * n);
  g.tail(n) = sys.C.transpose() * sys.z;
  return g;
}

}  // namespace

Trajectory solve_free_endpoint(const SystemSpec& sys, const GridSpec& grid) {
  sys.validate();
  grid.validate();
  if (sys.x1) throw PreconditionError("solve_free_endpoint: x1 must be absent");
  const Eigen::Index n = sys.n();
  const int steps = grid.steps;
  const double h = grid.step();

  const Matrix ham = build_hamiltonian(sys.A, sys.B, sys.C);
  const Vector g = forcing(sys);
  const Matrix id = Matrix::Identity(2 * n, 2 * n);
  const Matrix minus = id - 0.5 * h * ham;
  const Matrix plus = id + 0.5 * h * ham;

  // Backward sweep. With y_{k+1} = [x_{k+1}; P_{k+1} x_{k+1} + r_{k+1}], the
  // implicit-midpoint step is linear in the unknowns (x_{k+1}, p_k).
  std::vector<Matrix> gain(steps + 1), transfer(steps);
  std::vector<Vector> offset(steps + 1), drift(steps);
  gain[steps] = Matrix::Zero(n, n);
  offset[steps] = Vector::Zero(n);
  Matrix k_mat(2 * n, 2 * n);
  Matrix rhs(2 * n, n + 1);
  Matrix stacked(2 * n, n);
  for (int k = steps - 1; k >= 0; --k) {
    stacked << Matrix::Identity(n, n), gain[k + 1];
    k_mat << minus * stacked, -plus.rightCols(n);
    Vector shift = Vector::Zero(2 * n);
    shift.tail(n) = offset[k + 1];
    rhs << plus.leftCols(n), h * g - minus * shift;
    const Matrix sol = Lu(k_mat).solve(rhs);
    if (!sol.allFinite()) blow_up(sys, k * h, INFINITY);
    transfer[k] = sol.topLeftCorner(n, n);
    drift[k] = sol.topRightCorner(n, 1);
    gain[k] = sol.bottomLeftCorner(n, n);
    offset[k] = sol.bottomRightCorner(n, 1);
  }

  Trajectory traj;
  traj.t = uniform_grid(grid);
  traj.x.resize(steps + 1, n);
  traj.p.resize(steps + 1, n);
  Vector x = sys.x0;
  for (int k = 0; k <= steps; ++k) {
    guard(sys, traj.t(k), x);
    traj.x.row(k) = x.transpose();
    traj.p.row(k) = (gain[k] * x + offset[k]).transpose();
    if (k < steps) x = transfer[k] * x + drift[k];
  }
  traj.p.row(steps).setZero();
  traj.u = -traj.p * sys.B;
  traj.residual = implicit_midpoint_defect(traj, ham, g);
  traj.solver_tag = "free-endpoint/discrete-riccati-sweep";
  return traj;
}

Trajectory solve_fixed_endpoint(const SystemSpec& sys, const GridSpec& grid) {
  sys.validate();
  if (!is_controllable(sys.A, sys.B)) {
    throw PreconditionError("solve_fixed_endpoint: (A, B) is not controllable");
  }
  return solve_fixed_endpoint(sys, grid, solve_are_antistrong(sys.A, sys.B, sys.C));
}

Trajectory solve_fixed_endpoint(const SystemSpec& sys, const GridSpec& grid,
                                const RiccatiResult& riccati) {
  sys.validate();
  grid.validate();
  if (!sys.x1) throw PreconditionError("solve_fixed_endpoint: x1 is required");
  if (!is_controllable(sys.A, sys.B)) {
    throw PreconditionError("solve_fixed_endpoint: (A, B) is not controllable");
  }
  const Eigen::Index n = sys.n();
  const int steps = grid.steps;
  const double h = grid.step();
  const Matrix& ap = riccati.A_plus;
  const Matrix bbt = sys.B * sys.B.transpose();
  const Matrix id = Matrix::Identity(n, n);
  const Lu q_back(id - 0.5 * h * ap.transpose());
  const Matrix q_plus = id + 0.5 * h * ap.transpose();
  const Lu x_fwd(id - 0.5 * h * ap);
  const Matrix x_plus = id + 0.5 * h * ap;
  const Vector ctz = sys.C.transpose() * sys.z;

  // q' = -A_plus^T q + C^T z, integrated backward from q(T).
  auto sweep_q = [&](const Vector& q_end, bool forced, Matrix& q) {
    q.resize(steps + 1, n);
    q.row(steps) = q_end.transpose();
    for (int k = steps - 1; k >= 0; --k) {
      Vector r = q_plus * q.row(k + 1).transpose();
      if (forced) r -= h * ctz;
      q.row(k) = q_back.solve(r).transpose();
    }
  };
  // x' = A_plus x - B B^T q, integrated forward from x(0).
  auto sweep_x = [&](const Vector& x_start, const Matrix& q, Matrix& x) {
    x.resize(steps + 1, n);
    x.row(0) = x_start.transpose();
    for (int k = 0; k < steps; ++k) {
      const Vector r = x_plus * x.row(k).transpose() -
                       0.5 * h * bbt * (q.row(k) + q.row(k + 1)).transpose();
      x.row(k + 1) = x_fwd.solve(r).transpose();
    }
  };

  Matrix q, x;
  sweep_q(Vector::Zero(n), true, q);
  sweep_x(sys.x0, q, x);
  const Vector free_end = x.row(steps).transpose();

  Matrix shooting(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sweep_q(Vector::Unit(n, j), false, q);
    sweep_x(Vector::Zero(n), q, x);
    shooting.col(j) = x.row(steps).transpose();
  }
  Eigen::JacobiSVD<Matrix> svd(shooting, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = n == 0 ? 1.0 : sv(0) / sv(n - 1);
  if (!(cond < 1e13)) {
    throw NumericalError("solve_fixed_endpoint: shooting matrix is singular (cond = " +
                         std::to_string(cond) + ")");
  }
  Vector q_end = svd.solve(*sys.x1 - free_end);
  sweep_q(q_end, true, q);
  sweep_x(sys.x0, q, x);
  // One step of iterative refinement on the endpoint mismatch.
  q_end += svd.solve(*sys.x1 - x.row(steps).transpose());
  sweep_q(q_end, true, q);
  sweep_x(sys.x0, q, x);

  Trajectory traj;
  traj.t = uniform_grid(grid);
  for (int k = 0; k <= steps; ++k) guard(sys, traj.t(k), x.row(k).transpose());
  traj.x = x;
  traj.p = q + x * riccati.E_hat;  // E symmetric: rows of x E = (E x)^T
  traj.q = q;
  traj.u = -traj.p * sys.B;
  traj.boundary_error = (x.row(steps).transpose() - *sys.x1).norm();
  traj.residual = std::max(
      implicit_midpoint_defect(traj, build_hamiltonian(sys.A, sys.B, sys.C), forcing(sys)),
      traj.boundary_error);
  traj.solver_tag = "fixed-endpoint/lambda-decoupled-shooting";
  return traj;
}

namespace {

/// Discretize-then-optimize model used by the CG oracle: one control per
/// step, implicit-midpoint state update and midpoint-rule running cost,
///   x_{k+1} = x_k + h A (x_k + x_{k+1}) / 2 + h B v_k,
///   J = h sum_k 1/2 |v_k|^2 + 1/2 |C (x_k + x_{k+1}) / 2 - z|^2.
/// Its optimality conditions are the implicit-midpoint optimality system
/// with v_k = -B^T p_{k+1/2}, so the oracle and the sweep approximate the
/// same discrete minimizer through unrelated algorithms.
class DiscreteProblem {
 public:
  DiscreteProblem(const SystemSpec& sys, const GridSpec& grid)
      : sys_(sys), steps_(grid.steps), h_(grid.step()) {
    const Eigen::Index n = sys.n();
    const Matrix id = Matrix::Identity(n, n);
    minus_ = Lu(id - 0.5 * h_ * sys.A);
    minus_t_ = Lu((id - 0.5 * h_ * sys.A).transpose());
    plus_ = id + 0.5 * h_ * sys.A;
  }

  Matrix simulate(const Matrix& v, bool homogeneous) const {
    Matrix x(steps_ + 1, sys_.n());
    if (homogeneous) {
      x.row(0).setZero();
    } else {
      x.row(0) = sys_.x0.transpose();
    }
    for (int k = 0; k < steps_; ++k) {
      const Vector r = plus_ * x.row(k).transpose() + h_ * sys_.B * v.row(k).transpose();
      x.row(k + 1) = minus_.solve(r).transpose();
    }
    return x;
  }

  double cost(const Matrix& v, const Matrix& x, double rho) const {
    double j = 0.0;
    for (int k = 0; k < steps_; ++k) {
      const Vector e = 0.5 * sys_.C * (x.row(k) + x.row(k + 1)).transpose() - sys_.z;
      j += 0.5 * h_ * (v.row(k).squaredNorm() + e.squaredNorm());
    }
    if (rho > 0.0) j += rho * (x.row(steps_).transpose() - *sys_.x1).squaredNorm();
    return j;
  }

  /// Gradient with respect to the step controls. Row k of `mu` (k >= 1) is
  /// the multiplier of step k-1, which equals p at t_{k-1/2}.
  Matrix gradient(const Matrix& v, bool homogeneous, double rho, Matrix* mu_out) const {
    const Eigen::Index n = sys_.n();
    const Matrix x = simulate(v, homogeneous);
    const Vector z = homogeneous ? Vector::Zero(sys_.z.size()) : sys_.z;
    // Direct derivative of J with respect to x_k.
    auto direct = [&](int k) -> Vector {
      Vector a = Vector::Zero(n);
      if (k >= 1) {
        a += 0.5 * h_ * sys_.C.transpose() *
             (0.5 * sys_.C * (x.row(k - 1) + x.row(k)).transpose() - z);
      }
      if (k < steps_) {
        a += 0.5 * h_ * sys_.C.transpose() *
             (0.5 * sys_.C * (x.row(k) + x.row(k + 1)).transpose() - z);
      }
      if (k == steps_ && rho > 0.0) {
        const Vector target = homogeneous ? Vector::Zero(n) : *sys_.x1;
        a += 2.0 * rho * (x.row(steps_).transpose() - target);
      }
      return a;
    };
    Matrix mu = Matrix::Zero(steps_ + 1, n);
    mu.row(steps_) = minus_t_.solve(direct(steps_)).transpose();
    for (int k = steps_ - 1; k >= 1; --k) {
      const Vector r = direct(k) + plus_.transpose() * mu.row(k + 1).transpose();
      mu.row(k) = minus_t_.solve(r).transpose();
    }
    Matrix grad(steps_, sys_.m());
    for (int k = 0; k < steps_; ++k) {
      grad.row(k) = h_ * (v.row(k) + mu.row(k + 1) * sys_.B);
    }
    if (mu_out != nullptr) *mu_out = mu;
    return grad;
  }

  /// Node values of p from the step multipliers through the half steps of
  /// the adjoint equation, p_k = p_{k+1/2} + h/2 F_k and
  /// p_{k+1} = p_{k+1/2} - h/2 F_k with F_k = A^T p + C^T (C x - z) at t_{k+1/2}.
  Matrix adjoint_nodes(const Matrix& x, const Matrix& mu) const {
    Matrix p(steps_ + 1, sys_.n());
    for (int k = 0; k < steps_; ++k) {
      const Vector pm = mu.row(k + 1).transpose();
      const Vector xm = 0.5 * (x.row(k) + x.row(k + 1)).transpose();
      const Vector f = sys_.A.transpose() * pm + sys_.C.transpose() * (sys_.C * xm - sys_.z);
      p.row(k) = (pm + 0.5 * h_ * f).transpose();
      if (k + 1 == steps_) p.row(k + 1) = (pm - 0.5 * h_ * f).transpose();
    }
    return p;
  }

 private:
  const SystemSpec& sys_;
  int steps_;
  double h_;
  Lu minus_, minus_t_;
  Matrix plus_;
};

double dot(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

}  // namespace

CgResult solve_cg_oracle(const SystemSpec& sys, const GridSpec& grid,
                         const CgOptions& options) {
  sys.validate();
  grid.validate();
  if (grid.steps < 2) throw PreconditionError("solve_cg_oracle: at least 2 steps required");
  const DiscreteProblem problem(sys, grid);
  const int steps = grid.steps;
  const Eigen::Index m = sys.m();
  std::vector<double> rhos{0.0};
  if (sys.x1) rhos = options.penalties;

  CgResult out;
  Matrix v = Matrix::Zero(steps, m);
  for (const double rho : rhos) {
    // The cost is quadratic: grad(v) = H v - b with H v = grad_0(v), the
    // gradient of the homogeneous problem.
    const Matrix b = -problem.gradient(Matrix::Zero(steps, m), false, rho, nullptr);
    const double b_norm = std::sqrt(dot(b, b));
    Matrix r = -problem.gradient(v, false, rho, nullptr);
    double rr = dot(r, r);
    if (b_norm == 0.0 || std::sqrt(rr) <= options.tolerance * b_norm) continue;
    Matrix d = r;
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      const Matrix hd = problem.gradient(d, true, rho, nullptr);
      const double curvature = dot(d, hd);
      if (!(curvature > 0.0)) break;
      const double alpha = rr / curvature;
      v += alpha * d;
      r -= alpha * hd;
      const double rr_new = dot(r, r);
      out.cost_history.push_back(problem.cost(v, problem.simulate(v, false), rho));
      ++out.iterations;
      if (std::sqrt(rr_new) <= options.tolerance * b_norm) {
        converged = true;
        break;
      }
      d = r + (rr_new / rr) * d;
      rr = rr_new;
    }
    if (!converged) {
      const Matrix g = problem.gradient(v, false, rho, nullptr);
      throw NumericalError("solve_cg_oracle: no convergence after " +
                           std::to_string(out.iterations) + " iterations (gradient norm " +
                           std::to_string(std::sqrt(dot(g, g))) + ")");
    }
  }

  Matrix mu;
  const Matrix grad = problem.gradient(v, false, rhos.back(), &mu);
  out.gradient_norm = std::sqrt(dot(grad, grad));

  Trajectory& traj = out.trajectory;
  traj.t = uniform_grid(grid);
  traj.x = problem.simulate(v, false);
  traj.p = problem.adjoint_nodes(traj.x, mu);
  traj.u = -traj.p * sys.B;
  if (sys.x1) traj.boundary_error = (traj.x.row(steps).transpose() - *sys.x1).norm();
  traj.residual = out.gradient_norm;
  traj.solver_tag = "cg-oracle/midpoint-discretize-then-optimize";
  return out;
}

double trajectory_cost(const Trajectory& traj, const Matrix& C, const Vector& z) {
  const Eigen::Index nodes = traj.nodes();
  if (nodes < 2) return 0.0;
  double j = 0.0;
  for (Eigen::Index k = 0; k < nodes; ++k) {
    const double w = (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
    const Vector e = C * traj.x.row(k).transpose() - z;
    j += w * (traj.u.row(k).squaredNorm() + e.squaredNorm());
  }
  return 0.5 * traj.step() * j;
}

double midpoint_rule_defect(const Trajectory& traj, const SystemSpec& sys) {
  const double h = traj.step();
  const Matrix bbt = sys.B * sys.B.transpose();
  const Matrix ctc = sys.C.transpose() * sys.C;
  const Vector ctz = sys.C.transpose() * sys.z;
  double worst = 0.0;
  for (Eigen::Index k = 1; k + 1 < traj.nodes(); ++k) {
    const Vector x = traj.x.row(k).transpose();
    const Vector p = traj.p.row(k).transpose();
    const Vector dx = (traj.x.row(k + 1) - traj.x.row(k - 1)).transpose() / (2.0 * h) -
                      (sys.A * x - bbt * p);
    const Vector dp = (traj.p.row(k + 1) - traj.p.row(k - 1)).transpose() / (2.0 * h) +
                      sys.A.transpose() * p + ctc * x - ctz;
    worst = std::max(worst, dx.norm() + dp.norm());
  }
  return worst;
}

Vector SteeringControl::at(const Matrix& A, const Matrix& B, double s) const {
  const Matrix e = (A.transpose() * (1.0 - s)).exp();
  return B.transpose() * e * weights;
}

SteeringControl steering_control(const Matrix& A, const Matrix& B, const Vector& xa,
                                 const Vector& xb, int intervals) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || xa.size() != n || xb.size() != n) {
    throw PreconditionError("steering_control: inconsistent dimensions");
  }
  if (!is_controllable(A, B)) {
    throw PreconditionError("steering_control: (A, B) is not controllable");
  }
  if (intervals < 2) intervals = 2;
  if (intervals % 2 == 1) ++intervals;  // Simpson needs an even count

  SteeringControl out;
  out.s = Vector::LinSpaced(intervals + 1, 0.0, 1.0);
  const double h = 1.0 / intervals;
  std::vector<Matrix> kernel(intervals + 1);  // e^{A (1 - s)} B
  for (int k = 0; k <= intervals; ++k) kernel[k] = (A * (1.0 - out.s(k))).exp() * B;
  auto simpson_weight = [&](int k) {
    if (k == 0 || k == intervals) return h / 3.0;
    return (k % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
  };
  out.gramian = Matrix::Zero(n, n);
  for (int k = 0; k <= intervals; ++k) {
    out.gramian += simpson_weight(k) * kernel[k] * kernel[k].transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.gramian);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(n - 1);
  out.condition = lmin > 0.0 ? lmax / lmin : INFINITY;
  if (!(out.condition < 1e12)) {
    throw NumericalError("steering_control: controllability Gramian is ill conditioned (" +
                         std::to_string(out.condition) + ")");
  }
  const Matrix ea = A.exp();
  out.weights = eig.operatorInverseSqrt() * (eig.operatorInverseSqrt() * (xb - ea * xa));
  out.u.resize(intervals + 1, B.cols());
  Vector reached = ea * xa;
  double energy = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const Vector uk = kernel[k].transpose() * out.weights;
    out.u.row(k) = uk.transpose();
    reached += simpson_weight(k) * kernel[k] * uk;
    energy += simpson_weight(k) * uk.squaredNorm();
  }
  out.endpoint_error = (reached - xb).norm();
  out.l2_norm = std::sqrt(energy);
  out.gain_bound = std::max(1.0, linalg::spectral_norm(ea)) / std::sqrt(lmin);
  return out;
}

}  // namespace turnpike
