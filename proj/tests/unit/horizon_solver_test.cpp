#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.hpp"
#include "turnpike/errors.hpp"
#include "turnpike/horizon_solver.hpp"
#include "turnpike/random_systems.hpp"
#include "turnpike/steady_solver.hpp"

namespace turnpike {
namespace {

using testing::MatrixNear;

Eigen::Index node_at(const Trajectory& traj, double t) {
  return static_cast<Eigen::Index>(std::lround(t / traj.step()));
}

TEST(FreeEndpoint, SteadyStartStaysOnTurnpike) {
  random::Rng rng(31);
  SystemSpec s = random::stable_system(rng, 4, 2, 2);
  const SteadySolution steady = solve_steady(s.A, s.B, s.C, s.z);
  s.x0 = steady.x_bar;
  const Trajectory traj = solve_free_endpoint(s, {40.0, 4000});
  const Eigen::Index mid = traj.nodes() / 2;
  const double dev = (traj.x.row(mid).transpose() - steady.x_bar).norm() +
                     (traj.u.row(mid).transpose() - steady.u_bar).norm();
  EXPECT_LE(dev, 1e-6);
}

TEST(FreeEndpoint, ScalarClosedForm) {
  const SystemSpec s = testing::scalar_system(-1, 1, 1, 0, 1);
  const double T = 5.0;
  const Trajectory traj = solve_free_endpoint(s, {T, 10000});
  // Exact solution of y' = H y with x(0) = 1, p(T) = 0.
  Matrix H(2, 2);
  H << -1, -1, -1, 1;
  const Matrix eT = (H * T).exp();
  const double p0 = -eT(1, 0) / eT(1, 1);
  for (double t : {0.0, 1.0, 2.5, 4.0, 5.0}) {
    Vector y0(2);
    y0 << 1.0, p0;
    const Vector y = (H * t).exp() * y0;
    const Eigen::Index k = node_at(traj, t);
    EXPECT_NEAR(traj.x(k, 0), y(0), 1e-6) << "t = " << t;
    EXPECT_NEAR(traj.p(k, 0), y(1), 1e-6) << "t = " << t;
  }
  EXPECT_NEAR(traj.p(traj.nodes() - 1, 0), 0.0, 1e-14);
  EXPECT_NEAR(traj.x(0, 0), 1.0, 1e-14);
}

TEST(FreeEndpoint, ControlIsMinusBTransposeP) {
  random::Rng rng(32);
  const SystemSpec s = random::stable_system(rng, 4, 2, 1);
  const Trajectory traj = solve_free_endpoint(s, {10.0, 1000});
  EXPECT_TRUE(MatrixNear(traj.u, -traj.p * s.B, 1e-8));
}

TEST(FreeEndpoint, StableHeatHasObservedPlateau) {
  PdeSpec spec;
  spec.kind = PdeKind::heat;
  spec.modes = 16;
  spec.length = M_PI;
  spec.x_con = M_PI / 3;
  spec.x_obs = M_PI / 5;
  spec.target = 1.0;
  const SystemSpec s = build_heat(spec);
  const Trajectory traj = solve_free_endpoint(s, {30.0, 3000});
  const Vector y = traj.x * s.C.transpose();
  const double plateau = y(node_at(traj, 15.0));
  for (double t = 7.5; t <= 22.5; t += 0.5) {
    EXPECT_NEAR(y(node_at(traj, t)), plateau, 1e-3 * (1 + std::abs(plateau))) << "t = " << t;
  }
}

TEST(FreeEndpoint, UnstableUncontrolledBlowsUp) {
  PdeSpec spec;
  spec.kind = PdeKind::heat;
  spec.modes = 16;
  spec.length = 10.0;
  spec.potential = -std::pow(2 * M_PI / 10, 2) - 1;
  spec.x_con = 10.0 / 3;
  spec.x_obs = 5.0;
  spec.target = 1.0;
  const SystemSpec s = build_heat(spec);
  try {
    solve_free_endpoint(s, {40.0, 4000});
    FAIL() << "expected a blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_GT(e.norm(), kOverflowGuard);
    EXPECT_NE(std::string(e.what()).find("non-decaying modes"), std::string::npos);
  }
}

TEST(FreeEndpoint, MidpointDefectIsSecondOrder) {
  random::Rng rng(33);
  const SystemSpec s = random::stable_system(rng, 4, 1, 1);
  const double coarse = midpoint_rule_defect(solve_free_endpoint(s, {10.0, 500}), s);
  const double fine = midpoint_rule_defect(solve_free_endpoint(s, {10.0, 1000}), s);
  EXPECT_GT(coarse / fine, 3.5);
  EXPECT_LT(coarse / fine, 4.5);
}

TEST(FixedEndpoint, SteadyEndpointsStayOnTurnpike) {
  random::Rng rng(34);
  SystemSpec s = random::controllable_system(rng, 4, 2, 1);
  const SteadySolution steady = solve_steady(s.A, s.B, s.C, s.z);
  ASSERT_EQ(steady.kernel_dir.cols(), 0);
  s.x0 = steady.x_bar;
  s.x1 = steady.x_bar;
  const Trajectory traj = solve_fixed_endpoint(s, {20.0, 2000});
  EXPECT_LE(traj.boundary_error, 1e-8);
  for (Eigen::Index k = 0; k < traj.nodes(); k += 100) {
    EXPECT_LE((traj.x.row(k).transpose() - steady.x_bar).norm(), 1e-6);
  }
}

TEST(FixedEndpoint, DoubleIntegratorSymmetricEndpoints) {
  SystemSpec s = testing::double_integrator();
  s.x0 = Vector::Ones(2);
  s.x1 = Vector(2);
  *s.x1 << 3.0, 1.0;
  const double T = 20.0;
  const Trajectory traj = solve_fixed_endpoint(s, {T, 4000});
  EXPECT_LE(traj.boundary_error, 1e-8);
  EXPECT_LE((traj.x.row(traj.nodes() - 1).transpose() - *s.x1).norm(), 1e-8);
  // P1 x = x1 + x2 is affine in t away from the unit-rate boundary layers,
  // whose tails are about e^{-T/4} at the window edges.
  const Eigen::Index a = node_at(traj, 0.25 * T), b = node_at(traj, 0.75 * T);
  const Vector t = traj.t.segment(a, b - a + 1);
  const Vector y = traj.x.col(0).segment(a, b - a + 1) + traj.x.col(1).segment(a, b - a + 1);
  Matrix design(t.size(), 2);
  design << Vector::Ones(t.size()), t;
  const Vector coef = design.colPivHouseholderQr().solve(y);
  EXPECT_LE((design * coef - y).cwiseAbs().maxCoeff(), 2.0 * std::exp(-0.25 * T));
}

TEST(FixedEndpoint, ShortHorizonMatchesCgOracle) {
  random::Rng rng(35);
  SystemSpec s = random::controllable_system(rng, 4, 2, 1);
  s.x1 = random::gaussian(rng, 4, 1);
  const GridSpec grid{2.5, 2000};
  const Trajectory direct = solve_fixed_endpoint(s, grid);
  const CgResult cg = solve_cg_oracle(s, grid);
  const double jd = trajectory_cost(direct, s.C, s.z);
  const double jc = trajectory_cost(cg.trajectory, s.C, s.z);
  EXPECT_NEAR(jd, jc, 1e-5 * jd);
}

TEST(FixedEndpoint, RequiresControllability) {
  SystemSpec s = testing::double_integrator();
  s.B = Matrix::Zero(2, 1);
  s.x1 = Vector::Zero(2);
  EXPECT_THROW(solve_fixed_endpoint(s, {5.0, 100}), PreconditionError);
}

TEST(CgOracle, ZeroProblem) {
  random::Rng rng(36);
  SystemSpec s = random::stable_system(rng, 3, 1, 1);
  s.z.setZero();
  s.x0.setZero();
  const CgResult cg = solve_cg_oracle(s, {5.0, 200});
  EXPECT_LE(cg.trajectory.u.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(trajectory_cost(cg.trajectory, s.C, s.z), 1e-28);
}

TEST(CgOracle, AgreesWithRiccatiSweep) {
  random::Rng rng(37);
  const SystemSpec s = random::stable_system(rng, 4, 1, 1);
  const GridSpec grid{10.0, 2000};
  const Trajectory direct = solve_free_endpoint(s, grid);
  const CgResult cg = solve_cg_oracle(s, grid);
  const double scale = direct.u.cwiseAbs().maxCoeff();
  // Both solve the same discrete optimality system.
  EXPECT_LE((direct.u - cg.trajectory.u).cwiseAbs().maxCoeff(), 1e-9 * scale);
  // Both approximate the same minimizer; the sweep is not worse.
  EXPECT_LE(trajectory_cost(direct, s.C, s.z), trajectory_cost(cg.trajectory, s.C, s.z) + 1e-6);
  for (std::size_t k = 1; k < cg.cost_history.size(); ++k) {
    EXPECT_LE(cg.cost_history[k], cg.cost_history[k - 1] + 1e-12 * std::abs(cg.cost_history[0]));
  }
}

TEST(AdjointBound, UniformInHorizon) {
  random::Rng rng(7);
  SystemSpec s = random::controllable_system(rng, 4, 2, 1);
  s.x1 = random::gaussian(rng, 4, 1);
  double previous = 0.0;
  for (double T : {5.0, 10.0, 20.0, 40.0}) {
    const Trajectory traj = solve_fixed_endpoint(s, {T, static_cast<int>(100 * T)});
    const double pmax = traj.p.rowwise().norm().maxCoeff();
    if (previous > 0.0) EXPECT_LT(std::abs(pmax - previous) / previous, 0.05) << "T = " << T;
    previous = pmax;
  }
}

TEST(Steering, AlreadyThere) {
  const Vector x = Vector::Ones(2);
  const SteeringControl c = steering_control(Matrix::Zero(2, 2), Matrix::Identity(2, 2), x, x);
  EXPECT_LE(c.u.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Steering, DoubleIntegratorReachesTarget) {
  const SystemSpec di = testing::double_integrator();
  const SteeringControl c = steering_control(di.A, di.B, Vector::Zero(2), Vector::Unit(2, 0));
  EXPECT_LE(c.endpoint_error, 1e-8);
}

TEST(Steering, GramianNormBound) {
  random::Rng rng(38);
  for (int trial = 0; trial < 5; ++trial) {
    const SystemSpec s = random::controllable_system(rng, 4, 1, 1);
    const Vector xa = random::gaussian(rng, 4, 1), xb = random::gaussian(rng, 4, 1);
    const SteeringControl c = steering_control(s.A, s.B, xa, xb);
    EXPECT_LE(c.endpoint_error, 1e-6 * (1 + xb.norm()));
    EXPECT_LE(c.l2_norm, c.gain_bound * (xa.norm() + xb.norm()) * (1 + 1e-9));
  }
}

}  // namespace
}  // namespace turnpike
