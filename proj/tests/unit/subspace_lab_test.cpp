#include <array>
#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.hpp"
#include "turnpike/horizon_solver.hpp"
#include "turnpike/random_systems.hpp"
#include "turnpike/subspace_lab.hpp"

namespace turnpike {
namespace {

using testing::diag;
using testing::MatrixNear;

Matrix unit(Eigen::Index n, Eigen::Index i) { return Vector::Unit(n, i); }

PdeSpec heat3(double x_con, double x_obs) {
  PdeSpec s;
  s.kind = PdeKind::heat;
  s.modes = 3;
  s.length = 10.0;
  s.x_con = x_con;
  s.x_obs = x_obs;
  return s;
}

TEST(SpectralSubspace, DiagonalStablePart) {
  const SubspaceBasis b = spectral_subspace(diag({-1, 0, 2}), SpectralClass::negative);
  ASSERT_EQ(b.dim(), 1);
  EXPECT_LT(linalg::subspace_gap(b.basis, unit(3, 0)), 1e-12);
}

TEST(SpectralSubspace, NilpotentIsCritical) {
  const SystemSpec di = testing::double_integrator();
  EXPECT_EQ(spectral_subspace(di.A, SpectralClass::zero).dim(), 2);
  EXPECT_EQ(spectral_subspace(di.A, SpectralClass::negative).dim(), 0);
}

TEST(SpectralSubspace, WaveBlockIsCritical) {
  PdeSpec w;
  w.kind = PdeKind::wave;
  w.modes = 2;
  w.length = 10.0;
  w.x_con = 5.0;
  w.x_obs = 5.0;
  EXPECT_EQ(spectral_subspace(build_wave(w).A, SpectralClass::zero).dim(), 4);
}

TEST(SpectralSubspace, DimensionsSumAndInvariance) {
  random::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random::gaussian(rng, 5, 5);
    Eigen::Index total = 0;
    for (SpectralClass c : {SpectralClass::negative, SpectralClass::zero, SpectralClass::positive}) {
      const SubspaceBasis b = spectral_subspace(A, c);
      total += b.dim();
      if (b.dim() == 0) continue;
      EXPECT_TRUE(MatrixNear(b.basis.transpose() * b.basis, Matrix::Identity(b.dim(), b.dim()), 1e-10));
      const Matrix P = b.projector();
      const Matrix I = Matrix::Identity(5, 5);
      EXPECT_LE(linalg::spectral_norm((I - P) * A * P), 1e-8 * linalg::spectral_norm(A));
    }
    EXPECT_EQ(total, 5);
  }
}

TEST(UnobservableSpace, Extremes) {
  const Matrix A = diag({-1, 2, 0.5});
  EXPECT_EQ(unobservable_space(A, Matrix::Zero(1, 3)).dim(), 3);
  EXPECT_EQ(unobservable_space(A, Matrix::Identity(3, 3)).dim(), 0);
}

TEST(UnobservableSpace, HeatMidpointHidesModeTwo) {
  const SystemSpec s = build_heat(heat3(10.0 / 3, 5.0));
  const SubspaceBasis b = unobservable_space(s.A, s.C);
  ASSERT_EQ(b.dim(), 1);
  EXPECT_LT(linalg::subspace_gap(b.basis, unit(3, 1)), 1e-10);
}

TEST(UnobservableSpace, InvariantAndInKernelOfC) {
  random::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemSpec s = random::triple(rng, 5, 1, 2);
    const SubspaceBasis b = unobservable_space(s.A, s.C);
    if (b.dim() == 0) continue;
    const Matrix P = b.projector();
    EXPECT_LE((s.C * b.basis).norm(), 1e-8 * (1 + s.C.norm()));
    EXPECT_LE(((Matrix::Identity(5, 5) - P) * s.A * P).norm(), 1e-8 * (1 + s.A.norm()));
  }
}

TEST(UndetectableSpace, Examples) {
  EXPECT_EQ(undetectable_space(diag({-1, -2}), Matrix::Zero(1, 2)).dim(), 0);
  const SubspaceBasis b = undetectable_space(diag({1, -1}), Matrix::Zero(1, 2));
  ASSERT_EQ(b.dim(), 1);
  EXPECT_LT(linalg::subspace_gap(b.basis, unit(2, 0)), 1e-12);
  const SystemSpec s = build_heat(heat3(10.0 / 3, 5.0));
  EXPECT_EQ(undetectable_space(s.A, s.C).dim(), 0);
}

TEST(DetectableProjections, ObservableGivesIdentity) {
  const SystemSpec di = testing::double_integrator();
  Matrix C(1, 2);
  C << 1, 0;
  const SubspaceReport r = detectable_projections(di.A, C);
  EXPECT_TRUE(MatrixNear(r.D, Matrix::Identity(2, 2), 1e-12));
}

TEST(DetectableProjections, UnobservedUnstableMode) {
  const SubspaceReport r = detectable_projections(diag({1, -1}), Matrix::Zero(1, 2));
  EXPECT_TRUE(MatrixNear(r.D, diag({0, 1}), 1e-12));
  EXPECT_TRUE(MatrixNear(r.R, diag({1, 0}), 1e-12));
}

TEST(DetectableProjections, ConstructedUndetectableBlock) {
  random::Rng rng(3);
  // Block diagonal: a 3x3 observed part and a 2x2 unstable unobserved part,
  // hidden by an orthogonal change of basis.
  Matrix A = Matrix::Zero(5, 5);
  A.topLeftCorner(3, 3) = random::gaussian(rng, 3, 3);
  A.bottomRightCorner(2, 2) << 0.5, 1.0, -1.0, 0.5;
  Matrix C = Matrix::Zero(2, 5);
  C.leftCols(3) = random::gaussian(rng, 2, 3);
  const Matrix Q = random::orthogonal(rng, 5);
  const Matrix At = Q * A * Q.transpose();
  const Matrix Ct = C * Q.transpose();
  const SubspaceReport r = detectable_projections(At, Ct);
  EXPECT_EQ(linalg::rank(r.D, 1e-8), 3);
  EXPECT_EQ(r.undetectable.dim(), 2);
}

TEST(DetectableProjections, ProjectorIdentities) {
  random::Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const SystemSpec s = random::triple(rng, 5, 1, 1);
    const SubspaceReport r = detectable_projections(s.A, s.C);
    const Matrix I = Matrix::Identity(5, 5);
    const double scale = 1e-8 * (1 + s.A.norm());
    EXPECT_TRUE(MatrixNear(r.D + r.R, I, 1e-9));
    EXPECT_TRUE(MatrixNear(r.D * r.D, r.D, 1e-9));
    EXPECT_TRUE(MatrixNear(r.R * r.R, r.R, 1e-9));
    EXPECT_TRUE(MatrixNear(r.D * r.R, Matrix::Zero(5, 5), 1e-9));
    EXPECT_LE((s.C * r.R).norm(), 1e-8 * (1 + s.C.norm()));
    EXPECT_LE((r.D * s.A * r.R).norm(), scale);
    EXPECT_LE((r.R * s.A * r.R - s.A * r.R).norm(), scale);
  }
}

TEST(StabilizableSubspace, Examples) {
  const SystemSpec di = testing::double_integrator();
  EXPECT_EQ(stabilizable_subspace(di.A, di.B).dim(), 2);
  const SubspaceBasis b = stabilizable_subspace(diag({-1, 1}), Matrix::Zero(2, 1));
  ASSERT_EQ(b.dim(), 1);
  EXPECT_LT(linalg::subspace_gap(b.basis, unit(2, 0)), 1e-12);
  const SystemSpec h = build_heat(heat3(10.0 / 3, 5.0));
  EXPECT_EQ(stabilizable_subspace(h.A, h.B).dim(), 3);
}

TEST(CStabilizability, Examples) {
  const SystemSpec di = testing::double_integrator();
  EXPECT_TRUE(is_C_stabilizable(di.A, di.B, Matrix::Identity(2, 2)).holds);
  const CStabilizability r = is_C_stabilizable(diag({1, -1}), Matrix::Zero(2, 1), Matrix::Identity(2, 2));
  EXPECT_FALSE(r.holds);
  EXPECT_GT(r.defect, 0.5);
  // The same unstable mode, unobserved, no longer matters.
  Matrix C(1, 2);
  C << 0, 1;
  EXPECT_TRUE(is_C_stabilizable(diag({1, -1}), Matrix::Zero(2, 1), C).holds);
}

TEST(WeakHautus, Examples) {
  EXPECT_TRUE(weak_hautus(testing::rotation_generator(), Matrix::Identity(2, 2)).holds);
  const HautusResult skew = weak_hautus(testing::rotation_generator(), Matrix::Zero(1, 2));
  EXPECT_FALSE(skew.holds);
  ASSERT_EQ(skew.failing_eigenvalues.size(), 2u);
  for (const auto& ev : skew.failing_eigenvalues) {
    EXPECT_NEAR(ev.real(), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(ev.imag()), 1.0, 1e-12);
  }
  // Double integrator observed through x2: e1 spans ker A and C e1 = 0.
  const SystemSpec di = testing::double_integrator();
  EXPECT_FALSE(weak_hautus(di.A, di.C).holds);
  Matrix C(1, 2);
  C << 1, 0;
  EXPECT_TRUE(weak_hautus(di.A, C).holds);
}

TEST(WeakHautus, EquivalentToTrivialCriticalUnobservable) {
  random::Rng rng(8);
  const std::array variants{random::HautusVariant::generic, random::HautusVariant::imaginary_observed,
                            random::HautusVariant::imaginary_hidden,
                            random::HautusVariant::skew_unobserved};
  for (int trial = 0; trial < 100; ++trial) {
    const SystemSpec s = random::hautus_case(rng, 4, variants[trial % variants.size()]);
    EXPECT_EQ(weak_hautus(s.A, s.C).holds, critical_unobservable_space(s.A, s.C).dim() == 0)
        << "trial " << trial;
  }
}

TEST(Controllability, Examples) {
  const SystemSpec di = testing::double_integrator();
  EXPECT_TRUE(is_controllable(di.A, di.B));
  EXPECT_FALSE(is_controllable(di.A, Matrix::Zero(2, 1)));
  PdeSpec p;
  p.kind = PdeKind::heat;
  p.modes = 16;
  p.length = 10.0;
  p.potential = -std::pow(2 * M_PI / 10, 2) - 1;
  p.x_con = 10.0 / 3;
  p.x_obs = 5.0;
  const SystemSpec h = build_heat(p);
  EXPECT_FALSE(is_controllable(h.A, h.B));
  EXPECT_EQ(linalg::reachable_subspace(h.A, h.B).cols(), 16 - 5);
}

TEST(KalmanReduce, DetectablePairKeepsFullDimension) {
  const SystemSpec di = testing::double_integrator();
  Matrix C(1, 2);
  C << 1, 0;
  EXPECT_EQ(kalman_reduce(di.A, di.B, C).Ar.rows(), 2);
  EXPECT_EQ(kalman_reduce(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Zero(1, 2)).Ar.rows(), 0);
}

TEST(KalmanReduce, ObservedOutputMatchesFullSystem) {
  random::Rng rng(17);
  Matrix A = Matrix::Zero(4, 4);
  A.topLeftCorner(3, 3) = random::gaussian(rng, 3, 3) - 2.0 * Matrix::Identity(3, 3);
  A(3, 3) = 0.7;  // unobserved, unstable
  A.block(3, 0, 1, 3) = random::gaussian(rng, 1, 3);  // driven by the rest
  Matrix B = random::gaussian(rng, 4, 1);
  Matrix C = Matrix::Zero(1, 4);
  C.leftCols(3) = random::gaussian(rng, 1, 3);
  const Matrix Q = random::orthogonal(rng, 4);
  const Matrix At = Q * A * Q.transpose(), Bt = Q * B, Ct = C * Q.transpose();
  const ReducedSystem r = kalman_reduce(At, Bt, Ct);
  ASSERT_EQ(r.Ar.rows(), 3);

  // Simulate both systems under the same control with the matrix exponential
  // of the augmented (state, constant input) system.
  const Vector x0 = random::gaussian(rng, 4, 1);
  const Vector u = random::gaussian(rng, 1, 1);
  const Vector y0 = r.basis.transpose() * x0;
  for (double t : {0.5, 1.0, 2.0}) {
    Matrix full = Matrix::Zero(5, 5);
    full.topLeftCorner(4, 4) = At * t;
    full.topRightCorner(4, 1) = Bt * u * t;
    Matrix red = Matrix::Zero(4, 4);
    red.topLeftCorner(3, 3) = r.Ar * t;
    red.topRightCorner(3, 1) = r.Br * u * t;
    Vector xa(5), ya(4);
    xa << x0, 1.0;
    ya << y0, 1.0;
    const Vector x = (Matrix(full.exp()) * xa).head(4);
    const Vector y = (Matrix(red.exp()) * ya).head(3);
    EXPECT_NEAR((Ct * x)(0), (r.Cr * y)(0), 1e-8) << "t = " << t;
  }
}

}  // namespace
}  // namespace turnpike
