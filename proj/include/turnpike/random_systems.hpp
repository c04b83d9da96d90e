#pragma once

#include <cstdint>
#include <random>

#include "turnpike/system_model.hpp"

namespace turnpike::random {

using Rng = std::mt19937_64;

/// Standard normal entries.
Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Haar-distributed orthogonal matrix.
Matrix orthogonal(Rng& rng, Eigen::Index n);

/// Gaussian matrix of the given rank (rank <= min(rows, cols)).
Matrix low_rank(Rng& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank);

/// Random (A, B, C) with Gaussian entries; A, B and C are rank-deficient
/// with some probability so that kernels and ranges are nontrivial.
SystemSpec triple(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p);

/// A Hurwitz with spectral abscissa <= -margin; random z, x0.
SystemSpec stable_system(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p,
                         double margin = 0.5);

/// (A, B) controllable and (C, A) observable (so weak Hautus holds), with
/// eigenvalues of A spread on both sides of the imaginary axis.
SystemSpec controllable_system(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p);

enum class HautusVariant {
  generic,              ///< random stabilizable triple
  imaginary_observed,   ///< A has imaginary-axis modes, all seen by C
  imaginary_hidden,     ///< an imaginary-axis mode lies in ker C
  skew_unobserved,      ///< A skew-symmetric, C = 0
  double_integrator     ///< A = [0 1; 0 0], B = e2, C = e2^T
};

/// Stabilizable system of the given flavor (n >= 3 except double_integrator).
SystemSpec hautus_case(Rng& rng, Eigen::Index n, HautusVariant variant);

/// Lower bound on expected_turnpike_rate for C-stabilizable samples.
inline constexpr double kMinTurnpikeRate = 0.5;

/// 4x4 system in disguised Kalman form with one uncontrollable 1- or
/// 2-dimensional block. When `c_stabilizable` is false that block is observed
/// and not asymptotically stable; otherwise it is either stable or unobserved
/// and mildly unstable. C-stabilizable samples decay at a rate of at least
/// kMinTurnpikeRate.
SystemSpec c_stabilizability_case(Rng& rng, bool c_stabilizable);

}  // namespace turnpike::random
