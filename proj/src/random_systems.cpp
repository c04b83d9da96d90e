#include "turnpike/random_systems.hpp"

#include <algorithm>

#include "turnpike/errors.hpp"
#include "turnpike/subspace_lab.hpp"
#include "turnpike/turnpike_metrics.hpp"

namespace turnpike::random {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// 2x2 real block with eigenvalues re ± i im.
Matrix rotation_block(double re, double im) {
  Matrix b(2, 2);
  b << re, im, -im, re;
  return b;
}

/// Block-diagonal matrix of 1x1 and 2x2 blocks with the given real parts.
Matrix spectrum_matrix(Rng& rng, const std::vector<double>& real_parts, bool allow_complex) {
  const Eigen::Index n = static_cast<Eigen::Index>(real_parts.size());
  Matrix a = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  while (i < n) {
    if (allow_complex && i + 1 < n && coin(rng)) {
      a.block(i, i, 2, 2) = rotation_block(real_parts[i], uniform(rng, 0.3, 2.0));
      i += 2;
    } else {
      a(i, i) = real_parts[i];
      ++i;
    }
  }
  return a;
}

void fill_data(Rng& rng, SystemSpec& sys) {
  sys.z = gaussian(rng, sys.C.rows(), 1);
  sys.x0 = gaussian(rng, sys.A.rows(), 1);
  sys.x1.reset();
}

}  // namespace

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Matrix orthogonal(Rng& rng, Eigen::Index n) {
  const Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix low_rank(Rng& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
  rank = std::clamp<Eigen::Index>(rank, 0, std::min(rows, cols));
  return gaussian(rng, rows, rank) * gaussian(rng, rank, cols);
}

SystemSpec triple(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p) {
  std::uniform_int_distribution<Eigen::Index> pick(0, 3);
  auto maybe_deficient = [&](Eigen::Index rows, Eigen::Index cols) {
    const Eigen::Index full = std::min(rows, cols);
    if (pick(rng) == 0 && full > 0) {
      return low_rank(rng, rows, cols, std::uniform_int_distribution<Eigen::Index>(0, full - 1)(rng));
    }
    return gaussian(rng, rows, cols);
  };
  SystemSpec sys;
  sys.A = maybe_deficient(n, n);
  sys.B = maybe_deficient(n, m);
  sys.C = maybe_deficient(p, n);
  fill_data(rng, sys);
  return sys;
}

SystemSpec stable_system(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p,
                         double margin) {
  SystemSpec sys;
  sys.A = gaussian(rng, n, n);
  const double abscissa = linalg::eigenvalues(sys.A).real().maxCoeff();
  sys.A -= (abscissa + margin) * Matrix::Identity(n, n);
  sys.B = gaussian(rng, n, m);
  sys.C = gaussian(rng, p, n);
  fill_data(rng, sys);
  return sys;
}

SystemSpec controllable_system(Rng& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> re(n);
    for (auto& r : re) r = uniform(rng, -1.5, 1.0);
    const Matrix q = orthogonal(rng, n);
    Matrix a = spectrum_matrix(rng, re, true);
    a.triangularView<Eigen::StrictlyUpper>() += 0.5 * gaussian(rng, n, n);
    SystemSpec sys;
    sys.A = q * a * q.transpose();
    sys.B = gaussian(rng, n, m);
    sys.C = gaussian(rng, p, n);
    if (is_controllable(sys.A, sys.B) && unobservable_space(sys.A, sys.C).dim() == 0) {
      fill_data(rng, sys);
      return sys;
    }
  }
  throw NumericalError("controllable_system: no controllable sample found");
}

SystemSpec hautus_case(Rng& rng, Eigen::Index n, HautusVariant variant) {
  SystemSpec sys;
  switch (variant) {
    case HautusVariant::double_integrator: {
      sys.A = Matrix::Zero(2, 2);
      sys.A(0, 1) = 1.0;
      sys.B = Matrix::Zero(2, 1);
      sys.B(1, 0) = 1.0;
      sys.C = Matrix::Zero(1, 2);
      sys.C(0, 1) = 1.0;
      break;
    }
    case HautusVariant::skew_unobserved: {
      const Matrix g = gaussian(rng, n, n);
      sys.A = g - g.transpose();
      sys.B = gaussian(rng, n, std::max<Eigen::Index>(1, n / 2));
      sys.C = Matrix::Zero(1, n);
      break;
    }
    case HautusVariant::generic: {
      sys.A = gaussian(rng, n, n);
      sys.B = gaussian(rng, n, 1 + static_cast<Eigen::Index>(coin(rng)));
      sys.C = gaussian(rng, 1 + static_cast<Eigen::Index>(coin(rng)), n);
      break;
    }
    case HautusVariant::imaginary_observed:
    case HautusVariant::imaginary_hidden: {
      // Leading 2x2 block on the imaginary axis (or a zero eigenvalue), the
      // rest random; B generic so (A, B) is controllable.
      Matrix a = Matrix::Zero(n, n);
      const bool zero_mode = coin(rng, 0.3);
      Eigen::Index lead = 2;
      if (zero_mode) {
        a(0, 0) = 0.0;
        lead = 1;
      } else {
        a.topLeftCorner(2, 2) = rotation_block(0.0, uniform(rng, 0.5, 2.0));
      }
      const Eigen::Index rest = n - lead;
      a.bottomRightCorner(rest, rest) = gaussian(rng, rest, rest);
      Matrix c = gaussian(rng, 1 + static_cast<Eigen::Index>(coin(rng)), n);
      if (variant == HautusVariant::imaginary_hidden) {
        c.leftCols(lead).setZero();
      } else {
        a.topRightCorner(lead, rest) = gaussian(rng, lead, rest);
      }
      const Matrix q = orthogonal(rng, n);
      sys.A = q * a * q.transpose();
      sys.B = gaussian(rng, n, 1);
      sys.C = c * q.transpose();
      break;
    }
  }
  fill_data(rng, sys);
  return sys;
}

SystemSpec c_stabilizability_case(Rng& rng, bool c_stabilizable) {
  const Eigen::Index n = 4;
  const Eigen::Index nu = coin(rng) ? 2 : 1;  // uncontrollable block size
  const Eigen::Index nc = n - nu;
  const Eigen::Index m = 1 + static_cast<Eigen::Index>(coin(rng));
  const Eigen::Index p = 1 + static_cast<Eigen::Index>(coin(rng));

  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> re_u(nu);
    bool observed = true;
    bool coupled = true;
    if (c_stabilizable) {
      if (coin(rng)) {
        for (auto& r : re_u) r = uniform(rng, -2.0, -0.6);
      } else {
        // Mildly unstable but invisible to C and decoupled from the rest.
        for (auto& r : re_u) r = uniform(rng, 0.05, 0.3);
        observed = false;
        coupled = false;
      }
    } else {
      const double kind = uniform(rng, 0.0, 1.0);
      for (auto& r : re_u) {
        r = kind < 0.3 ? 0.0 : (kind < 0.7 ? uniform(rng, 0.1, 0.6) : uniform(rng, 0.8, 1.5));
      }
    }
    std::vector<double> re_c(nc);
    for (auto& r : re_c) r = uniform(rng, -1.5, 1.0);
    Matrix a = Matrix::Zero(n, n);
    a.topLeftCorner(nc, nc) = spectrum_matrix(rng, re_c, true);
    a.topLeftCorner(nc, nc).triangularView<Eigen::StrictlyUpper>() +=
        0.5 * gaussian(rng, nc, nc);
    a.bottomRightCorner(nu, nu) = spectrum_matrix(rng, re_u, true);
    if (coupled) a.topRightCorner(nc, nu) = gaussian(rng, nc, nu);
    Matrix b = Matrix::Zero(n, m);
    b.topRows(nc) = gaussian(rng, nc, m);
    Matrix c = gaussian(rng, p, n);
    if (!observed) c.rightCols(nu).setZero();

    const Matrix q = orthogonal(rng, n);
    SystemSpec sys;
    sys.A = q * a * q.transpose();
    sys.B = q * b;
    sys.C = c * q.transpose();
    if (!is_controllable(a.topLeftCorner(nc, nc), b.topRows(nc))) continue;
    if (is_C_stabilizable(sys.A, sys.B, sys.C).holds != c_stabilizable) continue;
    // Keep horizons of 10 long against the turnpike time scale.
    if (c_stabilizable && expected_turnpike_rate(sys.A, sys.B, sys.C) < kMinTurnpikeRate) continue;
    fill_data(rng, sys);
    return sys;
  }
  throw NumericalError("c_stabilizability_case: no sample with the requested outcome");
}

}  // namespace turnpike::random
