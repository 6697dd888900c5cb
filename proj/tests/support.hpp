#pragma once

// Random system generators and independent oracles shared by the test suites.

#include "sph/commands.hpp"
#include "sph/linalg.hpp"
#include "sph/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace sph::testing {

using linalg::Mat;
using linalg::Vec;
using model::Speed;

inline Mat random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

/// -(G G^T + shift I) + skew part: Hurwitz with abscissa <= -shift.
inline Mat random_hurwitz(std::mt19937_64& rng, Eigen::Index n, double shift) {
  const Mat g = random_matrix(rng, n, n, 1.0);
  const Mat k = random_matrix(rng, n, n, 1.0);
  return -(g * g.transpose() + shift * Mat::Identity(n, n)) + (k - k.transpose());
}

inline std::vector<Speed> random_mask(std::mt19937_64& rng, std::size_t nx, std::size_t nz) {
  std::vector<Speed> mask(nx, Speed::Slow);
  mask.insert(mask.end(), nz, Speed::Fast);
  std::shuffle(mask.begin(), mask.end(), rng);
  return mask;
}

/// A mode whose reordered blocks satisfy A11 = A0 + A12 A22^{-1} A21 with A0
/// and A22 Hurwitz, written back in the original coordinates of a random mask.
inline model::Mode random_mode(std::mt19937_64& rng, std::size_t nx, std::size_t nz, double coupling) {
  const auto x = static_cast<Eigen::Index>(nx);
  const auto z = static_cast<Eigen::Index>(nz);
  const Mat a0 = random_hurwitz(rng, x, 0.5);
  const Mat a22 = random_hurwitz(rng, z, 0.5);
  const Mat a12 = random_matrix(rng, x, z, coupling);
  const Mat a21 = random_matrix(rng, z, x, coupling);
  Mat a(x + z, x + z);
  a << a0 + a12 * a22.inverse() * a21, a12, a21, a22;
  model::Mode m;
  m.mask = random_mask(rng, nx, nz);
  const Mat s = model::build_permutation(m.mask);
  m.flow = s.transpose() * a * s;
  return m;
}

/// Two modes with a dedicated jump per direction.
inline model::HybridSystemSpec random_two_mode(std::mt19937_64& rng, std::size_t nx, std::size_t nz,
                                               double jump_scale = 0.35, double coupling = 1.0) {
  model::HybridSystemSpec spec;
  spec.epsilon = 0.01;
  const auto n = static_cast<Eigen::Index>(nx + nz);
  for (int i = 0; i < 2; ++i) {
    auto m = random_mode(rng, nx, nz, coupling);
    m.name = "m" + std::to_string(i);
    spec.modes.push_back(std::move(m));
  }
  for (int j = 0; j < 2; ++j) {
    spec.jumps.push_back({"j" + std::to_string(j), random_matrix(rng, n, n, jump_scale)});
  }
  spec.transitions = {{0, 0, 1}, {1, 1, 0}};
  return spec;
}

/// Two modes with (n_x, n_z) drawn independently per mode, so dimensions vary.
inline model::HybridSystemSpec random_varying(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(1, 3);
  model::HybridSystemSpec spec;
  spec.epsilon = 0.05;
  spec.augment = true;
  std::size_t nx[2], nz[2];
  nx[0] = d(rng);
  nz[0] = d(rng);
  do {
    nx[1] = d(rng);
    nz[1] = d(rng);
  } while (nx[1] == nx[0] && nz[1] == nz[0]);
  std::size_t dims[2];
  for (int i = 0; i < 2; ++i) {
    auto m = random_mode(rng, nx[i], nz[i], 0.5);
    m.name = "m" + std::to_string(i);
    dims[i] = nx[i] + nz[i];
    spec.modes.push_back(std::move(m));
  }
  const auto n0 = static_cast<Eigen::Index>(dims[0]);
  const auto n1 = static_cast<Eigen::Index>(dims[1]);
  spec.jumps.push_back({"up", random_matrix(rng, n1, n0, 0.5)});
  spec.jumps.push_back({"down", random_matrix(rng, n0, n1, 0.5)});
  spec.transitions = {{0, 0, 1}, {1, 1, 0}};
  return spec;
}

/// Solves A^T Q + Q A = -C through the Kronecker system, assembled entry by
/// entry and eliminated with partial pivoting.
inline Mat lyapunov_oracle(const Mat& a, const Mat& c) {
  const auto n = static_cast<std::size_t>(a.rows());
  const std::size_t N = n * n;
  std::vector<std::vector<double>> m(N, std::vector<double>(N + 1, 0.0));
  // Unknown Q(i, j) sits at index i + n j; row (p, q) of the equation is
  // sum_k A(k, p) Q(k, q) + Q(p, k) A(k, q) = -C(p, q).
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t row = p + n * q;
      for (std::size_t k = 0; k < n; ++k) {
        m[row][k + n * q] += a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p));
        m[row][p + n * k] += a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q));
      }
      m[row][N] = -c(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    }
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t k = col; k <= N; ++k) m[r][k] -= f * m[col][k];
    }
  }
  std::vector<double> sol(N);
  for (std::size_t r = N; r-- > 0;) {
    double s = m[r][N];
    for (std::size_t k = r + 1; k < N; ++k) s -= m[r][k] * sol[k];
    sol[r] = s / m[r][r];
  }
  Mat q(a.rows(), a.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sol[i + n * j];
  return q;
}

/// Largest root modulus of x^2 - tr x + det for a 2x2 matrix.
inline double radius_2x2(const Mat& m) {
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) return std::max(std::abs((tr + std::sqrt(disc)) / 2.0), std::abs((tr - std::sqrt(disc)) / 2.0));
  return std::sqrt(det);
}

/// Eigen's own Pade-based exponential.
inline Mat expm_oracle(const Mat& a, double t) { return Mat(a * t).exp(); }

inline double rel_diff(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}

/// Per-system setup used by the random property suites: data built at
/// eps = eps2 / 2 and the spec rewritten with that epsilon.
struct RandomCase {
  model::HybridSystemSpec spec;
  cli::Analysis analysis;
  double eps = 0.0;
};

inline RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(1, 3);
  RandomCase rc;
  rc.spec = random_two_mode(rng, d(rng), d(rng));
  config::RunConfig cfg;
  cfg.system = rc.spec;
  auto a = cli::analyze(cfg);
  rc.eps = std::min(a.lyap.eps2 / 2.0, 0.5);
  rc.spec.epsilon = rc.eps;
  cfg.system = rc.spec;
  rc.analysis = cli::analyze(cfg);
  return rc;
}

}  // namespace sph::testing
