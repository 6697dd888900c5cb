#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>

namespace sph::linalg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using ComplexVec = Eigen::VectorXcd;

/// Symmetric positive definite matrix. Construction validates both properties.
class SymPD {
 public:
  /// Throws NotSymmetric / NotPD.
  explicit SymPD(Mat m);

  const Mat& mat() const noexcept { return m_; }
  Eigen::Index size() const noexcept { return m_.rows(); }
  double min_eigenvalue() const;

 private:
  Mat m_;
};

bool is_symmetric(const Mat& m, double rel_tol);

/// Eigenvalues of a general real square matrix (shifted QR with a hard
/// iteration cap). Throws NoConvergence.
ComplexVec eigenvalues(const Mat& m);

/// Largest real part of the eigenvalues.
double spectral_abscissa(const Mat& m);

/// Solves A^T Q + Q A = -C through the vectorized Kronecker system.
/// Throws NotHurwitz when A has an eigenvalue with Re >= -margin and
/// IllConditioned when the residual check fails.
SymPD solve_lyapunov(const Mat& a, const SymPD& c);

/// Unique symmetric positive definite B with B*B = Q.
SymPD principal_sqrt(const SymPD& q);
/// Q^{-1/2}.
SymPD principal_inv_sqrt(const SymPD& q);

double spectral_norm(const Mat& m);
double spectral_radius(const Mat& m);
bool is_hurwitz(const Mat& a);

struct SchurTest {
  bool schur = false;
  double radius = 0.0;
  /// Present iff schur: strictly positive p with M^T p < p, max entry 1.
  std::optional<Vec> witness;
};

/// Schur test for an entrywise nonnegative matrix. The witness is
/// p = (I - M^T)^{-1} 1, which satisfies M^T p = p - 1 before scaling.
/// Throws NegativeEntry.
SchurTest is_schur_positive(const Mat& m);

/// e^{A t} by scaling and squaring with a diagonal Pade approximant.
/// Throws Overflow.
Mat expm(const Mat& a, double t);

}  // namespace sph::linalg
