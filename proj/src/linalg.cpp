#include "sph/linalg.hpp"

#include "sph/error.hpp"
#include "sph/tolerances.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace sph {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::SingularA22: return "SingularA22";
    case ErrorCode::SuppliedDataInvalid: return "SuppliedDataInvalid";
    case ErrorCode::NotScalarTwoMode: return "NotScalarTwoMode";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::EpsilonAboveThreshold: return "EpsilonAboveThreshold";
    case ErrorCode::NoFeasibleA: return "NoFeasibleA";
    case ErrorCode::ScheduleIncompatible: return "ScheduleIncompatible";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

namespace linalg {

namespace {

void require_square(const Mat& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(who) + " requires a square matrix, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
}

Eigen::SelfAdjointEigenSolver<Mat> sym_eig(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "symmetric eigendecomposition");
  return es;
}

}  // namespace

bool is_symmetric(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

SymPD::SymPD(Mat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || !is_symmetric(m_, tol::kSymmetry)) {
    throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric");
  }
  if (!m_.allFinite()) throw Error(ErrorCode::NotPD, "non-finite entries");
  m_ = 0.5 * (m_ + m_.transpose());
  if (m_.size() > 0 && min_eigenvalue() <= 0.0) throw Error(ErrorCode::NotPD, "matrix is not positive definite");
}

double SymPD::min_eigenvalue() const { return sym_eig(m_).eigenvalues().minCoeff(); }

ComplexVec eigenvalues(const Mat& m) {
  require_square(m, "eigenvalues");
  if (m.size() == 0) return ComplexVec();
  if (!m.allFinite()) throw Error(ErrorCode::Overflow, "non-finite matrix entries");
  Eigen::EigenSolver<Mat> es;
  es.setMaxIterations(tol::kEigenMaxIterations);
  es.compute(m, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "QR iteration cap reached");
  return es.eigenvalues();
}

double spectral_abscissa(const Mat& m) { return eigenvalues(m).real().maxCoeff(); }

bool is_hurwitz(const Mat& a) {
  require_square(a, "is_hurwitz");
  if (a.size() == 0) return true;
  return spectral_abscissa(a) < -tol::kHurwitzMargin;
}

SymPD solve_lyapunov(const Mat& a, const SymPD& c) {
  require_square(a, "solve_lyapunov");
  const Eigen::Index n = a.rows();
  if (c.size() != n) throw Error(ErrorCode::DimensionMismatch, "solve_lyapunov: C does not match A");
  if (!is_hurwitz(a)) throw Error(ErrorCode::NotHurwitz, "solve_lyapunov: A is not Hurwitz");

  // vec(A^T Q + Q A) = (I (x) A^T + A^T (x) I) vec(Q), column-major vec.
  const Mat at = a.transpose();
  Mat k = Mat::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k.block(j * n, j * n, n, n) += at;
    for (Eigen::Index l = 0; l < n; ++l) {
      k.block(j * n, l * n, n, n).diagonal().array() += at(j, l);
    }
  }
  const Vec rhs = -Eigen::Map<const Vec>(c.mat().data(), n * n);
  const Vec sol = k.fullPivLu().solve(rhs);
  Mat q = Eigen::Map<const Mat>(sol.data(), n, n);
  q = 0.5 * (q + q.transpose());

  const double residual = (at * q + q * a + c.mat()).norm();
  const double bound = tol::kLyapunovResidual * (a.norm() * q.norm() + c.mat().norm());
  if (!q.allFinite() || residual > bound) {
    throw Error(ErrorCode::IllConditioned, "Lyapunov residual " + std::to_string(residual) + " exceeds " +
                                               std::to_string(bound));
  }
  return SymPD(std::move(q));
}

SymPD principal_sqrt(const SymPD& q) {
  const auto es = sym_eig(q.mat());
  const Vec root = es.eigenvalues().cwiseSqrt();
  Mat b = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  b = 0.5 * (b + b.transpose());
  if ((b * b - q.mat()).norm() > tol::kSqrtResidual * std::max(1.0, q.mat().norm())) {
    throw Error(ErrorCode::IllConditioned, "principal_sqrt residual");
  }
  return SymPD(std::move(b));
}

SymPD principal_inv_sqrt(const SymPD& q) {
  const auto es = sym_eig(q.mat());
  const Vec inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
  Mat b = es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
  return SymPD(0.5 * (b + b.transpose()));
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double spectral_radius(const Mat& m) {
  require_square(m, "spectral_radius");
  if (m.size() == 0) return 0.0;
  return eigenvalues(m).cwiseAbs().maxCoeff();
}

SchurTest is_schur_positive(const Mat& m) {
  require_square(m, "is_schur_positive");
  if ((m.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "is_schur_positive needs M >= 0");
  SchurTest out;
  out.radius = spectral_radius(m);
  out.schur = out.radius < 1.0 - tol::kSchurMargin;
  if (!out.schur) return out;

  const Eigen::Index n = m.rows();
  const Mat shifted = Mat::Identity(n, n) - m.transpose();
  Vec p = shifted.partialPivLu().solve(Vec::Ones(n));
  p /= p.maxCoeff();
  out.witness = std::move(p);
  return out;
}

namespace {

// Pade coefficients and theta thresholds for the scaling-and-squaring
// matrix exponential (degrees 3, 5, 7, 9, 13).
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                           2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0, 129060195264000.0,
    10559470521600.0,    670442572800.0,      33522128640.0,      1323241920.0,       40840800.0,
    960960.0,            16380.0,             182.0,              1.0};
constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                          2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Mat pade_low(const Mat& a, const std::array<double, N>& b) {
  const Eigen::Index n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  Mat power = ident;
  Mat u_inner = Mat::Zero(n, n);
  Mat v = Mat::Zero(n, n);
  for (std::size_t k = 0; k < N; k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  const Mat u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Mat pade13(const Mat& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Mat expm(const Mat& a, double t) {
  require_square(a, "expm");
  if (!std::isfinite(t) || !a.allFinite()) throw Error(ErrorCode::Overflow, "expm: non-finite input");
  const Eigen::Index n = a.rows();
  if (n == 0 || t == 0.0) return Mat::Identity(n, n);

  Mat at = a * t;
  const double norm1 = at.cwiseAbs().colwise().sum().maxCoeff();
  Mat result;
  if (norm1 <= kTheta[0]) {
    result = pade_low(at, kPade3);
  } else if (norm1 <= kTheta[1]) {
    result = pade_low(at, kPade5);
  } else if (norm1 <= kTheta[2]) {
    result = pade_low(at, kPade7);
  } else if (norm1 <= kTheta[3]) {
    result = pade_low(at, kPade9);
  } else {
    const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
    at /= std::ldexp(1.0, squarings);
    result = pade13(at);
    for (int i = 0; i < squarings; ++i) result = result * result;
  }
  if (!result.allFinite()) throw Error(ErrorCode::Overflow, "expm result not representable");
  return result;
}

}  // namespace linalg
}  // namespace sph
