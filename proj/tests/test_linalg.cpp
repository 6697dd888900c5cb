#include "support.hpp"

#include "sph/error.hpp"
#include "sph/linalg.hpp"

#include <doctest.h>

#include <numbers>

using namespace sph;
using namespace sph::linalg;
using sph::testing::random_matrix;

namespace {

Mat m2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Parse;
}

}  // namespace

TEST_CASE("lyapunov: -I with C = 2I gives I") {
  const Mat q = solve_lyapunov(-Mat::Identity(2, 2), SymPD(2.0 * Mat::Identity(2, 2))).mat();
  CHECK((q - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("lyapunov: diagonal case") {
  const Mat a = Eigen::Vector2d(-1, -2).asDiagonal();
  const Mat q = solve_lyapunov(a, SymPD(Mat::Identity(2, 2))).mat();
  CHECK(q(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(q(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::abs(q(0, 1)) < 1e-15);
}

TEST_CASE("lyapunov: matches elimination oracle") {
  const Mat a = m2(-1, 0.5, -1, -2);
  const Mat q = solve_lyapunov(a, SymPD(Mat::Identity(2, 2))).mat();
  CHECK(testing::rel_diff(q, testing::lyapunov_oracle(a, Mat::Identity(2, 2))) < 1e-13);
}

TEST_CASE("lyapunov: random residual bound and oracle agreement") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 40; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + k % 6);
    const Mat a = testing::random_hurwitz(rng, n, 0.2);
    const Mat g = random_matrix(rng, n, n, 1.0);
    const Mat c = g * g.transpose() + Mat::Identity(n, n);
    const Mat q = solve_lyapunov(a, SymPD(c)).mat();
    const double res = (a.transpose() * q + q * a + c).norm();
    CHECK(res <= 1e-10 * (a.norm() * q.norm() + c.norm()));
    CHECK(testing::rel_diff(q, testing::lyapunov_oracle(a, c)) < 1e-9);
  }
}

TEST_CASE("lyapunov: rejects non-Hurwitz input") {
  CHECK(code_of([] { solve_lyapunov(m2(0, 1, -1, 0), SymPD(Mat::Identity(2, 2))); }) == ErrorCode::NotHurwitz);
  CHECK(code_of([] { solve_lyapunov(Mat::Constant(1, 1, 1.0), SymPD(Mat::Identity(1, 1))); }) ==
        ErrorCode::NotHurwitz);
}

TEST_CASE("SymPD validation") {
  CHECK(code_of([] { SymPD s(m2(1, 2, 0, 1)); }) == ErrorCode::NotSymmetric);
  CHECK(code_of([] { SymPD s(m2(1, 2, 2, 1)); }) == ErrorCode::NotPD);
  CHECK(SymPD(m2(2, 1, 1, 2)).min_eigenvalue() == doctest::Approx(1.0));
}

TEST_CASE("principal square root") {
  CHECK(principal_sqrt(SymPD(Mat::Identity(3, 3))).mat().isApprox(Mat::Identity(3, 3)));
  const Mat r = principal_sqrt(SymPD(Eigen::Vector2d(4, 9).asDiagonal())).mat();
  CHECK((r - Mat(Eigen::Vector2d(2, 3).asDiagonal())).norm() < 1e-14);

  const Mat q = m2(2, 1, 1, 2);
  const Mat b = principal_sqrt(SymPD(q)).mat();
  CHECK((b * b - q).norm() <= 1e-10 * q.norm());
  // Eigen-decomposition oracle: V diag(sqrt(l)) V^T with V = [1 1; 1 -1]/sqrt 2.
  const double s3 = std::sqrt(3.0);
  const Mat expected = 0.5 * m2(s3 + 1, s3 - 1, s3 - 1, s3 + 1);
  CHECK((b - expected).norm() < 1e-14);
  const Mat bi = principal_inv_sqrt(SymPD(q)).mat();
  CHECK((b * bi - Mat::Identity(2, 2)).norm() < 1e-13);
}

TEST_CASE("principal square root: random up to dimension 20") {
  std::mt19937_64 rng(2);
  for (Eigen::Index n = 1; n <= 20; ++n) {
    const Mat g = random_matrix(rng, n, n, 1.0);
    const Mat q = g * g.transpose() + 0.1 * Mat::Identity(n, n);
    const Mat b = principal_sqrt(SymPD(q)).mat();
    CHECK((b * b - q).norm() <= 1e-10 * q.norm());
  }
}

TEST_CASE("spectral norm") {
  CHECK(spectral_norm(Eigen::Vector2d(3, -4).asDiagonal().toDenseMatrix()) == doctest::Approx(4.0));
  CHECK(spectral_norm(Mat::Zero(3, 2)) == 0.0);
  CHECK(spectral_norm(m2(0, 1, 0, 0)) == doctest::Approx(1.0));
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Mat m = random_matrix(rng, 3, 4, 2.0);
    CHECK(spectral_norm(m) == doctest::Approx(spectral_norm(m.transpose())).epsilon(1e-12));
    CHECK(spectral_norm(-2.5 * m) == doctest::Approx(2.5 * spectral_norm(m)).epsilon(1e-12));
  }
}

TEST_CASE("spectral radius") {
  CHECK(spectral_radius(Mat::Identity(2, 2)) == doctest::Approx(1.0));
  CHECK(spectral_radius(m2(0, 1, 0, 0)) < 1e-12);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const Mat m = m2(u(rng), u(rng), u(rng), u(rng));
    CHECK(spectral_radius(m) == doctest::Approx(testing::radius_2x2(m)).epsilon(1e-10));
  }
}

TEST_CASE("Hurwitz predicate") {
  CHECK(is_hurwitz(m2(-1, 0.5, -1, -2)));
  CHECK_FALSE(is_hurwitz(m2(0, 1, -1, 0)));
  CHECK_FALSE(is_hurwitz(Mat::Constant(1, 1, 1.0)));
}

TEST_CASE("Schur test for nonnegative matrices") {
  const auto half = is_schur_positive(0.5 * Mat::Identity(2, 2));
  REQUIRE(half.schur);
  REQUIRE(half.witness);
  CHECK((*half.witness - Vec::Ones(2)).norm() < 1e-15);

  const auto edge = is_schur_positive(m2(1, 0, 0, 0.5));
  CHECK_FALSE(edge.schur);
  CHECK_FALSE(edge.witness);

  CHECK(code_of([] { is_schur_positive(m2(0.1, -0.1, 0, 0.1)); }) == ErrorCode::NegativeEntry);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.6);
  for (int k = 0; k < 100; ++k) {
    const Mat m = m2(u(rng), u(rng), u(rng), u(rng));
    const auto r = is_schur_positive(m);
    CHECK(r.schur == (testing::radius_2x2(m) < 1.0 - 1e-12));
    if (r.schur) {
      const Vec& p = *r.witness;
      CHECK((p.array() > 0.0).all());
      CHECK(((m.transpose() * p).array() < p.array()).all());
    }
  }
}

TEST_CASE("expm: trivial cases") {
  std::mt19937_64 rng(6);
  const Mat a = random_matrix(rng, 3, 3, 2.0);
  CHECK(expm(a, 0.0).isApprox(Mat::Identity(3, 3)));
  const Mat d = expm(Eigen::Vector2d(-1, -2).asDiagonal().toDenseMatrix(), 1.0);
  CHECK(d(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(d(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  const Mat rot = expm(m2(0, 1, -1, 0), std::numbers::pi / 2);
  CHECK((rot - m2(0, 1, -1, 0)).norm() < 1e-14);
}

TEST_CASE("expm: agrees with Eigen's exponential and the semigroup law") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + k % 5);
    Mat a = random_matrix(rng, n, n, 1.0);
    a *= (10.0 * u(rng)) / std::max(1e-12, a.norm());
    const double s = u(rng), t = u(rng);
    CHECK(testing::rel_diff(expm(a, t), testing::expm_oracle(a, t)) < 1e-11);
    const Mat lhs = expm(a, s + t);
    CHECK((lhs - expm(a, s) * expm(a, t)).norm() <= 1e-9 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("expm: stiff generator") {
  const Mat a = m2(-1, 0.5, -1000, -2000);
  CHECK(testing::rel_diff(expm(a, 0.3), testing::expm_oracle(a, 0.3)) < 1e-11);
}

TEST_CASE("expm: overflow is reported") {
  CHECK(code_of([] { expm(Mat::Constant(1, 1, 1000.0), 10.0); }) == ErrorCode::Overflow);
}
