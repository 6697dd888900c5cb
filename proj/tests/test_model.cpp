#include "support.hpp"

#include "sph/config.hpp"
#include "sph/error.hpp"
#include "sph/model.hpp"

#include <doctest.h>

using namespace sph;
using namespace sph::model;
using linalg::Mat;

namespace {

Mat m2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

std::size_t count(const std::vector<Finding>& fs, FindingKind k) {
  return static_cast<std::size_t>(std::count_if(fs.begin(), fs.end(), [k](const Finding& f) { return f.kind == k; }));
}

}  // namespace

TEST_CASE("validate: bundled example is clean") {
  CHECK(validate(config::example(1).system).empty());
  CHECK(validate(config::example(2).system).empty());
}

TEST_CASE("validate: wrong jump shape") {
  auto spec = config::example(1).system;
  spec.jumps[0].matrix = Mat::Identity(3, 2);
  const auto fs = validate(spec);
  CHECK(fs.size() == 2);
  CHECK(count(fs, FindingKind::ShapeMismatch) == 2);
}

TEST_CASE("validate: fast count differs without augmentation") {
  HybridSystemSpec spec;
  spec.epsilon = 0.1;
  spec.modes.push_back({"a", {Speed::Slow, Speed::Fast, Speed::Slow}, -Mat::Identity(3, 3)});
  spec.modes.push_back({"b", {Speed::Slow, Speed::Fast, Speed::Fast}, -Mat::Identity(3, 3)});
  spec.jumps.push_back({"id", Mat::Identity(3, 3)});
  const auto fs = validate(spec);
  CHECK(fs.size() == 1);
  CHECK(count(fs, FindingKind::NonConstantFastCount) == 1);
  spec.augment = true;
  CHECK(validate(spec).empty());
}

TEST_CASE("validate: epsilon range and degenerate split") {
  auto spec = config::example(1).system;
  spec.epsilon = 1.0;
  CHECK(count(validate(spec), FindingKind::EpsilonRange) == 1);
  spec.epsilon = 0.1;
  spec.modes[0].mask = {Speed::Slow, Speed::Slow};
  spec.modes[1].mask = {Speed::Slow, Speed::Slow};
  CHECK(count(validate(spec), FindingKind::DegenerateSplit) == 1);
}

TEST_CASE("permutation from mask") {
  CHECK(build_permutation({Speed::Slow, Speed::Fast}) == Mat::Identity(2, 2));
  CHECK(build_permutation({Speed::Fast, Speed::Slow}) == m2(0, 1, 1, 0));
  CHECK(build_permutation({Speed::Slow, Speed::Slow, Speed::Slow}) == Mat::Identity(3, 3));
  const Mat s = build_permutation({Speed::Fast, Speed::Slow, Speed::Fast, Speed::Slow});
  Mat expected = Mat::Zero(4, 4);
  expected(0, 1) = expected(1, 3) = expected(2, 0) = expected(3, 2) = 1.0;
  CHECK(s == expected);
}

TEST_CASE("permutation invariants on random masks") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    const auto mask = testing::random_mask(rng, 1 + k % 3, 1 + k % 4);
    const Mat s = build_permutation(mask);
    const auto n = static_cast<Eigen::Index>(mask.size());
    CHECK(s * s.transpose() == Mat::Identity(n, n));
    Mode m{"m", mask, Mat::Identity(n, n)};
    const double eps = 0.01;
    const Mat d = s * selector_matrix(m, eps) * s.transpose();
    const auto nz = static_cast<Eigen::Index>(m.fast_count());
    Mat expected = Mat::Identity(n, n);
    expected.bottomRightCorner(nz, nz) *= eps;
    CHECK(d == expected);
  }
}

TEST_CASE("reorder: example blocks") {
  const auto sys = reorder(config::example(1).system);
  CHECK(sys.n_x == 1);
  CHECK(sys.n_z == 1);
  CHECK(sys.flows[1] == m2(1, 3, -2, -2.5));
  CHECK(sys.jumps.at({0, 0, 1}) == m2(0, 1, 1, 0));
  CHECK(sys.jumps.at({1, 0, 0}) == m2(0, 1, 1, 0));
  for (std::size_t i = 0; i < 2; ++i) {
    const Mat& s = sys.permutations[i];
    CHECK(s.transpose() * sys.flows[i] * s == config::example(1).system.modes[i].flow);
  }
}

TEST_CASE("reorder: all-slow-first single mode is unchanged") {
  HybridSystemSpec spec;
  spec.epsilon = 0.1;
  const Mat a = m2(-1, 2, 3, -4);
  spec.modes.push_back({"m", {Speed::Slow, Speed::Fast}, a});
  spec.jumps.push_back({"id", Mat::Identity(2, 2)});
  CHECK(reorder(spec).flows[0] == a);
}

TEST_CASE("reorder: invalid spec throws") {
  auto spec = config::example(1).system;
  spec.modes[0].mask.pop_back();
  CHECK_THROWS_AS(reorder(spec), Error);
}

TEST_CASE("augment: constant dimension is unchanged") {
  const auto spec = config::example(1).system;
  const auto aug = augment(spec, 10.0);
  for (std::size_t i = 0; i < spec.modes.size(); ++i) CHECK(aug.modes[i].flow == spec.modes[i].flow);
  CHECK(aug.jumps[0].matrix == spec.jumps[0].matrix);
}

TEST_CASE("augment: (2,1) and (1,2) modes") {
  HybridSystemSpec spec;
  spec.epsilon = 0.1;
  spec.augment = true;
  spec.modes.push_back({"a", {Speed::Slow, Speed::Slow, Speed::Fast}, -Mat::Identity(3, 3)});
  spec.modes.push_back({"b", {Speed::Slow, Speed::Fast, Speed::Fast}, -2 * Mat::Identity(3, 3)});
  spec.jumps.push_back({"id", Mat::Identity(3, 3)});
  spec.transitions = {{0, 0, 1}, {1, 0, 0}};
  const auto aug = augment(spec, 7.0);
  REQUIRE(aug.modes[0].dim() == 4);
  REQUIRE(aug.modes[1].dim() == 4);
  CHECK(aug.modes[0].mask.back() == Speed::Fast);
  CHECK(aug.modes[1].mask.back() == Speed::Slow);
  CHECK(aug.modes[0].flow(3, 3) == -7.0);
  CHECK(aug.modes[0].slow_count() == 2);
  CHECK(aug.modes[1].slow_count() == 2);
  CHECK(validate(aug).empty());
  CHECK(aug.transitions == spec.transitions);
  const auto sys = reorder(aug);
  CHECK(sys.n_x == 2);
  CHECK(sys.n_z == 2);
}

TEST_CASE("default augmentation rate") {
  CHECK(default_augment_lambda(0.01) == doctest::Approx(1000.0));
  CHECK(default_augment_lambda(0.01, 1.0, 3.0) == doctest::Approx(30.0));
}

TEST_CASE("schedules") {
  const std::vector<Transition> tr{{0, 0, 1}, {1, 0, 0}};
  const auto p = periodic_schedule(tr, 0.25, 1.0, {0, 1});
  REQUIRE(p.events.size() == 4);
  CHECK(p.events[0].t == 0.0);
  CHECK(p.events[2].mode == 0);
  CHECK(p.min_gap() == doctest::Approx(0.25));
  CHECK_NOTHROW(validate_schedule(tr, 2, p));

  const auto r = random_schedule(tr, 0.1, 0.3, 20.0, 1, 42);
  CHECK(r.min_gap() >= 0.1 - 1e-12);
  CHECK_NOTHROW(validate_schedule(tr, 2, r));
  const auto r2 = random_schedule(tr, 0.1, 0.3, 20.0, 1, 42);
  CHECK(r2.events.size() == r.events.size());
  CHECK(r2.events.back().t == r.events.back().t);

  EventSchedule bad = p;
  bad.events[1].jump = 3;
  CHECK_THROWS_AS(validate_schedule(tr, 2, bad), Error);
  bad = p;
  bad.events[2].t = bad.events[1].t;
  CHECK_THROWS_AS(validate_schedule(tr, 2, bad), Error);
  CHECK_THROWS_AS(periodic_schedule({{0, 0, 1}}, 0.25, 1.0, {0, 1}), Error);
}
