#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sharpmin/errors.hpp"
#include "sharpmin/funcspace.hpp"
#include "sharpmin/sampling.hpp"

using namespace sharpmin;

TEST_CASE("extended reals absorb +inf and reject nan") {
  const Extended inf = Extended::infinity();
  CHECK((Extended(1.0) + inf).is_infinite());
  CHECK((inf + inf).is_infinite());
  CHECK((Extended(3.0) - Extended(1.0)).value() == 2.0);
  CHECK_THROWS_AS(inf - inf, ArithmeticError);
  CHECK_THROWS_AS(Extended(std::nan("")), ArithmeticError);
  CHECK_THROWS_AS(Extended(-std::numeric_limits<double>::infinity()), ArithmeticError);
  CHECK_THROWS_AS(inf.value(), ArithmeticError);
  CHECK(Extended(std::numeric_limits<double>::infinity()).is_infinite());
  CHECK(Extended(1.0) < inf);
}

TEST_CASE("point cloud validation") {
  CHECK_THROWS_AS(PointCloudFunction({{0.0}}, {0.0}, 0), InputError);
  CHECK_THROWS_AS(PointCloudFunction({{0.0}, {0.0}}, {0.0, 1.0}, 0), InputError);
  CHECK_THROWS_AS(PointCloudFunction({{0.0}, {1.0, 2.0}}, {0.0, 1.0}, 0), InputError);
  CHECK_THROWS_AS(PointCloudFunction({{0.0}, {1.0}}, {Extended::infinity(), 1.0}, 0), InputError);
  CHECK_THROWS_AS(PointCloudFunction({{0.0}, {1.0}}, {0.0}, 0), InputError);
  CHECK_THROWS_AS(PointCloudFunction({{0, 0, 0, 0}, {1, 0, 0, 0}}, {0.0, 1.0}, 0), InputError);
  PointCloudFunction f({{0.0}, {1.0}}, {0.0, Extended::infinity()}, 0);
  CHECK(f.size() == 2);
  CHECK(f.base_value() == 0.0);
}

TEST_CASE("grid coordinates end exactly on the upper bound") {
  GridFunction g({-1.0, 0.0}, {1.0, 0.3}, {3, 4}, std::vector<Extended>(12, 0.0));
  CHECK(g.coordinate(0, 2) == 1.0);
  CHECK(g.coordinate(1, 3) == 0.3);
  CHECK(g.step(0) == doctest::Approx(1.0));
  const auto mi = g.multi_index(7);
  CHECK(mi[0] == 1);
  CHECK(mi[1] == 3);
  const std::size_t idx[2] = {1, 3};
  CHECK(g.flat_index(idx) == 7);
  const double p[2] = {0.9, 0.01};
  CHECK(g.nearest_node(p) == 8);
}

TEST_CASE("oblique cone value") {
  const ConeParams c(std::numbers::pi / 3, std::numbers::pi / 6, {1.0, 0.0}, {0.0, 1.0});
  CHECK(eval_cone(c, {1.0, 1.0}) == doctest::Approx(0.5773502691896257).epsilon(1e-15));
  CHECK(eval_cone(c, {1.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(ConeParams(0.0, 0.1, {0, 0}, {1, 0}), InputError);
  CHECK_THROWS_AS(ConeParams(1.0, 0.1, {0, 0}, {1, 1}), InputError);
}

TEST_CASE("closed forms") {
  const double x[1] = {1.5};
  CHECK(make_tent({0.0})(x).value() == doctest::Approx(0.5));
  const double far[1] = {2.0};
  CHECK(make_tent({0.0})(far).is_infinite());
  CHECK(make_norm_cone({0.0}, 2.0)(x).value() == 3.0);
  CHECK_THROWS_AS(make_norm_cone({0.0}, 0.0), InputError);
  CHECK(make_quadratic({0.0})(x).value() == 2.25);
  const double one[1] = {1.0};
  CHECK(make_double_well({0.0})(one).value() == 0.0);
}

TEST_CASE("sampling snaps the base onto a node") {
  SamplingSpec spec{{-1.0}, {1.0}, {5}, {0.1}};
  const auto f = sample_to_cloud(make_quadratic({0.1}), spec);
  CHECK(f.base_point()[0] == 0.1);
  CHECK(f.base_value() == 0.0);
  SamplingSpec outside{{-1.0}, {1.0}, {5}, {3.0}};
  CHECK_THROWS_AS(sample_to_cloud(make_quadratic({0.0}), outside), InputError);
  SamplingSpec tent_edge{{-3.0}, {3.0}, {7}, {2.0}};
  CHECK_THROWS_AS(sample_to_cloud(make_tent({0.0}), tent_edge), InputError);
  CHECK(resolution_for_step(-2.0, 2.0, 0.25) == 17);
}

TEST_CASE("metric validation reports each violated axiom") {
  CHECK(validate_metric({{0, 1}, {1, 0}}).ok());
  const auto asym = validate_metric({{0, 1}, {2, 0}});
  REQUIRE(asym.violations.size() == 1);
  CHECK(asym.violations[0].kind == MetricViolation::Kind::Symmetry);
  const auto tri = validate_metric({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}});
  REQUIRE(tri.violations.size() == 1);
  CHECK(tri.violations[0].kind == MetricViolation::Kind::Triangle);
  CHECK(tri.violations[0].magnitude == doctest::Approx(3.0));
  const auto pos = validate_metric({{0, 0}, {0, 0}});
  REQUIRE(pos.violations.size() == 1);
  CHECK(pos.violations[0].kind == MetricViolation::Kind::Positivity);
  CHECK_FALSE(validate_metric({{1, 1}, {1, 0}}).ok());
  CHECK_FALSE(validate_metric({{0, 1}}).ok());
  CHECK_THROWS_AS(FiniteMetricSpace({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}), InputError);
}

TEST_CASE("random metric spaces satisfy the axioms") {
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const auto m = random_metric_space(15, rng);
    CHECK(validate_metric(m.matrix()).ok());
  }
}
