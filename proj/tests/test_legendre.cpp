#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sharpmin/errors.hpp"
#include "sharpmin/legendre.hpp"

using namespace sharpmin;

namespace {

GridFunction grid_of(const ClosedForm& f, std::vector<double> lo, std::vector<double> hi,
                     std::vector<std::size_t> res) {
  return sample_to_grid(f, std::move(lo), std::move(hi), std::move(res));
}

std::vector<double> finite_raw(const GridFunction& g) {
  std::vector<double> v;
  for (auto x : g.values()) v.push_back(x.raw());
  return v;
}

}  // namespace

TEST_CASE("1D conjugate matches the double-loop oracle") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> val(0.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 5 + k;
    std::vector<Extended> v(n);
    for (auto& x : v) x = val(rng);
    if (k % 3 == 0) v[n / 2] = Extended::infinity();
    const GridFunction f({-1.0}, {2.0}, {n}, v);
    const DualGrid dual({std::max(1.0, required_dual_range(f)[0])}, {2 * n + 1});
    const auto fs = conjugate(f, dual);
    const auto ref = oracle::conjugate_1d(f.axis_coordinates(0), finite_raw(f),
                                          fs.axis_coordinates(0));
    for (std::size_t j = 0; j < fs.size(); ++j)
      CHECK(fs.value(j).value() == doctest::Approx(ref[j]).epsilon(1e-12));
  }
}

TEST_CASE("factorized conjugate matches the direct transform in 2D and 3D") {
  const auto f2 = grid_of(make_abs_sin({0.1, -0.2}), {-1, -1}, {1, 1}, {13, 9});
  const auto d2 = auto_dual_grid(f2);
  const auto a = conjugate(f2, d2), b = conjugate_direct(f2, d2);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a.value(i).value() == doctest::Approx(b.value(i).value()).epsilon(1e-12));
  const auto f3 = grid_of(make_quadratic({0, 0, 0}), {-1, -1, -1}, {1, 1, 1}, {5, 6, 7});
  const auto d3 = auto_dual_grid(f3);
  const auto c = conjugate(f3, d3), d = conjugate_direct(f3, d3);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(c.value(i).value() == doctest::Approx(d.value(i).value()).epsilon(1e-12));
}

TEST_CASE("biconjugate of |x| reproduces it") {
  const auto f = grid_of(make_norm_cone({0.0}, 1.0), {-1}, {1}, {401});
  const auto tr = legendre_transform(f, auto_dual_grid(f));
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(std::abs(tr.biconjugate.value(i).value() - f.value(i).value()) <= 1e-9);
  CHECK(tr.fenchel_young_violation <= 1e-9);
}

TEST_CASE("the dual range guard") {
  const auto f = grid_of(make_norm_cone({0.0}, 1.0), {-1}, {1}, {21});
  CHECK(required_dual_range(f)[0] == doctest::Approx(1.0));
  try {
    conjugate(f, DualGrid({0.5}, {21}));
    FAIL("expected DualRangeError");
  } catch (const DualRangeError& e) {
    CHECK(e.required()[0] == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(DualGrid({0.0}, {5}), InputError);
  CHECK_THROWS_AS(DualGrid({1.0}, {1}), InputError);
}

TEST_CASE("auto dual grid contains xi = 0") {
  const auto f = grid_of(make_quadratic({0.0}), {-1}, {1}, {10});
  const auto d = auto_dual_grid(f);
  CHECK(d.resolution(0) % 2 == 1);
  const auto shape = d.shape();
  CHECK(shape.coordinate(0, d.resolution(0) / 2) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("convex envelope matches the chord oracle and the biconjugate") {
  const auto f = grid_of(make_double_well({0.0}), {-2}, {2}, {81});
  const auto env = convex_envelope_1d(f);
  const auto ref = oracle::envelope_1d(f.axis_coordinates(0), finite_raw(f));
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(env.value(i).value() == doctest::Approx(ref[i]).epsilon(1e-12));
  const auto dual = auto_dual_grid(f);
  const auto bi = biconjugate(f, dual);
  const double tol = std::max(1e-6, 2 * f.max_step() * dual.half_width(0));
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(std::abs(bi.value(i).value() - env.value(i).value()) <= tol);
  CHECK(midpoint_convexity_violation(env) <= 1e-12);
  CHECK(midpoint_convexity_violation(f) > 1e-3);
}

TEST_CASE("envelope is +inf outside the finite range") {
  const GridFunction f({0.0}, {4.0}, {5}, {Extended::infinity(), 1.0, 0.0, 1.0, Extended::infinity()});
  const auto env = convex_envelope_1d(f);
  CHECK(env.value(0).is_infinite());
  CHECK(env.value(2).value() == 0.0);
  CHECK(env.value(4).is_infinite());
  const GridFunction lone({0.0}, {1.0}, {2}, {Extended::infinity(), 1.0});
  CHECK_THROWS_AS(convex_envelope_1d(lone), PreconditionError);
}

TEST_CASE("biconjugate sharpness of |x| + sin^2(3x) under refinement") {
  const auto reports = biconjugate_refinement(make_abs_sin({0.0}), {-2.0}, {2.0}, {0.0},
                                              {0.1, 0.05, 0.025});
  REQUIRE(reports.size() == 3);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : reports) {
    CHECK(r.agree);
    const double gap = std::abs(r.modulus - r.biconjugate_modulus);
    CHECK(gap <= 5 * r.grid_step);
    CHECK(gap <= prev + 1e-12);
    prev = gap;
    CHECK(r.fenchel_young_violation <= 1e-9);
  }
}

TEST_CASE("biconjugate sharpness requires a minimizing base") {
  const auto f = grid_of(make_quadratic({0.0}), {-1}, {1}, {11});
  CHECK_THROWS_AS(verify_biconjugate_sharpness(f, 0, auto_dual_grid(f)), PreconditionError);
}
