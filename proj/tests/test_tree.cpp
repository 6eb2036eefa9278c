#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sharpmin/errors.hpp"
#include "sharpmin/sampling.hpp"
#include "sharpmin/tree.hpp"

using namespace sharpmin;

namespace {

MetricTree path3() { return MetricTree(3, {{0, 1, 1.0}, {1, 2, 2.0}}); }

}  // namespace

TEST_CASE("tree construction rejects non-trees") {
  CHECK_THROWS_AS(MetricTree(3, {{0, 1, 1.0}}), InputError);
  CHECK_THROWS_AS(MetricTree(3, {{0, 1, 1.0}, {0, 1, 1.0}}), InputError);
  CHECK_THROWS_AS(MetricTree(2, {{0, 1, 0.0}}), InputError);
  CHECK_THROWS_AS(MetricTree(2, {{0, 2, 1.0}}), InputError);
  CHECK_THROWS_AS(MetricTree(2, {{0, 1, std::nan("")}}), InputError);
}

TEST_CASE("edge endpoints canonicalize to nodes") {
  const auto t = path3();
  CHECK(t.point_on_edge(0, 0.0) == t.node(0));
  CHECK(t.point_on_edge(1, 2.0) == t.node(2));
  CHECK_FALSE(t.point_on_edge(1, 0.5).is_node());
  CHECK_THROWS_AS(t.point_on_edge(1, 2.5), InputError);
}

TEST_CASE("tree distance on a path") {
  const auto t = path3();
  const auto a = t.point_on_edge(0, 0.25), b = t.point_on_edge(1, 1.5);
  CHECK(tree_distance(t, a, b) == doctest::Approx(0.75 + 1.5));
  CHECK(tree_distance(t, t.point_on_edge(1, 0.5), b) == doctest::Approx(1.0));
  CHECK(tree_distance(t, a, a) == 0.0);
}

TEST_CASE("tree distance matches a Dijkstra oracle") {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const auto t = random_tree(2 + k % 12, rng);
    for (int s = 0; s < 50; ++s) {
      const auto u = random_location(t, rng), v = random_location(t, rng);
      CHECK(tree_distance(t, u, v) == doctest::Approx(oracle::tree_distance(t, u, v)).epsilon(1e-12));
    }
  }
}

TEST_CASE("geodesic endpoint identities") {
  Rng rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 300; ++k) {
    const auto t = random_tree(8, rng);
    const auto u = random_location(t, rng), v = random_location(t, rng);
    const double s = unit(rng);
    const double D = tree_distance(t, u, v);
    const auto g = tree_geodesic(t, u, v, s);
    worst = std::max(worst, std::abs(tree_distance(t, g, u) - s * D));
    worst = std::max(worst, std::abs(tree_distance(t, g, v) - (1 - s) * D));
  }
  CHECK(worst <= 1e-12);
  const auto t = path3();
  CHECK(tree_geodesic(t, t.node(0), t.node(2), 0.0) == t.node(0));
  CHECK(tree_geodesic(t, t.node(0), t.node(2), 1.0) == t.node(2));
  CHECK_THROWS_AS(tree_geodesic(t, t.node(0), t.node(2), 1.5), InputError);
}

TEST_CASE("locations at a distance cover every branch") {
  // Star with center 0 and three unit legs.
  const MetricTree star(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  const auto around = locations_at_distance(star, star.node(0), 0.5);
  CHECK(around.size() == 3);
  for (const auto& p : around) CHECK(tree_distance(star, p, star.node(0)) == doctest::Approx(0.5));
  const auto from_leaf = locations_at_distance(star, star.node(1), 1.5);
  CHECK(from_leaf.size() == 2);
  CHECK(locations_at_distance(star, star.node(1), 3.0).empty());
  CHECK(locations_at_distance(star, star.node(1), 1.0).size() == 1);
}

TEST_CASE("sample_tree spacing") {
  const auto t = path3();
  const auto s = sample_tree(t, 0.5);
  CHECK(s.size() == 3 + 1 + 3);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) CHECK_FALSE(s[i] == s[j]);
}

TEST_CASE("distance combinations") {
  const auto t = path3();
  const DistanceCombination phi({{1.0, t.node(0)}, {0.5, t.node(2)}});
  CHECK(phi(t, t.node(1)) == doctest::Approx(1.0 + 1.0));
  CHECK(phi.lipschitz_bound() == 1.5);
  CHECK_THROWS_AS(DistanceCombination({}), InputError);
  CHECK_THROWS_AS(DistanceCombination({{-1.0, t.node(0)}}), InputError);
}
