#pragma once

#include <cstddef>
#include <random>

#include "sharpmin/funcspace.hpp"
#include "sharpmin/tree.hpp"

namespace sharpmin {

using Rng = std::mt19937_64;

/// Random tree on n >= 2 nodes: node i attaches to a uniform earlier node,
/// edge lengths uniform in [0.2, 2].
MetricTree random_tree(std::size_t n, Rng& rng);

/// Uniform edge, uniform offset; nodes come out of the endpoint rounding.
TreeLocation random_location(const MetricTree& t, Rng& rng);

/// n points uniform in [0, 10]^2 with their Euclidean distances.
FiniteMetricSpace random_metric_space(std::size_t n, Rng& rng);

/// Cloud with dimension d, n distinct points in [-5, 5]^d, values uniform in
/// [0, 10]; base is the smallest-index argmin.
PointCloudFunction random_cloud(std::size_t d, std::size_t n, Rng& rng);

}  // namespace sharpmin
