#include "sharpmin/sampling.hpp"

#include <algorithm>

#include "sharpmin/errors.hpp"

namespace sharpmin {

MetricTree random_tree(std::size_t n, Rng& rng) {
  if (n < 2) throw InputError("random_tree: need at least two nodes");
  std::uniform_real_distribution<double> length(0.2, 2.0);
  std::vector<TreeEdge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    const std::size_t p = parent(rng);
    edges.push_back({p, i, length(rng)});
  }
  return MetricTree(n, std::move(edges));
}

TreeLocation random_location(const MetricTree& t, Rng& rng) {
  std::uniform_int_distribution<std::size_t> edge(0, t.edge_count() - 1);
  const std::size_t e = edge(rng);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  return t.point_on_edge(e, frac(rng) * t.edge(e).length);
}

FiniteMetricSpace random_metric_space(std::size_t n, Rng& rng) {
  if (n < 1) throw InputError("random_metric_space: empty space");
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::vector<Point> pts;
  while (pts.size() < n) {
    Point p{coord(rng), coord(rng)};
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(std::move(p));
  }
  DistanceMatrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = distance(pts[i], pts[j]);
  return FiniteMetricSpace(std::move(m));
}

PointCloudFunction random_cloud(std::size_t d, std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::vector<Point> pts;
  while (pts.size() < n) {
    Point p(d);
    for (double& c : p) c = coord(rng);
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(std::move(p));
  }
  std::vector<Extended> vals(n);
  std::size_t base = 0;
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = value(rng);
    if (vals[i].raw() < vals[base].raw()) base = i;
  }
  return PointCloudFunction(std::move(pts), std::move(vals), base);
}

}  // namespace sharpmin
