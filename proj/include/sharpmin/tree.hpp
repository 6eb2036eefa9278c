#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sharpmin {

struct TreeEdge {
  std::size_t from;
  std::size_t to;
  double length;
};

/// A point of a metric tree: a node, or an interior point of an edge at
/// distance offset() from edge(from). Locations at offset 0 or at the full
/// edge length are always stored as nodes, so equality is exact.
class TreeLocation {
 public:
  static TreeLocation at_node(std::size_t node) { return TreeLocation(true, node, 0.0); }

  bool is_node() const { return on_node_; }
  std::size_t node() const;
  std::size_t edge() const;
  double offset() const { return offset_; }

  friend bool operator==(const TreeLocation&, const TreeLocation&) = default;

 private:
  TreeLocation(bool on_node, std::size_t index, double offset)
      : on_node_(on_node), index_(index), offset_(offset) {}
  friend class MetricTree;

  bool on_node_;
  std::size_t index_;
  double offset_;
};

/// Connected acyclic graph with positive edge lengths, viewed as the
/// continuum geodesic space obtained by gluing segments.
class MetricTree {
 public:
  /// Throws InputError unless the edges form a spanning tree on the nodes
  /// with finite positive lengths.
  MetricTree(std::vector<std::string> labels, std::vector<TreeEdge> edges);
  /// Unlabelled nodes 0..n-1.
  MetricTree(std::size_t node_count, std::vector<TreeEdge> edges);

  std::size_t node_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const TreeEdge& edge(std::size_t e) const { return edges_.at(e); }
  const std::vector<TreeEdge>& edges() const { return edges_; }
  const std::string& label(std::size_t n) const { return labels_.at(n); }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Edge indices incident to a node.
  const std::vector<std::size_t>& incident(std::size_t n) const { return incident_.at(n); }

  double node_distance(std::size_t a, std::size_t b) const { return node_dist_[a][b]; }

  TreeLocation node(std::size_t n) const;
  /// Throws InputError for an offset outside [0, length]; canonicalizes
  /// the endpoints to node locations.
  TreeLocation point_on_edge(std::size_t e, double offset) const;
  /// Throws InputError if loc does not belong to this tree.
  void validate(const TreeLocation& loc) const;

  /// Nodes along the unique path a -> b, both included.
  std::vector<std::size_t> node_path(std::size_t a, std::size_t b) const;
  /// Index of the edge joining adjacent nodes a and b.
  std::size_t edge_between(std::size_t a, std::size_t b) const;

 private:
  TreeLocation clamped_point(std::size_t e, double offset) const;
  friend TreeLocation tree_geodesic(const MetricTree&, const TreeLocation&, const TreeLocation&,
                                    double);

  std::vector<std::string> labels_;
  std::vector<TreeEdge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> depth_;
  std::vector<std::vector<double>> node_dist_;
};

/// Length of the unique path between u and v.
double tree_distance(const MetricTree& t, const TreeLocation& u, const TreeLocation& v);

/// Constant-speed geodesic point sigma(s) on the u-v path:
/// d(sigma(s), u) = s d(u, v) and d(sigma(s), v) = (1 - s) d(u, v).
/// Throws InputError for s outside [0, 1].
TreeLocation tree_geodesic(const MetricTree& t, const TreeLocation& u, const TreeLocation& v,
                           double s);

/// Every location at exactly distance r > 0 from u, one per branch that
/// reaches that far, in deterministic DFS order.
std::vector<TreeLocation> locations_at_distance(const MetricTree& t, const TreeLocation& u,
                                                double r);

/// All nodes plus interior edge points, each edge cut into equal pieces of
/// length at most spacing.
std::vector<TreeLocation> sample_tree(const MetricTree& t, double spacing);

struct DistanceTerm {
  double coefficient;
  TreeLocation anchor;
};

/// v -> sum_i c_i d(v, a_i) with c_i >= 0; geodesically convex on trees.
class DistanceCombination {
 public:
  /// Throws InputError for an empty term list or a negative coefficient.
  explicit DistanceCombination(std::vector<DistanceTerm> terms);

  double operator()(const MetricTree& t, const TreeLocation& v) const;
  const std::vector<DistanceTerm>& terms() const { return terms_; }
  /// sum_i c_i, an upper bound for the Lipschitz constant and the local slope.
  double lipschitz_bound() const;

 private:
  std::vector<DistanceTerm> terms_;
};

}  // namespace sharpmin
