#include "sharpmin/tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "sharpmin/errors.hpp"

namespace sharpmin {

namespace {

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

// Candidate exits from a location to the node skeleton: (node, distance).
struct Exit {
  std::size_t node;
  double cost;
};

std::vector<Exit> exits(const MetricTree& t, const TreeLocation& loc) {
  if (loc.is_node()) return {{loc.node(), 0.0}};
  const TreeEdge& e = t.edge(loc.edge());
  return {{e.from, loc.offset()}, {e.to, e.length - loc.offset()}};
}

}  // namespace

std::size_t TreeLocation::node() const {
  if (!on_node_) throw InputError("tree location is not a node");
  return index_;
}

std::size_t TreeLocation::edge() const {
  if (on_node_) throw InputError("tree location is a node, not an edge point");
  return index_;
}

MetricTree::MetricTree(std::size_t node_count, std::vector<TreeEdge> edges)
    : MetricTree(default_labels(node_count), std::move(edges)) {}

MetricTree::MetricTree(std::vector<std::string> labels, std::vector<TreeEdge> edges)
    : labels_(std::move(labels)), edges_(std::move(edges)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw InputError("tree: no nodes");
  if (edges_.size() + 1 != n) {
    std::ostringstream os;
    os << "tree: " << n << " nodes need " << n - 1 << " edges, got " << edges_.size();
    throw InputError(os.str());
  }
  incident_.assign(n, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const TreeEdge& ed = edges_[e];
    if (ed.from >= n || ed.to >= n) throw InputError("tree: edge endpoint out of range");
    if (ed.from == ed.to) throw InputError("tree: self loop");
    if (!(std::isfinite(ed.length) && ed.length > 0.0))
      throw InputError("tree: edge lengths must be finite and positive");
    incident_[ed.from].push_back(e);
    incident_[ed.to].push_back(e);
  }
  // Root at node 0; n - 1 edges plus connectivity implies acyclic.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  parent_.assign(n, kNone);
  depth_.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> order{0};
  seen[0] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const std::size_t u = order[head];
    for (std::size_t e : incident_[u]) {
      const std::size_t w = edges_[e].from == u ? edges_[e].to : edges_[e].from;
      if (seen[w]) continue;
      seen[w] = true;
      parent_[w] = u;
      depth_[w] = depth_[u] + 1;
      order.push_back(w);
    }
  }
  if (order.size() != n) throw InputError("tree: graph is not connected");

  node_dist_.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t src = 0; src < n; ++src) {
    std::vector<std::size_t> stack{src};
    std::vector<bool> visited(n, false);
    visited[src] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t e : incident_[u]) {
        const std::size_t w = edges_[e].from == u ? edges_[e].to : edges_[e].from;
        if (visited[w]) continue;
        visited[w] = true;
        node_dist_[src][w] = node_dist_[src][u] + edges_[e].length;
        stack.push_back(w);
      }
    }
  }
}

TreeLocation MetricTree::node(std::size_t n) const {
  if (n >= node_count()) throw InputError("tree: node index out of range");
  return TreeLocation::at_node(n);
}

TreeLocation MetricTree::point_on_edge(std::size_t e, double offset) const {
  if (e >= edge_count()) throw InputError("tree: edge index out of range");
  if (!(offset >= 0.0 && offset <= edges_[e].length))
    throw InputError("tree: offset outside the edge");
  return clamped_point(e, offset);
}

TreeLocation MetricTree::clamped_point(std::size_t e, double offset) const {
  const TreeEdge& ed = edges_[e];
  if (offset <= 0.0) return TreeLocation::at_node(ed.from);
  if (offset >= ed.length) return TreeLocation::at_node(ed.to);
  return TreeLocation(false, e, offset);
}

void MetricTree::validate(const TreeLocation& loc) const {
  if (loc.is_node()) {
    if (loc.node() >= node_count()) throw InputError("tree: node index out of range");
    return;
  }
  if (loc.edge() >= edge_count()) throw InputError("tree: edge index out of range");
  if (!(loc.offset() > 0.0 && loc.offset() < edges_[loc.edge()].length))
    throw InputError("tree: offset outside the edge interior");
}

std::vector<std::size_t> MetricTree::node_path(std::size_t a, std::size_t b) const {
  std::vector<std::size_t> up_a{a}, up_b{b};
  while (depth_[a] > depth_[b]) up_a.push_back(a = parent_[a]);
  while (depth_[b] > depth_[a]) up_b.push_back(b = parent_[b]);
  while (a != b) {
    up_a.push_back(a = parent_[a]);
    up_b.push_back(b = parent_[b]);
  }
  up_b.pop_back();  // common ancestor already in up_a
  up_a.insert(up_a.end(), up_b.rbegin(), up_b.rend());
  return up_a;
}

std::size_t MetricTree::edge_between(std::size_t a, std::size_t b) const {
  for (std::size_t e : incident_.at(a))
    if (edges_[e].from == b || edges_[e].to == b) return e;
  throw InputError("tree: nodes are not adjacent");
}

double tree_distance(const MetricTree& t, const TreeLocation& u, const TreeLocation& v) {
  t.validate(u);
  t.validate(v);
  if (!u.is_node() && !v.is_node() && u.edge() == v.edge())
    return std::abs(u.offset() - v.offset());
  double best = std::numeric_limits<double>::infinity();
  for (const Exit& a : exits(t, u))
    for (const Exit& b : exits(t, v))
      best = std::min(best, a.cost + t.node_distance(a.node, b.node) + b.cost);
  return best;
}

TreeLocation tree_geodesic(const MetricTree& t, const TreeLocation& u, const TreeLocation& v,
                           double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InputError("geodesic parameter must lie in [0, 1]");
  t.validate(u);
  t.validate(v);
  if (s == 0.0) return u;
  if (s == 1.0) return v;

  if (!u.is_node() && !v.is_node() && u.edge() == v.edge())
    return t.clamped_point(u.edge(), u.offset() + s * (v.offset() - u.offset()));

  Exit ua{}, vb{};
  double total = std::numeric_limits<double>::infinity();
  for (const Exit& a : exits(t, u))
    for (const Exit& b : exits(t, v)) {
      const double len = a.cost + t.node_distance(a.node, b.node) + b.cost;
      if (len < total) {
        total = len;
        ua = a;
        vb = b;
      }
    }

  double remaining = s * total;
  // Leg 1: from u to its exit node along u's edge.
  if (!u.is_node()) {
    if (remaining <= ua.cost) {
      const TreeEdge& e = t.edge(u.edge());
      const double off = (ua.node == e.from) ? u.offset() - remaining : u.offset() + remaining;
      return t.clamped_point(u.edge(), off);
    }
    remaining -= ua.cost;
  }
  // Leg 2: along the node path.
  const auto path = t.node_path(ua.node, vb.node);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const std::size_t e = t.edge_between(path[i], path[i + 1]);
    const TreeEdge& ed = t.edge(e);
    if (remaining <= ed.length) {
      const double off = (ed.from == path[i]) ? remaining : ed.length - remaining;
      return t.clamped_point(e, off);
    }
    remaining -= ed.length;
  }
  // Leg 3: from v's entry node to v.
  if (v.is_node()) return v;
  const TreeEdge& e = t.edge(v.edge());
  const double off = (vb.node == e.from) ? remaining : e.length - remaining;
  return t.clamped_point(v.edge(), std::clamp(off, 0.0, e.length));
}

std::vector<TreeLocation> locations_at_distance(const MetricTree& t, const TreeLocation& u,
                                                double r) {
  if (!(r > 0.0)) throw InputError("locations_at_distance: radius must be positive");
  t.validate(u);
  std::vector<TreeLocation> out;
  // Walk outward from node `n`, having arrived through `via` (edge index or none),
  // with `left` distance still to cover.
  struct Frame {
    std::size_t node;
    std::size_t via;
    double left;
  };
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<Frame> stack;

  auto walk_edge = [&](std::size_t e, std::size_t start_node, double left) {
    const TreeEdge& ed = t.edge(e);
    const std::size_t far = ed.from == start_node ? ed.to : ed.from;
    if (left < ed.length) {
      out.push_back(t.point_on_edge(e, ed.from == start_node ? left : ed.length - left));
    } else if (left == ed.length) {
      out.push_back(t.node(far));
    } else {
      stack.push_back({far, e, left - ed.length});
    }
  };

  if (u.is_node()) {
    stack.push_back({u.node(), kNone, r});
  } else {
    const TreeEdge& ed = t.edge(u.edge());
    // Toward `from`, then toward `to`.
    const double to_from = u.offset();
    const double to_to = ed.length - u.offset();
    if (r < to_from) out.push_back(t.point_on_edge(u.edge(), u.offset() - r));
    else if (r == to_from) out.push_back(t.node(ed.from));
    else stack.push_back({ed.from, u.edge(), r - to_from});
    if (r < to_to) out.push_back(t.point_on_edge(u.edge(), u.offset() + r));
    else if (r == to_to) out.push_back(t.node(ed.to));
    else stack.push_back({ed.to, u.edge(), r - to_to});
  }
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    for (std::size_t e : t.incident(f.node))
      if (e != f.via) walk_edge(e, f.node, f.left);
  }
  return out;
}

std::vector<TreeLocation> sample_tree(const MetricTree& t, double spacing) {
  if (!(spacing > 0.0)) throw InputError("sample_tree: spacing must be positive");
  std::vector<TreeLocation> out;
  for (std::size_t n = 0; n < t.node_count(); ++n) out.push_back(t.node(n));
  for (std::size_t e = 0; e < t.edge_count(); ++e) {
    const double len = t.edge(e).length;
    const auto pieces = static_cast<std::size_t>(std::ceil(len / spacing - 1e-12));
    for (std::size_t k = 1; k < pieces; ++k)
      out.push_back(t.point_on_edge(e, len * static_cast<double>(k) / static_cast<double>(pieces)));
  }
  return out;
}

DistanceCombination::DistanceCombination(std::vector<DistanceTerm> terms)
    : terms_(std::move(terms)) {
  if (terms_.empty()) throw InputError("distance combination needs at least one term");
  for (const auto& term : terms_)
    if (!(term.coefficient >= 0.0) || !std::isfinite(term.coefficient))
      throw InputError("distance combination coefficients must be finite and nonnegative");
}

double DistanceCombination::operator()(const MetricTree& t, const TreeLocation& v) const {
  double sum = 0.0;
  for (const auto& term : terms_) sum += term.coefficient * tree_distance(t, v, term.anchor);
  return sum;
}

double DistanceCombination::lipschitz_bound() const {
  double sum = 0.0;
  for (const auto& term : terms_) sum += term.coefficient;
  return sum;
}

}  // namespace sharpmin
