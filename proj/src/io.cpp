#include "sharpmin/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sharpmin/errors.hpp"

namespace sharpmin::io {

namespace {

// Rewrites library exceptions raised while walking a document.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw InputError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

std::size_t index_from(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw InputError(std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<double> reals(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw InputError(std::string(what) + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void check_dimension(const json& j, std::size_t d) {
  if (j.contains("dimension") && index_from(j["dimension"], "dimension") != d)
    throw InputError("dimension field disagrees with the data");
}

Point center_of(const json& j, std::size_t d) {
  if (!j.contains("center")) return Point(d, 0.0);
  Point c = reals(j["center"], "center");
  if (c.size() != d) throw InputError("center has the wrong dimension");
  return c;
}

}  // namespace

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << origin << ":" << line << ":" << column << ": JSON parse error";
    throw InputError(os.str());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

Extended extended_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return Extended::infinity();
  if (!j.is_number()) throw InputError("values must be numbers or \"inf\"");
  return Extended(j.get<double>());
}

json extended_to_json(Extended x) {
  if (x.is_infinite()) return "inf";
  return x.value();
}

json real_to_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

PointCloudFunction cloud_from_json(const json& j) {
  return guarded("point cloud", [&] {
    std::vector<Point> pts;
    const json& jp = field(j, "points");
    if (!jp.is_array()) throw InputError("points must be an array");
    for (const auto& p : jp) pts.push_back(reals(p, "point"));
    const json& jv = field(j, "values");
    if (!jv.is_array()) throw InputError("values must be an array");
    std::vector<Extended> vals;
    for (const auto& v : jv) vals.push_back(extended_from_json(v));
    if (!pts.empty()) check_dimension(j, pts.front().size());
    return PointCloudFunction(std::move(pts), std::move(vals),
                              index_from(field(j, "base_index"), "base_index"));
  });
}

json cloud_to_json(const PointCloudFunction& f) {
  json pts = json::array(), vals = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    pts.push_back(f.point(i));
    vals.push_back(extended_to_json(f.value(i)));
  }
  return {{"dimension", f.dimension()}, {"points", pts}, {"values", vals},
          {"base_index", f.base_index()}};
}

GridFunction grid_from_json(const json& j) {
  return guarded("grid", [&] {
    const json& jb = field(j, "bounds");
    if (!jb.is_array()) throw InputError("bounds must be an array");
    std::vector<double> lo, hi;
    for (const auto& b : jb) {
      auto pair = reals(b, "bounds entry");
      if (pair.size() != 2) throw InputError("each bounds entry is [lo, hi]");
      lo.push_back(pair[0]);
      hi.push_back(pair[1]);
    }
    std::vector<std::size_t> res;
    const json& jr = field(j, "resolution");
    if (!jr.is_array()) throw InputError("resolution must be an array");
    for (const auto& r : jr) res.push_back(index_from(r, "resolution"));
    if (res.size() != lo.size()) throw InputError("resolution and bounds differ in length");
    check_dimension(j, lo.size());
    const json& jv = field(j, "values");
    if (!jv.is_array()) throw InputError("values must be an array");
    std::vector<Extended> vals;
    for (const auto& v : jv) vals.push_back(extended_from_json(v));
    return GridFunction(std::move(lo), std::move(hi), std::move(res), std::move(vals));
  });
}

json grid_to_json(const GridFunction& g) {
  json bounds = json::array(), vals = json::array();
  for (std::size_t a = 0; a < g.dimension(); ++a) bounds.push_back({g.lower(a), g.upper(a)});
  for (Extended v : g.values()) vals.push_back(extended_to_json(v));
  return {{"dimension", g.dimension()}, {"bounds", bounds}, {"resolution", g.resolution()},
          {"values", vals}};
}

std::optional<std::size_t> grid_base_index(const json& j) {
  if (!j.is_object() || !j.contains("base_index")) return std::nullopt;
  return index_from(j["base_index"], "base_index");
}

FiniteMetricSpace metric_from_json(const json& j) {
  return guarded("metric", [&] {
    const json& jm = field(j, "matrix");
    if (!jm.is_array()) throw InputError("matrix must be an array");
    DistanceMatrix m;
    for (const auto& row : jm) m.push_back(reals(row, "matrix row"));
    if (j.contains("labels")) {
      auto labels = j["labels"].get<std::vector<std::string>>();
      if (labels.size() != m.size()) throw InputError("labels and matrix differ in size");
      return FiniteMetricSpace(std::move(labels), std::move(m));
    }
    return FiniteMetricSpace(std::move(m));
  });
}

MetricTree tree_from_json(const json& j) {
  return guarded("tree", [&] {
    auto labels = field(j, "nodes").get<std::vector<std::string>>();
    std::vector<TreeEdge> edges;
    const json& je = field(j, "edges");
    if (!je.is_array()) throw InputError("edges must be an array");
    for (const auto& e : je) {
      const json& pair = field(e, "pair");
      if (!pair.is_array() || pair.size() != 2) throw InputError("edge pair must be [i, j]");
      const json& len = field(e, "length");
      if (!len.is_number()) throw InputError("edge length must be a number");
      edges.push_back({index_from(pair[0], "edge endpoint"), index_from(pair[1], "edge endpoint"),
                       len.get<double>()});
    }
    return MetricTree(std::move(labels), std::move(edges));
  });
}

TreeLocation location_from_json(const MetricTree& t, const json& j) {
  return guarded("tree location", [&] {
    if (j.is_object() && j.contains("node")) {
      const std::size_t n = index_from(j["node"], "node");
      if (n >= t.node_count()) throw InputError("node index out of range");
      return t.node(n);
    }
    const std::size_t e = index_from(field(j, "edge"), "edge");
    if (e >= t.edge_count()) throw InputError("edge index out of range");
    const json& off = field(j, "offset");
    if (!off.is_number()) throw InputError("offset must be a number");
    return t.point_on_edge(e, off.get<double>());
  });
}

json location_to_json(const TreeLocation& loc) {
  if (loc.is_node()) return {{"node", loc.node()}};
  return {{"edge", loc.edge()}, {"offset", loc.offset()}};
}

SpaceFunctional space_functional_from_json(FiniteMetricSpace space, const json& j) {
  return guarded("functional", [&] {
    const json& jv = field(j, "values");
    if (!jv.is_array()) throw InputError("values must be an array");
    std::vector<Extended> vals;
    for (const auto& v : jv) vals.push_back(extended_from_json(v));
    return SpaceFunctional(std::move(space), std::move(vals),
                           index_from(field(j, "reference"), "reference"));
  });
}

TreeFunctional tree_functional_from_json(MetricTree tree, const json& j) {
  return guarded("functional", [&] {
    const json& jc = field(j, "combination");
    if (!jc.is_array()) throw InputError("combination must be an array");
    std::vector<PowerDistanceTerm> terms;
    for (const auto& term : jc) {
      const json& c = field(term, "coefficient");
      if (!c.is_number()) throw InputError("coefficient must be a number");
      int power = 1;
      if (term.contains("power")) power = term["power"].get<int>();
      terms.push_back({c.get<double>(), location_from_json(tree, field(term, "anchor")), power});
    }
    const TreeLocation ref = location_from_json(tree, field(j, "reference"));
    return TreeFunctional::from_terms(std::move(tree), std::move(terms), ref);
  });
}

Fixture fixture_from_json(const json& j) {
  return guarded("fixture", [&] {
    Fixture fx;
    fx.name = field(j, "fixture").get<std::string>();
    const json& jb = field(j, "bounds");
    if (!jb.is_array()) throw InputError("bounds must be an array");
    for (const auto& b : jb) {
      auto pair = reals(b, "bounds entry");
      if (pair.size() != 2) throw InputError("each bounds entry is [lo, hi]");
      fx.spec.lower.push_back(pair[0]);
      fx.spec.upper.push_back(pair[1]);
    }
    const std::size_t d = fx.spec.lower.size();
    if (d == 0 || d > kMaxDimension) throw InputError("fixture dimension must be 1..3");
    check_dimension(j, d);
    if (j.contains("resolution")) {
      for (const auto& r : j["resolution"]) fx.spec.resolution.push_back(index_from(r, "resolution"));
      if (fx.spec.resolution.size() != d) throw InputError("resolution and bounds differ in length");
    }
    if (fx.name == "cone") {
      if (d != 2) throw InputError("the oblique cone fixture is two-dimensional");
      const auto v = reals(field(j, "vertex"), "vertex");
      const auto dir = reals(field(j, "direction"), "direction");
      if (v.size() != 2 || dir.size() != 2) throw InputError("vertex and direction are 2D");
      const ConeParams c(field(j, "alpha").get<double>(), field(j, "beta").get<double>(),
                         {v[0], v[1]}, {dir[0], dir[1]});
      fx.function = make_cone_surface(c);
      fx.spec.base = v;
      return fx;
    }
    Point center = center_of(j, d);
    fx.spec.base = center;
    if (fx.name == "tent") {
      fx.function = make_tent(center);
    } else if (fx.name == "norm_cone") {
      const double gamma = j.contains("gamma") ? j["gamma"].get<double>() : 1.0;
      fx.function = make_norm_cone(center, gamma);
      fx.gamma = gamma;
    } else if (fx.name == "quadratic") {
      fx.function = make_quadratic(center);
    } else if (fx.name == "double_well") {
      fx.function = make_double_well(center);
    } else if (fx.name == "abs_sin") {
      fx.function = make_abs_sin(center);
    } else {
      throw InputError("unknown fixture '" + fx.name + "'");
    }
    return fx;
  });
}

FileKind detect_kind(const json& j) {
  if (!j.is_object()) return FileKind::Unknown;
  if (j.contains("fixture")) return FileKind::Fixture;
  if (j.contains("bounds")) return FileKind::Grid;
  if (j.contains("points")) return FileKind::Cloud;
  if (j.contains("matrix")) return FileKind::Metric;
  if (j.contains("edges")) return FileKind::Tree;
  return FileKind::Unknown;
}

}  // namespace sharpmin::io
