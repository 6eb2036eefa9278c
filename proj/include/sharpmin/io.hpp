#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "sharpmin/funcspace.hpp"
#include "sharpmin/metricopt.hpp"
#include "sharpmin/tree.hpp"

namespace sharpmin::io {

using nlohmann::json;

/// Reads and parses a JSON file. Syntax errors become InputError carrying
/// "path:line:column: message".
json read_json_file(const std::filesystem::path& path);
json parse_json(const std::string& text, const std::string& origin);

/// Writes j.dump(2) plus a trailing newline; creates parent directories.
void write_json_file(const std::filesystem::path& path, const json& j);

/// A number or the string "inf".
Extended extended_from_json(const json& j);
json extended_to_json(Extended x);
/// Finite doubles as numbers; infinities as "inf" / "-inf"; NaN as null.
json real_to_json(double x);

PointCloudFunction cloud_from_json(const json& j);
json cloud_to_json(const PointCloudFunction& f);

GridFunction grid_from_json(const json& j);
json grid_to_json(const GridFunction& g);
/// The optional base_index field of a grid file.
std::optional<std::size_t> grid_base_index(const json& j);

FiniteMetricSpace metric_from_json(const json& j);
MetricTree tree_from_json(const json& j);

/// {"node": n} or {"edge": e, "offset": t}.
TreeLocation location_from_json(const MetricTree& t, const json& j);
json location_to_json(const TreeLocation& loc);

/// {"values": [...], "reference": i}.
SpaceFunctional space_functional_from_json(FiniteMetricSpace space, const json& j);
/// {"combination": [{"coefficient", "anchor", "power"?}], "reference": location}.
TreeFunctional tree_functional_from_json(MetricTree tree, const json& j);

/// Closed-form fixture with its sampling box; base is the center (vertex
/// for the oblique cone).
struct Fixture {
  std::string name;
  ClosedForm function;
  SamplingSpec spec;
  /// Known modulus for norm cones.
  std::optional<double> gamma;
};

Fixture fixture_from_json(const json& j);

enum class FileKind { Fixture, Grid, Cloud, Metric, Tree, Unknown };
FileKind detect_kind(const json& j);

}  // namespace sharpmin::io
