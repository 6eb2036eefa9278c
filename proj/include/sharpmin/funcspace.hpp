#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sharpmin/extended.hpp"

namespace sharpmin {

using Point = std::vector<double>;

inline constexpr std::size_t kMaxDimension = 3;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
/// Euclidean distance; the only norm used in R^d.
double distance(std::span<const double> a, std::span<const double> b);

/// Finite sample of f : R^d -> R ∪ {+inf} together with the reference point.
class PointCloudFunction {
 public:
  /// Throws InputError unless: 1 <= d <= 3, at least two points, equal list
  /// lengths, pairwise distinct points, finite value at base_index.
  PointCloudFunction(std::vector<Point> points, std::vector<Extended> values,
                     std::size_t base_index);

  std::size_t dimension() const { return points_.front().size(); }
  std::size_t size() const { return points_.size(); }

  const Point& point(std::size_t i) const { return points_.at(i); }
  Extended value(std::size_t i) const { return values_.at(i); }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<Extended>& values() const { return values_; }

  std::size_t base_index() const { return base_; }
  const Point& base_point() const { return points_[base_]; }
  double base_value() const { return values_[base_].value(); }

 private:
  struct Trusted {};
  PointCloudFunction(Trusted, std::vector<Point> points, std::vector<Extended> values,
                     std::size_t base_index);
  friend class GridFunction;

  std::vector<Point> points_;
  std::vector<Extended> values_;
  std::size_t base_;
};

/// Values on a box-aligned regular grid, row-major (last axis fastest).
class GridFunction {
 public:
  /// Throws InputError unless 1 <= d <= 3, lower < upper, resolution >= 2 per
  /// axis, values.size() equals the node count and some value is finite.
  GridFunction(std::vector<double> lower, std::vector<double> upper,
               std::vector<std::size_t> resolution, std::vector<Extended> values);

  std::size_t dimension() const { return lower_.size(); }
  std::size_t size() const { return values_.size(); }

  double lower(std::size_t axis) const { return lower_.at(axis); }
  double upper(std::size_t axis) const { return upper_.at(axis); }
  std::size_t resolution(std::size_t axis) const { return resolution_.at(axis); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<std::size_t>& resolution() const { return resolution_; }
  double step(std::size_t axis) const;
  double max_step() const;

  /// Node coordinate along one axis; the last node is exactly upper(axis).
  double coordinate(std::size_t axis, std::size_t i) const;
  std::vector<double> axis_coordinates(std::size_t axis) const;

  Extended value(std::size_t flat) const { return values_.at(flat); }
  const std::vector<Extended>& values() const { return values_; }

  Point node(std::size_t flat) const;
  std::array<std::size_t, kMaxDimension> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> multi) const;

  /// Smallest-index node attaining the minimum finite value.
  std::size_t argmin() const;
  /// Nearest node to p (per-axis rounding, clamped to the box).
  std::size_t nearest_node(std::span<const double> p) const;

  /// All nodes as a point cloud with the given reference node.
  PointCloudFunction to_cloud(std::size_t base_flat) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::size_t> resolution_;
  std::vector<Extended> values_;
};

/// Oblique circular cone over R^2: aperture alpha, lean beta, vertex p,
/// unit lean direction v.
class ConeParams {
 public:
  /// Throws InputError unless 0 < alpha < pi, 0 < beta < pi/2, |v| = 1 (1e-12).
  ConeParams(double alpha, double beta, std::array<double, 2> vertex,
             std::array<double, 2> direction);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::array<double, 2>& vertex() const { return vertex_; }
  const std::array<double, 2>& direction() const { return direction_; }

 private:
  double alpha_;
  double beta_;
  std::array<double, 2> vertex_;
  std::array<double, 2> direction_;
};

/// cot(alpha/2)|x - p| + (tan(beta) - cot(alpha/2)) <v, x - p>.
double eval_cone(const ConeParams& c, std::array<double, 2> x);

using ClosedForm = std::function<Extended(std::span<const double>)>;

/// x -> 1 - |1 - |x - center|| on the open ball of radius 2, +inf elsewhere.
ClosedForm make_tent(Point center);
/// x -> gamma |x - center|; throws InputError for gamma <= 0.
ClosedForm make_norm_cone(Point center, double gamma);
/// x -> |x - center|^2.
ClosedForm make_quadratic(Point center);
/// x -> (|x - center|^2 - 1)^2.
ClosedForm make_double_well(Point center);
/// x -> |x - center| + sin^2(3 |x - center|).
ClosedForm make_abs_sin(Point center);
/// The cone surface of eval_cone as a closed form on R^2.
ClosedForm make_cone_surface(const ConeParams& c);

/// Box sampling request with the reference point that must be a node.
struct SamplingSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::size_t> resolution;
  Point base;
};

/// Samples on the box grid; the node nearest to spec.base is moved onto base
/// exactly and becomes base_index. Throws InputError if base lies outside
/// the box or every sampled value is +inf, and if the value at base is +inf.
PointCloudFunction sample_to_cloud(const ClosedForm& f, const SamplingSpec& spec);

/// Samples on the box grid without any snapping.
GridFunction sample_to_grid(const ClosedForm& f, std::vector<double> lower,
                            std::vector<double> upper, std::vector<std::size_t> resolution);

/// Resolution giving spacing h on [lower, upper] (rounded to the nearest count).
std::size_t resolution_for_step(double lower, double upper, double h);

// Finite metric spaces.

using DistanceMatrix = std::vector<std::vector<double>>;

struct MetricViolation {
  enum class Kind { NotSquare, NonFinite, Diagonal, Symmetry, Positivity, Triangle };
  Kind kind;
  /// Pair (i, j) for pairwise axioms; for Triangle, d(i, j) > d(i, k) + d(k, j).
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  /// Size of the worst violation of this axiom.
  double magnitude = 0.0;

  std::string describe() const;
};

const char* to_string(MetricViolation::Kind kind);

/// One entry per violated axiom, witnessed by its worst instance.
struct MetricValidation {
  std::vector<MetricViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every metric axiom in O(n^3). Triangle violations below
/// 1e-12 * max entry are ignored as rounding.
MetricValidation validate_metric(const DistanceMatrix& m);

class FiniteMetricSpace {
 public:
  /// Throws InputError with the first violation if validate_metric fails.
  FiniteMetricSpace(std::vector<std::string> labels, DistanceMatrix matrix);
  explicit FiniteMetricSpace(DistanceMatrix matrix);

  std::size_t size() const { return matrix_.size(); }
  double distance(std::size_t i, std::size_t j) const { return matrix_[i][j]; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  const DistanceMatrix& matrix() const { return matrix_; }

 private:
  std::vector<std::string> labels_;
  DistanceMatrix matrix_;
};

}  // namespace sharpmin
