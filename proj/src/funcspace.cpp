#include "sharpmin/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sharpmin/errors.hpp"

namespace sharpmin {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

// PointCloudFunction

PointCloudFunction::PointCloudFunction(Trusted, std::vector<Point> points,
                                       std::vector<Extended> values, std::size_t base_index)
    : points_(std::move(points)), values_(std::move(values)), base_(base_index) {}

PointCloudFunction::PointCloudFunction(std::vector<Point> points, std::vector<Extended> values,
                                       std::size_t base_index)
    : points_(std::move(points)), values_(std::move(values)), base_(base_index) {
  if (points_.size() < 2) throw InputError("point cloud needs at least 2 points");
  if (points_.size() != values_.size())
    throw InputError("point cloud: points and values differ in length");
  const std::size_t d = points_.front().size();
  if (d < 1 || d > kMaxDimension) throw InputError("point cloud: dimension must be 1..3");
  for (const auto& p : points_) {
    if (p.size() != d) throw InputError("point cloud: mixed dimensions");
    for (double x : p)
      if (!std::isfinite(x)) throw InputError("point cloud: non-finite coordinate");
  }
  if (base_ >= points_.size()) throw InputError("point cloud: base_index out of range");
  if (values_[base_].is_infinite()) throw InputError("point cloud: base value is +inf");
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      if (points_[i] == points_[j]) {
        std::ostringstream os;
        os << "point cloud: points " << i << " and " << j << " coincide";
        throw InputError(os.str());
      }
}

// GridFunction

GridFunction::GridFunction(std::vector<double> lower, std::vector<double> upper,
                           std::vector<std::size_t> resolution, std::vector<Extended> values)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      resolution_(std::move(resolution)),
      values_(std::move(values)) {
  const std::size_t d = lower_.size();
  if (d < 1 || d > kMaxDimension) throw InputError("grid: dimension must be 1..3");
  if (upper_.size() != d || resolution_.size() != d)
    throw InputError("grid: bounds and resolution disagree on dimension");
  std::size_t count = 1;
  for (std::size_t a = 0; a < d; ++a) {
    if (!(std::isfinite(lower_[a]) && std::isfinite(upper_[a]) && lower_[a] < upper_[a]))
      throw InputError("grid: need lower < upper on every axis");
    if (resolution_[a] < 2) throw InputError("grid: resolution must be >= 2");
    count *= resolution_[a];
  }
  if (values_.size() != count) {
    std::ostringstream os;
    os << "grid: expected " << count << " values, got " << values_.size();
    throw InputError(os.str());
  }
  if (std::none_of(values_.begin(), values_.end(), [](Extended v) { return v.is_finite(); }))
    throw InputError("grid: all values are +inf");
}

double GridFunction::step(std::size_t axis) const {
  return (upper_.at(axis) - lower_[axis]) / static_cast<double>(resolution_[axis] - 1);
}

double GridFunction::max_step() const {
  double h = 0.0;
  for (std::size_t a = 0; a < dimension(); ++a) h = std::max(h, step(a));
  return h;
}

double GridFunction::coordinate(std::size_t axis, std::size_t i) const {
  if (i + 1 == resolution_.at(axis)) return upper_[axis];
  return lower_[axis] + static_cast<double>(i) * step(axis);
}

std::vector<double> GridFunction::axis_coordinates(std::size_t axis) const {
  std::vector<double> xs(resolution_.at(axis));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = coordinate(axis, i);
  return xs;
}

std::array<std::size_t, kMaxDimension> GridFunction::multi_index(std::size_t flat) const {
  std::array<std::size_t, kMaxDimension> idx{};
  for (std::size_t a = dimension(); a-- > 0;) {
    idx[a] = flat % resolution_[a];
    flat /= resolution_[a];
  }
  return idx;
}

std::size_t GridFunction::flat_index(std::span<const std::size_t> multi) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dimension(); ++a) flat = flat * resolution_[a] + multi[a];
  return flat;
}

Point GridFunction::node(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point p(dimension());
  for (std::size_t a = 0; a < dimension(); ++a) p[a] = coordinate(a, idx[a]);
  return p;
}

std::size_t GridFunction::argmin() const {
  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i].is_infinite()) continue;
    if (!found || values_[i] < values_[best]) {
      best = i;
      found = true;
    }
  }
  return best;
}

std::size_t GridFunction::nearest_node(std::span<const double> p) const {
  std::array<std::size_t, kMaxDimension> idx{};
  for (std::size_t a = 0; a < dimension(); ++a) {
    const double t = std::round((p[a] - lower_[a]) / step(a));
    const double clamped = std::clamp(t, 0.0, static_cast<double>(resolution_[a] - 1));
    idx[a] = static_cast<std::size_t>(clamped);
  }
  return flat_index(std::span(idx.data(), dimension()));
}

PointCloudFunction GridFunction::to_cloud(std::size_t base_flat) const {
  if (base_flat >= size()) throw InputError("grid: base node out of range");
  if (values_[base_flat].is_infinite()) throw InputError("grid: base value is +inf");
  std::vector<Point> pts(size());
  for (std::size_t i = 0; i < size(); ++i) pts[i] = node(i);
  // Grid nodes are distinct by construction.
  return PointCloudFunction(PointCloudFunction::Trusted{}, std::move(pts), values_, base_flat);
}

// Cones

ConeParams::ConeParams(double alpha, double beta, std::array<double, 2> vertex,
                       std::array<double, 2> direction)
    : alpha_(alpha), beta_(beta), vertex_(vertex), direction_(direction) {
  using std::numbers::pi;
  if (!(alpha > 0.0 && alpha < pi)) throw InputError("cone: alpha must lie in (0, pi)");
  if (!(beta > 0.0 && beta < pi / 2)) throw InputError("cone: beta must lie in (0, pi/2)");
  if (std::abs(norm(direction_) - 1.0) > 1e-12) throw InputError("cone: direction must be unit");
}

double eval_cone(const ConeParams& c, std::array<double, 2> x) {
  const std::array<double, 2> r{x[0] - c.vertex()[0], x[1] - c.vertex()[1]};
  const double cot_half = 1.0 / std::tan(c.alpha() / 2.0);
  return cot_half * norm(r) + (std::tan(c.beta()) - cot_half) * dot(c.direction(), r);
}

// Closed forms

ClosedForm make_tent(Point center) {
  return [c = std::move(center)](std::span<const double> x) -> Extended {
    const double r = distance(x, c);
    if (r < 2.0) return 1.0 - std::abs(1.0 - r);
    return Extended::infinity();
  };
}

ClosedForm make_norm_cone(Point center, double gamma) {
  if (!(gamma > 0.0)) throw InputError("norm cone: gamma must be positive");
  return [c = std::move(center), gamma](std::span<const double> x) -> Extended {
    return gamma * distance(x, c);
  };
}

ClosedForm make_quadratic(Point center) {
  return [c = std::move(center)](std::span<const double> x) -> Extended {
    const double r = distance(x, c);
    return r * r;
  };
}

ClosedForm make_double_well(Point center) {
  return [c = std::move(center)](std::span<const double> x) -> Extended {
    const double r = distance(x, c);
    const double w = r * r - 1.0;
    return w * w;
  };
}

ClosedForm make_abs_sin(Point center) {
  return [c = std::move(center)](std::span<const double> x) -> Extended {
    const double r = distance(x, c);
    const double s = std::sin(3.0 * r);
    return r + s * s;
  };
}

ClosedForm make_cone_surface(const ConeParams& c) {
  return [c](std::span<const double> x) -> Extended {
    if (x.size() != 2) throw InputError("cone surface is defined on R^2");
    return eval_cone(c, {x[0], x[1]});
  };
}

// Sampling

std::size_t resolution_for_step(double lower, double upper, double h) {
  if (!(h > 0.0) || !(upper > lower)) throw InputError("sampling: need h > 0 and lower < upper");
  const double n = std::round((upper - lower) / h);
  if (n < 1.0) throw InputError("sampling: step exceeds the box");
  return static_cast<std::size_t>(n) + 1;
}

GridFunction sample_to_grid(const ClosedForm& f, std::vector<double> lower,
                            std::vector<double> upper, std::vector<std::size_t> resolution) {
  std::size_t count = 1;
  for (std::size_t n : resolution) count *= n;
  // Evaluate through a placeholder grid so coordinates match exactly.
  std::vector<Extended> zeros(count, Extended(0.0));
  GridFunction shape(lower, upper, resolution, zeros);
  std::vector<Extended> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = f(shape.node(i));
  return GridFunction(std::move(lower), std::move(upper), std::move(resolution),
                      std::move(values));
}

PointCloudFunction sample_to_cloud(const ClosedForm& f, const SamplingSpec& spec) {
  const std::size_t d = spec.lower.size();
  if (spec.base.size() != d) throw InputError("sampling: base point has the wrong dimension");
  std::size_t count = 1;
  for (std::size_t n : spec.resolution) count *= n;
  GridFunction shape(spec.lower, spec.upper, spec.resolution,
                     std::vector<Extended>(count, Extended(0.0)));
  for (std::size_t a = 0; a < d; ++a) {
    const double slack = 0.5 * shape.step(a);
    if (spec.base[a] < spec.lower[a] - slack || spec.base[a] > spec.upper[a] + slack)
      throw InputError("sampling: base point lies outside the sampling box");
  }
  const std::size_t base = shape.nearest_node(spec.base);
  std::vector<Point> pts(count);
  std::vector<Extended> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    pts[i] = (i == base) ? spec.base : shape.node(i);
    values[i] = f(pts[i]);
  }
  if (std::none_of(values.begin(), values.end(), [](Extended v) { return v.is_finite(); }))
    throw InputError("sampling: no finite values");
  if (values[base].is_infinite()) throw InputError("sampling: f(base) is +inf");
  return PointCloudFunction(std::move(pts), std::move(values), base);
}

// Metric spaces

const char* to_string(MetricViolation::Kind kind) {
  switch (kind) {
    case MetricViolation::Kind::NotSquare: return "not_square";
    case MetricViolation::Kind::NonFinite: return "non_finite";
    case MetricViolation::Kind::Diagonal: return "diagonal";
    case MetricViolation::Kind::Symmetry: return "symmetry";
    case MetricViolation::Kind::Positivity: return "positivity";
    case MetricViolation::Kind::Triangle: return "triangle";
  }
  return "unknown";
}

std::string MetricViolation::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
    case Kind::NotSquare: os << " (row " << i << ")"; break;
    case Kind::Triangle:
      os << ": d(" << i << "," << j << ") > d(" << i << "," << k << ") + d(" << k << "," << j
         << ") by " << magnitude;
      break;
    default: os << " at (" << i << "," << j << "), magnitude " << magnitude; break;
  }
  return os.str();
}

MetricValidation validate_metric(const DistanceMatrix& m) {
  using Kind = MetricViolation::Kind;
  MetricValidation report;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) {
      report.violations.push_back({Kind::NotSquare, i, 0, 0, 0.0});
      return report;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(m[i][j])) {
        report.violations.push_back({Kind::NonFinite, i, j, 0, 0.0});
        return report;
      }

  MetricViolation diag{Kind::Diagonal}, sym{Kind::Symmetry}, pos{Kind::Positivity},
      tri{Kind::Triangle};
  bool nonpositive = false;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dv = std::abs(m[i][i]);
    if (dv > diag.magnitude) diag = {Kind::Diagonal, i, i, 0, dv};
    for (std::size_t j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(m[i][j]));
      if (i == j) continue;
      const double asym = std::abs(m[i][j] - m[j][i]);
      if (asym > sym.magnitude) sym = {Kind::Symmetry, i, j, 0, asym};
      if (m[i][j] <= 0.0 && (!nonpositive || -m[i][j] > pos.magnitude)) {
        pos = {Kind::Positivity, i, j, 0, -m[i][j]};
        nonpositive = true;
      }
    }
  }
  const double slack = 1e-12 * scale;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double excess = m[i][j] - (m[i][k] + m[k][j]);
        if (excess > slack && excess > tri.magnitude) tri = {Kind::Triangle, i, j, k, excess};
      }
  if (diag.magnitude > 0.0) report.violations.push_back(diag);
  if (sym.magnitude > 0.0) report.violations.push_back(sym);
  if (nonpositive) report.violations.push_back(pos);
  if (tri.magnitude > 0.0) report.violations.push_back(tri);
  return report;
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, DistanceMatrix matrix)
    : labels_(std::move(labels)), matrix_(std::move(matrix)) {
  if (matrix_.empty()) throw InputError("metric space: empty matrix");
  if (labels_.size() != matrix_.size())
    throw InputError("metric space: label count differs from matrix size");
  const auto report = validate_metric(matrix_);
  if (!report.ok()) throw InputError("metric space: " + report.violations.front().describe());
}

namespace {

std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(DistanceMatrix matrix)
    : labels_(index_labels(matrix.size())), matrix_(std::move(matrix)) {
  if (matrix_.empty()) throw InputError("metric space: empty matrix");
  const auto report = validate_metric(matrix_);
  if (!report.ok()) throw InputError("metric space: " + report.violations.front().describe());
}

}  // namespace sharpmin
