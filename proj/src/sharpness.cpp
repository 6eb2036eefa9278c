#include "sharpmin/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sharpmin/errors.hpp"

namespace sharpmin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nondegenerate(const PointCloudFunction& f) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (i != f.base_index() && f.value(i).is_finite()) return;
  throw PreconditionError("degenerate cloud: no finite value besides the base");
}

// Argmin of value(i) + shift(i) over finite values; exact ties kept.
template <typename Shift>
std::vector<std::size_t> argmin_set(const PointCloudFunction& f, Shift shift) {
  std::vector<std::size_t> best;
  double best_value = kInf;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.value(i).is_infinite()) continue;
    const double v = f.value(i).value() + shift(i);
    if (v < best_value) {
      best_value = v;
      best.assign(1, i);
    } else if (v == best_value) {
      best.push_back(i);
    }
  }
  if (best.empty()) throw PreconditionError("probe: every value is +inf");
  return best;
}

}  // namespace

ModulusResult sharpness_modulus(const PointCloudFunction& f) {
  require_nondegenerate(f);
  const double base = f.base_value();
  ModulusResult out{kInf, 0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == f.base_index() || f.value(i).is_infinite()) continue;
    const double ratio = (f.value(i).value() - base) / distance(f.point(i), f.base_point());
    if (ratio < out.modulus) out = {ratio, i};
  }
  return out;
}

double global_slope(const PointCloudFunction& f, std::size_t i) {
  if (i >= f.size()) throw PreconditionError("global_slope: index out of range");
  if (f.value(i).is_infinite()) throw PreconditionError("global_slope: f(x_i) is +inf");
  const double fi = f.value(i).value();
  double slope = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (j == i || f.value(j).is_infinite()) continue;
    const double drop = fi - f.value(j).value();
    if (drop <= 0.0) continue;
    slope = std::max(slope, drop / distance(f.point(i), f.point(j)));
  }
  return slope;
}

double slope_infimum(const PointCloudFunction& f) {
  require_nondegenerate(f);
  double inf = kInf;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == f.base_index() || f.value(i).is_infinite()) continue;
    inf = std::min(inf, global_slope(f, i));
  }
  return inf;
}

double tilt_radius(const PointCloudFunction& f) {
  require_nondegenerate(f);
  const Point& base = f.base_point();
  const double fb = f.base_value();
  const std::size_t d = f.dimension();
  double radius = kInf;
  Point dir(d);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == f.base_index() || f.value(i).is_infinite()) continue;
    const Point& x = f.point(i);
    double len2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) len2 += (x[a] - base[a]) * (x[a] - base[a]);
    const double len = std::sqrt(len2);
    // The tilt r * dir lifts base relative to x by r <dir, x - base>; x wins
    // (or ties) once that reaches f(x) - f(base).
    double lift_per_unit = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      dir[a] = (x[a] - base[a]) / len;
      lift_per_unit += dir[a] * (x[a] - base[a]);
    }
    radius = std::min(radius, (f.value(i).value() - fb) / lift_per_unit);
  }
  return std::max(radius, 0.0);
}

TiltVector::TiltVector(std::vector<double> components) : components_(std::move(components)) {
  if (components_.empty() || components_.size() > kMaxDimension)
    throw InputError("tilt vector must have 1..3 components");
  for (double c : components_)
    if (!std::isfinite(c)) throw InputError("tilt vector must be finite");
  norm_ = sharpmin::norm(components_);
}

std::vector<std::size_t> tilt_probe(const PointCloudFunction& f, const TiltVector& xi) {
  if (xi.dimension() != f.dimension())
    throw PreconditionError("tilt_probe: tilt dimension differs from the cloud");
  return argmin_set(f, [&](std::size_t i) { return -dot(xi.components(), f.point(i)); });
}

double LipschitzFunctionSpec::operator()(std::span<const double> x) const {
  double v = kInf;
  for (std::size_t i = 0; i < anchors_.size(); ++i)
    v = std::min(v, values_[i] + constant_ * distance(x, anchors_[i]));
  return v;
}

LipschitzFunctionSpec mcshane_extend(std::vector<Point> anchors, std::vector<double> values,
                                     double L) {
  if (anchors.empty()) throw InputError("mcshane: no anchors");
  if (anchors.size() != values.size()) throw InputError("mcshane: anchors and values differ");
  if (!(L > 0.0) || !std::isfinite(L)) throw InputError("mcshane: constant must be positive");
  const std::size_t d = anchors.front().size();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].size() != d) throw InputError("mcshane: mixed anchor dimensions");
    if (!std::isfinite(values[i])) throw InputError("mcshane: anchor values must be finite");
  }
  std::vector<Point> a;
  std::vector<double> g;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    bool duplicate = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] != anchors[i]) continue;
      if (g[j] != values[i])
        throw InputError("mcshane: duplicate anchor with conflicting values");
      duplicate = true;
    }
    if (!duplicate) {
      a.push_back(std::move(anchors[i]));
      g.push_back(values[i]);
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double ratio = std::abs(g[i] - g[j]) / distance(a[i], a[j]);
      if (ratio > L * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "mcshane: infeasible constant " << L << " (anchors " << i << "," << j
           << " need " << ratio << ")";
        throw InputError(os.str());
      }
    }
  return LipschitzFunctionSpec(std::move(a), std::move(g), L);
}

std::vector<std::size_t> lipschitz_probe(const PointCloudFunction& f,
                                         const LipschitzFunctionSpec& zeta) {
  if (zeta.anchors().front().size() != f.dimension())
    throw PreconditionError("lipschitz_probe: dimension mismatch");
  return argmin_set(f, [&](std::size_t i) { return zeta(f.point(i)); });
}

std::vector<std::size_t> perturbation_probe(
    const PointCloudFunction& f, const std::function<double(std::span<const double>)>& zeta) {
  return argmin_set(f, [&](std::size_t i) { return zeta(f.point(i)); });
}

SharpnessReport verify_characterizations(const PointCloudFunction& f, double tol) {
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  SharpnessReport r;
  const auto mod = sharpness_modulus(f);
  r.modulus = mod.modulus;
  r.witness = mod.witness;
  r.base_index = f.base_index();
  r.slope_infimum = slope_infimum(f);
  r.tilt_radius = tilt_radius(f);
  r.tolerance = tol;
  r.slopes.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.value(i).is_finite()) r.slopes[i] = global_slope(f, i);

  // A non-minimizing or tied base has slope infimum and tilt radius 0.
  const double m = std::max(r.modulus, 0.0);
  r.agreement = std::abs(m - r.slope_infimum) <= tol && std::abs(m - r.tilt_radius) <= tol;
  if (!r.agreement) {
    std::ostringstream os;
    os.precision(17);
    os << "characterizations disagree: modulus " << r.modulus << ", slope infimum "
       << r.slope_infimum << ", tilt radius " << r.tilt_radius << " (tol " << tol << ")";
    throw CharacterizationMismatch(os.str(), r.modulus, r.slope_infimum, r.tilt_radius);
  }
  return r;
}

ConeGap cone_gap(const PointCloudFunction& f, double gamma) {
  if (!(gamma > 0.0)) throw InputError("cone_gap: gamma must be positive");
  require_nondegenerate(f);
  const double fb = f.base_value();
  ConeGap out{kInf, 0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == f.base_index() || f.value(i).is_infinite()) continue;
    const double g = f.value(i).value() - (fb + gamma * distance(f.point(i), f.base_point()));
    if (g < out.gap) out = {g, i};
  }
  return out;
}

}  // namespace sharpmin
