#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sharpmin/funcspace.hpp"

namespace sharpmin {

struct ModulusResult {
  double modulus;
  std::size_t witness;
};

/// Largest gamma with f(x) >= f(base) + gamma |x - base| over the cloud:
/// min over finite x != base of (f(x) - f(base)) / |x - base|. Points with
/// value +inf are skipped. Ties resolve to the smallest index. The base is
/// a sharp minimizer of the cloud iff the modulus is positive.
/// Throws PreconditionError("degenerate cloud") when no other value is finite.
ModulusResult sharpness_modulus(const PointCloudFunction& f);

/// sup over y != x_i of max(f(x_i) - f(y), 0) / |x_i - y|; +inf values of y
/// contribute 0. Throws PreconditionError if f(x_i) is +inf.
double global_slope(const PointCloudFunction& f, std::size_t i);

/// inf over finite non-base points of global_slope.
double slope_infimum(const PointCloudFunction& f);

/// sup{r : argmin (f - <xi, .>) = {base} for every |xi| < r}, evaluated in
/// closed form. For each x != base the critical tilt points along
/// u = (x - base)/|x - base| with size (f(x) - f(base)) / <u, x - base>;
/// the radius is the smallest of these, floored at 0.
double tilt_radius(const PointCloudFunction& f);

class TiltVector {
 public:
  explicit TiltVector(std::vector<double> components);
  const std::vector<double>& components() const { return components_; }
  double norm() const { return norm_; }
  std::size_t dimension() const { return components_.size(); }

 private:
  std::vector<double> components_;
  double norm_;
};

/// Exact argmin set of f - <xi, .> over the cloud, ascending indices.
/// Throws PreconditionError if every value is +inf or dimensions differ.
std::vector<std::size_t> tilt_probe(const PointCloudFunction& f, const TiltVector& xi);

/// Lower McShane extension x -> min_i (g_i + L |x - a_i|).
class LipschitzFunctionSpec {
 public:
  double operator()(std::span<const double> x) const;
  const std::vector<Point>& anchors() const { return anchors_; }
  const std::vector<double>& values() const { return values_; }
  double constant() const { return constant_; }

 private:
  LipschitzFunctionSpec(std::vector<Point> anchors, std::vector<double> values, double L)
      : anchors_(std::move(anchors)), values_(std::move(values)), constant_(L) {}
  friend LipschitzFunctionSpec mcshane_extend(std::vector<Point>, std::vector<double>, double);

  std::vector<Point> anchors_;
  std::vector<double> values_;
  double constant_;
};

/// Builds the McShane extension interpolating the anchors. Throws InputError
/// for an infeasible constant (some |g_i - g_j| > L |a_i - a_j|) or for a
/// repeated anchor with conflicting values. Repeated consistent anchors are
/// merged.
LipschitzFunctionSpec mcshane_extend(std::vector<Point> anchors, std::vector<double> values,
                                     double L);

/// Exact argmin set of f + zeta over the cloud.
std::vector<std::size_t> lipschitz_probe(const PointCloudFunction& f,
                                         const LipschitzFunctionSpec& zeta);
/// Same for any real-valued perturbation.
std::vector<std::size_t> perturbation_probe(
    const PointCloudFunction& f, const std::function<double(std::span<const double>)>& zeta);

struct SharpnessReport {
  double modulus = 0.0;
  double slope_infimum = 0.0;
  double tilt_radius = 0.0;
  bool agreement = false;
  std::size_t witness = 0;
  std::size_t base_index = 0;
  /// global_slope per point; empty for +inf values.
  std::vector<std::optional<double>> slopes;
  double tolerance = 0.0;

  bool sharp() const { return modulus > 0.0; }
};

/// Runs the three characterizations through their separate code paths and
/// compares max(modulus, 0) against the slope infimum and the tilt radius.
/// Throws CharacterizationMismatch when they differ by more than tol.
SharpnessReport verify_characterizations(const PointCloudFunction& f, double tol);

struct ConeGap {
  double gap;
  std::size_t worst;
};

/// min over finite x != base of f(x) - (f(base) + gamma |x - base|).
/// f lies above the cone iff gap >= 0. Throws InputError for gamma <= 0.
ConeGap cone_gap(const PointCloudFunction& f, double gamma);

}  // namespace sharpmin
