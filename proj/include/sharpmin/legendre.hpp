#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sharpmin/funcspace.hpp"

namespace sharpmin {

/// Box [-L_i, L_i] of dual variables, sampled regularly.
class DualGrid {
 public:
  /// Throws InputError unless every L_i > 0 and every resolution >= 2.
  DualGrid(std::vector<double> half_widths, std::vector<std::size_t> resolution);

  std::size_t dimension() const { return half_widths_.size(); }
  double half_width(std::size_t axis) const { return half_widths_.at(axis); }
  std::size_t resolution(std::size_t axis) const { return resolution_.at(axis); }
  const std::vector<double>& half_widths() const { return half_widths_; }
  const std::vector<std::size_t>& resolution() const { return resolution_; }

  /// Dual nodes as an empty-valued grid shape (values all zero).
  GridFunction shape() const;

 private:
  std::vector<double> half_widths_;
  std::vector<std::size_t> resolution_;
};

/// Per axis, the largest |difference quotient| between adjacent finite nodes.
std::vector<double> required_dual_range(const GridFunction& f);

/// Dual grid whose half-widths equal required_dual_range (1 on flat axes)
/// with the primal resolution on each axis.
DualGrid auto_dual_grid(const GridFunction& f);

/// Throws DualRangeError when some L_i falls below the required range.
void check_dual_range(const GridFunction& f, const DualGrid& dual);

/// f*(xi) = max over finite primal nodes of <xi, x> - f(x), on the dual grid.
/// Factorized per axis with a linear-time 1D pass (lower hull plus a
/// monotone sweep over sorted slopes). Guards the dual range.
GridFunction conjugate(const GridFunction& f, const DualGrid& dual);

/// The same transform by the direct O(primal x dual) double loop.
GridFunction conjugate_direct(const GridFunction& f, const DualGrid& dual);

/// Conjugate of the conjugate, back on the primal grid. Nodes outside the
/// bounding box of finite primal nodes are +inf.
GridFunction biconjugate(const GridFunction& f, const DualGrid& dual);

struct TransformResult {
  GridFunction conjugate;
  GridFunction biconjugate;
  /// max over node pairs of <xi, x> - f(x) - f*(xi), floored at 0.
  double fenchel_young_violation;
};

TransformResult legendre_transform(const GridFunction& f, const DualGrid& dual);

/// Lower convex hull of the finite graph points evaluated at every node
/// (+inf outside the hull's x-range). 1D only; needs two finite values.
GridFunction convex_envelope_1d(const GridFunction& f);

/// Largest excess g(mid) - (g(left) + g(right)) / 2 over axis-parallel
/// node triples with finite values, floored at 0.
double midpoint_convexity_violation(const GridFunction& g);

struct BiconjugateSharpnessReport {
  std::size_t base = 0;
  double grid_step = 0.0;
  double modulus = 0.0;
  double biconjugate_modulus = 0.0;
  double base_value = 0.0;
  double biconjugate_base_value = 0.0;
  bool base_minimizes_biconjugate = false;
  double tolerance = 0.0;
  double fenchel_young_violation = 0.0;
  /// |m(f) - m(f**)| <= tolerance, f**(base) = f(base) and base minimizes f**.
  bool agree = false;
};

/// Compares the sharpness modulus of f and of f** at the base node. The base
/// must minimize f (PreconditionError otherwise). Default tolerance is
/// 5 * max grid step.
BiconjugateSharpnessReport verify_biconjugate_sharpness(const GridFunction& f, std::size_t base,
                                                        const DualGrid& dual,
                                                        std::optional<double> tol = {});

/// Samples f with step h on each entry of steps (box [lower, upper], base
/// snapped to its nearest node, which must coincide with base to 1e-9 h)
/// and runs verify_biconjugate_sharpness with an automatic dual grid.
std::vector<BiconjugateSharpnessReport> biconjugate_refinement(const ClosedForm& f,
                                                               const std::vector<double>& lower,
                                                               const std::vector<double>& upper,
                                                               const Point& base,
                                                               const std::vector<double>& steps);

}  // namespace sharpmin
