#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sharpmin/extended.hpp"
#include "sharpmin/funcspace.hpp"
#include "sharpmin/tree.hpp"

namespace sharpmin {

/// Parameters (delta, gamma) of sharp local minimality; delta may be +inf.
struct LocalSharpnessParams {
  LocalSharpnessParams(double delta, double gamma);
  double delta;
  double gamma;
};

/// J : M -> R ∪ {+inf} on a finite metric space with a reference point.
class SpaceFunctional {
 public:
  /// Throws InputError if sizes differ or J(reference) is +inf.
  SpaceFunctional(FiniteMetricSpace space, std::vector<Extended> values, std::size_t reference);

  const FiniteMetricSpace& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  Extended value(std::size_t i) const { return values_.at(i); }
  const std::vector<Extended>& values() const { return values_; }
  std::size_t reference() const { return reference_; }

 private:
  FiniteMetricSpace space_;
  std::vector<Extended> values_;
  std::size_t reference_;
};

/// Term c * d(., anchor)^power with power 1 or 2.
struct PowerDistanceTerm {
  double coefficient;
  TreeLocation anchor;
  int power = 1;
};

/// Real-valued functional on the continuum of a metric tree, evaluable at
/// every location, with a reference point.
class TreeFunctional {
 public:
  using Evaluator = std::function<double(const MetricTree&, const TreeLocation&)>;

  TreeFunctional(MetricTree tree, Evaluator eval, TreeLocation reference);

  static TreeFunctional from_combination(MetricTree tree, DistanceCombination phi,
                                         TreeLocation reference);
  /// sum_i c_i d(., a_i)^{p_i}; c_i >= 0, p_i in {1, 2}.
  static TreeFunctional from_terms(MetricTree tree, std::vector<PowerDistanceTerm> terms,
                                   TreeLocation reference);

  double operator()(const TreeLocation& v) const { return eval_(tree_, v); }
  const MetricTree& tree() const { return tree_; }
  const TreeLocation& reference() const { return reference_; }

 private:
  MetricTree tree_;
  Evaluator eval_;
  TreeLocation reference_;
};

/// Restriction of a tree functional to finitely many locations; the
/// reference is appended when absent and becomes the space's reference.
SpaceFunctional restrict_to_samples(const TreeFunctional& J, std::vector<TreeLocation> samples);

struct EkelandResult {
  std::size_t input;
  std::size_t output;
  double epsilon;
  double lambda;
  /// Visited points, input first, output last.
  std::vector<std::size_t> trace;
};

/// From an epsilon-approximate minimizer, repeatedly moves to the point of
/// S(x) = {y : J(y) <= J(x) - (eps/lambda) d(x, y)} with least J (smallest
/// index on ties) until S(x) = {x}. Throws PreconditionError unless
/// J(start) <= inf J + eps and eps, lambda > 0.
EkelandResult ekeland(const SpaceFunctional& J, std::size_t start, double epsilon,
                      double lambda);

struct EkelandCheck {
  bool value_decreased = false;      // J(out) <= J(in)
  bool within_lambda = false;        // d(in, out) <= lambda
  bool unique_perturbed_min = false; // out uniquely minimizes J + (eps/lambda) d(., out)
  bool ok() const { return value_decreased && within_lambda && unique_perturbed_min; }
};

EkelandCheck check_ekeland(const SpaceFunctional& J, const EkelandResult& r);

/// sup of max(J(u) - J(v), 0) / d(u, v) over 0 < d(u, v) <= h; 0 when no
/// such v exists. Throws PreconditionError if J(u) is +inf or h <= 0.
double local_slope_h(const SpaceFunctional& J, std::size_t u, double h);

/// Same on a tree, with v ranging over every location at distance
/// h k / radial_samples (k = 1..radial_samples) from u.
double local_slope_h(const TreeFunctional& J, const TreeLocation& u, double h,
                     std::size_t radial_samples = 16);

/// inf over u in the closed ball B(ref, delta), u != ref, of
/// (J(u) - J(ref)) / d(u, ref). Throws PreconditionError if the reference
/// does not minimize J on the ball or the punctured ball is empty.
double local_sharpness(const SpaceFunctional& J, double delta);

/// Same over sample_tree(tree, spacing) restricted to the ball.
double local_sharpness(const TreeFunctional& J, double delta, double spacing);

/// argmin of J + zeta over the space intersected with the closed ball
/// B(ref, delta). zeta's Lipschitz constant is verified <= L pairwise
/// (PreconditionError otherwise).
std::vector<std::size_t> thm2_probe(const SpaceFunctional& J, std::span<const double> zeta,
                                    double L, double delta);

/// Outcome of a sampled inequality check; violation = lhs - rhs.
struct InequalityCheck {
  bool ok = true;
  double worst_violation = 0.0;
  /// Index of the offending sample (pair / triple) and its geodesic parameter.
  std::size_t witness = 0;
  double witness_s = 0.0;
  std::size_t evaluations = 0;
  /// Finite spaces only: geodesic points were approximated by nodes.
  bool approximate_geodesics = false;
  double geodesic_defect = 0.0;
};

using TreeScalar = std::function<double(const TreeLocation&)>;
using LocationPair = std::pair<TreeLocation, TreeLocation>;

/// phi(sigma(s)) <= (1 - s) phi(u) + s phi(v) along tree geodesics.
InequalityCheck geodesic_convexity_check(const MetricTree& t, const TreeScalar& phi,
                                         std::span<const LocationPair> pairs,
                                         std::span<const double> s_grid, double tol = 1e-9);
InequalityCheck geodesic_convexity_check(const MetricTree& t, const DistanceCombination& phi,
                                         std::span<const LocationPair> pairs,
                                         std::span<const double> s_grid, double tol = 1e-9);

/// Triples are (u, v, w): the geodesic runs v -> w, u is the base point of
/// d(sigma(s), u)^2 <= (1-s) d(v,u)^2 + s d(w,u)^2 - s(1-s) d(v,w)^2.
InequalityCheck cat0_check(const MetricTree& t, std::span<const std::array<TreeLocation, 3>> triples,
                           std::span<const double> s_grid, double tol = 1e-9);

/// Node standing in for sigma(s) on a v -> w geodesic of a finite space:
/// minimizes the endpoint defect max(|d(v,m) - s D|, |d(m,w) - (1-s) D|),
/// smallest index on ties.
std::pair<std::size_t, double> finite_geodesic_point(const FiniteMetricSpace& m, std::size_t v,
                                                     std::size_t w, double s);

/// Finite-space variant using finite_geodesic_point; always flagged approximate.
InequalityCheck cat0_check(const FiniteMetricSpace& m,
                           std::span<const std::array<std::size_t, 3>> triples,
                           std::span<const double> s_grid, double tol = 1e-9);

struct Cor2Result {
  /// local_slope_h of phi at the reference for the smallest probe radius.
  double slope_estimate;
  /// argmin of J + phi over the tree's nodes, within B(ref, delta).
  std::vector<std::size_t> argmin_in_ball;
};

/// The reference of J must be a node. With require_slope_bound, throws
/// PreconditionError unless the estimated slope of phi at the reference is
/// below gamma; otherwise the brute-force argmin is reported regardless.
Cor2Result cor2_probe(const TreeFunctional& J, const DistanceCombination& phi, double delta,
                      double gamma, bool require_slope_bound = true);

struct Prop2Row {
  double h;
  double local_modulus;  // over ball samples at spacing h
  double min_slope;      // min of local_slope_h over the same samples
  double tolerance;      // 1e-9 + h / radial samples
  bool sharp;            // local_modulus >= gamma - tolerance
  bool slope_bound;      // min_slope >= gamma - tolerance
  bool agree;
};

struct Prop2Report {
  double delta;
  double gamma;
  double convexity_violation;
  std::vector<Prop2Row> rows;
  /// Both sides agree at the finest h.
  bool equivalence_holds;
};

/// Slope-versus-growth comparison on the closed ball B(ref, delta) of a
/// tree functional, across a decreasing h_sequence. Throws
/// PreconditionError if J fails geodesic convexity on the ball samples.
Prop2Report prop2_check(const TreeFunctional& J, double delta, double gamma,
                        std::span<const double> h_sequence);

}  // namespace sharpmin
