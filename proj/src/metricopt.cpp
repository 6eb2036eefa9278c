#include "sharpmin/metricopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sharpmin/errors.hpp"

namespace sharpmin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw PreconditionError(std::string(what) + " must be positive");
}

std::vector<double> unit_s_grid(std::size_t pieces) {
  std::vector<double> s(pieces + 1);
  for (std::size_t k = 0; k <= pieces; ++k)
    s[k] = static_cast<double>(k) / static_cast<double>(pieces);
  return s;
}

}  // namespace

LocalSharpnessParams::LocalSharpnessParams(double delta_, double gamma_)
    : delta(delta_), gamma(gamma_) {
  if (!(delta > 0.0)) throw InputError("delta must be positive (inf allowed)");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be positive");
}

SpaceFunctional::SpaceFunctional(FiniteMetricSpace space, std::vector<Extended> values,
                                 std::size_t reference)
    : space_(std::move(space)), values_(std::move(values)), reference_(reference) {
  if (values_.size() != space_.size())
    throw InputError("functional: value count differs from the space size");
  if (reference_ >= values_.size()) throw InputError("functional: reference out of range");
  if (values_[reference_].is_infinite()) throw InputError("functional: J(reference) is +inf");
}

TreeFunctional::TreeFunctional(MetricTree tree, Evaluator eval, TreeLocation reference)
    : tree_(std::move(tree)), eval_(std::move(eval)), reference_(reference) {
  tree_.validate(reference_);
}

TreeFunctional TreeFunctional::from_combination(MetricTree tree, DistanceCombination phi,
                                                TreeLocation reference) {
  for (const auto& term : phi.terms()) tree.validate(term.anchor);
  return TreeFunctional(
      std::move(tree),
      [phi = std::move(phi)](const MetricTree& t, const TreeLocation& v) { return phi(t, v); },
      reference);
}

TreeFunctional TreeFunctional::from_terms(MetricTree tree, std::vector<PowerDistanceTerm> terms,
                                          TreeLocation reference) {
  if (terms.empty()) throw InputError("tree functional needs at least one term");
  for (const auto& term : terms) {
    tree.validate(term.anchor);
    if (!(term.coefficient >= 0.0) || !std::isfinite(term.coefficient))
      throw InputError("tree functional coefficients must be finite and nonnegative");
    if (term.power != 1 && term.power != 2) throw InputError("term power must be 1 or 2");
  }
  return TreeFunctional(
      std::move(tree),
      [terms = std::move(terms)](const MetricTree& t, const TreeLocation& v) {
        double sum = 0.0;
        for (const auto& term : terms) {
          const double d = tree_distance(t, v, term.anchor);
          sum += term.coefficient * (term.power == 2 ? d * d : d);
        }
        return sum;
      },
      reference);
}

SpaceFunctional restrict_to_samples(const TreeFunctional& J, std::vector<TreeLocation> samples) {
  auto it = std::find(samples.begin(), samples.end(), J.reference());
  std::size_t ref = static_cast<std::size_t>(it - samples.begin());
  if (it == samples.end()) samples.push_back(J.reference());
  const std::size_t n = samples.size();
  DistanceMatrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      m[i][j] = m[j][i] = tree_distance(J.tree(), samples[i], samples[j]);
  std::vector<Extended> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = J(samples[i]);
  return SpaceFunctional(FiniteMetricSpace(std::move(m)), std::move(values), ref);
}

// Ekeland

EkelandResult ekeland(const SpaceFunctional& J, std::size_t start, double epsilon,
                      double lambda) {
  require_positive(epsilon, "epsilon");
  require_positive(lambda, "lambda");
  if (start >= J.size()) throw PreconditionError("ekeland: start index out of range");
  if (J.value(start).is_infinite()) throw PreconditionError("ekeland: J(start) is +inf");
  double inf = kInf;
  for (Extended v : J.values()) inf = std::min(inf, v.raw());
  if (J.value(start).value() > inf + epsilon) {
    std::ostringstream os;
    os << "ekeland: J(start) = " << J.value(start) << " exceeds inf J + eps = " << inf + epsilon;
    throw PreconditionError(os.str());
  }
  const double eta = epsilon / lambda;
  const auto& space = J.space();
  EkelandResult r{start, start, epsilon, lambda, {start}};
  std::size_t x = start;
  for (;;) {
    const double jx = J.value(x).value();
    std::size_t next = x;
    for (std::size_t y = 0; y < J.size(); ++y) {
      if (y == x || J.value(y).is_infinite()) continue;
      const double jy = J.value(y).value();
      // jy < jx guards against eta * d vanishing in rounding.
      if (jy <= jx - eta * space.distance(x, y) && jy < jx &&
          (next == x || jy < J.value(next).value()))
        next = y;
    }
    if (next == x) break;
    x = next;
    r.trace.push_back(x);
  }
  r.output = x;
  return r;
}

EkelandCheck check_ekeland(const SpaceFunctional& J, const EkelandResult& r) {
  EkelandCheck c;
  const double jout = J.value(r.output).value();
  c.value_decreased = jout <= J.value(r.input).value();
  c.within_lambda = J.space().distance(r.input, r.output) <= r.lambda;
  const double eta = r.epsilon / r.lambda;
  c.unique_perturbed_min = true;
  for (std::size_t v = 0; v < J.size(); ++v) {
    if (v == r.output || J.value(v).is_infinite()) continue;
    if (!(J.value(v).value() + eta * J.space().distance(v, r.output) > jout))
      c.unique_perturbed_min = false;
  }
  return c;
}

// Slopes and local sharpness

double local_slope_h(const SpaceFunctional& J, std::size_t u, double h) {
  require_positive(h, "h");
  if (u >= J.size()) throw PreconditionError("local_slope_h: index out of range");
  if (J.value(u).is_infinite()) throw PreconditionError("local_slope_h: J(u) is +inf");
  const double ju = J.value(u).value();
  double slope = 0.0;
  for (std::size_t v = 0; v < J.size(); ++v) {
    const double d = J.space().distance(u, v);
    if (v == u || d > h || J.value(v).is_infinite()) continue;
    slope = std::max(slope, std::max(ju - J.value(v).value(), 0.0) / d);
  }
  return slope;
}

double local_slope_h(const TreeFunctional& J, const TreeLocation& u, double h,
                     std::size_t radial_samples) {
  require_positive(h, "h");
  if (radial_samples == 0) throw PreconditionError("local_slope_h: need radial samples");
  const double ju = J(u);
  double slope = 0.0;
  for (std::size_t k = 1; k <= radial_samples; ++k) {
    const double r = h * static_cast<double>(k) / static_cast<double>(radial_samples);
    for (const TreeLocation& v : locations_at_distance(J.tree(), u, r)) {
      const double d = tree_distance(J.tree(), u, v);
      if (d > 0.0) slope = std::max(slope, std::max(ju - J(v), 0.0) / d);
    }
  }
  return slope;
}

double local_sharpness(const SpaceFunctional& J, double delta) {
  require_positive(delta, "delta");
  const std::size_t ref = J.reference();
  const double jref = J.value(ref).value();
  double gamma = kInf;
  bool punctured_nonempty = false;
  for (std::size_t u = 0; u < J.size(); ++u) {
    const double d = J.space().distance(u, ref);
    if (u == ref || d > delta) continue;
    punctured_nonempty = true;
    if (J.value(u).is_infinite()) continue;
    if (J.value(u).value() < jref)
      throw PreconditionError("local_sharpness: reference does not minimize J on the ball");
    gamma = std::min(gamma, (J.value(u).value() - jref) / d);
  }
  if (!punctured_nonempty) throw PreconditionError("local_sharpness: punctured ball is empty");
  return gamma;
}

double local_sharpness(const TreeFunctional& J, double delta, double spacing) {
  require_positive(delta, "delta");
  const double jref = J(J.reference());
  double gamma = kInf;
  bool punctured_nonempty = false;
  for (const TreeLocation& u : sample_tree(J.tree(), spacing)) {
    if (u == J.reference()) continue;
    const double d = tree_distance(J.tree(), u, J.reference());
    if (d > delta) continue;
    punctured_nonempty = true;
    const double ju = J(u);
    if (ju < jref)
      throw PreconditionError("local_sharpness: reference does not minimize J on the ball");
    gamma = std::min(gamma, (ju - jref) / d);
  }
  if (!punctured_nonempty) throw PreconditionError("local_sharpness: punctured ball is empty");
  return gamma;
}

std::vector<std::size_t> thm2_probe(const SpaceFunctional& J, std::span<const double> zeta,
                                    double L, double delta) {
  require_positive(delta, "delta");
  require_positive(L, "L");
  const auto& m = J.space();
  if (zeta.size() != J.size()) throw PreconditionError("thm2_probe: zeta has the wrong size");
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    if (!std::isfinite(zeta[i])) throw PreconditionError("thm2_probe: zeta must be finite");
    for (std::size_t j = i + 1; j < zeta.size(); ++j)
      if (std::abs(zeta[i] - zeta[j]) > L * m.distance(i, j) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "thm2_probe: zeta is not " << L << "-Lipschitz at (" << i << "," << j << ")";
        throw PreconditionError(os.str());
      }
  }
  std::vector<std::size_t> arg;
  double best = kInf;
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (J.value(i).is_infinite()) continue;
    const double v = J.value(i).value() + zeta[i];
    if (v < best) {
      best = v;
      arg.assign(1, i);
    } else if (v == best) {
      arg.push_back(i);
    }
  }
  std::vector<std::size_t> in_ball;
  for (std::size_t i : arg)
    if (m.distance(i, J.reference()) <= delta) in_ball.push_back(i);
  return in_ball;
}

// Geodesic inequalities

InequalityCheck geodesic_convexity_check(const MetricTree& t, const TreeScalar& phi,
                                         std::span<const LocationPair> pairs,
                                         std::span<const double> s_grid, double tol) {
  if (pairs.empty() || s_grid.empty())
    throw PreconditionError("geodesic_convexity_check: empty sample");
  InequalityCheck c;
  c.worst_violation = -kInf;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [u, v] = pairs[p];
    const double pu = phi(u), pv = phi(v);
    for (double s : s_grid) {
      const double lhs = phi(tree_geodesic(t, u, v, s));
      const double viol = lhs - ((1.0 - s) * pu + s * pv);
      ++c.evaluations;
      if (viol > c.worst_violation) {
        c.worst_violation = viol;
        c.witness = p;
        c.witness_s = s;
      }
    }
  }
  c.ok = c.worst_violation <= tol;
  return c;
}

InequalityCheck geodesic_convexity_check(const MetricTree& t, const DistanceCombination& phi,
                                         std::span<const LocationPair> pairs,
                                         std::span<const double> s_grid, double tol) {
  return geodesic_convexity_check(
      t, [&](const TreeLocation& x) { return phi(t, x); }, pairs, s_grid, tol);
}

InequalityCheck cat0_check(const MetricTree& t, std::span<const std::array<TreeLocation, 3>> triples,
                           std::span<const double> s_grid, double tol) {
  if (triples.empty() || s_grid.empty()) throw PreconditionError("cat0_check: empty sample");
  InequalityCheck c;
  c.worst_violation = -kInf;
  for (std::size_t q = 0; q < triples.size(); ++q) {
    const auto& [u, v, w] = triples[q];
    const double dvu = tree_distance(t, v, u), dwu = tree_distance(t, w, u);
    const double dvw = tree_distance(t, v, w);
    for (double s : s_grid) {
      const double dsu = tree_distance(t, tree_geodesic(t, v, w, s), u);
      const double rhs = (1.0 - s) * dvu * dvu + s * dwu * dwu - s * (1.0 - s) * dvw * dvw;
      const double viol = dsu * dsu - rhs;
      ++c.evaluations;
      if (viol > c.worst_violation) {
        c.worst_violation = viol;
        c.witness = q;
        c.witness_s = s;
      }
    }
  }
  c.ok = c.worst_violation <= tol;
  return c;
}

std::pair<std::size_t, double> finite_geodesic_point(const FiniteMetricSpace& m, std::size_t v,
                                                     std::size_t w, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InputError("geodesic parameter must lie in [0, 1]");
  const double D = m.distance(v, w);
  std::size_t best = v;
  double best_defect = kInf;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double defect = std::max(std::abs(m.distance(v, k) - s * D),
                                   std::abs(m.distance(k, w) - (1.0 - s) * D));
    if (defect < best_defect) {
      best_defect = defect;
      best = k;
    }
  }
  return {best, best_defect};
}

InequalityCheck cat0_check(const FiniteMetricSpace& m,
                           std::span<const std::array<std::size_t, 3>> triples,
                           std::span<const double> s_grid, double tol) {
  if (triples.empty() || s_grid.empty()) throw PreconditionError("cat0_check: empty sample");
  InequalityCheck c;
  c.worst_violation = -kInf;
  c.approximate_geodesics = true;
  for (std::size_t q = 0; q < triples.size(); ++q) {
    const auto [u, v, w] = triples[q];
    if (u >= m.size() || v >= m.size() || w >= m.size())
      throw InputError("cat0_check: index out of range");
    const double dvu = m.distance(v, u), dwu = m.distance(w, u), dvw = m.distance(v, w);
    for (double s : s_grid) {
      const auto [mid, defect] = finite_geodesic_point(m, v, w, s);
      c.geodesic_defect = std::max(c.geodesic_defect, defect);
      const double dsu = m.distance(mid, u);
      const double rhs = (1.0 - s) * dvu * dvu + s * dwu * dwu - s * (1.0 - s) * dvw * dvw;
      const double viol = dsu * dsu - rhs;
      ++c.evaluations;
      if (viol > c.worst_violation) {
        c.worst_violation = viol;
        c.witness = q;
        c.witness_s = s;
      }
    }
  }
  c.ok = c.worst_violation <= tol;
  return c;
}

// Corollary-style probe and slope/growth comparison

Cor2Result cor2_probe(const TreeFunctional& J, const DistanceCombination& phi, double delta,
                      double gamma, bool require_slope_bound) {
  require_positive(delta, "delta");
  require_positive(gamma, "gamma");
  const MetricTree& t = J.tree();
  if (!J.reference().is_node())
    throw PreconditionError("cor2_probe: the reference must be a tree node");
  for (const auto& term : phi.terms()) t.validate(term.anchor);

  double shortest = kInf;
  for (const auto& e : t.edges()) shortest = std::min(shortest, e.length);
  const TreeFunctional phi_fn(t, [&phi](const MetricTree& tt, const TreeLocation& v) {
    return phi(tt, v);
  }, J.reference());
  Cor2Result r{};
  double h = shortest;
  for (int k = 0; k < 6; ++k) {
    h *= 0.5;
    r.slope_estimate = local_slope_h(phi_fn, J.reference(), h);
  }
  if (require_slope_bound && !(r.slope_estimate < gamma)) {
    std::ostringstream os;
    os << "cor2_probe: slope of phi at the reference (" << r.slope_estimate
       << ") is not below gamma (" << gamma << ")";
    throw PreconditionError(os.str());
  }

  std::vector<std::size_t> arg;
  double best = kInf;
  for (std::size_t n = 0; n < t.node_count(); ++n) {
    const TreeLocation v = t.node(n);
    const double val = J(v) + phi(t, v);
    if (val < best) {
      best = val;
      arg.assign(1, n);
    } else if (val == best) {
      arg.push_back(n);
    }
  }
  for (std::size_t n : arg)
    if (tree_distance(t, t.node(n), J.reference()) <= delta) r.argmin_in_ball.push_back(n);
  return r;
}

Prop2Report prop2_check(const TreeFunctional& J, double delta, double gamma,
                        std::span<const double> h_sequence) {
  require_positive(delta, "delta");
  require_positive(gamma, "gamma");
  if (h_sequence.empty()) throw PreconditionError("prop2_check: empty h sequence");
  for (std::size_t i = 0; i < h_sequence.size(); ++i) {
    require_positive(h_sequence[i], "h");
    if (i > 0 && !(h_sequence[i] < h_sequence[i - 1]))
      throw PreconditionError("prop2_check: h sequence must be strictly decreasing");
  }
  const MetricTree& t = J.tree();
  const TreeLocation& ref = J.reference();
  constexpr std::size_t kRadial = 16;

  auto ball_samples = [&](double spacing) {
    std::vector<TreeLocation> out;
    for (const TreeLocation& u : sample_tree(t, spacing))
      if (!(u == ref) && tree_distance(t, u, ref) <= delta) out.push_back(u);
    return out;
  };

  // Convexity on the ball, sampled at the coarsest spacing.
  auto coarse = ball_samples(h_sequence.front());
  coarse.push_back(ref);
  std::vector<LocationPair> pairs;
  const std::size_t n = coarse.size();
  const std::size_t stride = std::max<std::size_t>(1, n * n / 4000);
  for (std::size_t idx = 0; idx < n * n; idx += stride) {
    const std::size_t i = idx / n, j = idx % n;
    if (i < j) pairs.emplace_back(coarse[i], coarse[j]);
  }
  if (pairs.empty()) pairs.emplace_back(ref, ref);
  const auto s_grid = unit_s_grid(10);
  const auto conv =
      geodesic_convexity_check(t, [&](const TreeLocation& x) { return J(x); }, pairs, s_grid);
  if (!conv.ok) {
    std::ostringstream os;
    os << "prop2_check: J is not geodesically convex on the ball (violation "
       << conv.worst_violation << ")";
    throw PreconditionError(os.str());
  }

  Prop2Report rep{delta, gamma, std::max(conv.worst_violation, 0.0), {}, false};
  const double jref = J(ref);
  for (double h : h_sequence) {
    Prop2Row row{h, kInf, kInf, 1e-9 + h / static_cast<double>(kRadial), false, false, false};
    const auto samples = ball_samples(h);
    if (samples.empty()) throw PreconditionError("prop2_check: punctured ball is empty");
    for (const TreeLocation& u : samples) {
      const double ju = J(u);
      if (ju < jref)
        throw PreconditionError("prop2_check: reference does not minimize J on the ball");
      row.local_modulus = std::min(row.local_modulus, (ju - jref) / tree_distance(t, u, ref));
      row.min_slope = std::min(row.min_slope, local_slope_h(J, u, h, kRadial));
    }
    row.sharp = row.local_modulus >= gamma - row.tolerance;
    row.slope_bound = row.min_slope >= gamma - row.tolerance;
    row.agree = row.sharp == row.slope_bound;
    rep.rows.push_back(row);
  }
  rep.equivalence_holds = rep.rows.back().agree;
  return rep;
}

}  // namespace sharpmin
