#include "sharpmin/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sharpmin/errors.hpp"
#include "sharpmin/sharpness.hpp"

namespace sharpmin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Axes = std::vector<std::vector<double>>;

Axes grid_axes(const GridFunction& g) {
  Axes axes(g.dimension());
  for (std::size_t a = 0; a < g.dimension(); ++a) axes[a] = g.axis_coordinates(a);
  return axes;
}

std::vector<double> raw_values(const GridFunction& g) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = g.value(i).raw();
  return v;
}

std::vector<Extended> to_extended(const std::vector<double>& v) {
  std::vector<Extended> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == -kInf) throw ArithmeticError("transform produced -inf (no finite primal value)");
    out[i] = v[i];
  }
  return out;
}

// out[j] = max_i xi[j] * x[i] - phi[i] over finite phi (x and xi ascending).
// Lower hull of (x, phi) followed by one sweep: the maximizer for slope xi
// is the hull vertex whose incoming and outgoing slopes bracket xi.
void conjugate_line(const std::vector<double>& x, const std::vector<double>& phi,
                    const std::vector<double>& xi, std::vector<double>& out) {
  std::vector<double> hx, hy, slope;  // slope[k] joins vertex k and k+1
  hx.reserve(x.size());
  hy.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(phi[i])) continue;
    while (!hx.empty()) {
      const double s = (phi[i] - hy.back()) / (x[i] - hx.back());
      if (!slope.empty() && slope.back() >= s) {
        hx.pop_back();
        hy.pop_back();
        slope.pop_back();
        continue;
      }
      slope.push_back(s);
      break;
    }
    hx.push_back(x[i]);
    hy.push_back(phi[i]);
  }
  out.assign(xi.size(), -kInf);
  if (hx.empty()) return;
  std::size_t k = 0;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    while (k < slope.size() && slope[k] <= xi[j]) ++k;
    out[j] = xi[j] * hx[k] - hy[k];
  }
}

// Per-axis factorization of sup_x <xi, x> - phi(x) over a product grid.
std::vector<double> factorized_transform(const Axes& src, std::vector<double> values,
                                         const Axes& dst) {
  const std::size_t d = src.size();
  std::vector<std::size_t> shape(d);
  for (std::size_t a = 0; a < d; ++a) shape[a] = src[a].size();
  std::vector<double> line_in, line_out;
  for (std::size_t a = 0; a < d; ++a) {
    // After the first pass, sup_{x_a} xi_a x_a + g = conjugate of -g.
    if (a > 0)
      for (double& v : values) v = -v;
    std::size_t outer = 1, inner = 1;
    for (std::size_t b = 0; b < a; ++b) outer *= shape[b];
    for (std::size_t b = a + 1; b < d; ++b) inner *= shape[b];
    const std::size_t n_in = shape[a], n_out = dst[a].size();
    std::vector<double> next(outer * n_out * inner);
    line_in.resize(n_in);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i) {
        for (std::size_t k = 0; k < n_in; ++k) line_in[k] = values[(o * n_in + k) * inner + i];
        conjugate_line(src[a], line_in, dst[a], line_out);
        for (std::size_t k = 0; k < n_out; ++k) next[(o * n_out + k) * inner + i] = line_out[k];
      }
    values = std::move(next);
    shape[a] = n_out;
  }
  return values;
}

GridFunction with_values(const GridFunction& shape, std::vector<Extended> values) {
  return GridFunction(shape.lower(), shape.upper(), shape.resolution(), std::move(values));
}

}  // namespace

DualGrid::DualGrid(std::vector<double> half_widths, std::vector<std::size_t> resolution)
    : half_widths_(std::move(half_widths)), resolution_(std::move(resolution)) {
  if (half_widths_.empty() || half_widths_.size() > kMaxDimension)
    throw InputError("dual grid: dimension must be 1..3");
  if (half_widths_.size() != resolution_.size())
    throw InputError("dual grid: half-widths and resolution differ in dimension");
  for (std::size_t a = 0; a < half_widths_.size(); ++a) {
    if (!(half_widths_[a] > 0.0) || !std::isfinite(half_widths_[a]))
      throw InputError("dual grid: half-widths must be positive");
    if (resolution_[a] < 2) throw InputError("dual grid: resolution must be >= 2");
  }
}

GridFunction DualGrid::shape() const {
  std::vector<double> lo(dimension()), hi(dimension());
  std::size_t count = 1;
  for (std::size_t a = 0; a < dimension(); ++a) {
    lo[a] = -half_widths_[a];
    hi[a] = half_widths_[a];
    count *= resolution_[a];
  }
  return GridFunction(lo, hi, resolution_, std::vector<Extended>(count, Extended(0.0)));
}

std::vector<double> required_dual_range(const GridFunction& f) {
  std::vector<double> req(f.dimension(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.value(i).is_infinite()) continue;
    auto idx = f.multi_index(i);
    for (std::size_t a = 0; a < f.dimension(); ++a) {
      if (idx[a] + 1 >= f.resolution(a)) continue;
      auto nb = idx;
      ++nb[a];
      const Extended w = f.value(f.flat_index(std::span(nb.data(), f.dimension())));
      if (w.is_infinite()) continue;
      const double h = f.coordinate(a, nb[a]) - f.coordinate(a, idx[a]);
      req[a] = std::max(req[a], std::abs(w.value() - f.value(i).value()) / h);
    }
  }
  return req;
}

DualGrid auto_dual_grid(const GridFunction& f) {
  auto req = required_dual_range(f);
  std::vector<std::size_t> res(f.dimension());
  for (std::size_t a = 0; a < f.dimension(); ++a) {
    if (req[a] == 0.0) req[a] = 1.0;
    // Odd counts keep xi = 0 on the grid.
    res[a] = f.resolution(a) | 1u;
  }
  return DualGrid(std::move(req), std::move(res));
}

void check_dual_range(const GridFunction& f, const DualGrid& dual) {
  if (dual.dimension() != f.dimension())
    throw InputError("dual grid dimension differs from the primal grid");
  const auto req = required_dual_range(f);
  for (std::size_t a = 0; a < req.size(); ++a) {
    if (dual.half_width(a) < req[a] * (1.0 - 1e-9)) {
      std::ostringstream os;
      os.precision(17);
      os << "dual range " << dual.half_width(a) << " on axis " << a
         << " is below the required bound " << req[a];
      throw DualRangeError(os.str(), req);
    }
  }
}

GridFunction conjugate(const GridFunction& f, const DualGrid& dual) {
  check_dual_range(f, dual);
  const GridFunction shape = dual.shape();
  auto values = factorized_transform(grid_axes(f), raw_values(f), grid_axes(shape));
  return with_values(shape, to_extended(values));
}

GridFunction conjugate_direct(const GridFunction& f, const DualGrid& dual) {
  check_dual_range(f, dual);
  const GridFunction shape = dual.shape();
  std::vector<Point> xs;
  std::vector<double> fx;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.value(i).is_infinite()) continue;
    xs.push_back(f.node(i));
    fx.push_back(f.value(i).value());
  }
  std::vector<Extended> out(shape.size());
  for (std::size_t j = 0; j < shape.size(); ++j) {
    const Point xi = shape.node(j);
    double best = -kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) best = std::max(best, dot(xi, xs[i]) - fx[i]);
    out[j] = best;
  }
  return with_values(shape, std::move(out));
}

GridFunction biconjugate(const GridFunction& f, const DualGrid& dual) {
  return legendre_transform(f, dual).biconjugate;
}

TransformResult legendre_transform(const GridFunction& f, const DualGrid& dual) {
  GridFunction fstar = conjugate(f, dual);
  auto back = factorized_transform(grid_axes(fstar), raw_values(fstar), grid_axes(f));

  // Outside the finite region's bounding box the lsc convex envelope is +inf;
  // the truncated dual grid cannot see that, so it is imposed here.
  std::vector<std::size_t> lo(f.dimension(), std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> hi(f.dimension(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.value(i).is_infinite()) continue;
    const auto idx = f.multi_index(i);
    for (std::size_t a = 0; a < f.dimension(); ++a) {
      lo[a] = std::min(lo[a], idx[a]);
      hi[a] = std::max(hi[a], idx[a]);
    }
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = f.multi_index(i);
    for (std::size_t a = 0; a < f.dimension(); ++a)
      if (idx[a] < lo[a] || idx[a] > hi[a]) back[i] = kInf;
  }
  GridFunction fss = with_values(f, to_extended(back));

  std::vector<Point> xs;
  std::vector<double> fx;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.value(i).is_infinite()) continue;
    xs.push_back(f.node(i));
    fx.push_back(f.value(i).value());
  }
  double violation = 0.0;
  for (std::size_t j = 0; j < fstar.size(); ++j) {
    const Point xi = fstar.node(j);
    const double cj = fstar.value(j).value();
    for (std::size_t i = 0; i < xs.size(); ++i)
      violation = std::max(violation, dot(xi, xs[i]) - fx[i] - cj);
  }
  return TransformResult{std::move(fstar), std::move(fss), violation};
}

GridFunction convex_envelope_1d(const GridFunction& f) {
  if (f.dimension() != 1) throw InputError("convex_envelope_1d: grid must be 1D");
  std::vector<std::size_t> hull;
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const double ox = f.coordinate(0, o), oy = f.value(o).value();
    return (f.coordinate(0, a) - ox) * (f.value(b).value() - oy) -
           (f.value(a).value() - oy) * (f.coordinate(0, b) - ox);
  };
  std::size_t finite = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.value(i).is_infinite()) continue;
    ++finite;
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 0.0)
      hull.pop_back();
    hull.push_back(i);
  }
  if (finite < 2) throw PreconditionError("convex_envelope_1d: needs two finite values");

  std::vector<Extended> out(f.size(), Extended::infinity());
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const std::size_t a = hull[s], b = hull[s + 1];
    const double xa = f.coordinate(0, a), xb = f.coordinate(0, b);
    const double ya = f.value(a).value(), yb = f.value(b).value();
    out[a] = ya;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double t = (f.coordinate(0, i) - xa) / (xb - xa);
      out[i] = (1.0 - t) * ya + t * yb;
    }
  }
  out[hull.back()] = f.value(hull.back());
  return with_values(f, std::move(out));
}

double midpoint_convexity_violation(const GridFunction& g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.value(i).is_infinite()) continue;
    const auto idx = g.multi_index(i);
    for (std::size_t a = 0; a < g.dimension(); ++a) {
      if (idx[a] == 0 || idx[a] + 1 >= g.resolution(a)) continue;
      auto left = idx, right = idx;
      --left[a];
      ++right[a];
      const Extended l = g.value(g.flat_index(std::span(left.data(), g.dimension())));
      const Extended r = g.value(g.flat_index(std::span(right.data(), g.dimension())));
      if (l.is_infinite() || r.is_infinite()) continue;
      worst = std::max(worst, g.value(i).value() - 0.5 * (l.value() + r.value()));
    }
  }
  return worst;
}

BiconjugateSharpnessReport verify_biconjugate_sharpness(const GridFunction& f, std::size_t base,
                                                        const DualGrid& dual,
                                                        std::optional<double> tol) {
  if (base >= f.size() || f.value(base).is_infinite())
    throw PreconditionError("biconjugate sharpness: base must be a finite node");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.value(i) < f.value(base))
      throw PreconditionError("biconjugate sharpness: base does not minimize f");

  const TransformResult tr = legendre_transform(f, dual);
  BiconjugateSharpnessReport r;
  r.base = base;
  r.grid_step = f.max_step();
  r.tolerance = tol.value_or(5.0 * r.grid_step);
  r.fenchel_young_violation = tr.fenchel_young_violation;
  r.modulus = sharpness_modulus(f.to_cloud(base)).modulus;
  r.biconjugate_modulus = sharpness_modulus(tr.biconjugate.to_cloud(base)).modulus;
  r.base_value = f.value(base).value();
  r.biconjugate_base_value = tr.biconjugate.value(base).value();
  r.base_minimizes_biconjugate = true;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Extended v = tr.biconjugate.value(i);
    if (v.is_finite() && v.value() < r.biconjugate_base_value - 1e-9)
      r.base_minimizes_biconjugate = false;
  }
  r.agree = std::abs(r.modulus - r.biconjugate_modulus) <= r.tolerance &&
            std::abs(r.base_value - r.biconjugate_base_value) <= 1e-9 &&
            r.base_minimizes_biconjugate;
  return r;
}

std::vector<BiconjugateSharpnessReport> biconjugate_refinement(const ClosedForm& f,
                                                               const std::vector<double>& lower,
                                                               const std::vector<double>& upper,
                                                               const Point& base,
                                                               const std::vector<double>& steps) {
  std::vector<BiconjugateSharpnessReport> out;
  for (double h : steps) {
    std::vector<std::size_t> res(lower.size());
    for (std::size_t a = 0; a < lower.size(); ++a)
      res[a] = resolution_for_step(lower[a], upper[a], h);
    const GridFunction g = sample_to_grid(f, lower, upper, res);
    const std::size_t b = g.nearest_node(base);
    const Point node = g.node(b);
    for (std::size_t a = 0; a < node.size(); ++a)
      if (std::abs(node[a] - base[a]) > 1e-9 * h)
        throw InputError("refinement: base point is not a grid node at this step");
    out.push_back(verify_biconjugate_sharpness(g, b, auto_dual_grid(g)));
  }
  return out;
}

}  // namespace sharpmin
