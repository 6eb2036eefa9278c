#include "sharpmin/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "sharpmin/errors.hpp"
#include "sharpmin/io.hpp"
#include "sharpmin/legendre.hpp"
#include "sharpmin/metricopt.hpp"
#include "sharpmin/sampling.hpp"
#include "sharpmin/sharpness.hpp"

namespace sharpmin::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kExactTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// A flag combination the run refuses to act on.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json header(const std::string& sub) {
  return {{"schema_version", kSchemaVersion}, {"subcommand", sub}};
}

json index_list(const std::vector<std::size_t>& v) { return json(v); }

double tolerance(const RunConfig& c) {
  if (c.tol && !(*c.tol > 0.0)) throw InputError("--tol must be positive");
  return c.tol.value_or(kExactTol);
}

std::vector<double> refine_schedule(const RunConfig& c) {
  auto hs = parse_list(c.refine, "--refine");
  if (hs.empty()) throw InputError("--refine needs at least one step");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw InputError("--refine steps must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1])) throw InputError("--refine steps must strictly decrease");
  }
  return hs;
}

double min_edge(const MetricTree& t) {
  double m = kInf;
  for (const auto& e : t.edges()) m = std::min(m, e.length);
  return m;
}

double tree_spacing(const RunConfig& c, const MetricTree& t) {
  if (c.spacing) {
    if (!(*c.spacing > 0.0)) throw InputError("--spacing must be positive");
    return *c.spacing;
  }
  return min_edge(t) / 4.0;
}

// Function inputs for analyze / transform / mesh.

PointCloudFunction load_cloud(const json& j) {
  switch (io::detect_kind(j)) {
    case io::FileKind::Cloud:
      return io::cloud_from_json(j);
    case io::FileKind::Grid: {
      auto g = io::grid_from_json(j);
      const auto base = io::grid_base_index(j).value_or(g.argmin());
      if (base >= g.size()) throw InputError("base_index out of range");
      return g.to_cloud(base);
    }
    case io::FileKind::Fixture: {
      auto fx = io::fixture_from_json(j);
      if (fx.spec.resolution.empty()) throw InputError("fixture needs a resolution");
      return sample_to_cloud(fx.function, fx.spec);
    }
    default:
      throw InputError("expected a point-cloud, grid or fixture file");
  }
}

struct GridInput {
  GridFunction grid;
  std::size_t base;
};

GridInput load_grid(const json& j) {
  if (io::detect_kind(j) == io::FileKind::Grid) {
    auto g = io::grid_from_json(j);
    const auto base = io::grid_base_index(j).value_or(g.argmin());
    if (base >= g.size()) throw InputError("base_index out of range");
    return {std::move(g), base};
  }
  if (io::detect_kind(j) == io::FileKind::Fixture) {
    auto fx = io::fixture_from_json(j);
    if (fx.spec.resolution.empty()) throw InputError("fixture needs a resolution");
    auto g = sample_to_grid(fx.function, fx.spec.lower, fx.spec.upper, fx.spec.resolution);
    const auto base = g.nearest_node(fx.spec.base);
    return {std::move(g), base};
  }
  throw InputError("expected a grid or fixture file");
}

json slopes_json(const SharpnessReport& r) {
  json s = json::array();
  for (const auto& v : r.slopes) s.push_back(v ? io::real_to_json(*v) : json(nullptr));
  return s;
}

// analyze

int cmd_analyze(const RunConfig& c, std::ostream& out) {
  const json in = io::read_json_file(c.input);
  const double tol = tolerance(c);
  json rep = header("analyze");
  rep["tolerance"] = tol;
  bool ok = true;

  auto analyze_one = [&](const PointCloudFunction& f) {
    json r;
    try {
      const auto s = verify_characterizations(f, tol);
      r = {{"modulus", io::real_to_json(s.modulus)},
           {"slope_infimum", io::real_to_json(s.slope_infimum)},
           {"tilt_radius", io::real_to_json(s.tilt_radius)},
           {"agreement", true},
           {"witness", s.witness},
           {"base_index", s.base_index},
           {"sharp", s.sharp()},
           {"slopes", slopes_json(s)}};
    } catch (const CharacterizationMismatch& e) {
      r = {{"modulus", io::real_to_json(e.modulus())},
           {"slope_infimum", io::real_to_json(e.slope_infimum())},
           {"tilt_radius", io::real_to_json(e.tilt_radius())},
           {"agreement", false},
           {"base_index", f.base_index()},
           {"message", e.what()}};
      ok = false;
    }
    return r;
  };

  if (!c.refine.empty()) {
    if (io::detect_kind(in) != io::FileKind::Fixture)
      throw ConfigError("--refine needs a closed-form fixture input");
    const auto fx = io::fixture_from_json(in);
    json rows = json::array();
    std::vector<double> moduli;
    for (double h : refine_schedule(c)) {
      SamplingSpec spec = fx.spec;
      spec.resolution.clear();
      for (std::size_t a = 0; a < spec.lower.size(); ++a)
        spec.resolution.push_back(resolution_for_step(spec.lower[a], spec.upper[a], h));
      json r = analyze_one(sample_to_cloud(fx.function, spec));
      r.erase("slopes");
      r["h"] = h;
      moduli.push_back(r["modulus"].is_number() ? r["modulus"].get<double>() : kInf);
      rows.push_back(std::move(r));
    }
    rep["fixture"] = fx.name;
    rep["refinement"] = rows;
    rep["monotone_nonincreasing"] = std::is_sorted(moduli.rbegin(), moduli.rend());
  } else {
    rep.update(analyze_one(load_cloud(in)));
  }
  io::write_json_file(fs::path(c.out) / "report.json", rep);
  out << "analyze: agreement " << (ok ? "true" : "false") << "\n";
  return ok ? kOk : kCheckFailed;
}

// transform

DualGrid dual_grid_for(const RunConfig& c, const GridFunction& f) {
  if (c.dual_range == "auto") {
    if (c.dual_resolution == 0) return auto_dual_grid(f);
    const auto a = auto_dual_grid(f);
    return DualGrid(a.half_widths(), std::vector<std::size_t>(f.dimension(), c.dual_resolution));
  }
  const auto L = parse_list(c.dual_range, "--dual-range");
  std::vector<double> half(f.dimension());
  if (L.size() == 1) {
    std::fill(half.begin(), half.end(), L[0]);
  } else if (L.size() == f.dimension()) {
    half = L;
  } else {
    throw InputError("--dual-range needs one value or one per axis");
  }
  std::vector<std::size_t> res = f.resolution();
  if (c.dual_resolution != 0) std::fill(res.begin(), res.end(), c.dual_resolution);
  return DualGrid(half, res);
}

int cmd_transform(const RunConfig& c, std::ostream& out) {
  const json in = io::read_json_file(c.input);
  const auto [f, base] = load_grid(in);
  const double tol = tolerance(c);
  const DualGrid dual = dual_grid_for(c, f);
  const auto tr = legendre_transform(f, dual);  // may raise the range guard

  const fs::path dir(c.out);
  io::write_json_file(dir / "conjugate.json", io::grid_to_json(tr.conjugate));
  io::write_json_file(dir / "biconjugate.json", io::grid_to_json(tr.biconjugate));

  json rep = header("transform");
  rep["tolerance"] = tol;
  rep["dual"] = {{"half_widths", dual.half_widths()},
                 {"resolution", dual.resolution()},
                 {"auto", c.dual_range == "auto"}};
  rep["required_dual_range"] = required_dual_range(f);
  rep["fenchel_young_violation"] = tr.fenchel_young_violation;
  rep["biconjugate_midpoint_convexity_violation"] =
      midpoint_convexity_violation(tr.biconjugate);
  bool ok = tr.fenchel_young_violation <= tol;

  double max_gap = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Extended a = f.value(i), b = tr.biconjugate.value(i);
    if (a.is_finite() && b.is_finite()) max_gap = std::max(max_gap, b.value() - a.value());
  }
  rep["biconjugate_above_input"] = max_gap;
  ok = ok && max_gap <= tol;

  if (f.dimension() == 1) {
    const auto env = convex_envelope_1d(f);
    io::write_json_file(dir / "envelope.json", io::grid_to_json(env));
    double gap = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Extended a = env.value(i), b = tr.biconjugate.value(i);
      if (a.is_finite() && b.is_finite()) gap = std::max(gap, std::abs(a.value() - b.value()));
    }
    const double slope = *std::max_element(dual.half_widths().begin(), dual.half_widths().end());
    const double env_tol = std::max(1e-6, 2.0 * f.max_step() * slope);
    rep["envelope"] = {{"max_gap", gap}, {"tolerance", env_tol}, {"agree", gap <= env_tol}};
    ok = ok && gap <= env_tol;
  }

  if (base == f.argmin()) {
    const auto s = verify_biconjugate_sharpness(f, base, dual);
    rep["sharpness_comparison"] = {{"base", s.base},
                                   {"grid_step", s.grid_step},
                                   {"modulus", io::real_to_json(s.modulus)},
                                   {"biconjugate_modulus", io::real_to_json(s.biconjugate_modulus)},
                                   {"base_value", s.base_value},
                                   {"biconjugate_base_value", s.biconjugate_base_value},
                                   {"base_minimizes_biconjugate", s.base_minimizes_biconjugate},
                                   {"tolerance", s.tolerance},
                                   {"agree", s.agree}};
    ok = ok && s.agree;
  } else {
    rep["sharpness_comparison"] = nullptr;
  }
  rep["ok"] = ok;
  io::write_json_file(dir / "report.json", rep);
  out << "transform: " << (ok ? "ok" : "check failed") << "\n";
  return ok ? kOk : kCheckFailed;
}

// Metric-space inputs shared by probe and metric.

struct MetricInput {
  std::optional<FiniteMetricSpace> space;
  std::optional<MetricTree> tree;
  std::optional<json> functional;
};

MetricInput load_metric_input(const RunConfig& c, const json& in) {
  MetricInput m;
  if (io::detect_kind(in) == io::FileKind::Metric) {
    m.space = io::metric_from_json(in);
  } else if (io::detect_kind(in) == io::FileKind::Tree) {
    m.tree = io::tree_from_json(in);
  } else {
    throw InputError("expected a metric or tree file");
  }
  if (!c.functional.empty()) {
    m.functional = io::read_json_file(c.functional);
  } else if (in.contains("functional")) {
    m.functional = in["functional"];
  }
  return m;
}

SpaceFunctional require_space_functional(const RunConfig& c, const MetricInput& m,
                                         std::vector<TreeLocation>* samples = nullptr) {
  if (!m.functional) throw InputError("a functional is required (--functional)");
  if (m.space) return io::space_functional_from_json(*m.space, *m.functional);
  const auto J = io::tree_functional_from_json(*m.tree, *m.functional);
  auto pts = sample_tree(*m.tree, tree_spacing(c, *m.tree));
  if (std::find(pts.begin(), pts.end(), J.reference()) == pts.end())
    pts.push_back(J.reference());
  if (samples) *samples = pts;
  return restrict_to_samples(J, pts);
}

TreeFunctional require_tree_functional(const MetricInput& m) {
  if (!m.tree) throw ConfigError("this check needs a tree input (finite spaces have no geodesics)");
  if (!m.functional) throw InputError("a functional is required (--functional)");
  return io::tree_functional_from_json(*m.tree, *m.functional);
}

// McShane values min_k g_k + L d(i, a_k) on a finite space.
std::vector<double> mcshane_values(const FiniteMetricSpace& s, const std::vector<std::size_t>& a,
                                   const std::vector<double>& g, double L) {
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = x + 1; y < a.size(); ++y)
      if (std::abs(g[x] - g[y]) > L * s.distance(a[x], a[y]) * (1.0 + 1e-12))
        throw InputError("mcshane: infeasible constant for the given anchors");
  std::vector<double> z(s.size(), kInf);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t k = 0; k < a.size(); ++k) z[i] = std::min(z[i], g[k] + L * s.distance(i, a[k]));
  return z;
}

std::string verdict(bool predicted_invariant, bool observed_invariant) {
  if (predicted_invariant) return observed_invariant ? "invariant (predicted)" : "moved (unexpected)";
  return observed_invariant ? "invariant (not guaranteed)" : "moved (predicted)";
}

// probe

int cmd_probe(const RunConfig& c, std::ostream& out) {
  const json in = io::read_json_file(c.input);
  json rep = header("probe");
  const int given = (!c.tilt.empty()) + (!c.mcshane.empty()) + (!c.phi.empty());
  if (given != 1) throw ConfigError("probe needs exactly one of --tilt, --mcshane, --phi");
  bool predicted = false, observed = false;
  const auto kind = io::detect_kind(in);

  if (kind == io::FileKind::Metric || kind == io::FileKind::Tree) {
    const auto m = load_metric_input(c, in);
    const double delta = c.delta.value_or(kInf);
    rep["ball"] = "closed";
    rep["delta"] = io::real_to_json(delta);
    if (!c.tilt.empty()) throw ConfigError("tilts need a point cloud or grid input");
    if (!c.phi.empty()) {
      const auto J = require_tree_functional(m);
      const json jp = io::read_json_file(c.phi);
      std::vector<DistanceTerm> terms;
      for (const auto& t : jp.at("combination"))
        terms.push_back({t.at("coefficient").get<double>(),
                         io::location_from_json(*m.tree, t.at("anchor"))});
      const DistanceCombination phi(std::move(terms));
      const double gamma =
          c.gamma.value_or(local_sharpness(J, delta, tree_spacing(c, *m.tree)));
      const auto r = cor2_probe(J, phi, delta, gamma, false);
      predicted = r.slope_estimate < gamma;
      observed = r.argmin_in_ball.size() <= 1 &&
                 (r.argmin_in_ball.empty() || r.argmin_in_ball[0] == J.reference().node());
      rep["perturbation"] = {{"kind", "distance_combination"},
                             {"slope_estimate", r.slope_estimate},
                             {"lipschitz_bound", phi.lipschitz_bound()}};
      rep["gamma"] = gamma;
      rep["argmin_in_ball"] = index_list(r.argmin_in_ball);
      rep["reference"] = io::location_to_json(J.reference());
    } else {
      std::vector<TreeLocation> samples;
      const auto J = require_space_functional(c, m, &samples);
      const json jm = io::read_json_file(c.mcshane);
      const double L = jm.at("constant").get<double>();
      if (!(L > 0.0)) throw InputError("mcshane: constant must be positive");
      std::vector<double> g = jm.at("values").get<std::vector<double>>();
      std::vector<double> zeta;
      if (m.space) {
        auto a = jm.at("anchors").get<std::vector<std::size_t>>();
        if (a.size() != g.size()) throw InputError("mcshane: anchors and values differ");
        for (auto i : a)
          if (i >= J.size()) throw InputError("mcshane: anchor out of range");
        zeta = mcshane_values(J.space(), a, g, L);
      } else {
        std::vector<TreeLocation> a;
        for (const auto& x : jm.at("anchors")) a.push_back(io::location_from_json(*m.tree, x));
        if (a.size() != g.size()) throw InputError("mcshane: anchors and values differ");
        for (std::size_t x = 0; x < a.size(); ++x)
          for (std::size_t y = x + 1; y < a.size(); ++y)
            if (std::abs(g[x] - g[y]) > L * tree_distance(*m.tree, a[x], a[y]) * (1.0 + 1e-12))
              throw InputError("mcshane: infeasible constant for the given anchors");
        zeta.assign(samples.size(), kInf);
        for (std::size_t i = 0; i < samples.size(); ++i)
          for (std::size_t k = 0; k < a.size(); ++k)
            zeta[i] = std::min(zeta[i], g[k] + L * tree_distance(*m.tree, samples[i], a[k]));
      }
      const double gamma = c.gamma.value_or(local_sharpness(J, delta));
      const auto arg = thm2_probe(J, zeta, L, delta);
      predicted = L < gamma;
      observed = arg.size() <= 1 && (arg.empty() || arg[0] == J.reference());
      rep["perturbation"] = {{"kind", "mcshane"}, {"constant", L}};
      rep["gamma"] = io::real_to_json(gamma);
      rep["argmin_in_ball"] = index_list(arg);
      rep["reference"] = J.reference();
    }
  } else {
    const auto f = load_cloud(in);
    const auto mod = sharpness_modulus(f);
    std::vector<std::size_t> arg;
    if (!c.tilt.empty()) {
      const TiltVector xi(parse_list(c.tilt, "--tilt"));
      arg = tilt_probe(f, xi);
      predicted = xi.norm() < mod.modulus;
      rep["perturbation"] = {{"kind", "tilt"}, {"vector", xi.components()}, {"norm", xi.norm()}};
    } else if (!c.mcshane.empty()) {
      const json jm = io::read_json_file(c.mcshane);
      const auto zeta = mcshane_extend(jm.at("anchors").get<std::vector<Point>>(),
                                       jm.at("values").get<std::vector<double>>(),
                                       jm.at("constant").get<double>());
      arg = lipschitz_probe(f, zeta);
      predicted = zeta.constant() < mod.modulus;
      rep["perturbation"] = {{"kind", "mcshane"}, {"constant", zeta.constant()}};
    } else {
      throw ConfigError("--phi needs a tree input");
    }
    observed = arg.size() == 1 && arg[0] == f.base_index();
    rep["modulus"] = io::real_to_json(mod.modulus);
    rep["argmin"] = index_list(arg);
    rep["reference"] = f.base_index();
  }
  rep["predicted_invariant"] = predicted;
  rep["observed_invariant"] = observed;
  rep["verdict"] = verdict(predicted, observed);
  io::write_json_file(fs::path(c.out) / "report.json", rep);
  out << "probe: " << rep["verdict"].get<std::string>() << "\n";
  return predicted && !observed ? kCheckFailed : kOk;
}

// metric

json check_json(const InequalityCheck& k) {
  return {{"ok", k.ok},
          {"worst_violation", io::real_to_json(k.worst_violation)},
          {"witness_index", k.witness},
          {"witness_s", k.witness_s},
          {"evaluations", k.evaluations},
          {"approximate_geodesics", k.approximate_geodesics},
          {"geodesic_defect", k.geodesic_defect}};
}

std::vector<double> s_grid() {
  std::vector<double> s(11);
  for (std::size_t k = 0; k <= 10; ++k) s[k] = static_cast<double>(k) / 10.0;
  return s;
}

json run_cat0(const MetricInput& m, Rng& rng, bool& ok) {
  const auto s = s_grid();
  if (m.tree) {
    std::vector<std::array<TreeLocation, 3>> triples;
    for (int i = 0; i < 1000; ++i)
      triples.push_back({random_location(*m.tree, rng), random_location(*m.tree, rng),
                         random_location(*m.tree, rng)});
    const auto k = cat0_check(*m.tree, triples, s);
    json r = check_json(k);
    const auto& [u, v, w] = triples[k.witness];
    r["witness"] = {{"u", io::location_to_json(u)},
                    {"v", io::location_to_json(v)},
                    {"w", io::location_to_json(w)},
                    {"s", k.witness_s}};
    ok = ok && k.ok;
    return r;
  }
  const std::size_t n = m.space->size();
  std::vector<std::array<std::size_t, 3>> triples;
  if (n <= 20) {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w = 0; w < n; ++w) triples.push_back({u, v, w});
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int i = 0; i < 1000; ++i) triples.push_back({pick(rng), pick(rng), pick(rng)});
  }
  const auto k = cat0_check(*m.space, triples, s);
  json r = check_json(k);
  const auto [u, v, w] = triples[k.witness];
  const auto mid = finite_geodesic_point(*m.space, v, w, k.witness_s).first;
  r["witness"] = {{"u", u}, {"v", v}, {"w", w}, {"s", k.witness_s}, {"geodesic_point", mid}};
  ok = ok && k.ok;
  return r;
}

json run_gconv(const MetricInput& m, Rng& rng, bool& ok) {
  const auto J = require_tree_functional(m);
  std::vector<LocationPair> pairs;
  for (int i = 0; i < 500; ++i)
    pairs.emplace_back(random_location(J.tree(), rng), random_location(J.tree(), rng));
  const auto k = geodesic_convexity_check(
      J.tree(), [&J](const TreeLocation& x) { return J(x); }, pairs, s_grid());
  json r = check_json(k);
  r["witness"] = {{"u", io::location_to_json(pairs[k.witness].first)},
                  {"v", io::location_to_json(pairs[k.witness].second)},
                  {"s", k.witness_s}};
  ok = ok && k.ok;
  return r;
}

json run_prop2(const RunConfig& c, const MetricInput& m, bool& ok) {
  const auto J = require_tree_functional(m);
  if (!c.gamma) throw InputError("--check prop2 needs --gamma");
  std::vector<double> hs;
  if (!c.refine.empty()) {
    hs = refine_schedule(c);
  } else {
    for (int k = 1; k <= 4; ++k) hs.push_back(min_edge(J.tree()) / std::ldexp(1.0, k));
  }
  const auto rep = prop2_check(J, c.delta.value_or(kInf), *c.gamma, hs);
  json rows = json::array();
  for (const auto& row : rep.rows)
    rows.push_back({{"h", row.h},
                    {"local_modulus", io::real_to_json(row.local_modulus)},
                    {"min_slope", io::real_to_json(row.min_slope)},
                    {"tolerance", row.tolerance},
                    {"sharp", row.sharp},
                    {"slope_bound", row.slope_bound},
                    {"agree", row.agree}});
  ok = ok && rep.equivalence_holds;
  return {{"delta", io::real_to_json(rep.delta)},
          {"gamma", rep.gamma},
          {"convexity_violation", rep.convexity_violation},
          {"rows", rows},
          {"equivalence_holds", rep.equivalence_holds}};
}

json run_thm2(const RunConfig& c, const MetricInput& m, Rng& rng, bool& ok) {
  const auto J = require_space_functional(c, m);
  const double delta = c.delta.value_or(kInf);
  const double local = local_sharpness(J, delta);
  const double gamma = c.gamma.value_or(local);
  const bool sharp = local >= gamma && gamma > 0.0;
  const double L = 0.9 * gamma;
  std::size_t failures = 0, runs = 0;
  json witness = nullptr;
  if (sharp) {
    std::uniform_int_distribution<std::size_t> pick(0, J.size() - 1);
    std::uniform_int_distribution<int> sign(0, 1);
    for (; runs < 100; ++runs) {
      // Anchor values taken from an L-Lipschitz function keep the extension feasible.
      const std::size_t p = pick(rng);
      const double sg = sign(rng) ? 1.0 : -1.0;
      std::vector<std::size_t> a;
      std::vector<double> g;
      for (int k = 0; k < 3; ++k) {
        a.push_back(pick(rng));
        g.push_back(sg * L * J.space().distance(a.back(), p));
      }
      const auto zeta = mcshane_values(J.space(), a, g, L);
      const auto arg = thm2_probe(J, zeta, L, delta);
      if (arg.size() > 1 || (arg.size() == 1 && arg[0] != J.reference())) {
        if (failures++ == 0) witness = {{"run", runs}, {"argmin_in_ball", arg}};
      }
    }
  }
  ok = ok && failures == 0;
  return {{"local_sharpness", io::real_to_json(local)},
          {"gamma", io::real_to_json(gamma)},
          {"sharp", sharp},
          {"lipschitz_constant", io::real_to_json(L)},
          {"runs", runs},
          {"failures", failures},
          {"witness", witness}};
}

int cmd_metric(const RunConfig& c, std::ostream& out) {
  const json in = io::read_json_file(c.input);
  const auto m = load_metric_input(c, in);
  Rng rng(c.seed);
  json rep = header("metric");
  rep["seed"] = c.seed;
  rep["ball"] = "closed";
  rep["space"] = m.tree ? "tree" : "finite";
  bool ok = true;

  if (c.delta || c.gamma) {
    const LocalSharpnessParams params(c.delta.value_or(kInf), c.gamma.value_or(1.0));
    double local;
    if (m.tree) {
      const auto J = require_tree_functional(m);
      local = local_sharpness(J, params.delta, tree_spacing(c, *m.tree));
    } else {
      local = local_sharpness(require_space_functional(c, m), params.delta);
    }
    json r = {{"delta", io::real_to_json(params.delta)}, {"local_sharpness", io::real_to_json(local)}};
    if (c.gamma) {
      r["gamma"] = params.gamma;
      r["sharp"] = local >= params.gamma;
    }
    rep["local_sharpness"] = r;
  }

  if (!c.ekeland.empty()) {
    const auto v = parse_list(c.ekeland, "--ekeland");
    if (v.size() != 3 || v[2] < 0 || v[2] != std::floor(v[2]))
      throw InputError("--ekeland expects eps,lambda,start");
    const auto J = require_space_functional(c, m);
    const auto r = ekeland(J, static_cast<std::size_t>(v[2]), v[0], v[1]);
    const auto k = check_ekeland(J, r);
    rep["ekeland"] = {{"epsilon", r.epsilon},
                      {"lambda", r.lambda},
                      {"input", r.input},
                      {"output", r.output},
                      {"trace", r.trace},
                      {"value_decreased", k.value_decreased},
                      {"within_lambda", k.within_lambda},
                      {"unique_perturbed_min", k.unique_perturbed_min},
                      {"ok", k.ok()}};
    ok = ok && k.ok();
  }

  if (!c.check.empty()) {
    json r;
    if (c.check == "cat0") {
      r = run_cat0(m, rng, ok);
    } else if (c.check == "gconv") {
      r = run_gconv(m, rng, ok);
    } else if (c.check == "prop2") {
      r = run_prop2(c, m, ok);
    } else if (c.check == "thm2") {
      r = run_thm2(c, m, rng, ok);
    } else {
      throw InputError("--check must be cat0, gconv, prop2 or thm2");
    }
    r["name"] = c.check;
    rep["check"] = r;
  }
  rep["ok"] = ok;
  io::write_json_file(fs::path(c.out) / "metric.json", rep);
  out << "metric: " << (ok ? "ok" : "check failed") << "\n";
  return ok ? kOk : kCheckFailed;
}

// mesh

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void write_poly(const fs::path& path, const std::string& title, const std::vector<Point>& verts,
                const std::vector<std::array<std::size_t, 3>>& faces) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << "# " << title << "\n# " << verts.size() << " vertices, " << faces.size() << " faces\n";
  for (const auto& v : verts) os << "v " << fmt(v[0]) << " " << fmt(v[1]) << " " << fmt(v[2]) << "\n";
  for (const auto& f : faces) os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

int cmd_mesh(const RunConfig& c, std::ostream& out) {
  const json in = io::read_json_file(c.input);
  const auto [g, base] = load_grid(in);
  if (g.dimension() != 2) throw InputError("mesh needs a two-dimensional grid");
  const auto f = g.to_cloud(base);
  const double m = sharpness_modulus(f).modulus;
  const Point xb = g.node(base);
  const double fb = g.value(base).value();

  // Finite nodes become vertices; cells split along the main diagonal.
  std::vector<std::ptrdiff_t> vid(g.size(), -1);
  std::vector<Point> surface, cone;
  double excess = -kInf, gap = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.value(i).is_infinite()) continue;
    vid[i] = static_cast<std::ptrdiff_t>(surface.size());
    const Point x = g.node(i);
    const double z = g.value(i).value();
    const double zc = fb + m * distance(x, xb);
    surface.push_back({x[0], x[1], z});
    cone.push_back({x[0], x[1], zc});
    excess = std::max(excess, zc - z);
    gap = std::max(gap, std::abs(zc - z));
  }
  std::vector<std::array<std::size_t, 3>> faces;
  const std::size_t nx = g.resolution(0), ny = g.resolution(1);
  for (std::size_t a = 0; a + 1 < nx; ++a)
    for (std::size_t b = 0; b + 1 < ny; ++b) {
      const std::size_t p = a * ny + b, q = p + 1, r = p + ny, s = r + 1;
      if (vid[p] >= 0 && vid[r] >= 0 && vid[s] >= 0)
        faces.push_back({std::size_t(vid[p]), std::size_t(vid[r]), std::size_t(vid[s])});
      if (vid[p] >= 0 && vid[s] >= 0 && vid[q] >= 0)
        faces.push_back({std::size_t(vid[p]), std::size_t(vid[s]), std::size_t(vid[q])});
    }

  const fs::path dir(c.out);
  write_poly(dir / "surface.poly", "function surface", surface, faces);
  write_poly(dir / "cone.poly", "fitted cone f(base) + m |x - base|", cone, faces);

  json rep = header("mesh");
  rep["format"] = "ASCII polygon: '#' comments, 'v x y z' vertices, 'f i j k' 1-based faces";
  rep["base"] = base;
  rep["base_point"] = xb;
  rep["modulus"] = io::real_to_json(m);
  rep["vertex_count"] = surface.size();
  rep["face_count"] = faces.size();
  rep["max_cone_excess"] = io::real_to_json(excess);
  rep["max_surface_gap"] = gap;
  bool ok = excess <= kExactTol;
  rep["cone_below_surface"] = ok;

  if (!c.tilt.empty()) {
    const TiltVector v(parse_list(c.tilt, "--tilt"));
    if (v.dimension() != 2) throw InputError("--tilt must have two components for a mesh");
    std::vector<Point> tilted;
    for (const auto& p : surface)
      tilted.push_back({p[0], p[1], p[2] - (v.components()[0] * p[0] + v.components()[1] * p[1])});
    write_poly(dir / "tilted.poly", "tilted surface f - <v, x>", tilted, faces);
    const auto arg = tilt_probe(f, v);
    const bool invariant = arg.size() == 1 && arg[0] == f.base_index();
    const bool predicted = v.norm() < m;
    rep["tilt"] = {{"vector", v.components()},
                   {"norm", v.norm()},
                   {"argmin", arg},
                   {"base_still_minimizer", invariant},
                   {"verdict", verdict(predicted, invariant)}};
    ok = ok && !(predicted && !invariant);
  }
  rep["ok"] = ok;
  io::write_json_file(dir / "mesh.json", rep);
  out << "mesh: " << (ok ? "ok" : "check failed") << "\n";
  return ok ? kOk : kCheckFailed;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input", c.input, "input JSON file")->required();
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--seed", c.seed, "RNG seed");
  sub->add_option("--tol", c.tol, "tolerance override");
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": not a number list: '" + text + "'");
    }
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Sharp-minimizer analysis toolkit", "sharpmin"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "modulus, slope infimum and tilt radius");
  add_common(analyze, c);
  analyze->add_option("--refine", c.refine, "grid steps h1,h2,... for a fixture");

  auto* transform = app.add_subcommand("transform", "discrete Legendre-Fenchel transform");
  add_common(transform, c);
  transform->add_option("--dual-range", c.dual_range, "auto, L, or L1,L2,...");
  transform->add_option("--dual-resolution", c.dual_resolution, "dual nodes per axis");

  auto* probe = app.add_subcommand("probe", "argmin under tilts and Lipschitz perturbations");
  add_common(probe, c);
  probe->add_option("--tilt", c.tilt, "tilt vector x,y[,z]");
  probe->add_option("--mcshane", c.mcshane, "McShane anchors JSON");
  probe->add_option("--phi", c.phi, "distance combination JSON (trees)");
  probe->add_option("--functional", c.functional, "functional JSON");
  probe->add_option("--delta", c.delta, "ball radius");
  probe->add_option("--gamma", c.gamma, "sharpness constant");
  probe->add_option("--spacing", c.spacing, "tree sampling spacing");

  auto* metric = app.add_subcommand("metric", "checks on finite metric spaces and trees");
  add_common(metric, c);
  metric->add_option("--functional", c.functional, "functional JSON");
  metric->add_option("--delta", c.delta, "ball radius");
  metric->add_option("--gamma", c.gamma, "sharpness constant");
  metric->add_option("--ekeland", c.ekeland, "eps,lambda,start");
  metric->add_option("--check", c.check, "cat0 | gconv | prop2 | thm2");
  metric->add_option("--refine", c.refine, "h sequence for prop2");
  metric->add_option("--spacing", c.spacing, "tree sampling spacing");

  auto* mesh = app.add_subcommand("mesh", "surface, tilted surface and fitted cone meshes");
  add_common(mesh, c);
  mesh->add_option("--tilt", c.tilt, "tilt vector x,y");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(c, out);
    if (transform->parsed()) return cmd_transform(c, out);
    if (probe->parsed()) return cmd_probe(c, out);
    if (metric->parsed()) return cmd_metric(c, out);
    if (mesh->parsed()) return cmd_mesh(c, out);
  } catch (const DualRangeError& e) {
    err << "error: " << e.what() << "\nrequired dual half-widths:";
    for (double r : e.required()) err << " " << r;
    err << "\n";
    return kConfigGuard;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigGuard;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return kInputError;
  } catch (const ArithmeticError& e) {
    err << "arithmetic error: " << e.what() << "\n";
    return kInputError;
  } catch (const io::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace sharpmin::cli
