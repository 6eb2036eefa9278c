// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "sharpmin/cli.hpp"
#include "sharpmin/errors.hpp"
#include "sharpmin/legendre.hpp"
#include "sharpmin/metricopt.hpp"
#include "sharpmin/sampling.hpp"
#include "sharpmin/sharpness.hpp"

using namespace sharpmin;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = SHARPMIN_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<PointCloudFunction> criterion_clouds() {
  Rng rng(20240601);
  std::uniform_int_distribution<std::size_t> dim(1, 3), count(10, 60);
  std::vector<PointCloudFunction> out;
  for (int k = 0; k < 200; ++k) {
    const std::size_t d = dim(rng);
    out.push_back(random_cloud(d, count(rng), rng));
  }
  return out;
}

Point random_direction(std::size_t d, Rng& rng) {
  std::normal_distribution<double> g;
  Point v(d);
  double n = 0;
  do {
    for (double& x : v) x = g(rng);
    n = norm(v);
  } while (n < 1e-6);
  for (double& x : v) x /= n;
  return v;
}

Outcome ac1() {
  const auto t0 = Clock::now();
  const auto clouds = criterion_clouds();
  double worst = 0.0, oracle_gap = 0.0;
  for (const auto& f : clouds) {
    const double m = sharpness_modulus(f).modulus;
    const double s = slope_infimum(f), r = tilt_radius(f);
    worst = std::max({worst, std::abs(m - s), std::abs(m - r), std::abs(s - r)});
    const double o = oracle::modulus(f.points(), oracle::raw_values(f), f.base_index());
    oracle_gap = std::max(oracle_gap, std::abs(m - o));
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "200 clouds, max pairwise gap " << worst << ", oracle gap " << oracle_gap << ", " << secs
     << " s";
  return {worst <= 1e-9 && oracle_gap <= 1e-9 && secs < 5.0, os.str()};
}

Outcome ac2() {
  Rng rng(77);
  std::uniform_real_distribution<double> frac(0.0, 0.99);
  std::size_t sharp = 0, failures = 0, witness_failures = 0;
  for (const auto& f : criterion_clouds()) {
    const auto mod = sharpness_modulus(f);
    if (!(mod.modulus > 0)) continue;
    ++sharp;
    const std::vector<std::size_t> base{f.base_index()};
    for (int k = 0; k < 50; ++k) {
      Point xi = random_direction(f.dimension(), rng);
      const double len = frac(rng) * mod.modulus;
      for (double& x : xi) x *= len;
      if (tilt_probe(f, TiltVector(xi)) != base) ++failures;
    }
    Point toward(f.dimension());
    const double d = distance(f.point(mod.witness), f.base_point());
    for (std::size_t a = 0; a < toward.size(); ++a)
      toward[a] = 1.01 * mod.modulus * (f.point(mod.witness)[a] - f.base_point()[a]) / d;
    if (tilt_probe(f, TiltVector(toward)) == base) ++witness_failures;
  }
  std::ostringstream os;
  os << sharp << " sharp clouds, " << failures << " invariance failures, " << witness_failures
     << " witness failures";
  return {sharp > 0 && failures == 0 && witness_failures == 0, os.str()};
}

Outcome ac3() {
  Rng rng(31);
  std::uniform_real_distribution<double> box(-1.0, 1.0), lfrac(0.05, 0.9), shift(-2.0, 2.0);
  std::uniform_int_distribution<int> nanchors(1, 5);
  const auto cone = sample_to_cloud(make_norm_cone({0.0, 0.0}, 1.0),
                                    {{-1.0, -1.0}, {1.0, 1.0}, {21, 21}, {0.0, 0.0}});
  const double gamma = sharpness_modulus(cone).modulus;
  std::size_t cloud_fail = 0, tree_fail = 0;
  for (int run = 0; run < 100; ++run) {
    const double L = lfrac(rng) * gamma;
    const Point p{box(rng), box(rng)};
    const double c = shift(rng), sg = run % 2 ? 1.0 : -1.0;
    std::vector<Point> anchors;
    std::vector<double> g;
    for (int k = nanchors(rng); k > 0; --k) {
      anchors.push_back({box(rng), box(rng)});
      g.push_back(c + sg * L * distance(anchors.back(), p));
    }
    const auto zeta = mcshane_extend(anchors, g, L);
    if (lipschitz_probe(cone, zeta) != std::vector<std::size_t>{cone.base_index()}) ++cloud_fail;
  }
  for (int run = 0; run < 100; ++run) {
    const auto t = random_tree(8, rng);
    const auto ref = t.node(run % 8);
    const auto J = restrict_to_samples(
        TreeFunctional::from_terms(t, {{1.0, ref, 1}}, ref), sample_tree(t, 0.25));
    const double L = lfrac(rng);
    std::uniform_int_distribution<std::size_t> pick(0, J.size() - 1);
    const std::size_t p = pick(rng);
    const double c = shift(rng), sg = run % 2 ? 1.0 : -1.0;
    std::vector<std::size_t> anchors;
    for (int k = nanchors(rng); k > 0; --k) anchors.push_back(pick(rng));
    std::vector<double> zeta(J.size(), oracle::kInf);
    for (std::size_t i = 0; i < J.size(); ++i)
      for (std::size_t a : anchors)
        zeta[i] = std::min(zeta[i], c + sg * L * J.space().distance(a, p) +
                                        L * J.space().distance(i, a));
    const auto arg = thm2_probe(J, zeta, L, oracle::kInf);
    if (arg.size() > 1 || (arg.size() == 1 && arg[0] != J.reference())) ++tree_fail;
  }
  std::ostringstream os;
  os << "cloud failures " << cloud_fail << "/100, tree failures " << tree_fail << "/100";
  return {cloud_fail == 0 && tree_fail == 0, os.str()};
}

Outcome ac4() {
  const std::vector<double> hs{0.5, 0.25, 0.125, 0.0625};
  bool ok = true;
  double prev = oracle::kInf, worst = 0.0;
  std::ostringstream os;
  os << "tent moduli";
  for (double h : hs) {
    const std::size_t n = resolution_for_step(-2.0, 2.0, h);
    const auto tent = sample_to_cloud(make_tent({0.0}), {{-2.0}, {2.0}, {n}, {0.0}});
    const double m = sharpness_modulus(tent).modulus;
    const double brute = oracle::modulus(tent.points(), oracle::raw_values(tent), tent.base_index());
    worst = std::max({worst, std::abs(m - h / (2 - h)), std::abs(m - brute)});
    ok = ok && m < prev;
    prev = m;
    os << " " << m;
    const auto cone = sample_to_cloud(make_norm_cone({0.0}, 1.0), {{-2.0}, {2.0}, {n}, {0.0}});
    ok = ok && sharpness_modulus(cone).modulus == 1.0;
  }
  os << "; max error " << worst << "; cone modulus stays 1";
  return {ok && worst <= 1e-9, os.str()};
}

Outcome ac5() {
  const auto t0 = Clock::now();
  Rng rng(555);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  std::uniform_real_distribution<double> val(0.0, 10.0), par(0.01, 3.0);
  std::size_t failures = 0;
  for (int run = 0; run < 100; ++run) {
    const std::size_t n = size(rng);
    auto space = random_metric_space(n, rng);
    std::vector<Extended> vals(n);
    for (auto& v : vals) v = val(rng);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (vals[i].raw() < vals[best].raw()) best = i;
    const double eps = par(rng), lambda = par(rng);
    std::vector<std::size_t> admissible;
    for (std::size_t i = 0; i < n; ++i)
      if (vals[i].raw() <= vals[best].raw() + eps) admissible.push_back(i);
    std::uniform_int_distribution<std::size_t> pick(0, admissible.size() - 1);
    const std::size_t start = admissible[pick(rng)];
    const SpaceFunctional J(std::move(space), vals, best);
    const auto r = ekeland(J, start, eps, lambda);
    const double jout = vals[r.output].raw();
    bool ok = jout <= vals[start].raw() && J.space().distance(start, r.output) <= lambda;
    for (std::size_t v = 0; v < n; ++v)
      if (v != r.output && !(vals[v].raw() + eps / lambda * J.space().distance(v, r.output) > jout))
        ok = false;
    if (!ok) ++failures;
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << failures << " failures in 100 runs, " << secs << " s";
  return {failures == 0 && secs < 10.0, os.str()};
}

Outcome ac6() {
  std::ostringstream os;
  bool ok = true;
  // |x| on 401 nodes.
  const auto absf = sample_to_grid(make_norm_cone({0.0}, 1.0), {-1.0}, {1.0}, {401});
  const auto tr = legendre_transform(absf, auto_dual_grid(absf));
  double abs_gap = 0.0;
  for (std::size_t i = 0; i < absf.size(); ++i)
    abs_gap = std::max(abs_gap, std::abs(tr.biconjugate.value(i).value() - absf.value(i).value()));
  ok = ok && abs_gap <= 1e-9;
  os << "|x| gap " << abs_gap;

  // |x| + sin^2(3x) under refinement.
  const auto reports = biconjugate_refinement(make_abs_sin({0.0}), {-2.0}, {2.0}, {0.0},
                                              {0.1, 0.05, 0.025, 0.0125});
  double prev = oracle::kInf, fy = 0.0;
  os << "; modulus gaps";
  for (const auto& r : reports) {
    const double gap = std::abs(r.modulus - r.biconjugate_modulus);
    ok = ok && gap <= 5 * r.grid_step && gap <= prev && r.agree;
    prev = gap;
    os << " " << gap;
  }

  // Fenchel-Young and the hull oracle, with f* recomputed by the double loop.
  double hull_gap = 0.0, hull_tol = 0.0;
  for (const auto& cf : {make_abs_sin({0.0}), make_double_well({0.0})}) {
    const auto f = sample_to_grid(cf, {-2.0}, {2.0}, {161});
    const auto dual = auto_dual_grid(f);
    const auto res = legendre_transform(f, dual);
    const auto xs = f.axis_coordinates(0), xis = res.conjugate.axis_coordinates(0);
    std::vector<double> fv;
    for (auto v : f.values()) fv.push_back(v.raw());
    const auto fstar = oracle::conjugate_1d(xs, fv, xis);
    for (std::size_t j = 0; j < xis.size(); ++j)
      for (std::size_t i = 0; i < xs.size(); ++i)
        fy = std::max(fy, xis[j] * xs[i] - fv[i] - fstar[j]);
    fy = std::max(fy, res.fenchel_young_violation);
    const auto env = oracle::envelope_1d(xs, fv);
    const double tol = std::max(1e-6, 2 * f.max_step() * dual.half_width(0));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double gap = std::abs(res.biconjugate.value(i).value() - env[i]);
      hull_gap = std::max(hull_gap, gap);
      ok = ok && gap <= tol;
    }
    hull_tol = std::max(hull_tol, tol);
  }
  ok = ok && fy <= 1e-9;
  os << "; Fenchel-Young " << fy << "; hull gap " << hull_gap << " (tol " << hull_tol << ")";
  return {ok, os.str()};
}

Outcome ac7() {
  Rng rng(7007);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_tree = -oracle::kInf, worst_endpoint = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto t = random_tree(6 + k, rng);
    for (int q = 0; q < 50; ++q) {
      const std::array<TreeLocation, 3> tr{random_location(t, rng), random_location(t, rng),
                                           random_location(t, rng)};
      const double s = unit(rng);
      const auto c = cat0_check(t, std::span(&tr, 1), std::span(&s, 1));
      worst_tree = std::max(worst_tree, c.worst_violation);
      const auto& [u, v, w] = tr;
      const double D = tree_distance(t, u, v);
      const auto g = tree_geodesic(t, u, v, s);
      worst_endpoint = std::max({worst_endpoint, std::abs(tree_distance(t, g, u) - s * D),
                                 std::abs(tree_distance(t, g, v) - (1 - s) * D),
                                 std::abs(oracle::tree_distance(t, u, v) - D)});
    }
  }
  const FiniteMetricSpace cycle({{0, 1, 2, 1}, {1, 0, 1, 2}, {2, 1, 0, 1}, {1, 2, 1, 0}});
  std::vector<std::array<std::size_t, 3>> all;
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t v = 0; v < 4; ++v)
      for (std::size_t w = 0; w < 4; ++w) all.push_back({u, v, w});
  std::vector<double> sg;
  for (int k = 0; k <= 10; ++k) sg.push_back(k / 10.0);
  const auto c = cat0_check(cycle, all, sg);
  const auto& wt = all[c.witness];
  std::ostringstream os;
  os << "tree worst " << worst_tree << " over 1000 quadruples; endpoint error " << worst_endpoint
     << "; 4-cycle violation " << c.worst_violation << " at (u,v,w,s)=(" << wt[0] << "," << wt[1]
     << "," << wt[2] << "," << c.witness_s << ")";
  return {worst_tree <= 1e-9 && worst_endpoint <= 1e-12 && !c.ok && c.worst_violation > 0.1,
          os.str()};
}

Outcome ac8() {
  Rng rng(88);
  std::uniform_real_distribution<double> unit(0.0, 1.0), coef(0.0, 3.0);
  double worst = -oracle::kInf;
  for (int k = 0; k < 10; ++k) {
    const auto t = random_tree(10, rng);
    std::vector<LocationPair> pairs;
    std::vector<double> ss;
    for (int i = 0; i < 50; ++i) {
      pairs.emplace_back(random_location(t, rng), random_location(t, rng));
      ss.push_back(unit(rng));
    }
    const DistanceCombination single({{1.0, random_location(t, rng)}});
    const DistanceCombination combo({{coef(rng), random_location(t, rng)},
                                     {coef(rng), random_location(t, rng)},
                                     {coef(rng), t.node(0)}});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto one = std::span(&pairs[i], 1);
      const auto s = std::span(&ss[i], 1);
      worst = std::max(worst, geodesic_convexity_check(t, single, one, s).worst_violation);
      worst = std::max(worst, geodesic_convexity_check(t, combo, one, s).worst_violation);
    }
  }
  const MetricTree p(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const std::vector<LocationPair> across{{p.node(0), p.node(2)}};
  std::vector<double> sg;
  for (int k = 0; k <= 10; ++k) sg.push_back(k / 10.0);
  const auto neg = geodesic_convexity_check(
      p, [&](const TreeLocation& x) { return -tree_distance(p, x, p.node(1)); }, across, sg);
  std::ostringstream os;
  os << "500 samples x 2 functionals, worst " << worst << "; negated distance violation "
     << neg.worst_violation << " at s=" << neg.witness_s;
  return {worst <= 1e-9 && !neg.ok && neg.worst_violation > 0, os.str()};
}

Outcome ac9() {
  const MetricTree t(6, {{0, 1, 1.0}, {0, 2, 1.5}, {2, 3, 0.8}, {1, 4, 1.2}, {2, 5, 0.6}});
  const auto ref = t.node(2);
  const std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  const auto lin = TreeFunctional::from_terms(t, {{2.0, ref, 1}}, ref);
  const auto r1 = prop2_check(lin, 1.4, 2.0, hs);
  double min_slope = oracle::kInf;
  bool exact = true;
  for (const auto& row : r1.rows) {
    min_slope = std::min(min_slope, row.min_slope);
    exact = exact && row.local_modulus == 2.0;
  }
  exact = exact && local_sharpness(lin, 1.4, 0.05) == 2.0;
  const auto sq = TreeFunctional::from_terms(t, {{1.0, ref, 2}}, ref);
  const auto r2 = prop2_check(sq, 1.4, 0.5, hs);
  bool decay = true;
  for (std::size_t i = 1; i < r2.rows.size(); ++i)
    decay = decay && r2.rows[i].min_slope < r2.rows[i - 1].min_slope &&
            r2.rows[i].local_modulus < r2.rows[i - 1].local_modulus && r2.rows[i].agree;
  const auto& last = r2.rows.back();
  decay = decay && last.min_slope <= 2 * last.h + 1e-12 && last.local_modulus <= 2 * last.h + 1e-12;
  std::ostringstream os;
  os << "2d: min h-slope " << min_slope << ", modulus exactly 2: " << (exact ? "yes" : "no")
     << "; d^2 at h=" << last.h << ": slope " << last.min_slope << ", modulus "
     << last.local_modulus;
  return {min_slope >= 2.0 - 1e-9 && exact && r1.equivalence_holds && decay, os.str()};
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"sharpmin"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome ac10() {
  const fs::path root = fs::temp_directory_path() / "sharpmin_acceptance";
  fs::remove_all(root);
  const std::string fx = kFixtures + "/";
  const std::vector<std::vector<std::string>> runs{
      {"analyze", "--input", fx + "cone_cloud.json"},
      {"analyze", "--input", fx + "tent_fixture.json", "--refine", "0.5,0.25,0.125"},
      {"transform", "--input", fx + "double_well_fixture.json"},
      {"probe", "--input", fx + "cone_cloud.json", "--tilt", "0.5,0.2"},
      {"probe", "--input", fx + "star_tree.json", "--mcshane", fx + "tree_mcshane.json"},
      {"metric", "--input", fx + "star_tree.json", "--check", "cat0", "--seed", "42"},
      {"metric", "--input", fx + "star_tree.json", "--check", "thm2", "--seed", "42"},
      {"metric", "--input", fx + "line3.json", "--ekeland", "0.1,1,1"},
      {"mesh", "--input", fx + "quadratic_fixture.json", "--tilt", "0.1,0"},
  };
  std::size_t mismatches = 0, compared = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const fs::path a = root / ("run" + std::to_string(k) + "a"), b = root / ("run" + std::to_string(k) + "b");
    auto args = runs[k];
    args.insert(args.end(), {"--out", a.string()});
    const int ca = cli(args);
    args.back() = b.string();
    const int cb = cli(args);
    if (ca != cb || !fs::exists(a)) ++mismatches;
    if (!fs::exists(a)) continue;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++compared;
      if (slurp(entry.path()) != slurp(b / entry.path().filename())) ++mismatches;
    }
  }
  const int pass = cli({"analyze", "--input", fx + "cone_cloud.json", "--out", (root / "g0").string()});
  const int fail = cli({"metric", "--input", fx + "four_cycle.json", "--check", "cat0", "--out",
                        (root / "g1").string()});
  const int parse = cli({"analyze", "--input", fx + "malformed.json", "--out", (root / "g2").string()});
  std::ostringstream os;
  os << runs.size() << " subcommand runs, " << compared << " files compared, " << mismatches
     << " mismatches; golden exit codes " << pass << "/" << fail << "/" << parse;
  return {mismatches == 0 && compared >= runs.size() && pass == 0 && fail == 1 && parse == 2,
          os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 triple equivalence", ac1},   {"AC2 tilt invariance and tightness", ac2},
      {"AC3 Lipschitz invariance", ac3}, {"AC4 tent refinement", ac4},
      {"AC5 Ekeland postconditions", ac5}, {"AC6 Legendre suite", ac6},
      {"AC7 CAT(0) suite", ac7},         {"AC8 geodesic convexity", ac8},
      {"AC9 slope and growth refinement", ac9}, {"AC10 CLI determinism and exit codes", ac10},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << "\n";
    failed += !o.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << "\n";
  return failed == 0 ? 0 : 1;
}
