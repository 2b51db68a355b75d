#include "toric/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "toric/energy_classes.hpp"
#include "toric/geodesics.hpp"
#include "toric/potentials.hpp"
#include "toric/random_instances.hpp"

namespace toric {

namespace {

// Separate streams per item so `--only` reproduces the full run's instances.
enum Stream : std::uint64_t {
  kPythagoras = 1000000,
  kKiselman = 2000000,
  kInequalities = 3000000,
  kSupBound = 4000000,
  kAffinity = 5000000,
  kTransform = 6000000,
};

bool wants_dimension(const VerifyConfig& c, std::size_t n) {
  return c.dimension == 0 || c.dimension == n;
}

GridConvexFunction on_grid(const SymplecticPotential& g, const PolytopeGrid& grid) {
  return sample_symplectic(g, grid);
}

SymplecticPotential affine_1d(std::string name, double a, double b) {
  return {std::move(name), 1, [a, b](std::span<const double> s) { return a * s[0] + b; }};
}

void pythagoras_item(const VerifyConfig& c, VerifyReport& r) {
  for (std::size_t n : {1u, 2u}) {
    if (!wants_dimension(c, n)) continue;
    const auto p = make_simplex(static_cast<int>(n));
    const std::size_t count = n == 1 ? c.instances : std::max<std::size_t>(c.instances / 5, 1);
    const auto grid = build_grid(p, n == 1 ? c.nodes : std::min<std::size_t>(c.nodes, 256), 0.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      auto rng = instance_rng(c.seed, kPythagoras + 1000 * n + k);
      const auto g0 = sample(random_piecewise_linear(rng, n), grid);
      const auto g1 = sample(random_piecewise_linear(rng, n), grid);
      const auto res = pythagoras_check(g0, g1, grid);
      worst = std::max(worst, res.d2 > 0 ? res.residual / res.d2 : 0.0);
      r.verdicts.push_back(check_le(fmt::format("pythagoras n={} #{}", n, k), res.residual,
                                    1e-12, res.d2, 0.0));
    }
    r.observations["pythagoras"][fmt::format("n={}", n)]["max_relative_residual"] = worst;
  }
}

void kiselman_item(const VerifyConfig& c, VerifyReport& r) {
  const auto p = make_simplex(1);
  const auto grid = build_grid(p, c.nodes, 0.0);
  auto run = [&](const std::string& name, const GridConvexFunction& g0,
                 const GridConvexFunction& g1, std::vector<double> xs) {
    const GridPotential a(g0, grid), b(g1, grid);
    if (xs.empty()) xs = default_kiselman_samples(a, b);
    const auto res = kiselman_check(a, b, xs);
    r.verdicts.push_back(check_le("kiselman " + name, res.max_deviation, 1.0, 1e-3, 0.0));
    r.observations["kiselman"][name] = res.max_deviation;
  };
  const auto zero = on_grid(zero_potential(p), grid);
  std::vector<double> wide;
  for (int k = 0; k <= 40; ++k) wide.push_back(-15.0 + 0.5 * k);
  run("example eps=0.1 C=10", example_family(ExampleFamily(0.1, 10.0), grid).symplectic, zero,
      wide);
  run("0 vs 1-s", zero, on_grid(affine_1d("1-s", -1.0, 1.0), grid), {});
  const std::size_t count = std::max<std::size_t>(c.instances / 5, 1);
  for (std::size_t k = 0; k < count; ++k) {
    auto rng = instance_rng(c.seed, kKiselman + k);
    const auto g0 = sample(random_piecewise_linear(rng, 1), grid);
    const auto g1 = sample(random_piecewise_linear(rng, 1), grid);
    run(fmt::format("random #{}", k), g0, g1, {});
  }
}

void inequalities_item(const VerifyConfig& c, VerifyReport& r) {
  const auto p = make_simplex(1);
  double max_j2_ratio = 0.0, max_i2_ratio = 0.0, max_i_ratio = 0.0, min_i2_ratio = std::numeric_limits<double>::infinity();
  auto record = [&](const std::string& name, const SuiteResult& s) {
    for (auto v : s.verdicts) {
      v.name = name + ": " + v.name;
      r.verdicts.push_back(std::move(v));
    }
    const double d = s.fine.at("d");
    if (d > 0) {
      max_j2_ratio = std::max(max_j2_ratio, s.fine.at("J2sq") / (d * d));
      max_i2_ratio = std::max(max_i2_ratio, s.fine.at("I2") / d);
      min_i2_ratio = std::min(min_i2_ratio, s.fine.at("I2") / d);
    }
    if (s.fine.at("I2") > 0) max_i_ratio = std::max(max_i_ratio, s.fine.at("I") / s.fine.at("I2"));
  };
  const ExampleFamily fam(0.1, 10.0);
  record("example eps=0.1 C=10",
         inequality_suite(
             [&](const PolytopeGrid& g) {
               return std::pair{example_family(fam, g).symplectic,
                                on_grid(zero_potential(p), g)};
             },
             p, c.nodes, 0.0));
  record("guillemin vs itself",
         inequality_suite(
             [&](const PolytopeGrid& g) {
               const auto G = on_grid(guillemin_potential(p), g);
               return std::pair{G, G};
             },
             p, c.nodes, 0.0));
  for (std::size_t k = 0; k < c.instances; ++k) {
    auto rng = instance_rng(c.seed, kInequalities + k);
    const auto a = random_piecewise_linear(rng, 1);
    const auto b = random_piecewise_linear(rng, 1);
    record(fmt::format("random #{}", k),
           inequality_suite(
               [&](const PolytopeGrid& g) { return std::pair{sample(a, g), sample(b, g)}; }, p,
               c.nodes, 0.0));
  }
  auto& obs = r.observations["inequalities"];
  obs["max J2^2 / d^2 (bound 2^(n+4) = 32)"] = max_j2_ratio;
  obs["max I2 / d"] = max_i2_ratio;
  obs["max I / I2 (sqrt2 = 1.41421)"] = max_i_ratio;
  obs["min I2 / d"] = std::isfinite(min_i2_ratio) ? nlohmann::json(min_i2_ratio) : nlohmann::json();
}

void sup_bound_item(const VerifyConfig& c, VerifyReport& r) {
  const auto p = make_simplex(1);
  // Odd node count puts s = 1/2 on the grid.
  const auto grid = build_grid(p, c.nodes | 1U, 0.0);
  auto check = [&](const std::string& name, const GridConvexFunction& g, bool equality) {
    const auto res = sup_bound_check(g, grid);
    r.verdicts.push_back(check_le("sup bound " + name, res.neg_inf, res.constant, res.l1,
                                  roundoff_floor(res.neg_inf, res.constant * res.l1)));
    if (equality)
      r.verdicts.push_back(check_le("sup bound equality " + name,
                                    std::abs(res.neg_inf - res.constant * res.l1), 1.0, 1e-6,
                                    0.0));
  };
  const SymplecticPotential tent{
      "tent", 1, [](std::span<const double> s) { return std::abs(s[0] - 0.5) - 0.5; }};
  check("tent |s-1/2|-1/2", on_grid(tent, grid), true);
  check("affine s-1/2", on_grid(affine_1d("s-1/2", 1.0, -0.5), grid), true);
  check("zero", on_grid(zero_potential(p), grid), false);
  // The triangle argument needs max G <= 0; without it the constant 2 fails,
  // e.g. for s - 3/4.  Random instances are shifted down, raw ratios logged.
  auto ratio = [&](const GridConvexFunction& g) {
    const auto res = sup_bound_check(g, grid);
    return res.l1 > 0 ? res.neg_inf / res.l1 : 0.0;
  };
  double worst_raw = 0.0;
  for (std::size_t k = 0; k < c.instances; ++k) {
    auto rng = instance_rng(c.seed, kSupBound + k);
    const auto g = sample(random_piecewise_linear(rng, 1), grid);
    worst_raw = std::max(worst_raw, ratio(g));
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i : grid.masked_indices()) hi = std::max(hi, g[i].value());
    std::vector<ExtReal> vals = g.values();
    for (std::size_t i : grid.masked_indices()) vals[i] = vals[i].value() - hi;
    check(fmt::format("random #{} (max G = 0)", k),
          GridConvexFunction(g.grid(), std::move(vals), g.certificate()), false);
  }
  auto& obs = r.observations["sup-bound"];
  obs["max -inf G / |G|_1, unshifted random"] = worst_raw;
  obs["-inf G / |G|_1 for s - 3/4"] = ratio(on_grid(affine_1d("s-3/4", 1.0, -0.75), grid));
}

void guillemin_fs_item(const VerifyConfig& c, VerifyReport& r) {
  for (std::size_t n : {1u, 2u}) {
    if (!wants_dimension(c, n)) continue;
    const auto p = make_simplex(static_cast<int>(n));
    const auto grid = build_grid(p, n == 1 ? c.nodes : std::min<std::size_t>(c.nodes, 512), 0.05);
    const auto fs = resolve_potential("fs", p).realize(grid).symplectic;
    const auto gu = on_grid(guillemin_potential(p), grid);
    const double err = sup_norm_distance(fs, gu);
    r.verdicts.push_back(
        check_le(fmt::format("guillemin-fs n={}", n), err, 1.0, 1e-4, 0.0));
    r.observations["guillemin-fs"][fmt::format("n={}", n)] = err;
  }
}

void affinity_item(const VerifyConfig& c, VerifyReport& r) {
  const auto p = make_simplex(1);
  const auto grid = build_grid(p, c.nodes, 0.0);
  for (std::size_t k = 0; k < 10; ++k) {
    auto rng = instance_rng(c.seed, kAffinity + k);
    const auto g0 = sample(random_piecewise_linear(rng, 1), grid);
    const auto g1 = sample(random_piecewise_linear(rng, 1), grid);
    const GeodesicPath path(g0, g1);
    const double e1 = aubin_mabuchi_increment(g0, g1, grid);
    const double scale = std::max(1.0, lq_norm(g0, 1.0, grid) + lq_norm(g1, 1.0, grid));
    double residual = 0.0;
    for (int j = 0; j <= 10; ++j) {
      const double t = 0.1 * j;
      const double et = aubin_mabuchi_increment(g0, geodesic_point(path, t), grid);
      residual = std::max(residual, std::abs(et - t * e1));
    }
    r.verdicts.push_back(check_le(fmt::format("E affine along geodesic #{}", k), residual,
                                  1e-12, scale, 0.0));

    // dE/dt = int phi_t' MA(phi_t), by pushforward over the cells of G_t.
    constexpr double eta = 1e-6;
    CompensatedSum mean;
    const int samples = 5;
    for (int j = 0; j < samples; ++j) {
      const double t = 0.1 + 0.2 * j;
      const GridPotential gt(geodesic_point(path, t), grid);
      const DiscreteKahlerPotential fp(geodesic_point(path, t + eta), grid);
      const DiscreteKahlerPotential fm(geodesic_point(path, t - eta), grid);
      CompensatedSum acc;
      const auto& cells = gt.cells();
      for (std::size_t q = 0; q < cells.size(); ++q) {
        const auto x = cells.gradient_at(q);
        acc.add(cells.weight[q] * (fp(x) - fm(x)) / (2.0 * eta));
      }
      mean.add(acc.value() / samples);
    }
    r.verdicts.push_back(check_le(fmt::format("dE/dt pushforward oracle #{}", k),
                                  std::abs(mean.value() - e1), 1.0, 1e-3, 0.0));
  }
}

double brute_conjugate(const std::vector<double>& xs, const std::vector<double>& ys, double s) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < xs.size(); ++k) best = std::max(best, xs[k] * s - ys[k]);
  return best;
}

void transform_item(const VerifyConfig& c, VerifyReport& r) {
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < c.instances; ++k) {
    auto rng = instance_rng(c.seed, kTransform + k);
    const std::size_t count = std::uniform_int_distribution<std::size_t>(2, 256)(rng);
    const auto f = random_convex_samples(rng, count);
    std::vector<double> targets;
    std::uniform_real_distribution<double> s(-5.0, 5.0);
    for (int q = 0; q < 64; ++q) targets.push_back(s(rng));
    for (std::size_t q = 0; q + 1 < count; ++q)
      if (f.x[q + 1] > f.x[q]) targets.push_back((f.y[q + 1] - f.y[q]) / (f.x[q + 1] - f.x[q]));
    const auto fast = conjugate_samples(f.x, f.y, targets);
    for (std::size_t q = 0; q < targets.size(); ++q)
      if (fast[q] != brute_conjugate(f.x, f.y, targets[q])) ++mismatches;
  }
  r.verdicts.push_back(check_le("fast conjugate == brute force (bitwise)",
                                static_cast<double>(mismatches), 1.0, 0.0, 0.0));

  for (std::size_t n : {1u, 2u}) {
    if (!wants_dimension(c, n)) continue;
    const auto p = make_simplex(static_cast<int>(n));
    const auto grid = build_grid(p, n == 1 ? c.nodes : 64, n == 1 ? 0.02 : 0.05);
    const auto g = on_grid(guillemin_potential(p), grid);
    const auto gg = biconjugate(g);
    const auto grad = gradient(g, grid);
    double lip = 0.0;
    for (std::size_t i : grid.masked_indices())
      if (grad.defined[i])
        for (double v : grad.at(i)) lip = std::max(lip, std::abs(v));
    double h = 0.0;
    for (std::size_t k = 0; k < n; ++k) h = std::max(h, grid.grid().axis(k).step());
    r.verdicts.push_back(check_le(fmt::format("biconjugate fixes guillemin n={}", n),
                                  sup_norm_distance(g, gg), h, lip, 0.0));
  }

  const UniformAxis xaxis(-3.0, 3.0, 129), saxis(-2.0, 2.0, 97);
  const TensorGrid xgrid({xaxis}), sgrid({saxis});
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c.instances; ++k) {
    auto rng = instance_rng(c.seed, kTransform + 500000 + k);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), curv(0.0, 2.0);
    auto random_convex = [&] {
      const double a = curv(rng), b = coef(rng), c0 = coef(rng), kink = coef(rng);
      std::vector<ExtReal> v(xaxis.size());
      for (std::size_t i = 0; i < xaxis.size(); ++i) {
        const double x = xaxis[i];
        v[i] = 0.5 * a * x * x + b * x + c0 + std::abs(x - kink);
      }
      return GridConvexFunction(xgrid, std::move(v));
    };
    const auto f = random_convex(), g = random_convex();
    const double lhs = sup_norm_distance(conjugate(f, sgrid), conjugate(g, sgrid));
    const double rhs = sup_norm_distance(f, g);
    worst = std::max(worst, lhs - rhs);
    r.verdicts.push_back(check_le(fmt::format("sup-norm nonexpansive #{}", k), lhs, 1.0, rhs,
                                  roundoff_floor(lhs, rhs)));
  }
  r.observations["transform"]["max (|g*-f*| - |g-f|)"] = worst;
}

}  // namespace

const std::vector<std::string>& verify_items() {
  static const std::vector<std::string> items{"pythagoras", "kiselman", "inequalities",
                                              "sup-bound", "guillemin-fs", "e-affinity",
                                              "transform"};
  return items;
}

bool VerifyReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.passed; });
}

VerifyReport run_verify(const VerifyConfig& config) {
  if (config.nodes < 16) throw std::invalid_argument("verify: N must be at least 16");
  if (config.dimension > 2) throw std::invalid_argument("verify: --n must be 1 or 2");
  const auto& items = verify_items();
  if (!config.only.empty() &&
      std::find(items.begin(), items.end(), config.only) == items.end())
    throw std::invalid_argument("verify: unknown item '" + config.only + "'");
  VerifyReport r;
  auto selected = [&](const char* name) { return config.only.empty() || config.only == name; };
  if (selected("pythagoras")) pythagoras_item(config, r);
  if (selected("kiselman") && wants_dimension(config, 1)) kiselman_item(config, r);
  if (selected("inequalities") && wants_dimension(config, 1)) inequalities_item(config, r);
  if (selected("sup-bound") && wants_dimension(config, 1)) sup_bound_item(config, r);
  if (selected("guillemin-fs")) guillemin_fs_item(config, r);
  if (selected("e-affinity") && wants_dimension(config, 1)) affinity_item(config, r);
  if (selected("transform")) transform_item(config, r);
  return r;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json j;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  j["observations"] = r.observations;
  j["passed"] = r.all_passed();
  return j;
}

}  // namespace toric
