// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "toric/energy_classes.hpp"
#include "toric/functionals.hpp"
#include "toric/potentials.hpp"
#include "toric/verify.hpp"

using namespace toric;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double value, double exact) { return std::abs(value - exact) / std::abs(exact); }

const std::vector<std::pair<double, double>> kParams{{0.1, 10.0}, {0.01, 100.0}, {0.2, 5.0}};

Outcome distance_matches() {
  const auto p = make_simplex(1);
  const auto zero = resolve_potential("support", p);
  Outcome o{true, ""};
  for (auto [eps, C] : kParams) {
    const auto t0 = Clock::now();
    const auto a = resolve_potential(fmt::format("example:eps={},C={}", eps, C), p);
    const auto r = distance_report(a, zero, p, 4096, 0.0);
    const double dt = seconds_since(t0);
    const double err = rel(r.d.value, C * std::pow(eps, 1.5) / std::sqrt(3.0));
    o.passed = o.passed && err <= 1e-3 && dt < 1.0;
    o.detail += fmt::format("(eps={}, C={}): rel {:.2e}, {:.3f}s; ", eps, C, err, dt);
  }
  return o;
}

bool decreases_to_zero(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1]) return false;
  return v.back() <= 0.5 * v.front();
}

Outcome regime_table() {
  const auto rows = convergence_classifier(headline_schedule(20));
  double d_err = 0.0;
  std::vector<double> l1, linf, i1;
  for (const auto& r : rows) {
    d_err = std::max(d_err, rel(r.d, 1.0 / std::sqrt(3.0)));
    l1.push_back(r.L1);
    linf.push_back(r.Linf);
    i1.push_back(r.I1);
  }
  const bool l1_ok = decreases_to_zero(l1), linf_ok = decreases_to_zero(linf),
             i_ok = decreases_to_zero(i1);
  return {d_err <= 1e-3 && l1_ok && linf_ok && i_ok,
          fmt::format("d rel err {:.2e}; L1 -> 0: {}; Linf -> 0: {} (Linf_1 = {:.3g}, "
                      "Linf_20 = {:.3g}); I -> 0: {}",
                      d_err, l1_ok, linf_ok, linf.front(), linf.back(), i_ok)};
}

Outcome closed_form_functionals() {
  const auto p = make_simplex(1);
  const auto grid = build_grid(p, 4096, 0.0);
  const auto zero = sample_symplectic(zero_potential(p), grid);
  Outcome o{true, ""};
  for (auto [eps, C] : kParams) {
    const auto g = example_family(ExampleFamily(eps, C), grid).symplectic;
    const double ei = rel(i_functional(g, zero, grid), eps * eps * C);
    const double ei2 = rel(i2_functional(g, zero, grid), std::pow(eps, 1.5) * C / std::sqrt(2.0));
    o.passed = o.passed && ei <= 1e-3 && ei2 <= 1e-3;
    o.detail += fmt::format("(eps={}, C={}): I rel {:.2e}, I2 rel {:.2e}; ", eps, C, ei, ei2);
  }
  return o;
}

Outcome duality() {
  const auto t0 = Clock::now();
  Outcome o{true, ""};
  for (auto [n, nodes] : {std::pair{1, 4096}, std::pair{2, 512}}) {
    const auto p = make_simplex(n);
    const auto grid = build_grid(p, nodes, 0.05);
    const auto fs = resolve_potential("fs", p).realize(grid).symplectic;
    const double err = sup_norm_distance(fs, sample_symplectic(guillemin_potential(p), grid));
    o.passed = o.passed && err <= 1e-4;
    o.detail += fmt::format("n={}: sup err {:.2e}; ", n, err);
  }
  const double dt = seconds_since(t0);
  o.passed = o.passed && dt < 30.0;
  o.detail += fmt::format("{:.2f}s", dt);
  return o;
}

Outcome suite_item(const std::string& item, std::size_t expected_min) {
  VerifyConfig c;
  c.seed = 0;
  c.nodes = 2048;
  c.instances = 100;
  c.only = item;
  const auto t0 = Clock::now();
  const auto r = run_verify(c);
  std::size_t failed = 0;
  std::string first;
  for (const auto& v : r.verdicts)
    if (!v.passed && failed++ == 0) first = v.name;
  const bool enough = r.verdicts.size() >= expected_min;
  return {failed == 0 && enough,
          fmt::format("{} verdicts, {} failed{}, {:.2f}s", r.verdicts.size(), failed,
                      first.empty() ? "" : " (first: " + first + ")", seconds_since(t0))};
}

Outcome energy_witnesses() {
  const auto p = make_simplex(1);
  const auto base = build_grid(p, 65536, 0.01);
  const SymplecticPotential inv_sqrt{
      "s^-1/2", 1, [](std::span<const double> s) { return 1.0 / std::sqrt(s[0]); }};
  const auto gq2 = membership(guillemin_potential(p), 2.0, base);
  const auto s1 = membership(inv_sqrt, 1.0, base);
  const auto s2 = membership(inv_sqrt, 2.0, base);
  const bool ext_ok = s1.extrapolated && std::abs(*s1.extrapolated - 2.0) <= 1e-2;
  return {gq2.trend == Trend::convergent && s1.trend == Trend::convergent && ext_ok &&
              s2.trend == Trend::divergent,
          fmt::format("guillemin q=2: {}; s^-1/2 q=1: {} (norm {:.6f}); s^-1/2 q=2: {}",
                      to_string(gq2.trend), to_string(s1.trend),
                      s1.extrapolated ? *s1.extrapolated : NAN, to_string(s2.trend))};
}

Outcome sup_witnesses() {
  const auto p = make_simplex(1);
  const auto grid = build_grid(p, 4097, 0.0);
  const SymplecticPotential tent{
      "tent", 1, [](std::span<const double> s) { return std::abs(s[0] - 0.5) - 0.5; }};
  const SymplecticPotential affine{"s-1/2", 1, [](std::span<const double> s) { return s[0] - 0.5; }};
  Outcome o{true, ""};
  for (const auto* g : {&tent, &affine}) {
    const auto r = sup_bound_check(sample_symplectic(*g, grid), grid);
    const double gap = std::abs(r.neg_inf - 2.0 * r.l1);
    o.passed = o.passed && r.passed && gap <= 1e-6;
    o.detail += fmt::format("{}: -inf {:.9f}, 2 L1 {:.9f}; ", g->name, r.neg_inf, 2.0 * r.l1);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"two-kink distance", distance_matches},
      {"regime table", regime_table},
      {"closed-form I and I2", closed_form_functionals},
      {"Guillemin / Fubini-Study duality", duality},
      {"Pythagorean identity", [] { return suite_item("pythagoras", 120); }},
      {"Kiselman identity", [] { return suite_item("kiselman", 22); }},
      {"inequality suite", [] { return suite_item("inequalities", 100); }},
      {"energy-class witnesses", energy_witnesses},
      {"sup-control witnesses", sup_witnesses},
      {"E affine along geodesics", [] { return suite_item("e-affinity", 20); }},
      {"transform kernel", [] { return suite_item("transform", 103); }},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.passed;
    std::printf("criterion %2zu %s  %s: %s\n", k + 1, o.passed ? "PASS" : "FAIL",
                criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
