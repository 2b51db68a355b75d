#include "toric/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace toric {

CellGradients cell_gradients(const GridConvexFunction& g, const PolytopeGrid& grid) {
  if (!(g.grid() == grid.grid()))
    throw std::invalid_argument("cell_gradients: function and grid differ");
  const auto& tg = grid.grid();
  const std::size_t n = tg.dimension();
  const std::size_t corners = std::size_t{1} << n;
  std::vector<std::size_t> offsets(corners, 0);
  for (std::size_t c = 0; c < corners; ++c)
    for (std::size_t k = 0; k < n; ++k)
      if ((c >> k) & 1U) offsets[c] += tg.stride(k);

  CellGradients out;
  out.dimension = n;
  const double volume = tg.cell_volume();
  const double share = 1.0 / static_cast<double>(corners / 2);
  std::vector<double> base(n);
  for (std::size_t i : grid.masked_indices()) {
    bool full = true;
    for (std::size_t k = 0; k < n && full; ++k)
      full = tg.axis_index(i, k) + 1 < tg.axis(k).size();
    for (std::size_t c = 1; c < corners && full; ++c)
      full = grid.masked(i + offsets[c]) && g[i + offsets[c]].is_finite();
    if (!full || g[i].is_infinite()) continue;
    tg.point(i, base);
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < corners; ++c) {
        if ((c >> k) & 1U) continue;
        const std::size_t lo = i + offsets[c];
        const std::size_t hi = lo + tg.stride(k);
        acc += g[hi].value() - g[lo].value();
      }
      out.gradient.push_back(acc * share / tg.axis(k).step());
      out.center.push_back(base[k] + 0.5 * tg.axis(k).step());
    }
    out.weight.push_back(volume);
  }
  return out;
}

DiscreteKahlerPotential::DiscreteKahlerPotential(const GridConvexFunction& g,
                                                 const PolytopeGrid& grid)
    : n_(grid.dimension()) {
  const auto& tg = grid.grid();
  const std::size_t last = tg.axis(n_ - 1).size();
  std::vector<double> xs, ys;
  std::size_t current = std::numeric_limits<std::size_t>::max();
  auto flush = [&] {
    if (xs.empty()) return;
    std::vector<double> prefix = tg.point(current * last);
    prefix.pop_back();
    lines_.push_back({std::move(prefix), LowerHull(xs, ys)});
    xs.clear();
    ys.clear();
  };
  for (std::size_t i : grid.masked_indices()) {
    if (g[i].is_infinite()) continue;
    const std::size_t line = i / last;
    if (line != current) {
      flush();
      current = line;
    }
    xs.push_back(tg.axis(n_ - 1)[i % last]);
    ys.push_back(g[i].value());
  }
  flush();
  if (lines_.empty()) throw std::invalid_argument("discrete Kahler potential: empty mask");
}

double DiscreteKahlerPotential::operator()(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("Kahler potential: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& line : lines_) {
    double v = line.hull.conjugate_at(x[n_ - 1]);
    for (std::size_t k = 0; k + 1 < n_; ++k) v += x[k] * line.prefix[k];
    best = std::max(best, v);
  }
  return best;
}

GridPotential::GridPotential(GridConvexFunction g, const PolytopeGrid& grid)
    : g_(std::move(g)), grid_(std::make_shared<PolytopeGrid>(grid)) {
  if (!(g_.grid() == grid.grid()))
    throw std::invalid_argument("grid potential: function and grid differ");
  for (std::size_t i : grid.masked_indices())
    if (g_[i].is_infinite())
      throw NumericError(fmt::format(
          "divergent integrand: G = +inf at masked node {}", i));
  cells_ = cell_gradients(g_, grid);
  if (cells_.size() == 0)
    throw std::invalid_argument("grid potential: mask too thin for cell gradients");
  f_ = std::make_shared<DiscreteKahlerPotential>(g_, grid);
}

std::vector<double> GridPotential::kahler_at(const CellGradients& cells) const {
  std::vector<double> out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) out[c] = (*f_)(cells.gradient_at(c));
  return out;
}

double integrate(const PolytopeGrid& grid, const std::function<double(std::size_t)>& term) {
  CompensatedSum acc;
  for (std::size_t i : grid.masked_indices()) acc.add(grid.weight(i) * term(i));
  return acc.value();
}

namespace {

void require_finite_on_mask(const GridConvexFunction& g, const PolytopeGrid& grid,
                            const char* what) {
  if (!(g.grid() == grid.grid()))
    throw std::invalid_argument(fmt::format("{}: function and grid differ", what));
  for (std::size_t i : grid.masked_indices())
    if (g[i].is_infinite())
      throw NumericError(fmt::format("{}: divergent integrand, G = +inf at masked node {}",
                                     what, i));
}

}  // namespace

double mabuchi_distance(const GridConvexFunction& g0, const GridConvexFunction& g1,
                        const PolytopeGrid& grid) {
  require_finite_on_mask(g0, grid, "mabuchi_distance");
  require_finite_on_mask(g1, grid, "mabuchi_distance");
  const double sq = integrate(grid, [&](std::size_t i) {
    const double diff = g1[i].value() - g0[i].value();
    return diff * diff;
  });
  return std::sqrt(std::max(sq, 0.0));
}

double pushforward_integral(
    const GridConvexFunction& g, const PolytopeGrid& grid,
    const std::function<double(std::span<const double>, std::span<const double>)>& h) {
  require_finite_on_mask(g, grid, "pushforward_integral");
  const auto cells = cell_gradients(g, grid);
  if (cells.size() == 0)
    throw std::invalid_argument("pushforward_integral: gradient unavailable (mask too thin)");
  CompensatedSum acc;
  for (std::size_t c = 0; c < cells.size(); ++c)
    acc.add(cells.weight[c] * h(cells.gradient_at(c), cells.center_at(c)));
  return acc.value();
}

double cross_moment(const GridPotential& over, const GridPotential& a, const GridPotential& b,
                    int power) {
  const auto& cells = over.cells();
  const auto fa = a.kahler_at(cells);
  const auto fb = b.kahler_at(cells);
  CompensatedSum acc;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double diff = fa[c] - fb[c];
    acc.add(cells.weight[c] * (power == 1 ? diff : std::pow(diff, power)));
  }
  return acc.value();
}

double i_functional(const GridPotential& a, const GridPotential& b) {
  return cross_moment(b, a, b, 1) - cross_moment(a, a, b, 1);
}

double i_functional(const GridConvexFunction& g0, const GridConvexFunction& g1,
                    const PolytopeGrid& grid) {
  return i_functional(GridPotential(g0, grid), GridPotential(g1, grid));
}

double i2_functional(const GridPotential& a, const GridPotential& b) {
  const double sq = 0.5 * cross_moment(a, a, b, 2) + 0.5 * cross_moment(b, a, b, 2);
  return std::sqrt(std::max(sq, 0.0));
}

double i2_functional(const GridConvexFunction& g0, const GridConvexFunction& g1,
                     const PolytopeGrid& grid) {
  return i2_functional(GridPotential(g0, grid), GridPotential(g1, grid));
}

Verdict check_le(std::string name, double lhs, double constant, double rhs,
                 double tolerance) {
  Verdict v{std::move(name), lhs, rhs, constant, tolerance, false};
  v.passed = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= constant * rhs + tolerance;
  return v;
}

double roundoff_floor(double lhs, double rhs) {
  return 1e-12 * (std::abs(lhs) + std::abs(rhs)) + 1e-300;
}

nlohmann::json to_json(const Verdict& v) {
  return {{"name", v.name},         {"lhs", v.lhs},
          {"rhs", v.rhs},           {"constant", v.constant},
          {"verdict", v.passed ? "pass" : "fail"}, {"tolerance", v.tolerance}};
}

J2Result j2_functional(const GridPotential& a, const GridPotential& b) {
  const GridPotential vee(pointwise_max(a.symplectic(), b.symplectic()), a.grid());
  const double left = i2_functional(a, vee);
  const double right = i2_functional(vee, b);
  J2Result r;
  r.j2 = std::sqrt(left * left + right * right);
  r.d = mabuchi_distance(a.symplectic(), b.symplectic(), a.grid());
  const double c = std::pow(2.0, 2.0 + 0.5 * static_cast<double>(a.grid().dimension()));
  r.lower = check_le("d <= 2 J2", r.d, 2.0, r.j2, roundoff_floor(r.d, 2.0 * r.j2));
  r.upper = check_le("2 J2 <= 2^(2+n/2) d", 2.0 * r.j2, c, r.d,
                     roundoff_floor(2.0 * r.j2, c * r.d));
  return r;
}

J2Result j2_functional(const GridConvexFunction& g0, const GridConvexFunction& g1,
                       const PolytopeGrid& grid) {
  return j2_functional(GridPotential(g0, grid), GridPotential(g1, grid));
}

double aubin_mabuchi_increment(const GridConvexFunction& g0, const GridConvexFunction& g1,
                               const PolytopeGrid& grid) {
  require_finite_on_mask(g0, grid, "aubin_mabuchi_increment");
  require_finite_on_mask(g1, grid, "aubin_mabuchi_increment");
  return -integrate(grid, [&](std::size_t i) { return g1[i].value() - g0[i].value(); });
}

FunctionalSet evaluate_functionals(const GridPotential& a, const GridPotential& b) {
  const auto& grid = a.grid();
  FunctionalSet s;
  s.d = mabuchi_distance(a.symplectic(), b.symplectic(), grid);
  s.I = i_functional(a, b);
  s.I2 = i2_functional(a, b);
  s.J2 = j2_functional(a, b).j2;
  s.energy = aubin_mabuchi_increment(a.symplectic(), b.symplectic(), grid);
  s.sup_norm = sup_norm_distance(a.symplectic(), b.symplectic());
  return s;
}

bool DistanceReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.passed; });
}

namespace {

nlohmann::json estimate_json(const Estimate& e) {
  nlohmann::json j{{"value", e.value}, {"error", e.error}};
  j["half_margin"] = e.half_margin ? nlohmann::json(*e.half_margin) : nlohmann::json();
  return j;
}

}  // namespace

nlohmann::json to_json(const DistanceReport& r) {
  nlohmann::json j;
  j["a"] = r.a;
  j["b"] = r.b;
  j["polytope"] = r.polytope;
  j["nodes"] = r.nodes;
  j["margin"] = r.margin;
  j["shift_a"] = r.shift_a;
  j["shift_b"] = r.shift_b;
  j["d"] = estimate_json(r.d);
  j["I"] = estimate_json(r.I);
  j["I2"] = estimate_json(r.I2);
  j["J2"] = estimate_json(r.J2);
  j["E_increment"] = estimate_json(r.energy);
  j["sup_norm"] = estimate_json(r.sup_norm);
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  j["notes"] = r.notes;
  return j;
}

DistanceReport distance_report(const PotentialSource& a, const PotentialSource& b,
                               const DelzantPolytope& p, std::size_t nodes, double margin) {
  if (nodes < 16) throw std::invalid_argument("distance report: N must be at least 16");
  DistanceReport r;
  r.a = a.name;
  r.b = b.name;
  r.polytope = p.label();
  r.nodes = nodes;
  r.margin = margin;

  auto eval = [&](const PolytopeGrid& grid, bool record) {
    auto pa = a.realize(grid);
    auto pb = b.realize(grid);
    if (record) {
      r.shift_a = pa.shift;
      r.shift_b = pb.shift;
    }
    return evaluate_functionals(GridPotential(std::move(pa.symplectic), grid),
                                GridPotential(std::move(pb.symplectic), grid));
  };
  const auto fine_grid = build_grid(p, nodes, margin);
  const auto fine = eval(fine_grid, true);
  const auto coarse = eval(regrid(fine_grid, nodes / 2), false);
  std::optional<FunctionalSet> half;
  if (margin > 0.0) half = eval(remask(fine_grid, 0.5 * margin), false);

  auto est = [&](double FunctionalSet::*field) {
    Estimate e{fine.*field, std::abs(fine.*field - coarse.*field), std::nullopt};
    if (half) e.half_margin = (*half).*field;
    return e;
  };
  r.d = est(&FunctionalSet::d);
  r.I = est(&FunctionalSet::I);
  r.I2 = est(&FunctionalSet::I2);
  r.J2 = est(&FunctionalSet::J2);
  r.energy = est(&FunctionalSet::energy);
  r.sup_norm = est(&FunctionalSet::sup_norm);
  return r;
}

}  // namespace toric
