#include "toric/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace toric {

GeodesicPath::GeodesicPath(GridConvexFunction g0, GridConvexFunction g1)
    : g0_(std::move(g0)), g1_(std::move(g1)) {
  require_same_grid(g0_, g1_, "geodesic");
}

GridConvexFunction geodesic_point(const GeodesicPath& path, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("geodesic_point: t must lie in [0,1]");
  const auto& a = path.start();
  const auto& b = path.end();
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  std::vector<ExtReal> out(a.size(), ExtReal::infinity());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].is_finite() && b[i].is_finite())
      out[i] = (1.0 - t) * a[i].value() + t * b[i].value();
  const bool convex = a.certificate().status == Convexity::verified &&
                      b.certificate().status == Convexity::verified;
  return GridConvexFunction(a.grid(), std::move(out),
                            convex ? Certificate{Convexity::verified, 0} : Certificate{});
}

GridConvexFunction min_operation(const GridConvexFunction& g0, const GridConvexFunction& g1) {
  return pointwise_max(g0, g1);
}

GridConvexFunction max_operation(const GridConvexFunction& g0, const GridConvexFunction& g1) {
  return biconjugate(pointwise_min(g0, g1));
}

GridConvexFunction midpoint_potential(const GridPotential& a, const GridPotential& b) {
  const auto& grid = a.grid();
  const std::size_t n = grid.dimension();
  if (!(a.symplectic().grid() == b.symplectic().grid()))
    throw std::invalid_argument("midpoint_potential: grid mismatch");

  if (n == 1) {
    std::vector<double> xs(a.cells().gradient);
    xs.insert(xs.end(), b.cells().gradient.begin(), b.cells().gradient.end());
    double reach = 1.0;
    for (double x : xs) reach = std::max(reach, std::abs(x) + 1.0);
    xs.push_back(-reach);
    xs.push_back(reach);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> ys(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const std::span<const double> x(&xs[k], 1);
      ys[k] = 0.5 * (a.kahler(x) + b.kahler(x));
    }
    const LowerHull hull(xs, ys);
    std::vector<ExtReal> out(grid.size(), ExtReal::infinity());
    for (std::size_t i : grid.masked_indices())
      out[i] = hull.conjugate_at(grid.grid().axis(0)[i]);
    return GridConvexFunction(grid.grid(), std::move(out), {Convexity::verified, 0});
  }

  double reach = 1.0;
  for (const auto* cells : {&a.cells(), &b.cells()})
    for (double x : cells->gradient) reach = std::max(reach, std::abs(x) + 1.0);
  const std::vector<double> lo(n, -reach), hi(n, reach);
  const auto box = TensorGrid::box(lo, hi, grid.grid().axis(0).size());
  std::vector<ExtReal> vals(box.size());
  std::vector<double> x(n);
  for (std::size_t i = 0; i < box.size(); ++i) {
    box.point(i, x);
    vals[i] = 0.5 * (a.kahler(x) + b.kahler(x));
  }
  return conjugate(GridConvexFunction(box, std::move(vals)), grid);
}

PythagorasResult pythagoras_check(const GridConvexFunction& g0, const GridConvexFunction& g1,
                                  const PolytopeGrid& grid) {
  const auto vee = min_operation(g0, g1);
  PythagorasResult r;
  auto sq = [&](const GridConvexFunction& a, const GridConvexFunction& b) {
    return integrate(grid, [&](std::size_t i) {
      const double diff = b[i].value() - a[i].value();
      return diff * diff;
    });
  };
  r.d2 = sq(g0, g1);
  r.left = sq(g0, vee);
  r.right = sq(vee, g1);
  r.residual = std::abs(r.d2 - r.left - r.right);
  r.passed = r.residual <= 1e-12 * r.d2 || r.residual == 0.0;
  return r;
}

namespace {

struct MaskedSamples {
  std::size_t n;
  std::vector<double> points;  // per masked node
  std::vector<double> g0, g1;
};

double path_kahler(const MaskedSamples& m, std::span<const double> x, double t) {
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t count = m.g0.size();
  for (std::size_t j = 0; j < count; ++j) {
    double v = 0.0;
    for (std::size_t k = 0; k < m.n; ++k) v += x[k] * m.points[j * m.n + k];
    v -= (1.0 - t) * m.g0[j] + t * m.g1[j];
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

KiselmanResult kiselman_check(const GridPotential& a, const GridPotential& b,
                              std::span<const double> x_samples, std::size_t t_samples) {
  const auto& grid = a.grid();
  const std::size_t n = grid.dimension();
  if (x_samples.size() % n != 0)
    throw std::invalid_argument("kiselman_check: sample count is not a multiple of n");
  if (t_samples < 3) throw std::invalid_argument("kiselman_check: need at least 3 t samples");

  MaskedSamples m{n, {}, {}, {}};
  std::vector<double> s(n);
  for (std::size_t i : grid.masked_indices()) {
    grid.grid().point(i, s);
    m.points.insert(m.points.end(), s.begin(), s.end());
    m.g0.push_back(a.symplectic()[i].value());
    m.g1.push_back(b.symplectic()[i].value());
  }
  const GridPotential vee(min_operation(a.symplectic(), b.symplectic()), grid);

  KiselmanResult r;
  r.x.assign(x_samples.begin(), x_samples.end());
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t q = 0; q < x_samples.size() / n; ++q) {
    const auto x = x_samples.subspan(q * n, n);
    auto f = [&](double t) { return path_kahler(m, x, t); };
    std::size_t best = 0;
    std::vector<double> vals(t_samples);
    for (std::size_t j = 0; j < t_samples; ++j) {
      vals[j] = f(static_cast<double>(j) / static_cast<double>(t_samples - 1));
      if (vals[j] < vals[best]) best = j;
    }
    double lo = static_cast<double>(best > 0 ? best - 1 : 0) / static_cast<double>(t_samples - 1);
    double hi = static_cast<double>(std::min(best + 1, t_samples - 1)) /
                static_cast<double>(t_samples - 1);
    double t_best = static_cast<double>(best) / static_cast<double>(t_samples - 1);
    double v_best = vals[best];
    double c = hi - golden * (hi - lo), d = lo + golden * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > 1e-10) {
      if (fc <= fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - golden * (hi - lo);
        fc = f(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + golden * (hi - lo);
        fd = f(d);
      }
      for (auto [t, v] : {std::pair{c, fc}, std::pair{d, fd}})
        if (v < v_best) {
          v_best = v;
          t_best = t;
        }
    }
    const double target = vee.kahler(x);
    r.inf_over_t.push_back(v_best);
    r.conjugate.push_back(target);
    r.argmin_t.push_back(t_best);
    r.max_deviation = std::max(r.max_deviation, std::abs(v_best - target));
  }
  return r;
}

std::vector<double> default_kiselman_samples(const GridPotential& a, const GridPotential& b) {
  const std::size_t n = a.grid().dimension();
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  for (const auto* cells : {&a.cells(), &b.cells()})
    for (std::size_t c = 0; c < cells->size(); ++c)
      for (std::size_t k = 0; k < n; ++k) {
        lo[k] = std::min(lo[k], cells->gradient_at(c)[k] - 1.0);
        hi[k] = std::max(hi[k], cells->gradient_at(c)[k] + 1.0);
      }
  const std::size_t per_axis = n == 1 ? 41 : 9;
  std::vector<UniformAxis> axes;
  for (std::size_t k = 0; k < n; ++k) axes.emplace_back(lo[k], hi[k], per_axis);
  const TensorGrid lattice(std::move(axes));
  std::vector<double> out;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto p = lattice.point(i);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

SuiteQuantities suite_quantities(const GridPotential& a, const GridPotential& b) {
  const auto& grid = a.grid();
  const auto& g0 = a.symplectic();
  const auto& g1 = b.symplectic();
  SuiteQuantities q;
  double scale = 1.0;
  for (std::size_t i : grid.masked_indices())
    scale = std::max({scale, std::abs(g0[i].value()), std::abs(g1[i].value())});
  q["scale"] = scale;
  q["d"] = mabuchi_distance(g0, g1, grid);
  q["I"] = i_functional(a, b);
  q["I2"] = i2_functional(a, b);
  q["A0"] = cross_moment(a, a, b, 1);
  q["A1"] = cross_moment(b, b, a, 1);

  // phi v psi lies below both, so (vee, a) and (vee, b) are ordered pairs.
  const GridPotential vee(min_operation(g0, g1), grid);
  const double left = i2_functional(a, vee);
  const double right = i2_functional(vee, b);
  q["J2"] = std::sqrt(left * left + right * right);
  q["J2sq"] = left * left + right * right;
  q["d2"] = q["d"] * q["d"];

  for (const auto& [tag, hi] : {std::pair{"a", &a}, std::pair{"b", &b}}) {
    const std::string t = tag;
    q["d(vee," + t + ")"] = mabuchi_distance(vee.symplectic(), hi->symplectic(), grid);
    q["chain(vee," + t + ")"] = std::sqrt(std::max(cross_moment(vee, *hi, vee, 2), 0.0));
    q["I2(vee," + t + ")"] = i2_functional(vee, *hi);
    const GridPotential mid(midpoint_potential(vee, *hi), grid);
    q["d(" + t + ",mid)"] = mabuchi_distance(hi->symplectic(), mid.symplectic(), grid);
  }

  const GridPotential mx(max_operation(g0, g1), grid);
  q["blocki"] = std::sqrt(std::max(cross_moment(mx, b, a, 2), 0.0));
  return q;
}

std::vector<Verdict> inequality_verdicts(const SuiteQuantities& fine,
                                         const SuiteQuantities& coarse, std::size_t n) {
  auto val = [&](const std::string& k) { return fine.at(k); };
  auto err = [&](const std::string& k) { return std::abs(fine.at(k) - coarse.at(k)); };
  std::vector<Verdict> out;
  // lhs_terms: (coefficient, key) summed; rhs is constant * key.
  // Quantities are homogeneous of degree `power` in the potentials; the
  // absolute floor covers cancellation in the transforms.
  auto add = [&](std::string name, std::vector<std::pair<double, std::string>> lhs_terms,
                 double constant, const std::string& rhs_key, double power = 1.0) {
    double lhs = 0.0, lhs_err = 0.0, lhs_abs = 0.0;
    for (const auto& [c, k] : lhs_terms) {
      lhs += c * val(k);
      lhs_err += std::abs(c) * err(k);
      lhs_abs += std::abs(c * val(k));
    }
    const double rhs = rhs_key.empty() ? 0.0 : val(rhs_key);
    const double rhs_err = rhs_key.empty() ? 0.0 : err(rhs_key);
    const double tol = 3.0 * (lhs_err + constant * rhs_err) +
                       roundoff_floor(lhs_abs, constant * rhs) +
                       1e-12 * std::pow(val("scale"), power);
    out.push_back(check_le(std::move(name), lhs, constant, rhs, tol));
  };
  const double nn = static_cast<double>(n);
  const double chain_c = std::pow(2.0, 2.0 + 0.5 * nn);

  add("0 <= I", {{-1.0, "I"}}, 1.0, "");
  add("I <= 2 I2", {{1.0, "I"}}, 2.0, "I2");
  add("d <= 2 I2", {{1.0, "d"}}, 2.0, "I2");
  add("I/(n+1) + A0 <= d", {{1.0 / (nn + 1.0), "I"}, {1.0, "A0"}}, 1.0, "d");
  add("I/(n+1) + A1 <= d", {{1.0 / (nn + 1.0), "I"}, {1.0, "A1"}}, 1.0, "d");
  for (const std::string t : {"a", "b"}) {
    const std::string pair = "(phi v psi, " + std::string(t == "a" ? "phi" : "psi") + ")";
    add("ordered d <= chain " + pair, {{1.0, "d(vee," + t + ")"}}, 1.0, "chain(vee," + t + ")");
    add("ordered chain <= 2^(2+n/2) d " + pair, {{1.0, "chain(vee," + t + ")"}}, chain_c,
        "d(vee," + t + ")");
    add("ordered I2 <= chain " + pair, {{1.0, "I2(vee," + t + ")"}}, 1.0,
        "chain(vee," + t + ")");
    add("Darvas midpoint " + pair, {{1.0, "d(" + t + ",mid)"}}, 1.0, "d(vee," + t + ")");
  }
  add("d <= 2 J2", {{1.0, "d"}}, 2.0, "J2");
  add("2 J2 <= 2^(2+n/2) d", {{2.0, "J2"}}, chain_c, "d");
  add("J2 <= I2", {{1.0, "J2"}}, 1.0, "I2");
  add("Blocki", {{1.0, "blocki"}}, 1.0, "d");
  add("d(phi, phi v psi) <= d(phi, psi)", {{1.0, "d(vee,a)"}}, 1.0, "d");
  add("d(phi v psi, psi) <= d(phi, psi)", {{1.0, "d(vee,b)"}}, 1.0, "d");
  add("I2(phi,phi v psi)^2 + I2(phi v psi,psi)^2 <= 2^(n+4) d^2", {{1.0, "J2sq"}},
      std::pow(2.0, nn + 4.0), "d2", 2.0);
  return out;
}

bool SuiteResult::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.passed; });
}

namespace {

void require_unit_volume(const DelzantPolytope& p) {
  if (std::abs(p.volume() - 1.0) > 1e-12)
    throw std::invalid_argument(
        "inequality suite: the comparison inequalities are run on unit-volume polytopes only");
}

}  // namespace

SuiteResult inequality_suite(const PairRealizer& pair, const DelzantPolytope& p,
                             std::size_t nodes, double margin) {
  require_unit_volume(p);
  if (nodes < 16) throw std::invalid_argument("inequality suite: N must be at least 16");
  auto run = [&](const PolytopeGrid& grid) {
    auto [g0, g1] = pair(grid);
    return suite_quantities(GridPotential(std::move(g0), grid),
                            GridPotential(std::move(g1), grid));
  };
  const auto fine_grid = build_grid(p, nodes, margin);
  SuiteResult r;
  r.fine = run(fine_grid);
  r.coarse = run(regrid(fine_grid, nodes / 2));
  r.verdicts = inequality_verdicts(r.fine, r.coarse, p.dimension());
  return r;
}

DistanceReport inequality_suite(const PotentialSource& a, const PotentialSource& b,
                                const DelzantPolytope& p, std::size_t nodes, double margin) {
  auto report = distance_report(a, b, p, nodes, margin);
  if (std::abs(p.volume() - 1.0) > 1e-12) {
    report.notes.push_back(fmt::format(
        "vol(P) = {}: comparison inequalities skipped (they assume unit volume)",
        format_real(p.volume())));
    return report;
  }
  const auto suite = inequality_suite(
      [&](const PolytopeGrid& grid) {
        return std::pair{a.realize(grid).symplectic, b.realize(grid).symplectic};
      },
      p, nodes, margin);
  report.verdicts = suite.verdicts;
  return report;
}

}  // namespace toric
