#include "toric/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace toric {

namespace {

double t_log_t(double t, double scale) {
  if (t > 0.0) return t * std::log(t);
  if (t >= -1e-12 * scale) return 0.0;
  throw std::invalid_argument("guillemin potential: evaluation outside the polytope");
}

double polytope_scale(const DelzantPolytope& p) {
  double s = 1.0;
  for (std::size_t k = 0; k < p.dimension(); ++k)
    s = std::max({s, std::abs(p.lower_corner()[k]), std::abs(p.upper_corner()[k])});
  return s;
}

std::string join_dims(std::span<const double> v) {
  std::string out = "(";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += format_real(v[k]);
  }
  return out + ")";
}

}  // namespace

KahlerPotential fubini_study(std::size_t n) {
  if (n == 0) throw std::invalid_argument("fubini_study: n must be positive");
  return {"fs", n, [n](std::span<const double> x) {
            if (x.size() != n) throw std::invalid_argument("fubini_study: dimension mismatch");
            double m = 0.0;
            for (double xi : x) m = std::max(m, 2.0 * xi);
            double acc = std::exp(-m);
            for (double xi : x) acc += std::exp(2.0 * xi - m);
            return 0.5 * (m + std::log(acc));
          }};
}

SymplecticPotential guillemin_potential(const DelzantPolytope& p) {
  const double scale = polytope_scale(p);
  const bool drop_inf = p.normals_sum_to_zero();
  return {"guillemin", p.dimension(), [p, scale, drop_inf](std::span<const double> s) {
            const auto ell = p.facet_values(s);
            CompensatedSum acc;
            for (double l : ell) acc.add(t_log_t(l, scale));
            if (!drop_inf) {
              const double li = p.ell_infinity(s);
              if (li < -1e-12 * scale)
                throw NumericError("guillemin potential: l_inf < 0 at " + join_dims(s));
              acc.add(t_log_t(std::max(li, 0.0), scale));
            }
            return 0.5 * acc.value();
          }};
}

KahlerPotential support_function(const DelzantPolytope& p) {
  const auto verts = p.vertices();
  const std::size_t n = p.dimension();
  return {"support", n, [verts, n](std::span<const double> x) {
            if (x.size() != n) throw std::invalid_argument("support function: dimension mismatch");
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& v : verts) {
              double dot = 0.0;
              for (std::size_t k = 0; k < n; ++k) dot += v[k] * x[k];
              best = std::max(best, dot);
            }
            return best;
          }};
}

SymplecticPotential zero_potential(const DelzantPolytope& p) {
  return {"support", p.dimension(), [p](std::span<const double> s) {
            if (!p.contains(s, 1e-12 * polytope_scale(p)))
              throw std::invalid_argument("zero potential: evaluation outside the polytope");
            return 0.0;
          }};
}

ExampleFamily::ExampleFamily(double eps, double c) : epsilon(eps), C(c) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("example family: need 0 < eps <= 1");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("example family: need C > 0");
  if (eps * c > kMaxHeight)
    throw std::invalid_argument(
        fmt::format("example family: eps*C = {} exceeds the cap {}", eps * c, kMaxHeight));
}

KahlerPotential ExampleFamily::kahler() const {
  const double e = epsilon, c = C;
  return {fmt::format("example:eps={},C={}", e, c), 1, [e, c](std::span<const double> x) {
            return (1.0 - e) * std::max(x[0], 0.0) + e * std::max(x[0], -c);
          }};
}

SymplecticPotential ExampleFamily::symplectic() const {
  const double e = epsilon, c = C;
  return {fmt::format("example:eps={},C={}", e, c), 1, [e, c](std::span<const double> s) {
            if (s[0] < -1e-12 || s[0] > 1.0 + 1e-12)
              throw std::invalid_argument("example family: evaluation outside [0,1]");
            return std::max(c * (e - s[0]), 0.0);
          }};
}

GridConvexFunction sample_symplectic(const SymplecticPotential& g, const PolytopeGrid& grid) {
  if (g.dimension != grid.dimension())
    throw std::invalid_argument("sample_symplectic: dimension mismatch");
  std::vector<ExtReal> vals(grid.size(), ExtReal::infinity());
  std::vector<double> s(grid.dimension());
  for (std::size_t i : grid.masked_indices()) {
    grid.grid().point(i, s);
    vals[i] = g(s);
  }
  GridConvexFunction out(grid.grid(), std::move(vals));
  out.set_certificate(is_convex(out));
  return out;
}

GridConvexFunction sample_kahler(const KahlerPotential& f, const TensorGrid& box) {
  if (f.dimension != box.dimension())
    throw std::invalid_argument("sample_kahler: dimension mismatch");
  std::vector<ExtReal> vals(box.size());
  std::vector<double> x(box.dimension());
  for (std::size_t i = 0; i < box.size(); ++i) {
    box.point(i, x);
    vals[i] = f(x);
  }
  GridConvexFunction out(box, std::move(vals));
  out.set_certificate(is_convex(out));
  return out;
}

double default_box_radius(const GridConvexFunction& g, const PolytopeGrid& grid) {
  const auto grad = gradient(g, grid);
  double m = 0.0;
  for (std::size_t i : grid.masked_indices())
    if (grad.defined[i])
      for (double v : grad.at(i)) m = std::max(m, std::abs(v));
  return std::max(3.0, m + 1.0);
}

PotentialPair symplectic_from_kahler(const GridConvexFunction& kahler_on_box,
                                     const PolytopeGrid& grid, bool normalize) {
  const auto& box = kahler_on_box.grid();
  if (box.dimension() != grid.dimension())
    throw std::invalid_argument("symplectic_from_kahler: dimension mismatch");
  for (const auto& v : kahler_on_box.values())
    if (v.is_infinite())
      throw std::invalid_argument("symplectic_from_kahler: +inf on a Kahler-side box");
  Certificate cert = kahler_on_box.certificate();
  if (cert.status == Convexity::unknown) cert = is_convex(kahler_on_box);
  if (cert.status == Convexity::violated)
    throw NumericError(fmt::format("symplectic_from_kahler: F is not convex near x = {}",
                                   join_dims(box.point(cert.witness))));

  auto g = conjugate(kahler_on_box, grid);

  // Where the maximizer of <x,s> - F(x) sits on the box boundary, the box
  // truncated the sup.  The discrete gradient of G is that maximizer.
  const auto grad = gradient(g, grid);
  for (std::size_t i : grid.masked_indices()) {
    if (!grad.defined[i]) continue;
    const auto x = grad.at(i);
    for (std::size_t k = 0; k < box.dimension(); ++k) {
      const auto& ax = box.axis(k);
      const double slack = 0.5 * ax.step();
      if (x[k] <= ax.lo() + slack || x[k] >= ax.hi() - slack)
        throw NumericError(fmt::format(
            "slope coverage failure: the box [{}, {}] on axis {} does not reach the "
            "slopes of P at s = {}",
            format_real(ax.lo()), format_real(ax.hi()), k + 1,
            join_dims(grid.grid().point(i))));
    }
  }

  double shift = 0.0;
  if (normalize) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i : grid.masked_indices()) lo = std::min(lo, g[i].value());
    shift = -lo;
    std::vector<ExtReal> vals = g.values();
    for (std::size_t i : grid.masked_indices()) vals[i] = vals[i].value() + shift;
    g = GridConvexFunction(g.grid(), std::move(vals), g.certificate());
  }
  return {"kahler grid", std::move(g), kahler_on_box, shift};
}

PotentialPair example_family(const ExampleFamily& fam, const PolytopeGrid& grid) {
  if (!(grid.polytope() == make_simplex(1)))
    throw std::invalid_argument("example family: the polytope must be [0,1]");
  auto g = sample_symplectic(fam.symplectic(), grid);

  // Kinks at -C and 0 are nodes of [-2C, C] with 3k+1 nodes.
  constexpr std::size_t k = 1024;
  const std::vector<UniformAxis> axes{UniformAxis(-2.0 * fam.C, fam.C, 3 * k + 1)};
  auto f = sample_kahler(fam.kahler(), TensorGrid(axes));
  const auto check = conjugate(f, grid);
  const double tol = 1e-10 * std::max(1.0, fam.epsilon * fam.C);
  for (std::size_t i : grid.masked_indices()) {
    const double err = std::abs(check[i].value() - g[i].value());
    if (err > tol)
      throw NumericError(fmt::format(
          "example family: conjugate(F) differs from G by {} at s = {}", format_real(err),
          format_real(grid.grid().point(i)[0])));
  }
  return {fam.symplectic().name, std::move(g), std::move(f), 0.0};
}

SymplecticPotential interpolate(const GridConvexFunction& g, std::string name) {
  const std::size_t n = g.dimension();
  return {std::move(name), n, [g, n](std::span<const double> s) {
            const auto& grid = g.grid();
            if (s.size() != n) throw std::invalid_argument("interpolate: dimension mismatch");
            std::vector<std::size_t> base(n);
            std::vector<double> t(n);
            std::size_t nearest = 0;
            for (std::size_t k = 0; k < n; ++k) {
              const auto& ax = grid.axis(k);
              const double u = (s[k] - ax.lo()) / ax.step();
              const double last = static_cast<double>(ax.size() - 1);
              if (u < -1e-9 || u > last + 1e-9)
                throw std::invalid_argument("interpolate: point outside the sampled box");
              const double cu = std::clamp(u, 0.0, last);
              base[k] = std::min(static_cast<std::size_t>(cu), ax.size() - 2);
              t[k] = cu - static_cast<double>(base[k]);
              nearest += static_cast<std::size_t>(std::llround(cu)) * grid.stride(k);
            }
            double acc = 0.0;
            bool finite = true;
            for (std::size_t corner = 0; corner < (std::size_t{1} << n) && finite; ++corner) {
              std::size_t idx = 0;
              double w = 1.0;
              for (std::size_t k = 0; k < n; ++k) {
                const bool up = (corner >> k) & 1U;
                idx += (base[k] + (up ? 1 : 0)) * grid.stride(k);
                w *= up ? t[k] : 1.0 - t[k];
              }
              if (w == 0.0) continue;
              if (g[idx].is_infinite()) finite = false;
              else acc += w * g[idx].value();
            }
            if (finite) return acc;
            if (g[nearest].is_finite()) return g[nearest].value();
            throw NumericError("interpolate: no finite sample near " + join_dims(s));
          }};
}

PotentialSource closed_form_source(const SymplecticPotential& g) {
  PotentialSource src;
  src.name = g.name;
  src.symplectic_closed_form = g;
  src.realize = [g](const PolytopeGrid& grid) {
    auto G = sample_symplectic(g, grid);
    if (G.certificate().status == Convexity::violated)
      throw NumericError(fmt::format("potential '{}' is not convex near s = {}", g.name,
                                     join_dims(grid.grid().point(G.certificate().witness))));
    return PotentialPair{g.name, std::move(G), std::nullopt, 0.0};
  };
  return src;
}

namespace {

std::map<std::string, double> parse_params(const std::string& text, const std::string& spec) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ResolutionError("malformed potential parameters in '" + spec + "'");
    const std::string key = item.substr(0, eq);
    try {
      std::size_t used = 0;
      const std::string val = item.substr(eq + 1);
      out[key] = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::logic_error&) {
      throw ResolutionError("malformed number for '" + key + "' in '" + spec + "'");
    }
  }
  return out;
}

PotentialSource fs_source(const DelzantPolytope& p, const ResolveOptions& opts) {
  const std::size_t n = p.dimension();
  if (!(p == make_simplex(static_cast<int>(n))))
    throw ResolutionError("'fs' is defined on the standard simplex only");
  PotentialSource src;
  src.name = "fs";
  src.kahler_closed_form = fubini_study(n);
  const auto reference = guillemin_potential(p);
  src.realize = [n, opts, reference](const PolytopeGrid& grid) {
    double radius = opts.box_radius;
    if (radius <= 0.0) radius = default_box_radius(sample_symplectic(reference, grid), grid);
    std::size_t nodes = opts.box_nodes;
    if (nodes == 0) {
      const double dx = n == 1 ? 0.01 : 0.02;
      const std::size_t cap = n == 1 ? (std::size_t{1} << 16) : n == 2 ? 1024 : 128;
      nodes = std::min(cap, static_cast<std::size_t>(std::ceil(2.0 * radius / dx)) + 1);
    }
    const std::vector<double> lo(n, -radius), hi(n, radius);
    const auto box = TensorGrid::box(lo, hi, nodes);
    auto pair = symplectic_from_kahler(sample_kahler(fubini_study(n), box), grid);
    pair.provenance = "fs";
    return pair;
  };
  return src;
}

PotentialSource csv_source(const std::string& path, const DelzantPolytope& p) {
  GridCsv csv = [&] {
    try {
      return read_grid_csv(path);
    } catch (const std::invalid_argument& e) {
      throw ResolutionError(e.what());
    }
  }();
  if (csv.function.dimension() != p.dimension())
    throw ResolutionError("csv potential: dimension does not match the polytope");
  PotentialSource src;
  src.name = "csv:" + path;
  if (csv.variable == "x") {
    const auto f = csv.function;
    src.realize = [f, path](const PolytopeGrid& grid) {
      auto pair = symplectic_from_kahler(f, grid, true);
      pair.provenance = "user grid " + path;
      return pair;
    };
    return src;
  }
  const auto g = csv.function;
  const auto interp = interpolate(g, "csv:" + path);
  src.realize = [g, interp, path](const PolytopeGrid& grid) {
    std::vector<ExtReal> vals(grid.size(), ExtReal::infinity());
    const bool same = g.grid() == grid.grid();
    std::vector<double> s(grid.dimension());
    for (std::size_t i : grid.masked_indices()) {
      grid.grid().point(i, s);
      if (same) {
        if (g[i].is_infinite())
          throw NumericError("csv potential: +inf inside the polytope at " + join_dims(s));
        vals[i] = g[i];
      } else {
        vals[i] = interp(s);
      }
    }
    GridConvexFunction G(grid.grid(), std::move(vals));
    G.set_certificate(is_convex(G));
    if (G.certificate().status == Convexity::violated)
      throw NumericError("csv potential is not convex near s = " +
                         join_dims(grid.grid().point(G.certificate().witness)));
    return PotentialPair{"user grid " + path, std::move(G), std::nullopt, 0.0};
  };
  return src;
}

}  // namespace

PotentialSource resolve_potential(const std::string& spec, const DelzantPolytope& p,
                                  const ResolveOptions& opts) {
  if (spec == "fs") return fs_source(p, opts);
  if (spec == "guillemin") {
    auto src = closed_form_source(guillemin_potential(p));
    src.name = "guillemin";
    return src;
  }
  if (spec == "support") {
    auto src = closed_form_source(zero_potential(p));
    src.kahler_closed_form = support_function(p);
    return src;
  }
  if (spec.rfind("example:", 0) == 0) {
    if (!(p == make_simplex(1)))
      throw ResolutionError("example potentials live on [0,1] (simplex1)");
    const auto params = parse_params(spec.substr(8), spec);
    if (params.size() != 2 || !params.count("eps") || !params.count("C"))
      throw ResolutionError("example potential needs exactly eps=... and C=...");
    const auto fam = [&] {
      try {
        return ExampleFamily(params.at("eps"), params.at("C"));
      } catch (const std::invalid_argument& e) {
        throw ResolutionError(e.what());
      }
    }();
    PotentialSource src;
    src.name = spec;
    src.symplectic_closed_form = fam.symplectic();
    src.kahler_closed_form = fam.kahler();
    src.realize = [fam](const PolytopeGrid& grid) { return example_family(fam, grid); };
    return src;
  }
  if (spec.rfind("csv:", 0) == 0) return csv_source(spec.substr(4), p);
  throw ResolutionError("unknown potential '" + spec + "'");
}

}  // namespace toric
