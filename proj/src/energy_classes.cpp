#include "toric/energy_classes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "toric/functionals.hpp"

namespace toric {

double lq_norm(const GridConvexFunction& g, double q, const PolytopeGrid& grid) {
  if (!(q > 0.0)) throw std::invalid_argument("lq_norm: q must be positive");
  if (!(g.grid() == grid.grid())) throw std::invalid_argument("lq_norm: grid mismatch");
  const double integral = integrate(grid, [&](std::size_t i) {
    if (g[i].is_infinite())
      throw NumericError(fmt::format("lq_norm: +inf at masked node {}", i));
    return std::pow(std::abs(g[i].value()), q);
  });
  return std::pow(integral, 1.0 / q);
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::convergent: return "convergent";
    case Trend::divergent: return "divergent";
    case Trend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

nlohmann::json to_json(const MembershipVerdict& v) {
  nlohmann::json j{{"q", v.q},
                   {"margins", v.margins},
                   {"norms", v.norms},
                   {"ratio", v.ratio},
                   {"trend", to_string(v.trend)}};
  j["extrapolated"] = v.extrapolated ? nlohmann::json(*v.extrapolated) : nlohmann::json();
  return j;
}

namespace {

MembershipVerdict classify(double q, const std::array<double, 3>& margins,
                           const std::array<double, 3>& integrals) {
  MembershipVerdict v;
  v.q = q;
  v.margins = margins;
  for (std::size_t k = 0; k < 3; ++k) v.norms[k] = std::pow(integrals[k], 1.0 / q);
  const double d1 = integrals[1] - integrals[0];
  const double d2 = integrals[2] - integrals[1];
  const double scale = std::max(integrals[2], 1e-300);
  if (d2 <= 1e-14 * scale) {
    v.trend = Trend::convergent;
    v.ratio = d1 > 0.0 ? std::max(d2, 0.0) / d1 : 0.0;
    v.extrapolated = v.norms[2];
    return v;
  }
  v.ratio = d1 > 0.0 ? d2 / d1 : std::numeric_limits<double>::infinity();
  if (v.ratio <= 0.8) {
    v.trend = Trend::convergent;
    v.extrapolated = std::pow(integrals[2] + d2 * v.ratio / (1.0 - v.ratio), 1.0 / q);
  } else if (v.ratio >= 0.95) {
    v.trend = Trend::divergent;
  }
  return v;
}

template <class Sampler>
MembershipVerdict run_membership(double q, const PolytopeGrid& base, Sampler&& sample) {
  if (!(q > 0.0)) throw std::invalid_argument("membership: q must be positive");
  if (!(base.margin() > 0.0))
    throw std::invalid_argument("membership: the base margin must be positive");
  std::array<double, 3> margins{base.margin(), base.margin() / 2, base.margin() / 4};
  std::array<double, 3> integrals{};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto grid = remask(base, margins[k]);
    const auto g = sample(grid);
    integrals[k] = std::pow(lq_norm(g, q, grid), q);
  }
  return classify(q, margins, integrals);
}

}  // namespace

MembershipVerdict membership(const SymplecticPotential& g, double q, const PolytopeGrid& base) {
  return run_membership(q, base, [&](const PolytopeGrid& grid) {
    std::vector<ExtReal> vals(grid.size(), ExtReal::infinity());
    std::vector<double> s(grid.dimension());
    for (std::size_t i : grid.masked_indices()) {
      grid.grid().point(i, s);
      vals[i] = g(s);
    }
    return GridConvexFunction(grid.grid(), std::move(vals));
  });
}

MembershipVerdict membership(const GridConvexFunction& g, double q, const PolytopeGrid& base) {
  if (!(g.grid() == base.grid())) throw std::invalid_argument("membership: grid mismatch");
  return run_membership(q, base, [&](const PolytopeGrid&) { return g; });
}

SupBoundResult sup_bound_check(const GridConvexFunction& g, const PolytopeGrid& grid) {
  if (!(grid.polytope() == make_simplex(1)))
    throw std::invalid_argument("sup_bound_check: P must be [0,1]");
  Certificate cert = g.certificate();
  if (cert.status == Convexity::unknown) cert = is_convex(g);
  if (cert.status != Convexity::verified)
    throw std::invalid_argument("sup_bound_check: G is not convex");
  SupBoundResult r;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i : grid.masked_indices()) lo = std::min(lo, g[i].value());
  r.neg_inf = -lo;
  r.l1 = lq_norm(g, 1.0, grid);
  r.passed = r.neg_inf <= r.constant * r.l1 + roundoff_floor(r.neg_inf, r.constant * r.l1);
  return r;
}

namespace {

bool tends_to_zero(const std::vector<double>& seq) {
  if (seq.size() < 2) return false;
  for (std::size_t k = 1; k < seq.size(); ++k)
    if (seq[k] > seq[k - 1] * (1.0 + 1e-12)) return false;
  return seq.back() <= 0.5 * seq.front();
}

double relative_error(double value, double exact) {
  return std::abs(value - exact) / std::max(std::abs(exact), 1e-300);
}

}  // namespace

std::vector<RegimeRow> convergence_classifier(
    const std::vector<std::pair<double, double>>& schedule, std::size_t nodes) {
  if (schedule.empty()) throw std::invalid_argument("classifier: empty schedule");
  const auto p = make_simplex(1);
  std::vector<RegimeRow> rows;
  for (const auto& [eps, C] : schedule) {
    const ExampleFamily fam(eps, C);
    RegimeRow row;
    row.epsilon = eps;
    row.C = C;
    row.nodes = std::max(nodes, static_cast<std::size_t>(std::ceil(256.0 / eps)) + 1);
    const auto grid = build_grid(p, row.nodes, 0.0);
    const auto pair = example_family(fam, grid);
    const auto zero = closed_form_source(zero_potential(p)).realize(grid).symplectic;
    const GridPotential gj(pair.symplectic, grid), g0(zero, grid);

    row.L1 = lq_norm(pair.symplectic, 1.0, grid);
    row.Linf = sup_norm_distance(pair.symplectic, zero);
    row.I1 = i_functional(gj, g0);
    row.I2 = i2_functional(gj, g0);
    row.d = mabuchi_distance(pair.symplectic, zero, grid);

    row.L1_exact = C * eps * eps / 2.0;
    row.Linf_exact = C * eps;
    row.I1_exact = eps * eps * C;
    row.I2_exact = std::pow(eps, 1.5) * C / std::sqrt(2.0);
    row.d_exact = std::pow(eps, 1.5) * C / std::sqrt(3.0);
    row.max_relative_error = std::max(
        {relative_error(row.L1, row.L1_exact), relative_error(row.Linf, row.Linf_exact),
         relative_error(row.I1, row.I1_exact), relative_error(row.I2, row.I2_exact),
         relative_error(row.d, row.d_exact)});
    rows.push_back(row);
  }

  std::array<std::vector<double>, 5> seqs;
  for (const auto& r : rows) {
    const double e = r.epsilon, c = r.C;
    seqs[0].push_back(e);
    seqs[1].push_back(e * c);
    seqs[2].push_back(e * e * c);
    seqs[3].push_back(e * e * e * c * c);
    seqs[4].push_back(e * e * e * c * c);
  }
  std::array<bool, 5> preds{};
  for (std::size_t k = 0; k < 5; ++k) preds[k] = tends_to_zero(seqs[k]);
  for (auto& r : rows) r.predicates = preds;
  return rows;
}

std::vector<std::pair<double, double>> headline_schedule(std::size_t count) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t j = 1; j <= count; ++j) {
    const double jj = static_cast<double>(j);
    out.emplace_back(1.0 / jj, std::pow(jj, 1.5));
  }
  return out;
}

void write_regime_csv(std::ostream& os, const std::vector<RegimeRow>& rows) {
  os << "eps,C,L1,Linf,I1,I2,d,eps_to_0,epsC_to_0,eps2C_to_0,eps3C2_to_0_I2,eps3C2_to_0_d\n";
  for (const auto& r : rows) {
    os << format_real(r.epsilon) << ',' << format_real(r.C) << ',' << format_real(r.L1)
       << ',' << format_real(r.Linf) << ',' << format_real(r.I1) << ','
       << format_real(r.I2) << ',' << format_real(r.d);
    for (bool b : r.predicates) os << ',' << (b ? "true" : "false");
    os << '\n';
  }
}

}  // namespace toric
