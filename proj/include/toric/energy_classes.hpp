#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "toric/convex_transform.hpp"
#include "toric/polytope.hpp"
#include "toric/potentials.hpp"

namespace toric {

/// (int_P |G|^q ds)^{1/q} over the masked grid.
double lq_norm(const GridConvexFunction& g, double q, const PolytopeGrid& grid);

enum class Trend { convergent, divergent, inconclusive };
std::string to_string(Trend t);

/**
 * L^q integrals of G on the masks l_i >= delta, delta/2, delta/4.  With
 * increments D1, D2 of int |G|^q between consecutive margins and r = D2/D1:
 *   r <= 0.8          convergent, the tail summed as a geometric series
 *   r >= 0.95         divergent (the increments are not shrinking)
 *   otherwise         inconclusive
 * Increments below 1e-14 of the integral count as convergent.
 */
struct MembershipVerdict {
  double q = 0.0;
  std::array<double, 3> margins{};
  std::array<double, 3> norms{};
  double ratio = 0.0;
  Trend trend = Trend::inconclusive;
  std::optional<double> extrapolated;
};
nlohmann::json to_json(const MembershipVerdict& v);

/// `base` fixes the nodes and the largest margin delta > 0.
MembershipVerdict membership(const SymplecticPotential& g, double q, const PolytopeGrid& base);
MembershipVerdict membership(const GridConvexFunction& g, double q, const PolytopeGrid& base);

struct SupBoundResult {
  double neg_inf = 0.0;  // -min G
  double l1 = 0.0;       // ||G||_{L^1}
  double constant = 2.0;
  bool passed = false;
};

/// -min G <= 2 ||G||_{L^1} for a convex G on [0,1].
SupBoundResult sup_bound_check(const GridConvexFunction& g, const PolytopeGrid& grid);

struct RegimeRow {
  double epsilon = 0.0, C = 0.0;
  double L1 = 0.0, Linf = 0.0, I1 = 0.0, I2 = 0.0, d = 0.0;
  double L1_exact = 0.0, Linf_exact = 0.0, I1_exact = 0.0, I2_exact = 0.0, d_exact = 0.0;
  double max_relative_error = 0.0;
  std::size_t nodes = 0;
  // eps -> 0, eps C -> 0, eps^2 C -> 0, eps^3 C^2 -> 0 (I2), eps^3 C^2 -> 0 (d)
  std::array<bool, 5> predicates{};
};

/// Regime table for the two-kink family against G = 0.  Grids use
/// max(nodes, ceil(256 / eps) + 1) nodes so the kink at eps is resolved.
/// A predicate "q_j -> 0" holds for the schedule when q_j is nonincreasing
/// and its last value is at most half its first.
std::vector<RegimeRow> convergence_classifier(
    const std::vector<std::pair<double, double>>& schedule, std::size_t nodes = 4096);

/// eps_j = 1/j, C_j = j^{3/2}, j = 1..count.
std::vector<std::pair<double, double>> headline_schedule(std::size_t count = 20);

void write_regime_csv(std::ostream& os, const std::vector<RegimeRow>& rows);

}  // namespace toric
