#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "toric/convex_transform.hpp"
#include "toric/polytope.hpp"

namespace toric {

/// Closed-form convex function F on R^n (Kahler side).
struct KahlerPotential {
  std::string name;
  std::size_t dimension = 0;
  std::function<double(std::span<const double>)> eval;
  double operator()(std::span<const double> x) const { return eval(x); }
};

/// Closed-form convex function G on the closed polytope (symplectic side).
/// Evaluation outside P throws.
struct SymplecticPotential {
  std::string name;
  std::size_t dimension = 0;
  std::function<double(std::span<const double>)> eval;
  double operator()(std::span<const double> s) const { return eval(s); }
};

/// F(x) = 1/2 log(1 + sum_i exp(2 x_i)), evaluated with a log-sum-exp shift.
KahlerPotential fubini_study(std::size_t n);

/// G(s) = 1/2 { sum_i l_i(s) log l_i(s) + l_inf(s) log l_inf(s) } with
/// t log t = 0 at t = 0.  The l_inf term is dropped when the normals sum to
/// zero (it vanishes identically there).
SymplecticPotential guillemin_potential(const DelzantPolytope& p);

/// F_P(x) = max over vertices v of <v,x>.
KahlerPotential support_function(const DelzantPolytope& p);

/// G_P = 0 on P, the conjugate of the support function.
SymplecticPotential zero_potential(const DelzantPolytope& p);

/// The two-kink family on P = [0,1]:
///   F(x) = (1-eps) max(x,0) + eps max(x,-C),   G(s) = max(C (eps - s), 0).
/// Requires 0 < eps <= 1, C > 0 and eps * C <= kMaxHeight.
struct ExampleFamily {
  static constexpr double kMaxHeight = 1e3;
  double epsilon;
  double C;

  ExampleFamily(double epsilon, double C);
  KahlerPotential kahler() const;
  SymplecticPotential symplectic() const;
};

/**
 * A potential realized on a grid: the symplectic side G (always), the Kahler
 * side F on a box (when it was materialized) and the constant that was
 * added to G to make min_P G = 0, i.e. F <= F_P with equality somewhere.
 */
struct PotentialPair {
  std::string provenance;
  GridConvexFunction symplectic;
  std::optional<GridConvexFunction> kahler;
  double shift = 0.0;
};

/// G at the masked nodes, +inf elsewhere, with its convexity certificate.
GridConvexFunction sample_symplectic(const SymplecticPotential& g,
                                     const PolytopeGrid& grid);

/// F at every node of a box.
GridConvexFunction sample_kahler(const KahlerPotential& f, const TensorGrid& box);

/// Box [-R, R]^n with R = max over masked nodes of |grad G| + 1 (at least 3).
double default_box_radius(const GridConvexFunction& g, const PolytopeGrid& grid);

/// G = conjugate(F) on the masked grid.  Throws NumericError naming a box
/// node when the box slopes do not reach the masked part of P.  With
/// `normalize`, G is shifted so that min G = 0 and the shift recorded.
PotentialPair symplectic_from_kahler(const GridConvexFunction& kahler_on_box,
                                     const PolytopeGrid& grid,
                                     bool normalize = false);

/// Closed-form G plus F on the box [-2C, C] whose nodes include both kinks.
/// Verifies conjugate(F) == G on the mask at construction.
PotentialPair example_family(const ExampleFamily& family, const PolytopeGrid& grid);

struct ResolveOptions {
  double box_radius = 0.0;     // 0 = automatic
  std::size_t box_nodes = 0;   // 0 = automatic
};

/**
 * Named potential, realizable on any grid over its polytope.
 *   "fs"                 Fubini-Study (standard simplex only)
 *   "guillemin"          Guillemin's potential of P
 *   "support"            support function F_P, G = 0
 *   "example:eps=E,C=K"  the two-kink family on [0,1]
 *   "csv:<path>"         grid-function CSV, s-grid (G) or x-grid (F)
 */
struct PotentialSource {
  std::string name;
  std::function<PotentialPair(const PolytopeGrid&)> realize;
  std::optional<SymplecticPotential> symplectic_closed_form;
  std::optional<KahlerPotential> kahler_closed_form;
};

/// Thrown when a potential specifier cannot be resolved.
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

PotentialSource resolve_potential(const std::string& spec, const DelzantPolytope& p,
                                  const ResolveOptions& opts = {});

PotentialSource closed_form_source(const SymplecticPotential& g);

/// Multilinear interpolant of grid samples; falls back to the nearest
/// finite corner where a cell touches +inf.
SymplecticPotential interpolate(const GridConvexFunction& g, std::string name);

}  // namespace toric
