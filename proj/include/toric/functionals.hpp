#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "toric/convex_transform.hpp"
#include "toric/polytope.hpp"
#include "toric/potentials.hpp"

namespace toric {

/**
 * Piecewise-constant gradient of the multilinear interpolant of G on every
 * grid cell whose corners are all masked.  Pushing Lebesgue measure on P
 * forward by these gradients gives the (discrete) Monge-Ampere measure of
 * the Kahler potential; for piecewise-linear G it is exact.
 */
struct CellGradients {
  std::size_t dimension = 0;
  std::vector<double> gradient;  // size() * dimension
  std::vector<double> center;    // size() * dimension
  std::vector<double> weight;    // cell volume
  std::size_t size() const { return weight.size(); }
  std::span<const double> gradient_at(std::size_t c) const {
    return {gradient.data() + c * dimension, dimension};
  }
  std::span<const double> center_at(std::size_t c) const {
    return {center.data() + c * dimension, dimension};
  }
};

CellGradients cell_gradients(const GridConvexFunction& g, const PolytopeGrid& grid);

/// F(x) = max over masked nodes s of <x,s> - G(s).  Lines along the last
/// axis are kept as lower hulls, so a query costs O(lines * log N).
class DiscreteKahlerPotential {
 public:
  DiscreteKahlerPotential(const GridConvexFunction& g, const PolytopeGrid& grid);
  double operator()(std::span<const double> x) const;
  std::size_t dimension() const { return n_; }

 private:
  struct Line {
    std::vector<double> prefix;  // s_1 .. s_{n-1}
    LowerHull hull;              // (s_n, G)
  };
  std::size_t n_;
  std::vector<Line> lines_;
};

/// A symplectic potential on a polytope grid together with everything the
/// functionals need from it.  Throws NumericError when G is +inf on the mask.
class GridPotential {
 public:
  GridPotential(GridConvexFunction g, const PolytopeGrid& grid);

  const GridConvexFunction& symplectic() const { return g_; }
  const PolytopeGrid& grid() const { return *grid_; }
  const CellGradients& cells() const { return cells_; }
  double kahler(std::span<const double> x) const { return (*f_)(x); }
  std::vector<double> kahler_at(const CellGradients& cells) const;

 private:
  GridConvexFunction g_;
  std::shared_ptr<const PolytopeGrid> grid_;
  CellGradients cells_;
  std::shared_ptr<const DiscreteKahlerPotential> f_;
};

/// sum over masked nodes of weight * term(node), compensated.
double integrate(const PolytopeGrid& grid, const std::function<double(std::size_t)>& term);

/// ||G1 - G0||_{L^2(P)}.
double mabuchi_distance(const GridConvexFunction& g0, const GridConvexFunction& g1,
                        const PolytopeGrid& grid);

/// Integral over P of h(grad G(s), s) ds, using cell gradients.
double pushforward_integral(
    const GridConvexFunction& g, const PolytopeGrid& grid,
    const std::function<double(std::span<const double>, std::span<const double>)>& h);

/// Integral over the cells of `over` of (F_a - F_b)^power at grad G_over.
double cross_moment(const GridPotential& over, const GridPotential& a,
                    const GridPotential& b, int power);

/// I(phi_a, phi_b) = int (phi_a - phi_b)(MA(phi_b) - MA(phi_a)).
double i_functional(const GridPotential& a, const GridPotential& b);
double i_functional(const GridConvexFunction& g0, const GridConvexFunction& g1,
                    const PolytopeGrid& grid);

/// I_2(phi_a, phi_b) = sqrt(int (phi_a - phi_b)^2 (MA(phi_a) + MA(phi_b)) / 2).
double i2_functional(const GridPotential& a, const GridPotential& b);
double i2_functional(const GridConvexFunction& g0, const GridConvexFunction& g1,
                     const PolytopeGrid& grid);

/// lhs <= constant * rhs + tolerance.
struct Verdict {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 1.0;
  double tolerance = 0.0;
  bool passed = false;
};
Verdict check_le(std::string name, double lhs, double constant, double rhs,
                 double tolerance);
nlohmann::json to_json(const Verdict& v);

/// Tolerance floor for comparing quantities that agree up to roundoff.
double roundoff_floor(double lhs, double rhs);

struct J2Result {
  double j2 = 0.0;
  double d = 0.0;
  Verdict lower;  // d <= 2 J2
  Verdict upper;  // 2 J2 <= 2^{2+n/2} d
};

/// J_2(phi, psi) = sqrt(I_2(phi, phi v psi)^2 + I_2(phi v psi, psi)^2) with
/// G_{phi v psi} = max(G_phi, G_psi).
J2Result j2_functional(const GridPotential& a, const GridPotential& b);
J2Result j2_functional(const GridConvexFunction& g0, const GridConvexFunction& g1,
                       const PolytopeGrid& grid);

/// E(phi_1) - E(phi_0) = -int_P (G1 - G0) ds.
double aubin_mabuchi_increment(const GridConvexFunction& g0, const GridConvexFunction& g1,
                               const PolytopeGrid& grid);

struct FunctionalSet {
  double d = 0.0;
  double I = 0.0;
  double I2 = 0.0;
  double J2 = 0.0;
  double energy = 0.0;
  double sup_norm = 0.0;
};
FunctionalSet evaluate_functionals(const GridPotential& a, const GridPotential& b);

/// Value on the fine grid, |fine - coarse| against the half-resolution grid,
/// and the value at half the margin when the margin is positive.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  std::optional<double> half_margin;
};

struct DistanceReport {
  std::string a, b, polytope;
  std::size_t nodes = 0;
  double margin = 0.0;
  double shift_a = 0.0, shift_b = 0.0;
  Estimate d, I, I2, J2, energy, sup_norm;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  bool all_passed() const;
};
nlohmann::json to_json(const DistanceReport& r);

/// Functionals of two named potentials on grids with N and N/2 nodes per axis.
DistanceReport distance_report(const PotentialSource& a, const PotentialSource& b,
                               const DelzantPolytope& p, std::size_t nodes, double margin);

}  // namespace toric
