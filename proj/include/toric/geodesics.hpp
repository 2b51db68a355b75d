#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "toric/convex_transform.hpp"
#include "toric/functionals.hpp"
#include "toric/polytope.hpp"
#include "toric/potentials.hpp"

namespace toric {

/// t -> (1-t) G0 + t G1, the geodesic in symplectic coordinates.
class GeodesicPath {
 public:
  GeodesicPath(GridConvexFunction g0, GridConvexFunction g1);
  const GridConvexFunction& start() const { return g0_; }
  const GridConvexFunction& end() const { return g1_; }

 private:
  GridConvexFunction g0_, g1_;
};

GridConvexFunction geodesic_point(const GeodesicPath& path, double t);

/// G_{phi v psi} = max(G_phi, G_psi).
GridConvexFunction min_operation(const GridConvexFunction& g0, const GridConvexFunction& g1);

/// G_{max(phi, psi)} = lower convex envelope of min(G_phi, G_psi).
GridConvexFunction max_operation(const GridConvexFunction& g0, const GridConvexFunction& g1);

/// Symplectic potential of (F_a + F_b)/2.  In 1-D the conjugate is taken
/// over the union of the breakpoints of F_a and F_b, which is exact; in
/// higher dimension over a box covering both gradient images.
GridConvexFunction midpoint_potential(const GridPotential& a, const GridPotential& b);

struct PythagorasResult {
  double d2 = 0.0;     // d(phi, psi)^2
  double left = 0.0;   // d(phi, phi v psi)^2
  double right = 0.0;  // d(phi v psi, psi)^2
  double residual = 0.0;
  bool passed = false;  // residual <= 1e-12 d^2
};
PythagorasResult pythagoras_check(const GridConvexFunction& g0, const GridConvexFunction& g1,
                                  const PolytopeGrid& grid);

struct KiselmanResult {
  std::vector<double> x;           // flattened samples, x.size() / n of them
  std::vector<double> inf_over_t;  // inf_t F_t(x)
  std::vector<double> conjugate;   // conjugate of max(G0, G1) at x
  std::vector<double> argmin_t;
  double max_deviation = 0.0;
};

/// inf over t in [0,1] of F_t(x) from `t_samples` uniform values refined by
/// golden-section search, against the conjugate of max(G0, G1).
KiselmanResult kiselman_check(const GridPotential& a, const GridPotential& b,
                              std::span<const double> x_samples, std::size_t t_samples = 21);

/// 41 samples per axis spanning the cell gradients of both potentials, one
/// unit beyond on each side (1-D); a 9-point-per-axis lattice otherwise.
std::vector<double> default_kiselman_samples(const GridPotential& a, const GridPotential& b);

/// Every quantity entering the comparison inequalities, on one grid.
using SuiteQuantities = std::map<std::string, double>;
SuiteQuantities suite_quantities(const GridPotential& a, const GridPotential& b);

/// Builds the verdict list from quantities on the N and N/2 grids.  Each
/// verdict's tolerance is 3x the combined |fine - coarse| of its two sides
/// plus a roundoff floor.
std::vector<Verdict> inequality_verdicts(const SuiteQuantities& fine,
                                         const SuiteQuantities& coarse, std::size_t n);

using PairRealizer =
    std::function<std::pair<GridConvexFunction, GridConvexFunction>(const PolytopeGrid&)>;

struct SuiteResult {
  SuiteQuantities fine, coarse;
  std::vector<Verdict> verdicts;
  bool all_passed() const;
};

/// Runs the inequalities for a pair realizable on any grid over a
/// unit-volume polytope.
SuiteResult inequality_suite(const PairRealizer& pair, const DelzantPolytope& p,
                             std::size_t nodes, double margin);

/// Distance report for two named potentials with the inequality verdicts
/// attached (verdicts are skipped, with a note, when vol(P) != 1).
DistanceReport inequality_suite(const PotentialSource& a, const PotentialSource& b,
                                const DelzantPolytope& p, std::size_t nodes, double margin);

}  // namespace toric
