#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "toric/numeric.hpp"
#include "toric/polytope.hpp"

namespace toric {

enum class Convexity { unknown, verified, violated };

struct Certificate {
  Convexity status = Convexity::unknown;
  std::size_t witness = 0;  // node index, meaningful when violated
};

/**
 * Extended-real samples of a function on a tensor grid.  Kahler-side
 * functions live on a box and are finite everywhere; symplectic-side
 * functions live on a PolytopeGrid's tensor grid and are +inf off the mask.
 */
class GridConvexFunction {
 public:
  GridConvexFunction(TensorGrid grid, std::vector<ExtReal> values,
                     Certificate cert = {});

  const TensorGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::size_t dimension() const { return grid_.dimension(); }
  const ExtReal& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<ExtReal>& values() const { return values_; }
  const Certificate& certificate() const { return cert_; }
  void set_certificate(Certificate c) { cert_ = c; }
  std::size_t finite_count() const;

 private:
  TensorGrid grid_;
  std::vector<ExtReal> values_;
  Certificate cert_;
};

/**
 * Lower convex hull of finitely many points (x_k, y_k) with nondecreasing x.
 * Collinear points are kept so that evaluation reproduces the brute-force
 * sup bit for bit.
 */
class LowerHull {
 public:
  LowerHull(std::span<const double> xs, std::span<const double> ys);

  std::size_t size() const { return hx_.size(); }
  const std::vector<double>& xs() const { return hx_; }
  const std::vector<double>& ys() const { return hy_; }

  /// max_k x_k * s - y_k in O(log n).
  double conjugate_at(double s) const;

  /// Same for targets in any order, one linear sweep after sorting.
  std::vector<double> conjugate_at(std::span<const double> targets) const;

  /// Lower convex envelope at x (x inside [x_min, x_max]).
  double envelope_at(double x) const;

 private:
  double best_near(std::size_t j, double s) const;

  std::vector<double> hx_, hy_;
  std::vector<double> slopes_;  // slope between hull vertices j and j+1
  // The input points, kept to settle roundoff ties against dropped samples.
  std::vector<double> px_, py_;
  std::vector<std::size_t> origin_;  // hull vertex -> input index
};

/// Discrete Legendre-Fenchel transform of 1-D samples:
/// out[j] = max_k xs[k] * targets[j] - ys[k].
std::vector<double> conjugate_samples(std::span<const double> xs,
                                      std::span<const double> ys,
                                      std::span<const double> targets);

/// g(s) = max over finite nodes x of <x,s> - f(x) on every node of `target`,
/// by iterated 1-D transforms (one axis at a time).
GridConvexFunction conjugate(const GridConvexFunction& f, const TensorGrid& target);

/// As above, with g = +inf off the mask of `target`.
GridConvexFunction conjugate(const GridConvexFunction& f,
                             const PolytopeGrid& target);

/// Lower convex envelope of the finite samples, evaluated at the finite nodes
/// (+inf elsewhere).  Exact in 1-D; in higher dimension the dual grid has
/// the same node count per axis and spans the finite-difference slopes.
GridConvexFunction biconjugate(const GridConvexFunction& f);

/// Verified iff every axis-aligned and diagonal second difference over
/// finite triples is >= -tol; tol < 0 selects 1e-9 * (value range).
Certificate is_convex(const GridConvexFunction& f, double tol = -1.0);

/// Gradient samples on the mask: centered differences where both neighbours
/// are masked, one-sided where only one is.  Nodes with no masked neighbour
/// along some axis are left undefined; if that is every node, throws.
struct VectorGrid {
  TensorGrid grid;
  std::size_t components = 0;
  std::vector<double> data;    // size() * components
  std::vector<char> defined;   // per node
  std::span<const double> at(std::size_t i) const {
    return {data.data() + i * components, components};
  }
};
VectorGrid gradient(const GridConvexFunction& f, const PolytopeGrid& grid);

/// max over common finite nodes of |f - g|.
double sup_norm_distance(const GridConvexFunction& f, const GridConvexFunction& g);

/// Pointwise max / min on a shared grid.  Ties take the first argument's
/// value; +inf wins a max and loses a min.
GridConvexFunction pointwise_max(const GridConvexFunction& a,
                                 const GridConvexFunction& b);
GridConvexFunction pointwise_min(const GridConvexFunction& a,
                                 const GridConvexFunction& b);

/// Grid-function CSV: header "s_1,...,s_n,value" (or x_...), one row per
/// node in lexicographic order, "inf" for +inf.
void write_grid_csv(std::ostream& os, const GridConvexFunction& f,
                    const std::string& variable = "s");

struct GridCsv {
  GridConvexFunction function;
  std::string variable;  // "s" or "x"
};
GridCsv read_grid_csv(std::istream& is);
GridCsv read_grid_csv(const std::string& path);

void require_same_grid(const GridConvexFunction& a, const GridConvexFunction& b,
                       const char* what);

}  // namespace toric
