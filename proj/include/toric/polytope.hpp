#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace toric {

/// One facet {s : <s,u> - lambda >= 0} with a primitive integer normal u.
struct Facet {
  std::vector<long> normal;
  double offset = 0.0;  // lambda
};

/**
 * A Delzant polytope P = {s : <s,u_i> - lambda_i >= 0 for all i}.
 *
 * Construction enumerates the vertices by intersecting every n-subset of
 * facets and rejects the input unless P is bounded with nonempty interior,
 * every vertex is simple (exactly n active facets) and the active normals
 * at each vertex form a Z-basis (|det| = 1).
 */
class DelzantPolytope {
 public:
  DelzantPolytope(std::size_t dimension, std::vector<Facet> facets,
                  std::string label = {});

  std::size_t dimension() const { return dimension_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<std::vector<double>>& vertices() const { return vertices_; }
  const std::string& label() const { return label_; }

  /// (l_1(s), ..., l_d(s)) with l_i(s) = <s,u_i> - lambda_i.
  std::vector<double> facet_values(std::span<const double> s) const;

  /// l_inf(s) = sum_i <s,u_i>.
  double ell_infinity(std::span<const double> s) const;

  /// True iff sum_i u_i = 0, in which case l_inf vanishes identically.
  bool normals_sum_to_zero() const;

  /// All facet values > 0.
  bool is_interior(std::span<const double> s) const;

  /// All facet values >= -tol.
  bool contains(std::span<const double> s, double tol = 1e-12) const;

  const std::vector<double>& lower_corner() const { return lower_; }
  const std::vector<double>& upper_corner() const { return upper_; }

  /// Exact volume (pulling triangulation of the face lattice).
  double volume() const { return volume_; }

  /// Indices of the facets active at vertex v (exactly n of them).
  const std::vector<std::size_t>& active_facets(std::size_t vertex) const {
    return active_[vertex];
  }

  bool operator==(const DelzantPolytope& other) const;

 private:
  void enumerate_vertices();
  void check_delzant_and_bounded() const;
  double compute_volume() const;

  std::size_t dimension_;
  std::vector<Facet> facets_;
  std::string label_;
  std::vector<std::vector<double>> vertices_;
  std::vector<std::vector<std::size_t>> active_;
  std::vector<double> lower_, upper_;
  double volume_ = 0.0;
};

/// Standard simplex {s_i >= 0, sum s_i <= 1}: u_i = e_i, lambda_i = 0 and
/// u_{n+1} = -sum e_j, lambda_{n+1} = -1.
DelzantPolytope make_simplex(int n);

/// The interval [a, b] with facets (u=1, lambda=a), (u=-1, lambda=-b).
DelzantPolytope make_interval(double a, double b);

/// The unit cube [0,1]^n.
DelzantPolytope make_cube(int n);

/// Builtin names: "simplexN", "cubeN", "interval:a,b".  Anything else is
/// read as a polytope JSON file.
DelzantPolytope load_polytope(const std::string& name_or_path);

DelzantPolytope polytope_from_json(const nlohmann::json& j);
nlohmann::json polytope_to_json(const DelzantPolytope& p);

/// Uniformly spaced nodes lo, ..., hi (count >= 2, endpoints exact).
class UniformAxis {
 public:
  UniformAxis(double lo, double hi, std::size_t count);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return step_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }

  bool operator==(const UniformAxis& o) const {
    return lo_ == o.lo_ && hi_ == o.hi_ && nodes_.size() == o.nodes_.size();
  }

 private:
  double lo_, hi_, step_;
  std::vector<double> nodes_;
};

/// Tensor product of uniform axes.  Node index is lexicographic with axis 0
/// slowest, which is also the CSV row order.
class TensorGrid {
 public:
  TensorGrid() = default;
  explicit TensorGrid(std::vector<UniformAxis> axes);

  static TensorGrid box(std::span<const double> lo, std::span<const double> hi,
                        std::size_t nodes_per_axis);

  std::size_t dimension() const { return axes_.size(); }
  std::size_t size() const { return size_; }
  const UniformAxis& axis(std::size_t k) const { return axes_[k]; }
  const std::vector<UniformAxis>& axes() const { return axes_; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }

  /// Coordinate of node `index` along axis k.
  std::size_t axis_index(std::size_t index, std::size_t k) const {
    return (index / strides_[k]) % axes_[k].size();
  }
  void point(std::size_t index, std::span<double> out) const;
  std::vector<double> point(std::size_t index) const;

  /// Product of per-axis spacings.
  double cell_volume() const;

  bool operator==(const TensorGrid& o) const { return axes_ == o.axes_; }

 private:
  std::vector<UniformAxis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/**
 * Quadrature grid over P: the tensor grid of the bounding box, a mask of the
 * nodes with l_i >= margin for every facet, and product-trapezoid weights
 * (taken from the full box grid) restricted to the mask.  Weights of a node
 * do not depend on the margin, so shrinking the margin only adds terms.
 */
class PolytopeGrid {
 public:
  PolytopeGrid(DelzantPolytope polytope, TensorGrid grid, double margin);

  const DelzantPolytope& polytope() const { return polytope_; }
  const TensorGrid& grid() const { return grid_; }
  std::size_t dimension() const { return grid_.dimension(); }
  std::size_t size() const { return grid_.size(); }
  double margin() const { return margin_; }

  bool masked(std::size_t i) const { return mask_[i] != 0; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<std::size_t>& masked_indices() const { return masked_; }
  double total_weight() const;

  /// One row per masked node: s_1,...,s_n,weight.
  void write_csv(std::ostream& os) const;

 private:
  DelzantPolytope polytope_;
  TensorGrid grid_;
  double margin_;
  std::vector<char> mask_;
  std::vector<double> weights_;
  std::vector<std::size_t> masked_;
};

/// Grid over the bounding box of P with `nodes_per_axis` nodes per axis
/// (>= 8).  Throws if no node survives the margin.
PolytopeGrid build_grid(const DelzantPolytope& p, std::size_t nodes_per_axis,
                        double margin);

/// Same polytope, margin and box, a different node count.
PolytopeGrid regrid(const PolytopeGrid& g, std::size_t nodes_per_axis);

/// Same box and nodes, a different margin.
PolytopeGrid remask(const PolytopeGrid& g, double margin);

}  // namespace toric
