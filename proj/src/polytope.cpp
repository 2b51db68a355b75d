#include "toric/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "toric/numeric.hpp"

namespace toric {

namespace {

constexpr double kVertexTol = 1e-9;

long gcd_of(const std::vector<long>& v) {
  long g = 0;
  for (long x : v) g = std::gcd(g, std::abs(x));
  return g;
}

Eigen::MatrixXd normal_matrix(const std::vector<Facet>& facets,
                              const std::vector<std::size_t>& rows,
                              std::size_t n) {
  Eigen::MatrixXd a(rows.size(), n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < n; ++c)
      a(r, c) = static_cast<double>(facets[rows[r]].normal[c]);
  return a;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t total) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < total - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

bool is_subset(const std::vector<std::size_t>& small,
               const std::vector<std::size_t>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

DelzantPolytope::DelzantPolytope(std::size_t dimension,
                                 std::vector<Facet> facets, std::string label)
    : dimension_(dimension), facets_(std::move(facets)), label_(std::move(label)) {
  if (dimension_ == 0)
    throw std::invalid_argument("polytope: dimension must be positive");
  if (facets_.size() < dimension_ + 1)
    throw std::invalid_argument(
        fmt::format("polytope: need at least n+1 = {} facets, got {}",
                    dimension_ + 1, facets_.size()));
  for (std::size_t i = 0; i < facets_.size(); ++i) {
    const auto& f = facets_[i];
    if (f.normal.size() != dimension_)
      throw std::invalid_argument(
          fmt::format("polytope: facet {} normal has wrong dimension", i));
    if (gcd_of(f.normal) != 1)
      throw std::invalid_argument(
          fmt::format("polytope: facet {} normal is not primitive", i));
    if (!std::isfinite(f.offset))
      throw std::invalid_argument(
          fmt::format("polytope: facet {} offset is not finite", i));
  }
  enumerate_vertices();
  check_delzant_and_bounded();
  volume_ = compute_volume();
  if (!(volume_ > 0.0))
    throw std::invalid_argument("polytope: empty interior");
}

std::vector<double> DelzantPolytope::facet_values(
    std::span<const double> s) const {
  if (s.size() != dimension_)
    throw std::invalid_argument(
        fmt::format("facet_values: point has dimension {}, polytope has {}",
                    s.size(), dimension_));
  std::vector<double> out(facets_.size());
  for (std::size_t i = 0; i < facets_.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dimension_; ++k)
      acc += s[k] * static_cast<double>(facets_[i].normal[k]);
    out[i] = acc - facets_[i].offset;
  }
  return out;
}

double DelzantPolytope::ell_infinity(std::span<const double> s) const {
  if (s.size() != dimension_)
    throw std::invalid_argument("ell_infinity: dimension mismatch");
  double acc = 0.0;
  for (const auto& f : facets_)
    for (std::size_t k = 0; k < dimension_; ++k)
      acc += s[k] * static_cast<double>(f.normal[k]);
  return acc;
}

bool DelzantPolytope::normals_sum_to_zero() const {
  for (std::size_t k = 0; k < dimension_; ++k) {
    long acc = 0;
    for (const auto& f : facets_) acc += f.normal[k];
    if (acc != 0) return false;
  }
  return true;
}

bool DelzantPolytope::is_interior(std::span<const double> s) const {
  const auto l = facet_values(s);
  return std::all_of(l.begin(), l.end(), [](double v) { return v > 0.0; });
}

bool DelzantPolytope::contains(std::span<const double> s, double tol) const {
  const auto l = facet_values(s);
  return std::all_of(l.begin(), l.end(), [&](double v) { return v >= -tol; });
}

bool DelzantPolytope::operator==(const DelzantPolytope& other) const {
  if (dimension_ != other.dimension_ || facets_.size() != other.facets_.size())
    return false;
  for (std::size_t i = 0; i < facets_.size(); ++i)
    if (facets_[i].normal != other.facets_[i].normal ||
        facets_[i].offset != other.facets_[i].offset)
      return false;
  return true;
}

void DelzantPolytope::enumerate_vertices() {
  const std::size_t n = dimension_;
  const std::size_t d = facets_.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    const Eigen::MatrixXd a = normal_matrix(facets_, idx, n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd rhs(n);
    for (std::size_t r = 0; r < n; ++r) rhs(r) = facets_[idx[r]].offset;
    const Eigen::VectorXd v = lu.solve(rhs);
    std::vector<double> vert(v.data(), v.data() + n);
    const double scale = 1.0 + v.cwiseAbs().maxCoeff();
    if (!contains(vert, kVertexTol * scale)) continue;
    const bool seen = std::any_of(
        vertices_.begin(), vertices_.end(), [&](const std::vector<double>& w) {
          for (std::size_t k = 0; k < n; ++k)
            if (std::abs(w[k] - vert[k]) > kVertexTol * scale) return false;
          return true;
        });
    if (!seen) vertices_.push_back(std::move(vert));
  } while (next_combination(idx, d));

  if (vertices_.size() < n + 1)
    throw std::invalid_argument(
        "polytope: fewer than n+1 vertices (empty, degenerate or unbounded)");

  // Snap tiny coordinates and record active sets.
  for (auto& v : vertices_) {
    double scale = 1.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    const auto l = facet_values(v);
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < d; ++i)
      if (std::abs(l[i]) <= kVertexTol * scale) act.push_back(i);
    active_.push_back(std::move(act));
  }

  lower_.assign(n, std::numeric_limits<double>::infinity());
  upper_.assign(n, -std::numeric_limits<double>::infinity());
  for (const auto& v : vertices_)
    for (std::size_t k = 0; k < n; ++k) {
      lower_[k] = std::min(lower_[k], v[k]);
      upper_[k] = std::max(upper_[k], v[k]);
    }
}

void DelzantPolytope::check_delzant_and_bounded() const {
  const std::size_t n = dimension_;
  std::vector<std::size_t> facet_incidence(facets_.size(), 0);
  for (std::size_t vi = 0; vi < vertices_.size(); ++vi) {
    const auto& act = active_[vi];
    if (act.size() != n)
      throw std::invalid_argument(fmt::format(
          "polytope: vertex {} meets {} facets, expected exactly {}", vi,
          act.size(), n));
    for (std::size_t i : act) ++facet_incidence[i];
    const Eigen::MatrixXd a = normal_matrix(facets_, act, n);
    const double det = a.determinant();
    if (std::abs(std::abs(det) - 1.0) > 1e-9)
      throw std::invalid_argument(fmt::format(
          "polytope: normals at vertex {} are not a Z-basis (|det| = {})", vi,
          std::abs(det)));
    // Edge j leaves the vertex along the j-th column of the inverse; it must
    // hit some other facet or the polytope is unbounded.
    const Eigen::MatrixXd inv = a.inverse();
    for (std::size_t j = 0; j < n; ++j) {
      bool blocked = false;
      for (std::size_t i = 0; i < facets_.size() && !blocked; ++i) {
        if (std::find(act.begin(), act.end(), i) != act.end()) continue;
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          dot += inv(k, j) * static_cast<double>(facets_[i].normal[k]);
        blocked = dot < -1e-12;
      }
      if (!blocked) throw std::invalid_argument("polytope: unbounded");
    }
  }
  for (std::size_t i = 0; i < facets_.size(); ++i)
    if (facet_incidence[i] < n)
      throw std::invalid_argument(
          fmt::format("polytope: constraint {} is redundant (not a facet)", i));
}

double DelzantPolytope::compute_volume() const {
  const std::size_t n = dimension_;
  // Pulling triangulation.  Faces of a simple polytope are indexed by sets of
  // facets; a face of dimension k is split into cones from its first vertex
  // over the (k-1)-faces not containing that vertex.
  auto face_vertices = [&](const std::vector<std::size_t>& s) {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      if (is_subset(s, active_[v])) out.push_back(v);
    return out;
  };
  std::vector<std::vector<std::size_t>> simplices;
  auto triangulate = [&](auto&& self, const std::vector<std::size_t>& face,
                         std::size_t k) -> std::vector<std::vector<std::size_t>> {
    const auto verts = face_vertices(face);
    if (k == 0) return {{verts.front()}};
    const std::size_t apex = verts.front();
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t j = 0; j < facets_.size(); ++j) {
      if (std::find(face.begin(), face.end(), j) != face.end()) continue;
      const auto& act = active_[apex];
      if (std::find(act.begin(), act.end(), j) != act.end()) continue;
      std::vector<std::size_t> sub = face;
      sub.insert(std::upper_bound(sub.begin(), sub.end(), j), j);
      if (face_vertices(sub).empty()) continue;
      for (auto& simplex : self(self, sub, k - 1)) {
        simplex.insert(simplex.begin(), apex);
        out.push_back(std::move(simplex));
      }
    }
    return out;
  };
  simplices = triangulate(triangulate, {}, n);

  double factorial = 1.0;
  for (std::size_t k = 2; k <= n; ++k) factorial *= static_cast<double>(k);
  CompensatedSum vol;
  for (const auto& simplex : simplices) {
    Eigen::MatrixXd m(n, n);
    const auto& v0 = vertices_[simplex[0]];
    for (std::size_t r = 1; r <= n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        m(r - 1, c) = vertices_[simplex[r]][c] - v0[c];
    vol.add(std::abs(m.determinant()) / factorial);
  }
  return vol.value();
}

DelzantPolytope make_simplex(int n) {
  if (n <= 0) throw std::invalid_argument("make_simplex: n must be positive");
  const auto dim = static_cast<std::size_t>(n);
  std::vector<Facet> facets;
  for (std::size_t i = 0; i < dim; ++i) {
    Facet f;
    f.normal.assign(dim, 0);
    f.normal[i] = 1;
    f.offset = 0.0;
    facets.push_back(std::move(f));
  }
  facets.push_back(Facet{std::vector<long>(dim, -1), -1.0});
  return DelzantPolytope(dim, std::move(facets), fmt::format("simplex{}", n));
}

DelzantPolytope make_interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("make_interval: need a < b");
  return DelzantPolytope(1, {Facet{{1}, a}, Facet{{-1}, -b}},
                         fmt::format("interval:{},{}", a, b));
}

DelzantPolytope make_cube(int n) {
  if (n <= 0) throw std::invalid_argument("make_cube: n must be positive");
  const auto dim = static_cast<std::size_t>(n);
  std::vector<Facet> facets;
  for (std::size_t i = 0; i < dim; ++i) {
    Facet lo{std::vector<long>(dim, 0), 0.0};
    lo.normal[i] = 1;
    Facet hi{std::vector<long>(dim, 0), -1.0};
    hi.normal[i] = -1;
    facets.push_back(std::move(lo));
    facets.push_back(std::move(hi));
  }
  return DelzantPolytope(dim, std::move(facets), fmt::format("cube{}", n));
}

namespace {
bool parse_suffix_int(const std::string& s, const std::string& prefix, int& out) {
  if (s.rfind(prefix, 0) != 0 || s.size() == prefix.size()) return false;
  const std::string rest = s.substr(prefix.size());
  if (!std::all_of(rest.begin(), rest.end(), ::isdigit)) return false;
  out = std::stoi(rest);
  return true;
}
}  // namespace

DelzantPolytope load_polytope(const std::string& name) {
  int n = 0;
  if (parse_suffix_int(name, "simplex", n)) return make_simplex(n);
  if (parse_suffix_int(name, "cube", n)) return make_cube(n);
  if (name.rfind("interval:", 0) == 0) {
    const std::string rest = name.substr(9);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("interval:a,b expected");
    return make_interval(std::stod(rest.substr(0, comma)),
                         std::stod(rest.substr(comma + 1)));
  }
  std::ifstream in(name);
  if (!in) throw std::invalid_argument("unknown polytope or unreadable file: " + name);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("polytope JSON: ") + e.what());
  }
  return polytope_from_json(j);
}

DelzantPolytope polytope_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<long>();
    if (n <= 0) throw std::invalid_argument("polytope JSON: n must be positive");
    std::vector<Facet> facets;
    for (const auto& f : j.at("facets"))
      facets.push_back(
          Facet{f.at("u").get<std::vector<long>>(), f.at("lambda").get<double>()});
    return DelzantPolytope(static_cast<std::size_t>(n), std::move(facets),
                           j.value("label", std::string{}));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("polytope JSON: ") + e.what());
  }
}

nlohmann::json polytope_to_json(const DelzantPolytope& p) {
  nlohmann::json facets = nlohmann::json::array();
  for (const auto& f : p.facets())
    facets.push_back({{"u", f.normal}, {"lambda", f.offset}});
  nlohmann::json j{{"n", p.dimension()}, {"facets", facets}};
  if (!p.label().empty()) j["label"] = p.label();
  return j;
}

UniformAxis::UniformAxis(double lo, double hi, std::size_t count)
    : lo_(lo), hi_(hi), step_(0.0) {
  if (count < 2) throw std::invalid_argument("axis: need at least 2 nodes");
  if (!(lo < hi)) throw std::invalid_argument("axis: need lo < hi");
  step_ = (hi - lo) / static_cast<double>(count - 1);
  nodes_.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    nodes_[i] = lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(count - 1);
  nodes_.back() = hi;
}

TensorGrid::TensorGrid(std::vector<UniformAxis> axes) : axes_(std::move(axes)) {
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    strides_[k] = size_;
    size_ *= axes_[k].size();
  }
}

TensorGrid TensorGrid::box(std::span<const double> lo,
                           std::span<const double> hi,
                           std::size_t nodes_per_axis) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box: dimension mismatch");
  std::vector<UniformAxis> axes;
  for (std::size_t k = 0; k < lo.size(); ++k)
    axes.emplace_back(lo[k], hi[k], nodes_per_axis);
  return TensorGrid(std::move(axes));
}

void TensorGrid::point(std::size_t index, std::span<double> out) const {
  for (std::size_t k = 0; k < axes_.size(); ++k)
    out[k] = axes_[k][axis_index(index, k)];
}

std::vector<double> TensorGrid::point(std::size_t index) const {
  std::vector<double> out(axes_.size());
  point(index, out);
  return out;
}

double TensorGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.step();
  return v;
}

PolytopeGrid::PolytopeGrid(DelzantPolytope polytope, TensorGrid grid,
                           double margin)
    : polytope_(std::move(polytope)), grid_(std::move(grid)), margin_(margin) {
  if (!(margin >= 0.0)) throw std::invalid_argument("grid: margin must be >= 0");
  if (grid_.dimension() != polytope_.dimension())
    throw std::invalid_argument("grid: dimension mismatch with polytope");
  const std::size_t n = grid_.dimension();
  double scale = 1.0;
  for (const auto& f : polytope_.facets()) scale = std::max(scale, std::abs(f.offset));
  const double tol = 1e-12 * scale;
  mask_.assign(grid_.size(), 0);
  weights_.assign(grid_.size(), 0.0);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    grid_.point(i, s);
    const auto l = polytope_.facet_values(s);
    const bool inside = std::all_of(l.begin(), l.end(),
                                    [&](double v) { return v >= margin_ - tol; });
    if (!inside) continue;
    mask_[i] = 1;
    double w = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& ax = grid_.axis(k);
      const std::size_t j = grid_.axis_index(i, k);
      w *= ax.step() * ((j == 0 || j + 1 == ax.size()) ? 0.5 : 1.0);
    }
    weights_[i] = w;
    masked_.push_back(i);
  }
}

double PolytopeGrid::total_weight() const {
  CompensatedSum acc;
  for (std::size_t i : masked_) acc.add(weights_[i]);
  return acc.value();
}

void PolytopeGrid::write_csv(std::ostream& os) const {
  const std::size_t n = dimension();
  for (std::size_t k = 0; k < n; ++k) os << "s_" << (k + 1) << ',';
  os << "weight\n";
  std::vector<double> s(n);
  for (std::size_t i : masked_) {
    grid_.point(i, s);
    for (double x : s) os << format_real(x) << ',';
    os << format_real(weights_[i]) << '\n';
  }
}

PolytopeGrid build_grid(const DelzantPolytope& p, std::size_t nodes_per_axis,
                        double margin) {
  if (nodes_per_axis < 8)
    throw std::invalid_argument("build_grid: need at least 8 nodes per axis");
  PolytopeGrid g(p, TensorGrid::box(p.lower_corner(), p.upper_corner(), nodes_per_axis),
                 margin);
  if (g.masked_indices().empty())
    throw std::invalid_argument(fmt::format(
        "build_grid: margin {} leaves no interior nodes", margin));
  return g;
}

PolytopeGrid regrid(const PolytopeGrid& g, std::size_t nodes_per_axis) {
  return build_grid(g.polytope(), nodes_per_axis, g.margin());
}

PolytopeGrid remask(const PolytopeGrid& g, double margin) {
  PolytopeGrid out(g.polytope(), g.grid(), margin);
  if (out.masked_indices().empty())
    throw std::invalid_argument(fmt::format(
        "remask: margin {} leaves no interior nodes", margin));
  return out;
}

std::string ExtReal::to_string() const { return format_real(*this); }

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string format_real(const ExtReal& x) {
  return x.is_infinite() ? std::string("inf") : format_real(x.value());
}

}  // namespace toric
