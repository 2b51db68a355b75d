#include "toric/convex_transform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace toric {

namespace {

inline double affine_value(double x, double s, double y) { return x * s - y; }

}  // namespace

GridConvexFunction::GridConvexFunction(TensorGrid grid, std::vector<ExtReal> values,
                                       Certificate cert)
    : grid_(std::move(grid)), values_(std::move(values)), cert_(cert) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("grid function: value count does not match grid");
  if (finite_count() == 0)
    throw std::invalid_argument("grid function: no finite value");
}

std::size_t GridConvexFunction::finite_count() const {
  return static_cast<std::size_t>(std::count_if(
      values_.begin(), values_.end(), [](const ExtReal& v) { return v.is_finite(); }));
}

// ---------------------------------------------------------------------------
// 1-D kernel

LowerHull::LowerHull(std::span<const double> xs, std::span<const double> ys)
    : px_(xs.begin(), xs.end()), py_(ys.begin(), ys.end()) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("hull: xs and ys differ in length");
  if (xs.empty()) throw std::invalid_argument("conjugate: empty finite support");
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (xs[k] < xs[k - 1])
      throw std::invalid_argument("hull: abscissae must be nondecreasing");

  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k], y = ys[k];
    if (!hx_.empty() && hx_.back() == x) {
      if (y >= hy_.back()) continue;
      hx_.pop_back();
      hy_.pop_back();
      origin_.pop_back();
    }
    while (hx_.size() >= 2) {
      const std::size_t m = hx_.size();
      const double cross = (hx_[m - 1] - hx_[m - 2]) * (y - hy_[m - 2]) -
                           (hy_[m - 1] - hy_[m - 2]) * (x - hx_[m - 2]);
      if (cross >= 0.0) break;
      hx_.pop_back();
      hy_.pop_back();
      origin_.pop_back();
    }
    hx_.push_back(x);
    hy_.push_back(y);
    origin_.push_back(k);
  }
  slopes_.resize(hx_.size() > 0 ? hx_.size() - 1 : 0);
  for (std::size_t j = 0; j + 1 < hx_.size(); ++j)
    slopes_[j] = (hy_[j + 1] - hy_[j]) / (hx_[j + 1] - hx_[j]);
}

double LowerHull::best_near(std::size_t j, double s) const {
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t h = hx_.size();
  for (std::size_t q = (j > 0 ? j - 1 : 0); q <= std::min(j + 1, h - 1); ++q)
    best = std::max(best, affine_value(hx_[q], s, hy_[q]));
  const std::size_t o = origin_[j];
  const std::size_t lo = o >= 2 ? o - 2 : 0;
  const std::size_t hi = std::min(o + 2, px_.size() - 1);
  for (std::size_t k = lo; k <= hi; ++k)
    best = std::max(best, affine_value(px_[k], s, py_[k]));
  return best;
}

double LowerHull::conjugate_at(double s) const {
  const auto j = static_cast<std::size_t>(
      std::lower_bound(slopes_.begin(), slopes_.end(), s) - slopes_.begin());
  return best_near(j, s);
}

std::vector<double> LowerHull::conjugate_at(std::span<const double> targets) const {
  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  const bool sorted = std::is_sorted(targets.begin(), targets.end());
  if (!sorted)
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return targets[a] < targets[b]; });
  std::vector<double> out(targets.size());
  std::size_t j = 0;
  for (std::size_t idx : order) {
    const double s = targets[idx];
    while (j < slopes_.size() && slopes_[j] < s) ++j;
    out[idx] = best_near(j, s);
  }
  return out;
}

double LowerHull::envelope_at(double x) const {
  if (x < hx_.front() || x > hx_.back())
    throw std::invalid_argument("envelope_at: outside the sample range");
  const auto it = std::lower_bound(hx_.begin(), hx_.end(), x);
  const auto j = static_cast<std::size_t>(it - hx_.begin());
  if (hx_[j] == x) return hy_[j];
  return hy_[j - 1] + (x - hx_[j - 1]) * slopes_[j - 1];
}

std::vector<double> conjugate_samples(std::span<const double> xs,
                                      std::span<const double> ys,
                                      std::span<const double> targets) {
  if (targets.empty()) throw std::invalid_argument("conjugate: no target nodes");
  return LowerHull(xs, ys).conjugate_at(targets);
}

// ---------------------------------------------------------------------------
// n-D transform

namespace {

struct Layout {
  std::vector<UniformAxis> axes;
  std::vector<std::size_t> strides;
  std::size_t size = 1;
  explicit Layout(std::vector<UniformAxis> a) : axes(std::move(a)) {
    strides.assign(axes.size(), 1);
    for (std::size_t k = axes.size(); k-- > 0;) {
      strides[k] = size;
      size *= axes[k].size();
    }
  }
};

}  // namespace

GridConvexFunction conjugate(const GridConvexFunction& f, const TensorGrid& target) {
  const std::size_t n = f.dimension();
  if (target.dimension() != n)
    throw std::invalid_argument("conjugate: target dimension mismatch");
  if (target.size() == 0) throw std::invalid_argument("conjugate: empty target");
  if (f.finite_count() == 0)
    throw std::invalid_argument("conjugate: empty finite support");

  // u = max over the axes already absorbed of <x,s> - f; absent means -inf.
  Layout cur(f.grid().axes());
  std::vector<double> u(cur.size);
  std::vector<char> present(cur.size);
  for (std::size_t i = 0; i < cur.size; ++i) {
    present[i] = f[i].is_finite();
    u[i] = present[i] ? -f[i].value() : 0.0;
  }

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < n; ++k) {
    auto next_axes = cur.axes;
    next_axes[k] = target.axis(k);
    Layout next(next_axes);
    std::vector<double> v(next.size, 0.0);
    std::vector<char> vp(next.size, 0);

    const std::size_t inner = cur.strides[k];
    const std::size_t outer = cur.size / (inner * cur.axes[k].size());
    const auto& src = cur.axes[k].nodes();
    const auto& dst = next.axes[k].nodes();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t r = 0; r < inner; ++r) {
        xs.clear();
        ys.clear();
        for (std::size_t i = 0; i < src.size(); ++i) {
          const std::size_t idx = (o * src.size() + i) * inner + r;
          if (!present[idx]) continue;
          xs.push_back(src[i]);
          ys.push_back(-u[idx]);
        }
        if (xs.empty()) continue;
        const auto line = LowerHull(xs, ys).conjugate_at(dst);
        for (std::size_t j = 0; j < dst.size(); ++j) {
          const std::size_t idx = (o * dst.size() + j) * inner + r;
          v[idx] = line[j];
          vp[idx] = 1;
        }
      }
    }
    cur = std::move(next);
    u = std::move(v);
    present = std::move(vp);
  }

  std::vector<ExtReal> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = present[i] ? ExtReal(u[i]) : ExtReal::infinity();
  return GridConvexFunction(target, std::move(out), {Convexity::verified, 0});
}

GridConvexFunction conjugate(const GridConvexFunction& f, const PolytopeGrid& target) {
  const auto g = conjugate(f, target.grid());
  std::vector<ExtReal> vals = g.values();
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (!target.masked(i)) vals[i] = ExtReal::infinity();
  return GridConvexFunction(target.grid(), std::move(vals), {Convexity::verified, 0});
}

GridConvexFunction biconjugate(const GridConvexFunction& f) {
  const std::size_t n = f.dimension();
  const auto& grid = f.grid();
  std::vector<ExtReal> out(f.size(), ExtReal::infinity());

  if (n == 1) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i].is_finite()) {
        xs.push_back(grid.axis(0)[i]);
        ys.push_back(f[i].value());
      }
    const LowerHull hull(xs, ys);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i].is_finite()) out[i] = hull.envelope_at(grid.axis(0)[i]);
    return GridConvexFunction(grid, std::move(out), {Convexity::verified, 0});
  }

  std::vector<UniformAxis> dual;
  for (std::size_t k = 0; k < n; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t st = grid.stride(k);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (grid.axis_index(i, k) + 1 >= grid.axis(k).size()) continue;
      if (!f[i].is_finite() || !f[i + st].is_finite()) continue;
      const double m = (f[i + st].value() - f[i].value()) / grid.axis(k).step();
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    if (!(lo <= hi)) lo = hi = 0.0;
    if (hi - lo < 1e-12) {
      lo -= 1.0;
      hi += 1.0;
    }
    dual.emplace_back(lo, hi, grid.axis(k).size());
  }
  const auto g = conjugate(f, TensorGrid(std::move(dual)));
  const auto ff = conjugate(g, grid);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i].is_finite()) out[i] = std::min(ff[i].value(), f[i].value());
  return GridConvexFunction(grid, std::move(out), {Convexity::verified, 0});
}

Certificate is_convex(const GridConvexFunction& f, double tol) {
  const auto& grid = f.grid();
  const std::size_t n = grid.dimension();
  if (tol < 0.0) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : f.values())
      if (v.is_finite()) {
        lo = std::min(lo, v.value());
        hi = std::max(hi, v.value());
      }
    tol = 1e-9 * std::max(hi - lo, 1e-300);
  }

  // Directions: e_k, and e_i +/- e_j for i < j.
  std::vector<std::vector<int>> dirs;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<int> d(n, 0);
    d[k] = 1;
    dirs.push_back(d);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<int> d(n, 0);
      d[i] = 1;
      d[j] = 1;
      dirs.push_back(d);
      d[j] = -1;
      dirs.push_back(d);
    }

  Certificate cert{Convexity::verified, 0};
  double worst = -tol;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f[i].is_finite()) continue;
    for (const auto& d : dirs) {
      bool inside = true;
      std::ptrdiff_t offset = 0;
      for (std::size_t k = 0; k < n && inside; ++k) {
        const auto a = static_cast<std::ptrdiff_t>(grid.axis_index(i, k));
        const auto len = static_cast<std::ptrdiff_t>(grid.axis(k).size());
        inside = a - d[k] >= 0 && a + d[k] >= 0 && a - d[k] < len && a + d[k] < len;
        offset += d[k] * static_cast<std::ptrdiff_t>(grid.stride(k));
      }
      if (!inside) continue;
      const auto ip = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + offset);
      const auto im = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) - offset);
      if (!f[ip].is_finite() || !f[im].is_finite()) continue;
      const double d2 = f[ip].value() - 2.0 * f[i].value() + f[im].value();
      if (d2 < worst) {
        worst = d2;
        cert = {Convexity::violated, i};
      }
    }
  }
  return cert;
}

VectorGrid gradient(const GridConvexFunction& f, const PolytopeGrid& pg) {
  if (!(f.grid() == pg.grid()))
    throw std::invalid_argument("gradient: function and grid differ");
  const auto& grid = pg.grid();
  const std::size_t n = grid.dimension();
  VectorGrid out{grid, n, std::vector<double>(grid.size() * n, 0.0),
                 std::vector<char>(grid.size(), 0)};
  auto usable = [&](std::size_t i) { return pg.masked(i) && f[i].is_finite(); };
  std::size_t defined = 0;
  for (std::size_t i : pg.masked_indices()) {
    if (!f[i].is_finite())
      throw std::invalid_argument("gradient: +inf on a masked node");
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      const std::size_t a = grid.axis_index(i, k);
      const std::size_t st = grid.stride(k);
      const double h = grid.axis(k).step();
      const bool has_lo = a > 0 && usable(i - st);
      const bool has_hi = a + 1 < grid.axis(k).size() && usable(i + st);
      double g;
      if (has_lo && has_hi)
        g = (f[i + st].value() - f[i - st].value()) / (2.0 * h);
      else if (has_hi)
        g = (f[i + st].value() - f[i].value()) / h;
      else if (has_lo)
        g = (f[i].value() - f[i - st].value()) / h;
      else
        ok = false;
      out.data[i * n + k] = ok ? g : 0.0;
    }
    out.defined[i] = ok;
    defined += ok;
  }
  if (defined == 0) throw std::invalid_argument("gradient: mask too thin for differencing");
  return out;
}

void require_same_grid(const GridConvexFunction& a, const GridConvexFunction& b,
                       const char* what) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument(fmt::format("{}: grid mismatch", what));
}

double sup_norm_distance(const GridConvexFunction& f, const GridConvexFunction& g) {
  require_same_grid(f, g, "sup_norm_distance");
  double best = -1.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i].is_finite() && g[i].is_finite())
      best = std::max(best, std::abs(f[i].value() - g[i].value()));
  if (best < 0.0)
    throw std::invalid_argument("sup_norm_distance: disjoint finite supports");
  return best;
}

GridConvexFunction pointwise_max(const GridConvexFunction& a,
                                 const GridConvexFunction& b) {
  require_same_grid(a, b, "pointwise_max");
  std::vector<ExtReal> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_infinite() || b[i].is_infinite())
      out[i] = ExtReal::infinity();
    else
      out[i] = b[i].value() > a[i].value() ? b[i] : a[i];
  }
  const bool convex = a.certificate().status == Convexity::verified &&
                      b.certificate().status == Convexity::verified;
  return GridConvexFunction(a.grid(), std::move(out),
                            convex ? Certificate{Convexity::verified, 0} : Certificate{});
}

GridConvexFunction pointwise_min(const GridConvexFunction& a,
                                 const GridConvexFunction& b) {
  require_same_grid(a, b, "pointwise_min");
  std::vector<ExtReal> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_infinite())
      out[i] = b[i];
    else if (b[i].is_infinite())
      out[i] = a[i];
    else
      out[i] = b[i].value() < a[i].value() ? b[i] : a[i];
  }
  return GridConvexFunction(a.grid(), std::move(out));
}

// ---------------------------------------------------------------------------
// CSV

void write_grid_csv(std::ostream& os, const GridConvexFunction& f,
                    const std::string& variable) {
  const std::size_t n = f.dimension();
  for (std::size_t k = 0; k < n; ++k) os << variable << '_' << (k + 1) << ',';
  os << "value\n";
  std::vector<double> p(n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.grid().point(i, p);
    for (double x : p) os << format_real(x) << ',';
    os << format_real(f[i]) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t\r"));
    tok.erase(tok.find_last_not_of(" \t\r") + 1);
    out.push_back(tok);
  }
  return out;
}

double parse_number(const std::string& tok) {
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw std::invalid_argument("bad number: " + tok);
  return v;
}

}  // namespace

GridCsv read_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("grid CSV: empty input");
  const auto header = split_csv(line);
  if (header.size() < 2 || header.back() != "value")
    throw std::invalid_argument("grid CSV: header must end with 'value'");
  const std::size_t n = header.size() - 1;
  const std::string variable = header[0].substr(0, header[0].find('_'));
  if (variable != "s" && variable != "x")
    throw std::invalid_argument("grid CSV: coordinates must be s_k or x_k");
  for (std::size_t k = 0; k < n; ++k)
    if (header[k] != fmt::format("{}_{}", variable, k + 1))
      throw std::invalid_argument("grid CSV: unexpected column " + header[k]);

  std::vector<std::vector<double>> coords;
  std::vector<ExtReal> vals;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tok = split_csv(line);
    if (tok.size() != n + 1) throw std::invalid_argument("grid CSV: ragged row");
    std::vector<double> c(n);
    try {
      for (std::size_t k = 0; k < n; ++k) c[k] = parse_number(tok[k]);
      vals.push_back(tok[n] == "inf" ? ExtReal::infinity() : ExtReal(parse_number(tok[n])));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("grid CSV: unparsable row: " + line);
    }
    coords.push_back(std::move(c));
  }
  if (coords.empty()) throw std::invalid_argument("grid CSV: no rows");

  std::vector<UniformAxis> axes;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> u;
    for (const auto& c : coords) u.push_back(c[k]);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    if (u.size() < 2) throw std::invalid_argument("grid CSV: axis with one node");
    UniformAxis ax(u.front(), u.back(), u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      if (std::abs(u[i] - ax[i]) > 1e-9 * (1.0 + std::abs(u[i])))
        throw std::invalid_argument("grid CSV: axis is not uniformly spaced");
    axes.push_back(std::move(ax));
  }
  TensorGrid grid(std::move(axes));
  if (grid.size() != coords.size())
    throw std::invalid_argument("grid CSV: rows do not form a full tensor grid");
  std::vector<ExtReal> values(grid.size());
  std::vector<char> seen(grid.size(), 0);
  for (std::size_t r = 0; r < coords.size(); ++r) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& ax = grid.axis(k);
      const auto a = static_cast<std::size_t>(std::llround((coords[r][k] - ax.lo()) / ax.step()));
      idx += a * grid.stride(k);
    }
    if (seen[idx]) throw std::invalid_argument("grid CSV: duplicate node");
    seen[idx] = 1;
    values[idx] = vals[r];
  }
  return {GridConvexFunction(std::move(grid), std::move(values)), variable};
}

GridCsv read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open grid CSV: " + path);
  return read_grid_csv(in);
}

}  // namespace toric
