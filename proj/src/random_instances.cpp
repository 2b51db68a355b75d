#include "toric/random_instances.hpp"

#include <algorithm>
#include <limits>

namespace toric {

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double PiecewiseLinear::operator()(std::span<const double> s) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < intercepts.size(); ++k) {
    double v = intercepts[k];
    for (std::size_t j = 0; j < dimension; ++j) v += slopes[k * dimension + j] * s[j];
    best = std::max(best, v);
  }
  return best;
}

SymplecticPotential PiecewiseLinear::potential() const {
  const PiecewiseLinear self = *this;
  return {"random piecewise linear", dimension,
          [self](std::span<const double> s) { return self(s); }};
}

PiecewiseLinear random_piecewise_linear(std::mt19937_64& rng, std::size_t dimension) {
  std::uniform_int_distribution<int> pieces(2, 5);
  std::uniform_real_distribution<double> slope(-3.0, 3.0), intercept(-1.0, 1.0);
  PiecewiseLinear g;
  g.dimension = dimension;
  const int count = pieces(rng);
  for (int k = 0; k < count; ++k) {
    for (std::size_t j = 0; j < dimension; ++j) g.slopes.push_back(slope(rng));
    g.intercepts.push_back(intercept(rng));
  }
  return g;
}

ConvexSamples random_convex_samples(std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> coord(-2.0, 2.0), slope(-4.0, 4.0);
  ConvexSamples out;
  for (std::size_t k = 0; k < count; ++k) out.x.push_back(coord(rng));
  std::sort(out.x.begin(), out.x.end());
  std::vector<double> slopes(count > 0 ? count - 1 : 0);
  for (double& m : slopes) m = slope(rng);
  std::sort(slopes.begin(), slopes.end());
  out.y.assign(count, 0.0);
  if (count > 0) out.y[0] = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  for (std::size_t k = 1; k < count; ++k)
    out.y[k] = out.y[k - 1] + slopes[k - 1] * (out.x[k] - out.x[k - 1]);
  return out;
}

GridConvexFunction sample(const PiecewiseLinear& g, const PolytopeGrid& grid) {
  return sample_symplectic(g.potential(), grid);
}

}  // namespace toric
