#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "toric/convex_transform.hpp"
#include "toric/polytope.hpp"
#include "toric/potentials.hpp"

namespace toric {

/// Deterministic generator for instance `index` of a seeded suite.
std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index);

/// G(s) = max_k <a_k, s> + b_k.
struct PiecewiseLinear {
  std::size_t dimension = 0;
  std::vector<double> slopes;      // pieces * dimension
  std::vector<double> intercepts;  // pieces
  double operator()(std::span<const double> s) const;
  SymplecticPotential potential() const;
};

/// 2 to 5 pieces, slopes uniform in [-3,3], intercepts uniform in [-1,1].
PiecewiseLinear random_piecewise_linear(std::mt19937_64& rng, std::size_t dimension);

/// Convex 1-D samples on `count` sorted random abscissae: cumulative sums of
/// sorted random slopes.
struct ConvexSamples {
  std::vector<double> x, y;
};
ConvexSamples random_convex_samples(std::mt19937_64& rng, std::size_t count);

/// PL potential sampled on the mask, with its certificate.
GridConvexFunction sample(const PiecewiseLinear& g, const PolytopeGrid& grid);

}  // namespace toric
