#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "toric/convex_transform.hpp"
#include "toric/potentials.hpp"
#include "toric/random_instances.hpp"

using namespace toric;

namespace {

GridConvexFunction on_box(double lo, double hi, std::size_t n, double (*f)(double)) {
  TensorGrid g({UniformAxis(lo, hi, n)});
  std::vector<ExtReal> v;
  for (double x : g.axis(0).nodes()) v.emplace_back(f(x));
  return {g, v};
}

GridConvexFunction on_interval(const PolytopeGrid& grid, double (*f)(double)) {
  std::vector<ExtReal> v(grid.size(), ExtReal::infinity());
  for (std::size_t i : grid.masked_indices()) v[i] = f(grid.grid().point(i)[0]);
  return {grid.grid(), v};
}

double brute(std::span<const double> xs, std::span<const double> ys, double s) {
  double best = -INFINITY;
  for (std::size_t k = 0; k < xs.size(); ++k) best = std::max(best, xs[k] * s - ys[k]);
  return best;
}

}  // namespace

TEST_CASE("conjugate of the support function of [0,1] vanishes") {
  const auto f = on_box(-5, 5, 1001, [](double x) { return std::max(x, 0.0); });
  const auto grid = build_grid(make_simplex(1), 257, 0.0);
  const auto g = conjugate(f, grid);
  for (std::size_t i : grid.masked_indices()) CHECK(std::abs(g[i].value()) <= 1e-12);
}

TEST_CASE("half square is self-conjugate") {
  const auto f = on_box(-3, 3, 6001, [](double x) { return 0.5 * x * x; });
  TensorGrid target({UniformAxis(-2, 2, 41)});
  const auto g = conjugate(f, target);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double s = target.axis(0)[i];
    CHECK(std::abs(g[i].value() - 0.5 * s * s) <= 1e-5);
  }
}

TEST_CASE("Fubini-Study conjugate at s = 1/2") {
  const auto f = on_box(-20, 20, 40001,
                        [](double x) { return 0.5 * std::log1p(std::exp(2 * x)); });
  TensorGrid target({UniformAxis(0.0, 1.0, 3)});
  const auto g = conjugate(f, target);
  CHECK(std::abs(g[1].value() + 0.5 * std::log(2.0)) <= 1e-4);
}

TEST_CASE("fast conjugate equals brute force bit for bit") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_convex_samples(rng, 2 + trial * 5);
    std::vector<double> targets;
    std::uniform_real_distribution<double> u(-4, 4);
    for (int k = 0; k < 64; ++k) targets.push_back(u(rng));
    const auto fast = conjugate_samples(c.x, c.y, targets);
    for (std::size_t j = 0; j < targets.size(); ++j) CHECK(fast[j] == brute(c.x, c.y, targets[j]));
  }
}

TEST_CASE("lower hull") {
  const std::vector<double> xs{0, 1, 2, 3}, ys{0, -1, 5, 0};
  LowerHull h(xs, ys);
  CHECK(h.envelope_at(2.0) == doctest::Approx(-0.5));
  CHECK(h.conjugate_at(0.0) == doctest::Approx(1.0));
}

TEST_CASE("biconjugate") {
  const auto grid = build_grid(make_simplex(1), 101, 0.0);
  SUBCASE("concave tent gives the chord") {
    const auto f = on_interval(grid, [](double s) { return std::min(s, 1 - s); });
    const auto e = biconjugate(f);
    for (std::size_t i : grid.masked_indices()) CHECK(std::abs(e[i].value()) <= 1e-12);
  }
  SUBCASE("single dip") {
    std::vector<ExtReal> v(grid.size(), 0.0);
    v[50] = -1.0;
    const auto e = biconjugate(GridConvexFunction(grid.grid(), v));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = grid.grid().axis(0)[i];
      CHECK(e[i].value() == doctest::Approx(-1 + 2 * std::abs(s - 0.5)));
    }
  }
  SUBCASE("convex input is fixed") {
    const auto g = sample_symplectic(guillemin_potential(make_simplex(1)), remask(grid, 0.02));
    const auto e = biconjugate(g);
    CHECK(sup_norm_distance(e, g) <= 1e-12);
  }
}

TEST_CASE("convexity certificates") {
  const auto grid = build_grid(make_simplex(1), 65, 0.0);
  CHECK(is_convex(on_interval(grid, [](double s) { return s - 0.5; })).status ==
        Convexity::verified);
  const auto c = is_convex(on_interval(grid, [](double s) { return -s * s; }));
  CHECK(c.status == Convexity::violated);
  CHECK(c.witness > 0);
  CHECK(c.witness < 64);
  const auto g2 = build_grid(make_simplex(2), 64, 0.02);
  CHECK(is_convex(sample_symplectic(guillemin_potential(make_simplex(2)), g2)).status ==
        Convexity::verified);
}

TEST_CASE("gradient") {
  const auto grid = build_grid(make_simplex(1), 201, 0.0);
  const auto g = gradient(on_interval(grid, [](double s) { return (s - 0.5) * (s - 0.5); }), grid);
  for (std::size_t i = 1; i + 1 < 201; ++i)
    CHECK(std::abs(g.at(i)[0] - (2 * grid.grid().axis(0)[i] - 1)) <= 1e-12);
  const auto z = gradient(on_interval(grid, [](double) { return 0.0; }), grid);
  for (std::size_t i : grid.masked_indices()) CHECK(z.at(i)[0] == 0.0);

  const auto m = build_grid(make_simplex(1), 1001, 0.05);
  const auto gu = gradient(sample_symplectic(guillemin_potential(make_simplex(1)), m), m);
  CHECK(std::abs(gu.at(300)[0] - 0.5 * std::log(0.3 / 0.7)) <= 1e-4);
}

TEST_CASE("sup norm distance and pointwise operations") {
  const auto grid = build_grid(make_simplex(1), 1001, 0.0);
  const auto fam = sample_symplectic(ExampleFamily(0.1, 10).symplectic(), grid);
  const auto zero = sample_symplectic(zero_potential(make_simplex(1)), grid);
  CHECK(sup_norm_distance(fam, zero) == doctest::Approx(1.0));
  CHECK(sup_norm_distance(fam, fam) == 0.0);
  CHECK(pointwise_max(fam, zero)[0].value() == doctest::Approx(1.0));
  CHECK(pointwise_min(fam, zero)[0].value() == 0.0);

  const auto f0 = on_box(-20, 5, 2501, [](double x) { return std::max(x, 0.0); });
  const auto f1 = on_box(-20, 5, 2501,
                         [](double x) { return 0.9 * std::max(x, 0.0) + 0.1 * std::max(x, -10.0); });
  CHECK(std::abs(sup_norm_distance(f0, f1) - 1.0) <= 1e-6);
}

TEST_CASE("grid CSV round trip") {
  const auto grid = build_grid(make_simplex(2), 9, 0.0);
  const auto g = sample_symplectic(guillemin_potential(make_simplex(2)), grid);
  std::stringstream ss;
  write_grid_csv(ss, g);
  const auto back = read_grid_csv(ss);
  CHECK(back.variable == "s");
  CHECK(back.function.grid() == g.grid());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.function[i] == g[i]);

  std::istringstream bad("s_1,value\n0,1\n0.5,oops\n");
  CHECK_THROWS(read_grid_csv(bad));
}
