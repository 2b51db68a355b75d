#include <doctest.h>

#include <cmath>
#include <vector>

#include "toric/functionals.hpp"
#include "toric/potentials.hpp"
#include "toric/random_instances.hpp"

using namespace toric;

namespace {

SymplecticPotential affine(double a, double b) {
  return {"affine", 1, [a, b](std::span<const double> s) { return a * s[0] + b; }};
}

struct ExamplePair {
  PolytopeGrid grid;
  GridConvexFunction gj, g0;
};

ExamplePair example(double eps, double C, std::size_t n = 4096) {
  const auto p = make_simplex(1);
  auto grid = build_grid(p, n, 0.0);
  auto gj = example_family(ExampleFamily(eps, C), grid).symplectic;
  auto g0 = sample_symplectic(zero_potential(p), grid);
  return {grid, gj, g0};
}

}  // namespace

TEST_CASE("Mabuchi distance") {
  const auto e = example(0.1, 10.0);
  CHECK(mabuchi_distance(e.gj, e.g0, e.grid) ==
        doctest::Approx(10 * std::pow(0.1, 1.5) / std::sqrt(3.0)).epsilon(1e-3));
  CHECK(mabuchi_distance(e.gj, e.gj, e.grid) == 0.0);
  const auto a = sample_symplectic(affine(1, 0), e.grid);
  const auto b = sample_symplectic(affine(-1, 1), e.grid);
  CHECK(mabuchi_distance(a, b, e.grid) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("pushforward integrals") {
  const auto e = example(0.1, 10.0);
  const auto mass = pushforward_integral(
      e.gj, e.grid, [](std::span<const double>, std::span<const double>) { return 1.0; });
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));

  const auto f = ExampleFamily(0.1, 10.0).kahler();
  const auto f0 = support_function(make_simplex(1));
  auto diff = [&](std::span<const double> x, std::span<const double>) { return f(x) - f0(x); };
  CHECK(pushforward_integral(e.gj, e.grid, diff) == doctest::Approx(-0.1).epsilon(1e-3));
  CHECK(std::abs(pushforward_integral(e.g0, e.grid, diff)) <= 1e-12);
}

TEST_CASE("I and I2 on the two-kink family") {
  for (auto [eps, C] : {std::pair{0.1, 10.0}, std::pair{0.01, 100.0}, std::pair{0.2, 5.0}}) {
    CAPTURE(eps);
    const auto e = example(eps, C);
    CHECK(i_functional(e.gj, e.g0, e.grid) == doctest::Approx(eps * eps * C).epsilon(1e-3));
    CHECK(i2_functional(e.gj, e.g0, e.grid) ==
          doctest::Approx(std::pow(eps, 1.5) * C / std::sqrt(2.0)).epsilon(1e-3));
  }
  const auto e = example(0.1, 10.0);
  CHECK(i_functional(e.gj, e.gj, e.grid) == 0.0);
  CHECK(i2_functional(e.gj, e.gj, e.grid) == 0.0);
}

TEST_CASE("J2") {
  const auto e = example(0.1, 10.0);
  // phi_j <= phi_0, so phi_j v phi_0 = phi_j and J2 = I2.
  const auto r = j2_functional(e.gj, e.g0, e.grid);
  CHECK(r.j2 == doctest::Approx(i2_functional(e.gj, e.g0, e.grid)));
  CHECK(r.lower.passed);
  CHECK(r.upper.passed);
  CHECK(j2_functional(e.g0, e.g0, e.grid).j2 == 0.0);

  auto rng = instance_rng(3, 0);
  for (int k = 0; k < 10; ++k) {
    const auto a = sample(random_piecewise_linear(rng, 1), e.grid);
    const auto b = sample(random_piecewise_linear(rng, 1), e.grid);
    const auto j = j2_functional(a, b, e.grid);
    CHECK(j.lower.passed);
    CHECK(j.upper.passed);
  }
}

TEST_CASE("Aubin-Mabuchi increment") {
  const auto e = example(0.1, 10.0);
  CHECK(aubin_mabuchi_increment(e.g0, e.gj, e.grid) == doctest::Approx(-0.05).epsilon(1e-3));
  CHECK(aubin_mabuchi_increment(e.gj, e.gj, e.grid) == 0.0);
  const auto shifted = sample_symplectic(affine(0, 0.7), e.grid);
  CHECK(aubin_mabuchi_increment(e.g0, shifted, e.grid) == doctest::Approx(-0.7));
}

TEST_CASE("verdicts") {
  CHECK(check_le("a", 1.0, 2.0, 0.5, 0.0).passed);
  CHECK_FALSE(check_le("b", 1.1, 2.0, 0.5, 0.0).passed);
  CHECK(check_le("c", 1.1, 2.0, 0.5, 0.2).passed);
  const auto j = to_json(check_le("d", 1.0, 1.0, 1.0, 0.0));
  CHECK(j["verdict"] == "pass");
  CHECK(j.contains("tolerance"));
}

TEST_CASE("distance report") {
  const auto p = make_simplex(1);
  const auto a = resolve_potential("example:eps=0.1,C=10", p);
  const auto b = resolve_potential("support", p);
  const auto r = distance_report(a, b, p, 4096, 0.0);
  CHECK(r.d.value == doctest::Approx(0.1825741858).epsilon(1e-3));
  CHECK(r.d.error < 1e-4);
  CHECK_FALSE(r.d.half_margin.has_value());
  const auto j = to_json(r);
  CHECK(j["d"]["value"].get<double>() == r.d.value);

  const auto fs = resolve_potential("fs", p);
  CHECK(distance_report(fs, fs, p, 512, 0.0).d.value == 0.0);
  CHECK_THROWS(distance_report(a, b, p, 8, 0.0));

  const auto m = distance_report(a, b, p, 1024, 0.02);
  CHECK(m.d.half_margin.has_value());
}

TEST_CASE("GridPotential rejects +inf on the mask") {
  const auto grid = build_grid(make_simplex(1), 33, 0.0);
  std::vector<ExtReal> v(grid.size(), 0.0);
  v[5] = ExtReal::infinity();
  CHECK_THROWS_AS(GridPotential(GridConvexFunction(grid.grid(), v), grid), NumericError);
}
