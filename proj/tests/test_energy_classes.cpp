#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "toric/energy_classes.hpp"
#include "toric/potentials.hpp"

using namespace toric;

namespace {

SymplecticPotential affine(double a, double b) {
  return {"affine", 1, [a, b](std::span<const double> s) { return a * s[0] + b; }};
}

const SymplecticPotential inverse_sqrt{
    "s^-1/2", 1, [](std::span<const double> s) { return 1.0 / std::sqrt(s[0]); }};

std::vector<std::pair<double, double>> schedule(double power) {
  std::vector<std::pair<double, double>> out;
  for (int j = 1; j <= 20; ++j) out.emplace_back(1.0 / j, std::pow(j, power));
  return out;
}

}  // namespace

TEST_CASE("Lq norms") {
  const auto p = make_simplex(1);
  const auto grid = build_grid(p, 4097, 0.0);
  CHECK(lq_norm(sample_symplectic(affine(0, -0.3), grid), 2.0, grid) == doctest::Approx(0.3));
  CHECK(lq_norm(sample_symplectic(guillemin_potential(p), grid), 1.0, grid) ==
        doctest::Approx(0.25).epsilon(1e-5));
  const auto gj = example_family(ExampleFamily(0.1, 10.0), grid).symplectic;
  CHECK(lq_norm(gj, 2.0, grid) == doctest::Approx(std::sqrt(100 * 1e-3 / 3)).epsilon(1e-3));
}

TEST_CASE("membership") {
  const auto p = make_simplex(1);
  const auto base = build_grid(p, 65536, 0.01);
  for (double q : {1.0, 2.0, 4.0})
    CHECK(membership(guillemin_potential(p), q, base).trend == Trend::convergent);

  const auto one = membership(inverse_sqrt, 1.0, base);
  CHECK(one.trend == Trend::convergent);
  REQUIRE(one.extrapolated.has_value());
  CHECK(*one.extrapolated == doctest::Approx(2.0).epsilon(1e-2));
  const auto two = membership(inverse_sqrt, 2.0, base);
  CHECK(two.trend == Trend::divergent);
  CHECK_FALSE(two.extrapolated.has_value());

  const auto bounded = sample_symplectic(affine(1, -0.5), remask(base, 0.0025));
  CHECK(membership(bounded, 3.0, base).trend == Trend::convergent);

  CHECK_THROWS(membership(guillemin_potential(p), 2.0, build_grid(p, 1025, 0.0)));
  CHECK(to_json(one)["trend"] == "convergent");
}

TEST_CASE("sup bound") {
  const auto p = make_simplex(1);
  const auto grid = build_grid(p, 4097, 0.0);
  const SymplecticPotential tent{
      "tent", 1, [](std::span<const double> s) { return std::abs(s[0] - 0.5) - 0.5; }};
  const auto t = sup_bound_check(sample_symplectic(tent, grid), grid);
  CHECK(t.neg_inf == doctest::Approx(0.5));
  CHECK(t.l1 == doctest::Approx(0.25));
  CHECK(t.passed);
  const auto a = sup_bound_check(sample_symplectic(affine(1, -0.5), grid), grid);
  CHECK(a.neg_inf == doctest::Approx(0.5));
  CHECK(a.l1 == doctest::Approx(0.25));
  CHECK(a.passed);
  const auto z = sup_bound_check(sample_symplectic(affine(0, 0), grid), grid);
  CHECK(z.neg_inf == 0.0);
  CHECK(z.passed);
  // Without max G <= 0 the constant 2 is too small.
  CHECK_FALSE(sup_bound_check(sample_symplectic(affine(1, -0.75), grid), grid).passed);

  const auto g2 = build_grid(make_simplex(2), 32, 0.0);
  CHECK_THROWS(sup_bound_check(sample_symplectic(zero_potential(make_simplex(2)), g2), g2));
}

TEST_CASE("classifier") {
  const auto rows = convergence_classifier(schedule(1.5));
  REQUIRE(rows.size() == 20);
  for (const auto& r : rows) {
    CHECK(r.max_relative_error < 1e-3);
    CHECK(r.d == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-3));
  }
  CHECK(rows[0].predicates == std::array<bool, 5>{true, false, true, false, false});

  // eps C = 1 stays put for C_j = j.
  CHECK(convergence_classifier(schedule(1.0))[0].predicates ==
        std::array<bool, 5>{true, false, true, true, true});
  CHECK(convergence_classifier(schedule(2.0))[0].predicates ==
        std::array<bool, 5>{true, false, false, false, false});

  CHECK(headline_schedule().size() == 20);
  CHECK_THROWS(convergence_classifier({}));
  CHECK_THROWS(convergence_classifier({{0.0, 1.0}}));

  std::ostringstream os;
  write_regime_csv(os, convergence_classifier({{0.1, 10.0}}));
  CHECK(os.str().rfind("eps,C,L1,Linf,I1,I2,d,eps_to_0,epsC_to_0,eps2C_to_0,eps3C2_to_0_I2,"
                       "eps3C2_to_0_d\n",
                       0) == 0);
}
