#include <doctest.h>

#include <sstream>
#include <vector>

#include "toric/polytope.hpp"

using namespace toric;

TEST_CASE("simplex facets and vertices") {
  const auto p1 = make_simplex(1);
  REQUIRE(p1.facets().size() == 2);
  CHECK(p1.facets()[0].normal == std::vector<long>{1});
  CHECK(p1.facets()[0].offset == 0.0);
  CHECK(p1.facets()[1].normal == std::vector<long>{-1});
  CHECK(p1.facets()[1].offset == -1.0);

  const auto p2 = make_simplex(2);
  CHECK(p2.vertices().size() == 3);
  const std::vector<double> s{0.3, 0.3};
  CHECK(p2.ell_infinity(s) == doctest::Approx(0.0));
  CHECK(p2.normals_sum_to_zero());

  CHECK_THROWS_AS(make_simplex(0), std::invalid_argument);
  CHECK_THROWS_AS(make_simplex(-2), std::invalid_argument);
}

TEST_CASE("facet values") {
  const std::vector<double> a{0.25};
  const auto v1 = make_simplex(1).facet_values(a);
  CHECK(v1[0] == doctest::Approx(0.25));
  CHECK(v1[1] == doctest::Approx(0.75));

  const auto p2 = make_simplex(2);
  const std::vector<double> origin{0.0, 0.0};
  CHECK(p2.facet_values(origin) == std::vector<double>{0.0, 0.0, 1.0});
  const std::vector<double> out{0.5, 0.6};
  const auto v = p2.facet_values(out);
  CHECK(v[2] == doctest::Approx(-0.1));
  CHECK_FALSE(p2.contains(out));
  CHECK_FALSE(p2.is_interior(origin));

  const std::vector<double> wrong{0.1, 0.1, 0.1};
  CHECK_THROWS_AS(p2.facet_values(wrong), std::invalid_argument);
}

TEST_CASE("volume") {
  CHECK(make_simplex(1).volume() == doctest::Approx(1.0));
  CHECK(make_simplex(2).volume() == doctest::Approx(0.5));
  CHECK(make_simplex(3).volume() == doctest::Approx(1.0 / 6.0));
  CHECK(make_cube(3).volume() == doctest::Approx(1.0));
  CHECK(make_interval(0.0, 2.0).volume() == doctest::Approx(2.0));
}

TEST_CASE("Delzant validation") {
  // Normals (1,0), (1,2) at the origin span a sublattice of index 2.
  std::vector<Facet> bad{{{1, 0}, 0.0}, {{-1, 2}, 0.0}, {{0, -1}, -1.0}};
  CHECK_THROWS_AS(DelzantPolytope(2, bad), std::invalid_argument);
  // Unbounded.
  std::vector<Facet> open{{{1, 0}, 0.0}, {{0, 1}, 0.0}};
  CHECK_THROWS_AS(DelzantPolytope(2, open), std::invalid_argument);
}

TEST_CASE("JSON round trip") {
  const auto p = make_simplex(2);
  const auto q = polytope_from_json(polytope_to_json(p));
  CHECK(p == q);
  CHECK(load_polytope("interval:0,2").volume() == doctest::Approx(2.0));
  CHECK(load_polytope("cube2") == make_cube(2));
}

TEST_CASE("grid weights") {
  const auto g1 = build_grid(make_simplex(1), 1024, 0.0);
  CHECK(g1.total_weight() == doctest::Approx(1.0).epsilon(2e-3));
  const auto g2 = build_grid(make_simplex(2), 256, 0.0);
  CHECK(g2.total_weight() == doctest::Approx(0.5).epsilon(1e-2));
  CHECK_THROWS(build_grid(make_simplex(1), 64, 0.6));
  CHECK_THROWS(build_grid(make_simplex(1), 4, 0.0));
}

TEST_CASE("remask only adds nodes with unchanged weights") {
  const auto g = build_grid(make_simplex(2), 64, 0.1);
  const auto h = remask(g, 0.05);
  CHECK(h.masked_indices().size() > g.masked_indices().size());
  for (std::size_t i : g.masked_indices()) {
    CHECK(h.masked(i));
    CHECK(h.weight(i) == g.weight(i));
  }
  const auto r = regrid(g, 32);
  CHECK(r.grid().axis(0).size() == 32);
  CHECK(r.margin() == 0.1);
}

TEST_CASE("grid CSV rows") {
  const auto g = build_grid(make_simplex(1), 9, 0.0);
  std::ostringstream os;
  g.write_csv(os);
  std::size_t lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  CHECK(lines == 10);
}
