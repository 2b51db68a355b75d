#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "toric/convex_transform.hpp"
#include "toric/potentials.hpp"

using namespace toric;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_affine(const std::filesystem::path& path, double a, double b) {
  const auto grid = build_grid(make_simplex(1), 1025, 0.0);
  const SymplecticPotential g{"g", 1, [a, b](std::span<const double> s) { return a * s[0] + b; }};
  std::ofstream os(path);
  write_grid_csv(os, sample_symplectic(g, grid));
}

}  // namespace

TEST_CASE("distance") {
  const auto r = run({"distance", "--p", "simplex1", "--a", "example:eps=0.1,C=10", "--b",
                      "support", "--N", "4096"});
  REQUIRE(r.code == cli::kPass);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["d"]["value"].get<double>() == doctest::Approx(0.1825742).epsilon(1e-3));
  for (const auto& v : j["verdicts"]) CHECK(v["verdict"] == "pass");

  const auto fs = run({"distance", "--a", "fs", "--b", "fs", "--N", "512"});
  REQUIRE(fs.code == cli::kPass);
  CHECK(nlohmann::json::parse(fs.out)["d"]["value"].get<double>() == 0.0);
}

TEST_CASE("distance between csv potentials") {
  const auto g0 = temp("toric_cli_g0.csv"), g1 = temp("toric_cli_g1.csv");
  write_affine(g0, 1, 0);
  write_affine(g1, -1, 1);
  const auto r = run({"distance", "--a", "csv:" + g0.string(), "--b", "csv:" + g1.string(),
                      "--N", "1025"});
  REQUIRE(r.code == cli::kPass);
  CHECK(nlohmann::json::parse(r.out)["d"]["value"].get<double>() ==
        doctest::Approx(0.5773503).epsilon(1e-6));
  std::filesystem::remove(g0);
  std::filesystem::remove(g1);
}

TEST_CASE("output is deterministic and goes to --out") {
  const auto path = temp("toric_cli_out.json");
  const std::vector<std::string> args{"functionals", "--a", "guillemin", "--b", "support",
                                      "--N", "256", "--out", path.string()};
  REQUIRE(run(args).code == cli::kPass);
  std::stringstream first;
  first << std::ifstream(path).rdbuf();
  REQUIRE(run(args).code == cli::kPass);
  std::stringstream second;
  second << std::ifstream(path).rdbuf();
  CHECK(first.str() == second.str());
  CHECK_FALSE(first.str().empty());
  std::filesystem::remove(path);
}

TEST_CASE("reproduce-example") {
  const auto single = run({"reproduce-example", "--eps", "0.1", "--C", "10", "--single"});
  REQUIRE(single.code == cli::kPass);
  std::istringstream is(single.out);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header.rfind("eps,C,L1,Linf,I1,I2,d,", 0) == 0);
  CHECK(row.rfind("0.10000000000000001,10,", 0) == 0);

  const auto full = run({"reproduce-example"});
  REQUIRE(full.code == cli::kPass);
  CHECK(std::count(full.out.begin(), full.out.end(), '\n') == 21);

  CHECK(run({"reproduce-example", "--schedule", "0.1:x"}).code == cli::kUsage);
  CHECK(run({"classify", "--schedule", "0.1;10"}).code == cli::kUsage);
}

TEST_CASE("other subcommands run") {
  CHECK(run({"geodesic", "--a", "guillemin", "--b", "support", "--t", "0.25", "--N", "64"}).code ==
        cli::kPass);
  CHECK(run({"geodesic", "--a", "guillemin", "--b", "support", "--format", "csv", "--N", "64"})
            .code == cli::kPass);
  CHECK(run({"minop", "--a", "guillemin", "--b", "support", "--N", "128"}).code == cli::kPass);
  CHECK(run({"minop", "--a", "guillemin", "--b", "support", "--N", "128", "--max"}).code ==
        cli::kPass);
  CHECK(run({"classify", "--schedule", "0.1:10,0.05:20"}).code == cli::kPass);
  const auto m = run({"membership", "--a", "guillemin", "--q", "2"});
  REQUIRE(m.code == cli::kPass);
  CHECK(nlohmann::json::parse(m.out)["trend"] == "convergent");
  CHECK(run({"conjugate", "--a", "guillemin", "--N", "64"}).code == cli::kPass);
  CHECK(run({"verify", "--only", "pythagoras", "--instances", "5", "--N", "256"}).code ==
        cli::kPass);
  CHECK(run({"verify", "--only", "guillemin-fs", "--n", "2", "--N", "256"}).code == cli::kPass);
}

TEST_CASE("conjugate of an x-grid") {
  const auto path = temp("toric_cli_f.csv");
  {
    const auto box = TensorGrid::box(std::vector<double>{-5.0}, std::vector<double>{5.0}, 101);
    std::ofstream os(path);
    write_grid_csv(os, sample_kahler(support_function(make_simplex(1)), box), "x");
  }
  const auto r = run({"conjugate", "--input", path.string(), "--N", "33"});
  REQUIRE(r.code == cli::kPass);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "s_1,value");
  while (std::getline(is, line)) CHECK(std::abs(std::stod(line.substr(line.find(',') + 1))) <= 1e-12);
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"bogus"}).code == cli::kUsage);
  CHECK(run({"distance", "--a", "nope", "--b", "support"}).code == cli::kUsage);
  CHECK(run({"distance", "--a", "support", "--b", "support", "--N", "4"}).code == cli::kUsage);
  CHECK(run({"distance", "--a", "support", "--b", "support", "--margin", "-1"}).code ==
        cli::kUsage);
  CHECK(run({"distance", "--a", "support", "--b", "support", "--margin", "0.7"}).code ==
        cli::kUsage);
  CHECK(run({"verify", "--only", "nothing"}).code == cli::kUsage);
  CHECK(run({"classify"}).code == cli::kUsage);
  CHECK(run({"distance", "--a", "fs", "--b", "support", "--box-radius", "1", "--margin", "0.01"})
            .code == cli::kNumeric);
  CHECK(run({"--help"}).code == cli::kPass);
}

TEST_CASE("every operation is reachable from exactly one subcommand") {
  const auto& subs = cli::subcommands();
  const std::set<std::string> known(subs.begin(), subs.end());
  std::map<std::string, int> seen;
  for (const auto& [op, sub] : cli::operation_registry()) {
    CAPTURE(op);
    CHECK(known.count(sub) == 1);
    ++seen[op];
  }
  for (const auto& [op, count] : seen) {
    CAPTURE(op);
    CHECK(count == 1);
  }
  for (const char* op :
       {"make_simplex", "facet_values", "build_grid", "volume", "conjugate", "biconjugate",
        "is_convex", "gradient", "sup_norm_distance", "fubini_study", "guillemin_potential",
        "support_function", "example_family", "symplectic_from_kahler", "mabuchi_distance",
        "pushforward_integral", "i_functional", "i2_functional", "j2_functional",
        "aubin_mabuchi_increment", "geodesic_point", "min_operation", "max_operation",
        "midpoint_potential", "pythagoras_check", "kiselman_check", "inequality_suite",
        "lq_norm", "membership", "sup_bound_check", "convergence_classifier"}) {
    CAPTURE(op);
    CHECK(seen.count(op) == 1);
  }
}
