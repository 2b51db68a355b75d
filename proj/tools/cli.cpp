#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "toric/energy_classes.hpp"
#include "toric/functionals.hpp"
#include "toric/geodesics.hpp"
#include "toric/polytope.hpp"
#include "toric/potentials.hpp"
#include "toric/verify.hpp"

namespace toric::cli {

namespace {

struct RunConfig {
  std::string polytope = "simplex1";
  std::string a, b;
  std::size_t nodes = 0;  // 0 = per-command default
  double margin = 0.0;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::size_t instances = 100;
  std::string only;
  std::size_t n = 0;
  double eps = 0.0, C = 0.0;
  bool single = false;
  std::string schedule;
  double box_radius = 0.0;
  double t = 0.5;
  double q = 2.0;
  bool max_op = false;
  std::string input;
};

/// Thrown for problems with the command line itself.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::size_t default_nodes(std::size_t n, std::size_t one_d) {
  if (n <= 1) return one_d;
  if (n == 2) return 256;
  return 32;
}

class Output {
 public:
  Output(const RunConfig& c, std::ostream& fallback) {
    if (!c.out.empty()) {
      file_.open(c.out);
      if (!file_) throw UsageError("cannot open output file " + c.out);
    }
    os_ = c.out.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void write_json(std::ostream& os, const nlohmann::json& j) { os << j.dump(2) << '\n'; }

void require_format(const RunConfig& c) {
  if (c.format != "json" && c.format != "csv")
    throw UsageError("--format must be json or csv");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

nlohmann::json polytope_info(const DelzantPolytope& p) {
  return {{"label", p.label()},
          {"dimension", p.dimension()},
          {"volume", p.volume()},
          {"vertices", p.vertices()}};
}

std::vector<std::pair<double, double>> parse_schedule(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    require(colon != std::string::npos, "malformed schedule entry '" + item + "' (want eps:C)");
    try {
      std::size_t u1 = 0, u2 = 0;
      const std::string e = item.substr(0, colon), c = item.substr(colon + 1);
      const double eps = std::stod(e, &u1), C = std::stod(c, &u2);
      require(u1 == e.size() && u2 == c.size(), "malformed schedule entry '" + item + "'");
      out.emplace_back(eps, C);
    } catch (const std::logic_error& ex) {
      if (dynamic_cast<const UsageError*>(&ex)) throw;
      throw UsageError("malformed schedule entry '" + item + "'");
    }
  }
  require(!out.empty(), "empty schedule");
  for (const auto& [eps, C] : out) ExampleFamily(eps, C);  // range check
  return out;
}

std::vector<std::pair<double, double>> schedule_from(const RunConfig& c, bool allow_default) {
  if (c.single) {
    require(c.eps > 0.0 && c.C > 0.0, "--single needs --eps and --C");
    ExampleFamily(c.eps, c.C);
    return {{c.eps, c.C}};
  }
  if (!c.schedule.empty()) return parse_schedule(c.schedule);
  require(allow_default, "--schedule eps:C,... (or --single --eps E --C K) is required");
  return headline_schedule(20);
}

// ---------------------------------------------------------------------------

int cmd_distance(const RunConfig& c, std::ostream& out, bool with_suite) {
  require_format(c);
  require(!c.a.empty() && !c.b.empty(), "--a and --b are required");
  const auto p = load_polytope(c.polytope);
  const ResolveOptions opts{c.box_radius, 0};
  const auto a = resolve_potential(c.a, p, opts);
  const auto b = resolve_potential(c.b, p, opts);
  const std::size_t nodes = c.nodes ? c.nodes : default_nodes(p.dimension(), 4096);
  const auto report = with_suite ? inequality_suite(a, b, p, nodes, c.margin)
                                 : distance_report(a, b, p, nodes, c.margin);
  Output o(c, out);
  if (c.format == "json") {
    auto j = to_json(report);
    j["polytope_info"] = polytope_info(p);
    write_json(o.stream(), j);
  } else {
    auto& os = o.stream();
    os << "quantity,value,error\n";
    const std::pair<const char*, const Estimate*> rows[] = {
        {"d", &report.d},   {"I", &report.I},           {"I2", &report.I2},
        {"J2", &report.J2}, {"E_increment", &report.energy}, {"sup_norm", &report.sup_norm}};
    for (const auto& [name, e] : rows)
      os << name << ',' << format_real(e->value) << ',' << format_real(e->error) << '\n';
    for (const auto& v : report.verdicts)
      os << '"' << v.name << "\"," << (v.passed ? "pass" : "fail") << ','
         << format_real(v.tolerance) << '\n';
  }
  return report.all_passed() ? kPass : kVerdictFailure;
}

struct RealizedPair {
  DelzantPolytope polytope;
  PolytopeGrid grid;
  PotentialPair a, b;
};

RealizedPair realize_pair(const RunConfig& c, std::size_t one_d_nodes) {
  require(!c.a.empty() && !c.b.empty(), "--a and --b are required");
  auto p = load_polytope(c.polytope);
  const ResolveOptions opts{c.box_radius, 0};
  const auto sa = resolve_potential(c.a, p, opts);
  const auto sb = resolve_potential(c.b, p, opts);
  auto grid = build_grid(p, c.nodes ? c.nodes : default_nodes(p.dimension(), one_d_nodes),
                         c.margin);
  auto pa = sa.realize(grid);
  auto pb = sb.realize(grid);
  return {std::move(p), std::move(grid), std::move(pa), std::move(pb)};
}

int cmd_geodesic(const RunConfig& c, std::ostream& out) {
  require_format(c);
  require(c.t >= 0.0 && c.t <= 1.0, "--t must lie in [0,1]");
  const auto r = realize_pair(c, 4096);
  const GeodesicPath path(r.a.symplectic, r.b.symplectic);
  const auto gt = geodesic_point(path, c.t);
  Output o(c, out);
  if (c.format == "csv") {
    write_grid_csv(o.stream(), gt, "s");
  } else {
    write_json(o.stream(),
               {{"t", c.t},
                {"d(a,b)", mabuchi_distance(r.a.symplectic, r.b.symplectic, r.grid)},
                {"d(a,t)", mabuchi_distance(r.a.symplectic, gt, r.grid)},
                {"d(t,b)", mabuchi_distance(gt, r.b.symplectic, r.grid)},
                {"E(t)-E(a)", aubin_mabuchi_increment(r.a.symplectic, gt, r.grid)}});
  }
  return kPass;
}

int cmd_minop(const RunConfig& c, std::ostream& out) {
  require_format(c);
  const auto r = realize_pair(c, 4096);
  const auto result = c.max_op ? max_operation(r.a.symplectic, r.b.symplectic)
                               : min_operation(r.a.symplectic, r.b.symplectic);
  Output o(c, out);
  if (c.format == "csv") {
    write_grid_csv(o.stream(), result, "s");
    return kPass;
  }
  const auto py = pythagoras_check(r.a.symplectic, r.b.symplectic, r.grid);
  nlohmann::json j{{"operation", c.max_op ? "max(phi,psi)" : "phi v psi"},
                   {"d(a,result)", mabuchi_distance(r.a.symplectic, result, r.grid)},
                   {"d(result,b)", mabuchi_distance(result, r.b.symplectic, r.grid)},
                   {"pythagoras",
                    {{"d2", py.d2},
                     {"left", py.left},
                     {"right", py.right},
                     {"residual", py.residual},
                     {"verdict", py.passed ? "pass" : "fail"}}}};
  if (r.grid.dimension() == 1) {
    const GridPotential pa(r.a.symplectic, r.grid), pb(r.b.symplectic, r.grid);
    const auto kis = kiselman_check(pa, pb, default_kiselman_samples(pa, pb));
    j["kiselman_max_deviation"] = kis.max_deviation;
  }
  write_json(o.stream(), j);
  return py.passed ? kPass : kVerdictFailure;
}

void write_rows(const RunConfig& c, std::ostream& out, const std::vector<RegimeRow>& rows) {
  Output o(c, out);
  if (c.format == "csv") {
    write_regime_csv(o.stream(), rows);
    return;
  }
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows)
    j.push_back({{"eps", r.epsilon},
                 {"C", r.C},
                 {"nodes", r.nodes},
                 {"L1", r.L1},
                 {"Linf", r.Linf},
                 {"I1", r.I1},
                 {"I2", r.I2},
                 {"d", r.d},
                 {"max_relative_error", r.max_relative_error},
                 {"predicates", r.predicates}});
  write_json(o.stream(), j);
}

int cmd_classify(RunConfig c, std::ostream& out, bool reproduce) {
  if (c.format == "json" && reproduce) c.format = "csv";
  require_format(c);
  const auto schedule = schedule_from(c, reproduce);
  const auto rows = convergence_classifier(schedule, c.nodes ? c.nodes : 4096);
  write_rows(c, out, rows);
  if (reproduce)
    for (const auto& r : rows)
      if (!(r.max_relative_error <= 1e-3))
        throw NumericError(fmt::format(
            "closed-form mismatch at eps={}, C={}: relative error {}", format_real(r.epsilon),
            format_real(r.C), format_real(r.max_relative_error)));
  return kPass;
}

int cmd_membership(const RunConfig& c, std::ostream& out) {
  require_format(c);
  require(!c.a.empty(), "--a is required");
  require(c.q > 0.0, "--q must be positive");
  const auto p = load_polytope(c.polytope);
  const auto src = resolve_potential(c.a, p, {c.box_radius, 0});
  const double margin = c.margin > 0.0 ? c.margin : 0.01;
  const auto base = build_grid(
      p, c.nodes ? c.nodes : (p.dimension() == 1 ? 65536 : default_nodes(p.dimension(), 0)),
      margin);
  MembershipVerdict v;
  if (src.symplectic_closed_form) {
    v = membership(*src.symplectic_closed_form, c.q, base);
  } else {
    const auto finest = remask(base, margin / 4);
    v = membership(src.realize(finest).symplectic, c.q, base);
  }
  Output o(c, out);
  if (c.format == "json") {
    auto j = to_json(v);
    j["potential"] = c.a;
    write_json(o.stream(), j);
  } else {
    o.stream() << "margin,norm\n";
    for (std::size_t k = 0; k < 3; ++k)
      o.stream() << format_real(v.margins[k]) << ',' << format_real(v.norms[k]) << '\n';
  }
  return kPass;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  VerifyConfig vc;
  vc.seed = c.seed;
  vc.nodes = c.nodes ? c.nodes : 2048;
  vc.instances = c.instances;
  vc.only = c.only;
  vc.dimension = c.n;
  require(vc.dimension <= 2, "--n must be 1 or 2");
  const auto& items = verify_items();
  require(c.only.empty() || std::find(items.begin(), items.end(), c.only) != items.end(),
          "unknown --only item '" + c.only + "'");
  const auto report = run_verify(vc);
  Output o(c, out);
  write_json(o.stream(), to_json(report));
  return report.all_passed() ? kPass : kVerdictFailure;
}

int cmd_conjugate(const RunConfig& c, std::ostream& out) {
  require(c.input.empty() != c.a.empty(), "give exactly one of --input FILE or --a POTENTIAL");
  const auto p = load_polytope(c.polytope);
  const std::size_t nodes = c.nodes ? c.nodes : default_nodes(p.dimension(), 4096);
  Output o(c, out);
  if (!c.a.empty()) {
    const auto grid = build_grid(p, nodes, c.margin);
    const auto pair = resolve_potential(c.a, p, {c.box_radius, 0}).realize(grid);
    write_grid_csv(o.stream(), pair.symplectic, "s");
    return kPass;
  }
  const auto csv = [&] {
    try {
      return read_grid_csv(c.input);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  require(csv.function.dimension() == p.dimension(),
          "input dimension does not match the polytope");
  if (csv.variable == "x") {
    const auto grid = build_grid(p, nodes, c.margin);
    write_grid_csv(o.stream(), conjugate(csv.function, grid), "s");
    return kPass;
  }
  const std::size_t n = csv.function.dimension();
  double radius = c.box_radius;
  if (radius <= 0.0) {
    radius = 3.0;
    const auto& g = csv.function;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& grid = g.grid();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (grid.axis_index(i, k) + 1 >= grid.axis(k).size()) continue;
        const std::size_t j = i + grid.stride(k);
        if (g[i].is_finite() && g[j].is_finite())
          radius = std::max(radius, std::abs(g[j].value() - g[i].value()) /
                                            grid.axis(k).step() + 1.0);
      }
    }
  }
  const std::vector<double> lo(n, -radius), hi(n, radius);
  write_grid_csv(o.stream(), conjugate(csv.function, TensorGrid::box(lo, hi, nodes)), "x");
  return kPass;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{
      "distance", "functionals", "geodesic",          "minop", "classify",
      "membership", "reproduce-example", "verify", "conjugate"};
  return names;
}

const std::vector<std::pair<std::string, std::string>>& operation_registry() {
  static const std::vector<std::pair<std::string, std::string>> ops{
      {"make_simplex", "distance"},
      {"facet_values", "distance"},
      {"build_grid", "distance"},
      {"volume", "distance"},
      {"conjugate", "conjugate"},
      {"biconjugate", "minop"},
      {"is_convex", "conjugate"},
      {"gradient", "geodesic"},
      {"sup_norm_distance", "functionals"},
      {"fubini_study", "conjugate"},
      {"guillemin_potential", "membership"},
      {"support_function", "geodesic"},
      {"example_family", "reproduce-example"},
      {"symplectic_from_kahler", "conjugate"},
      {"mabuchi_distance", "distance"},
      {"pushforward_integral", "functionals"},
      {"i_functional", "functionals"},
      {"i2_functional", "functionals"},
      {"j2_functional", "functionals"},
      {"aubin_mabuchi_increment", "geodesic"},
      {"geodesic_point", "geodesic"},
      {"min_operation", "minop"},
      {"max_operation", "minop"},
      {"midpoint_potential", "verify"},
      {"pythagoras_check", "minop"},
      {"kiselman_check", "minop"},
      {"inequality_suite", "verify"},
      {"lq_norm", "membership"},
      {"membership", "membership"},
      {"sup_bound_check", "verify"},
      {"convergence_classifier", "classify"},
  };
  return ops;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toric Mabuchi geometry: distances, geodesics and energy functionals"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p", c.polytope, "polytope: simplexN, cubeN, interval:a,b or JSON file");
    sub->add_option("--N", c.nodes, "grid nodes per axis (>= 8)");
    sub->add_option("--margin", c.margin, "mask margin delta >= 0");
    sub->add_option("--out", c.out, "output file (default stdout)");
    sub->add_option("--format", c.format, "json or csv");
    sub->add_option("--box-radius", c.box_radius, "Kahler-side box radius (default automatic)");
  };
  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("--a", c.a, "first potential");
    sub->add_option("--b", c.b, "second potential");
  };
  auto add_schedule = [&](CLI::App* sub) {
    sub->add_option("--schedule", c.schedule, "eps:C,eps:C,...");
    sub->add_option("--eps", c.eps, "epsilon for --single");
    sub->add_option("--C", c.C, "C for --single");
    sub->add_flag("--single", c.single, "one row for --eps/--C");
  };

  auto* distance = app.add_subcommand("distance", "distance report with inequality verdicts");
  add_common(distance);
  add_pair(distance);
  auto* functionals = app.add_subcommand("functionals", "d, I, I2, J2, E increment, sup norm");
  add_common(functionals);
  add_pair(functionals);
  auto* geodesic = app.add_subcommand("geodesic", "point of the geodesic from a to b");
  add_common(geodesic);
  add_pair(geodesic);
  geodesic->add_option("--t", c.t, "time in [0,1]");
  auto* minop = app.add_subcommand("minop", "phi v psi (or max(phi,psi) with --max)");
  add_common(minop);
  add_pair(minop);
  minop->add_flag("--max", c.max_op, "compute max(phi,psi) instead");
  auto* classify = app.add_subcommand("classify", "convergence regime table");
  add_common(classify);
  add_schedule(classify);
  auto* memb = app.add_subcommand("membership", "E^q membership by margin refinement");
  add_common(memb);
  memb->add_option("--a", c.a, "potential");
  memb->add_option("--q", c.q, "exponent q > 0");
  auto* reproduce = app.add_subcommand("reproduce-example", "two-kink family regime table");
  add_common(reproduce);
  add_schedule(reproduce);
  auto* verify = app.add_subcommand("verify", "identity and inequality suite");
  add_common(verify);
  verify->add_option("--seed", c.seed, "random seed");
  verify->add_option("--instances", c.instances, "random instances per item");
  verify->add_option("--only", c.only, "run one item");
  verify->add_option("--n", c.n, "dimension (1 or 2)");
  auto* conj = app.add_subcommand("conjugate", "Legendre transform of a grid CSV or a potential");
  add_common(conj);
  conj->add_option("--input", c.input, "grid CSV (s_k or x_k columns)");
  conj->add_option("--a", c.a, "named potential, written as its s-grid");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (c.nodes != 0 && c.nodes < 8) throw UsageError("--N must be at least 8");
    if (c.margin < 0.0) throw UsageError("--margin must be nonnegative");
    if (distance->parsed()) return cmd_distance(c, out, true);
    if (functionals->parsed()) return cmd_distance(c, out, false);
    if (geodesic->parsed()) return cmd_geodesic(c, out);
    if (minop->parsed()) return cmd_minop(c, out);
    if (classify->parsed()) return cmd_classify(c, out, false);
    if (memb->parsed()) return cmd_membership(c, out);
    if (reproduce->parsed()) return cmd_classify(c, out, true);
    if (verify->parsed()) return cmd_verify(c, out);
    if (conj->parsed()) return cmd_conjugate(c, out);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}

}  // namespace toric::cli
