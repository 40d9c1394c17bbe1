#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "subhj/distance.hpp"
#include "subhj/hopflax.hpp"
#include "subhj/verifier.hpp"

using namespace subhj;

namespace {

HorizontalGraph unit_square(double h, int directions = 16) {
  BuildOptions opts;
  opts.directions = directions;
  return build_graph(GroupSpec::abelian(2), DomainSpec::box({0.0, 0.0}, {1.0, 1.0}), h,
                     opts);
}

ScalarField field_from(const HorizontalGraph& g,
                       const std::function<double(const Point&)>& fn) {
  ScalarField f;
  f.lat = g.lat;
  f.values.assign(static_cast<std::size_t>(g.lat.total()), kInf);
  f.valid = g.inside;
  for (std::int64_t id = 0; id < g.lat.total(); ++id)
    if (g.is_inside(id)) f.values[static_cast<std::size_t>(id)] = fn(g.node_point(id));
  return f;
}

ScalarField zero_datum_solution(const HorizontalGraph& g, const Hamiltonian& ham) {
  auto datum = make_boundary_datum(g, [](const Point&) { return 0.0; });
  auto sol = solve_dirichlet(g, ham, datum);
  REQUIRE(sol.status == "ok");
  return restrict_to_monge_data(sol, g);
}

}  // namespace

TEST_CASE("dyadic radius ladders halve four times") {
  auto r = dyadic_radii(0.25);
  REQUIRE(r.size() == 4);
  CHECK(r[0] == 0.25);
  CHECK(r[1] == 0.125);
  CHECK(r[2] == 0.0625);
  CHECK(r[3] == 0.03125);
}

TEST_CASE("the zero-data solution verifies as a local optimality solution") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(1.25, ZSet::ball(1.0));
  auto u = zero_datum_solution(g, ham);

  for (Point x0 : {Point{0.5, 0.5}, Point{0.375, 0.4375}}) {
    auto rec = monge_residual(u, ham, g, x0, dyadic_radii(0.25));
    CHECK(rec.cls == MongeClass::SolutionOk);
    CHECK(rec.violated_side.empty());
    CHECK(rec.violation_margin == 0.0);
    CHECK(rec.node == g.snap_inside(x0));
    CHECK(rec.estimate == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(rec.infima.size() == 4);
    for (double v : rec.infima) {
      CHECK(v >= -1e-9);
      CHECK(v <= 1e-9);
    }
  }
}

TEST_CASE("a distance cone fails the supersolution side at its vertex") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(1.25, ZSet::ball(1.0));
  auto v = g.snap_inside({0.5, 0.5});
  REQUIRE(v >= 0);

  DistanceOptions opts;
  opts.kind = MetricKind::OpticalLength;
  opts.ham = &ham;
  auto cone = shortest_distances(g, {{v, 0.0}}, opts);
  ScalarField u;
  u.lat = g.lat;
  u.values = cone.value;
  u.valid = g.inside;

  auto rec = monge_residual(u, ham, g, g.node_point(v), dyadic_radii(0.25), 0.5);
  CHECK(rec.cls == MongeClass::SubsolutionOk);
  CHECK(rec.violated_side == "super");
  CHECK(rec.subsolution_side_ok());
  CHECK(rec.estimate == Catch::Approx(2.0).margin(1e-9));
  CHECK(rec.violation_margin == Catch::Approx(1.5).margin(1e-9));
  for (double q : rec.infima) CHECK(q == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("constants are subsolutions but not supersolutions") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(2.0, ZSet::ball(1.3));
  auto u = field_from(g, [](const Point&) { return 4.0; });

  auto rec = monge_residual(u, ham, g, {0.5, 0.5}, dyadic_radii(0.25), 0.5);
  CHECK(rec.cls == MongeClass::SubsolutionOk);
  CHECK(rec.violated_side == "super");
  CHECK(rec.estimate == Catch::Approx(1.3).margin(1e-9));
  CHECK(rec.violation_margin == Catch::Approx(0.8).margin(1e-9));
  for (double q : rec.infima) CHECK(q == Catch::Approx(1.3).margin(1e-9));
}

TEST_CASE("residuals ignore whether the Hamiltonian was extended") {
  auto g = unit_square(1.0 / 16.0);
  auto ham = Hamiltonian::uniform(1.5, ZSet::ball(1.2));
  auto ext = extend(ham, DomainSpec::box({0.0, 0.0}, {1.0, 1.0}));
  auto u = zero_datum_solution(g, ham);

  std::vector<double> radii = {0.25, 0.125, 0.0625};
  auto a = monge_residual(u, ham, g, {0.5, 0.5}, radii);
  auto b = monge_residual(u, ext, g, {0.5, 0.5}, radii);
  CHECK(a.estimate == Catch::Approx(b.estimate).margin(1e-12));
  CHECK(a.cls == b.cls);
}

TEST_CASE("residual probes reject bad placement and bad radii") {
  auto g = unit_square(1.0 / 16.0);
  auto ham = Hamiltonian::uniform(1.25, ZSet::ball(1.0));
  auto u = zero_datum_solution(g, ham);

  CHECK_THROWS_AS(monge_residual(u, ham, g, {0.5, 0.5}, {}), std::invalid_argument);
  CHECK_THROWS_AS(monge_residual(u, ham, g, {0.5, 0.5}, {0.25, -0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(monge_residual(u, ham, g, {2.0, 2.0}, {0.25}), std::domain_error);
  // a ball of radius 0.5 from the center reaches the rim
  CHECK_THROWS_AS(monge_residual(u, ham, g, {0.5, 0.5}, {0.5}), std::domain_error);
  // nothing lives within a sixty-fourth of a node
  CHECK_THROWS_AS(monge_residual(u, ham, g, {0.5, 0.5}, {1.0 / 64.0}),
                  std::domain_error);

  auto coarse = unit_square(1.0 / 8.0);
  auto uc = zero_datum_solution(coarse, ham);
  CHECK_THROWS_AS(monge_residual(uc, ham, g, {0.5, 0.5}, {0.25}), std::invalid_argument);
}

TEST_CASE("steep affine fields fail the almost-everywhere inequality") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(2.0, ZSet::ball(1.0));
  auto u = field_from(g, [](const Point& p) { return 2.0 * p[0]; });

  std::vector<Point> probes = {{0.25, 0.25}, {0.5, 0.5}, {0.75, 0.5}};
  auto rep = ae_subsolution_check(u, ham, g.group, probes, g.h);
  CHECK(rep.evaluated == 3);
  CHECK(rep.skipped == 0);
  CHECK(rep.passed == 0);
  CHECK(rep.fraction_passed == 0.0);
  CHECK(rep.worst_value == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(rep.values.size() == 3);
  for (double v : rep.values) CHECK(v == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("flat fields pass the almost-everywhere inequality strictly") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(2.0, ZSet::ball(1.0));
  auto u = field_from(g, [](const Point&) { return 0.0; });

  auto rep = ae_subsolution_check(u, ham, g.group, {{0.5, 0.5}, {0.25, 0.75}}, g.h);
  CHECK(rep.evaluated == 2);
  CHECK(rep.passed == 2);
  CHECK(rep.fraction_passed == 1.0);
  CHECK(rep.worst_value == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("the solved field passes the almost-everywhere check on node probes") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(1.25, ZSet::ball(1.0));
  auto u = zero_datum_solution(g, ham);

  std::vector<Point> probes;
  for (std::int64_t id = 0; id < g.lat.total(); ++id) {
    if (!g.is_inside(id) || g.on_domain_shell(id)) continue;
    Point p = g.node_point(id);
    double rim = std::min({p[0], 1.0 - p[0], p[1], 1.0 - p[1]});
    if (rim >= 2.0 * g.h && probes.size() < 80) probes.push_back(p);
  }
  REQUIRE(probes.size() == 80);

  auto rep = ae_subsolution_check(u, ham, g.group, probes, g.h);
  CHECK(rep.evaluated == 80);
  CHECK(rep.fraction_passed >= 0.95);
  CHECK(rep.worst_value <= rep.tau_fd);
}

TEST_CASE("probes whose difference stencil leaves the field are skipped") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(1.25, ZSet::ball(1.0));
  auto u = field_from(g, [](const Point&) { return 0.0; });

  auto rep = ae_subsolution_check(u, ham, g.group, {{g.h / 4.0, 0.5}, {0.5, 0.5}}, g.h);
  CHECK(rep.skipped == 1);
  CHECK(rep.evaluated == 1);
  CHECK(rep.passed == 1);
}

TEST_CASE("the solution is Lipschitz against its own optical distance") {
  auto g = unit_square(1.0 / 16.0);
  auto ham = Hamiltonian::uniform(1.25, ZSet::ball(1.0));
  auto u = zero_datum_solution(g, ham);

  std::vector<std::int64_t> nodes;
  for (std::int64_t id = 0; id < g.lat.total(); ++id)
    if (g.is_inside(id)) nodes.push_back(id);
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::size_t i = 0; i < 30; ++i)
    pairs.emplace_back(nodes[(i * 17) % nodes.size()], nodes[(i * 41 + 5) % nodes.size()]);

  auto rep = lipschitz_vs_optical(u, g, ham, pairs);
  CHECK(rep.pairs == 30);
  CHECK(rep.violations == 0);
  CHECK(rep.passed);
  CHECK(rep.worst_excess <= 1e-12);
  CHECK(rep.tol == Catch::Approx(2.0 * g.cell_cost(ham.alpha)));
}

TEST_CASE("a field steeper than the metric allows is flagged with its worst pair") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(1.25, ZSet::ball(1.0));
  auto u = field_from(g, [](const Point& p) { return 3.0 * p[0]; });

  auto a = g.snap_inside({0.9375, 0.5});
  auto b = g.snap_inside({0.03125, 0.5});
  auto c = g.snap_inside({0.5, 0.5});
  REQUIRE(a >= 0);
  REQUIRE(b >= 0);

  auto rep = lipschitz_vs_optical(u, g, ham, {{a, b}, {c, a}});
  CHECK(rep.pairs == 2);
  CHECK(rep.violations >= 1);
  CHECK_FALSE(rep.passed);
  CHECK(rep.worst_from == a);
  CHECK(rep.worst_to == b);
  // u drops by 3 * 0.90625 while the optical distance only costs 0.90625
  CHECK(rep.worst_excess == Catch::Approx(2.0 * 0.90625).margin(1e-9));
}

TEST_CASE("comparison holds with equal fields and with a lowered subsolution") {
  auto g = unit_square(1.0 / 32.0);
  auto ham = Hamiltonian::uniform(2.0, ZSet::ball(1.0));
  auto w = zero_datum_solution(g, ham);

  auto same = comparison_harness(ham, g, w, w);
  CHECK(same.precondition_met);
  CHECK(same.passed);
  CHECK(same.status == "pass");
  CHECK(same.worst_interior_excess == 0.0);
  CHECK(same.worst_boundary_excess == 0.0);

  auto lowered = w;
  for (auto& v : lowered.values)
    if (std::isfinite(v)) v -= 0.5;
  auto below = comparison_harness(ham, g, lowered, w);
  CHECK(below.passed);
  CHECK(below.worst_interior_excess == Catch::Approx(-0.5));
}

TEST_CASE("comparison orders the solutions of nested ball geometries") {
  auto g = unit_square(1.0 / 32.0);
  auto small = Hamiltonian::uniform(2.0, ZSet::ball(1.0));
  auto big = Hamiltonian::uniform(2.0, ZSet::ball(2.0));
  auto w1 = zero_datum_solution(g, small);
  auto w2 = zero_datum_solution(g, big);

  auto ordered = comparison_harness(small, g, w1, w2);
  CHECK(ordered.passed);
  CHECK(ordered.status == "pass");

  auto reversed = comparison_harness(small, g, w2, w1);
  CHECK(reversed.precondition_met);
  CHECK_FALSE(reversed.passed);
  CHECK(reversed.status == "fail");
  // the doubled geometry stands a full w1 above it at the center
  CHECK(reversed.worst_interior_excess == Catch::Approx(0.5).margin(0.1));
}

TEST_CASE("comparison refuses pairs that already disagree on the boundary") {
  auto g = unit_square(1.0 / 16.0);
  auto ham = Hamiltonian::uniform(2.0, ZSet::ball(1.0));
  auto w = zero_datum_solution(g, ham);
  auto raised = w;
  for (auto& v : raised.values)
    if (std::isfinite(v)) v += 10.0;

  auto rep = comparison_harness(ham, g, raised, w);
  CHECK_FALSE(rep.precondition_met);
  CHECK_FALSE(rep.passed);
  CHECK(rep.status == "precondition unmet");
  CHECK(rep.worst_boundary_excess == Catch::Approx(10.0));
}

TEST_CASE("a constant Hamiltonian sequence has zero deviation everywhere") {
  auto g = unit_square(1.0 / 16.0);
  auto ham = Hamiltonian::uniform(1.25, ZSet::ball(1.0));
  auto datum = make_boundary_datum(g, [](const Point&) { return 0.0; });

  auto a = g.snap_inside({0.25, 0.5});
  auto b = g.snap_inside({0.75, 0.5});
  auto c = g.snap_inside({0.5, 0.25});
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs = {{a, b}, {a, c}, {b, c}};
  std::vector<Point> probes = {{0.5, 0.5}};
  std::vector<double> radii = {0.25, 0.125, 0.0625};

  auto rep = stability_harness(g, {ham, ham, ham}, ham, datum, pairs, probes, radii);
  REQUIRE(rep.pair_deviation.size() == 3);
  REQUIRE(rep.node_deviation.size() == 3);
  for (double d : rep.pair_deviation) CHECK(d == 0.0);
  for (double d : rep.node_deviation) CHECK(d == 0.0);
  CHECK(rep.pair_monotone);
  CHECK(rep.node_monotone);
  CHECK(rep.limit_solution_ok);
  CHECK(rep.passed);
}

TEST_CASE("shrinking ball geometries converge monotonically to their limit") {
  auto g = unit_square(1.0 / 16.0);
  double alpha = 2.5;
  std::vector<Hamiltonian> seq = {Hamiltonian::uniform(alpha, ZSet::ball(2.0)),
                                  Hamiltonian::uniform(alpha, ZSet::ball(1.5)),
                                  Hamiltonian::uniform(alpha, ZSet::ball(1.25))};
  auto limit = Hamiltonian::uniform(alpha, ZSet::ball(1.0));
  auto datum = make_boundary_datum(g, [](const Point&) { return 0.0; });

  auto a = g.snap_inside({0.25, 0.5});
  auto b = g.snap_inside({0.75, 0.5});
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs = {{a, b}};
  std::vector<Point> probes = {{0.5, 0.5}};
  std::vector<double> radii = {0.25, 0.125, 0.0625};

  auto rep = stability_harness(g, seq, limit, datum, pairs, probes, radii);
  CHECK(rep.pair_monotone);
  CHECK(rep.node_monotone);
  CHECK(rep.pair_deviation[2] < rep.pair_deviation[0]);
  CHECK(rep.node_deviation[2] < rep.node_deviation[0]);
  CHECK(rep.limit_solution_ok);
  CHECK(rep.passed);
}

TEST_CASE("stability requires the sequence to share the limit's alpha") {
  auto g = unit_square(1.0 / 8.0);
  auto datum = make_boundary_datum(g, [](const Point&) { return 0.0; });
  std::vector<Hamiltonian> seq = {Hamiltonian::uniform(2.0, ZSet::ball(1.0))};
  auto limit = Hamiltonian::uniform(2.5, ZSet::ball(1.0));
  CHECK_THROWS_AS(stability_harness(g, seq, limit, datum, {}, {}, {0.25}),
                  std::invalid_argument);
}
