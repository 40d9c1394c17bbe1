#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "subhj/config.hpp"
#include "subhj/csvio.hpp"
#include "subhj/distance.hpp"
#include "subhj/graph.hpp"
#include "subhj/hopflax.hpp"
#include "subhj/predicate.hpp"
#include "subhj/probe.hpp"
#include "subhj/rng.hpp"
#include "subhj/verifier.hpp"
#include "subhj/version.hpp"

namespace subhj {

struct TaskOutcome {
  int status = 0;  ///< 0 success, 1 task failure, 3 validation failure
  std::string failure;
  std::vector<std::string> files;
  nlohmann::json summary;
};

inline std::uint64_t subseed(std::uint64_t seed, const char* purpose) {
  return seed ^ fnv1a64(purpose);
}

/// The solve pipeline's fixed parts: the grown global box, the extended
/// Hamiltonian, and the graph over the global box.
struct SolveSetup {
  DomainSpec global;
  Hamiltonian K;
  HorizontalGraph graph;
};

inline SolveSetup make_solve_setup(const RunConfig& rc, double spacing,
                                   bool check_connectivity = false) {
  SolveSetup s;
  s.global = rc.omega.grown(resolved_margins(rc));
  s.K = extend(rc.ham, rc.omega);
  BuildOptions bopts;
  bopts.directions = rc.grid.directions;
  bopts.check_connectivity = check_connectivity;
  s.graph = build_graph(rc.group, s.global, spacing, bopts);
  return s;
}

namespace taskdetail {

using nlohmann::json;

inline Point sample_in_domain(const DomainSpec& dom, Rng& rng, double shrink) {
  Point p(dom.dims());
  for (int tries = 0; tries < 10000; ++tries) {
    for (int a = 0; a < dom.dims(); ++a) {
      const double mid = 0.5 * (dom.lo[a] + dom.hi[a]);
      const double half = 0.5 * (dom.hi[a] - dom.lo[a]) * shrink;
      p[a] = mid + rng.uniform(-half, half);
    }
    if (dom.contains(p)) return p;
  }
  throw std::runtime_error("sampling: interior predicate rejects the shrunken box");
}

/// Crude upper bound on the second-layer reach of paths of horizontal length
/// r from x0, used to keep probe balls away from the top and bottom faces.
inline double vertical_reach(const GroupSpec& g, const Point& x0, double r, int l) {
  switch (g.kind) {
    case GroupKind::Abelian:
      return 0.0;
    case GroupKind::Heisenberg1:
      return r * (std::fabs(x0[0]) + std::fabs(x0[1]) + 2.0 * r);
    case GroupKind::GenericStep2: {
      double s = 0.0;
      for (int i = 0; i < g.m; ++i) {
        double cmax = 0.0;
        for (int j = 0; j < g.m; ++j) cmax = std::max(cmax, std::fabs(g.c(i, j, l)));
        s += cmax * (std::fabs(x0[i]) + r);
      }
      return r * s;
    }
  }
  return 0.0;
}

inline bool probe_ball_fits(const GroupSpec& g, const DomainSpec& dom, const Point& x0,
                            double r_max, double slack) {
  for (int a = 0; a < g.m; ++a) {
    if (x0[a] - dom.lo[a] < r_max + slack) return false;
    if (dom.hi[a] - x0[a] < r_max + slack) return false;
  }
  for (int l = 0; l < g.n - g.m; ++l) {
    const int a = g.m + l;
    const double reach = vertical_reach(g, x0, r_max, l) * 1.05 + slack;
    if (x0[a] - dom.lo[a] < reach) return false;
    if (dom.hi[a] - x0[a] < reach) return false;
  }
  return true;
}

inline std::vector<Point> sample_probes(const GroupSpec& g, const DomainSpec& dom,
                                        Rng& rng, int count, double shrink,
                                        double r_max, double slack) {
  std::vector<Point> out;
  int tries = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++tries > 100000)
      throw std::runtime_error("sampling: cannot place probes this deep; "
                               "shrink the probe box or the radii");
    Point p = sample_in_domain(dom, rng, shrink);
    if (probe_ball_fits(g, dom, p, r_max, slack)) out.push_back(std::move(p));
  }
  return out;
}

inline std::int64_t sample_inside_node(const HorizontalGraph& g, Rng& rng, double shrink) {
  for (int tries = 0; tries < 10000; ++tries) {
    const Point p = sample_in_domain(g.dom, rng, shrink);
    const std::int64_t id = g.snap_inside(p);
    if (id >= 0) return id;
  }
  throw std::runtime_error("sampling: cannot place a node");
}

inline BoundaryDatum datum_from_params(const RunConfig& rc, const HorizontalGraph& g,
                                       const std::vector<std::int64_t>& shell) {
  const std::int64_t stride = rc.params.value("boundary_stride", std::int64_t{1});
  if (rc.params.contains("g_csv")) {
    const auto samples =
        read_boundary_csv(rc.params.at("g_csv").get<std::string>(), rc.group.n);
    return boundary_datum_from_samples(g, samples);
  }
  const std::string expr = rc.params.value("g", std::string("0"));
  const auto fn = parse_scalar_expr(expr, rc.group.n);
  return make_boundary_datum(
      g, shell, [&](const Point& p) { return fn->eval(p); }, stride);
}

inline std::vector<double> radii_from_params(const json& params, double fallback_r) {
  if (params.contains("radii")) return params.at("radii").get<std::vector<double>>();
  return dyadic_radii(params.value("radius", fallback_r));
}

inline MetricKind kind_from_string(const std::string& s) {
  if (s == "cc") return MetricKind::CarnotCaratheodory;
  if (s == "optical") return MetricKind::OpticalLength;
  if (s == "koranyi") return MetricKind::Koranyi;
  throw ConfigError("config: unknown metric kind \"" + s + "\"");
}

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

} // namespace taskdetail

inline TaskOutcome run_distance_task(const RunConfig& rc) {
  using namespace taskdetail;
  TaskOutcome out;
  const MetricKind kind = kind_from_string(rc.params.value("kind", std::string("cc")));
  BuildOptions bopts;
  bopts.directions = rc.grid.directions;
  const auto g = build_graph(rc.group, rc.omega, rc.grid.spacing, bopts);

  const auto source_pt = cfg::need(rc.params, "source", "distance").get<Point>();
  const auto target_pts =
      cfg::need(rc.params, "targets", "distance").get<std::vector<Point>>();
  const std::int64_t src = g.snap_inside(source_pt);
  if (src < 0) throw std::domain_error("distance: source outside the domain");
  std::vector<std::int64_t> targets;
  for (const auto& t : target_pts) {
    const std::int64_t id = g.snap_inside(t);
    if (id < 0) throw std::domain_error("distance: target outside the domain");
    targets.push_back(id);
  }

  const bool export_field = rc.params.value("export_field", true);
  const bool export_path = rc.params.value("export_path", false);
  DistanceOptions dopts;
  dopts.kind = kind;
  dopts.ham = &rc.ham;
  dopts.with_predecessors = export_path && kind != MetricKind::Koranyi;
  if (!export_field) dopts.stop_nodes = targets;
  if (rc.params.contains("bound")) dopts.bound = rc.params.at("bound").get<double>();
  const auto field = shortest_distances(g, {{src, 0.0}}, dopts);

  json targets_json = json::array();
  bool unreachable = false;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double v = field.at(targets[i]);
    unreachable = unreachable || !(v < kInf);
    targets_json.push_back({{"point", g.node_point(targets[i])},
                            {"node", targets[i]},
                            {"value", v < kInf ? json(v) : json(nullptr)}});
    if (export_path && v < kInf && kind != MetricKind::Koranyi) {
      const auto path = extract_path(field, targets[i]);
      std::vector<double> cum(path.size());
      for (std::size_t s = 0; s < path.size(); ++s) cum[s] = field.at(path[s]);
      const std::string name = "path_" + std::to_string(i) + ".csv";
      write_path_csv(join_path(rc.out_dir, name), g, path, cum);
      out.files.push_back(name);
    }
  }
  if (export_field) {
    write_field_csv(join_path(rc.out_dir, "distances.csv"), g, field.value);
    out.files.push_back("distances.csv");
  }
  out.summary = {{"source", g.node_point(src)},
                 {"targets", targets_json},
                 {"settled", field.settled},
                 {"relaxations", field.relaxations},
                 {"nodes", g.node_count}};
  if (unreachable) {
    out.status = 1;
    out.failure = "distance: a target is unreachable";
  }
  return out;
}

inline TaskOutcome run_solve_task(const RunConfig& rc) {
  using namespace taskdetail;
  TaskOutcome out;
  const auto setup = make_solve_setup(rc, rc.grid.spacing);
  const auto shell = region_shell(setup.graph, rc.omega);
  const auto datum = datum_from_params(rc, setup.graph, shell);

  SolveOptions sopts;
  sopts.check_bcc = rc.params.value("check_bcc", true);
  sopts.bcc_max_sources = rc.params.value("bcc_max_sources", 48);
  sopts.check_edges = rc.params.value("check_edges", true);
  const auto sol = solve_dirichlet(setup.graph, setup.K, datum, sopts);

  write_solution_csv(join_path(rc.out_dir, "w.csv"), setup.graph, sol.value, &rc.omega);
  out.files.push_back("w.csv");
  write_json(join_path(rc.out_dir, "bcc.json"), bcc_to_json(setup.graph, sol.bcc));
  out.files.push_back("bcc.json");
  if (rc.params.value("export_boundary", false)) {
    write_boundary_csv(join_path(rc.out_dir, "g.csv"), setup.graph, datum);
    out.files.push_back("g.csv");
  }

  out.summary = {{"status", sol.status},
                 {"boundary_samples", datum.size()},
                 {"boundary_attained", sol.boundary_attained},
                 {"worst_boundary_gap", sol.worst_boundary_gap},
                 {"worst_edge_excess", sol.worst_edge_excess},
                 {"cell_cost", sol.cell_cost},
                 {"global_nodes", setup.graph.node_count}};
  return out;
}

inline TaskOutcome run_verify_task(const RunConfig& rc) {
  using namespace taskdetail;
  TaskOutcome out;
  const auto setup = make_solve_setup(rc, rc.grid.spacing);
  const auto shell = region_shell(setup.graph, rc.omega);
  const auto datum = datum_from_params(rc, setup.graph, shell);
  SolveOptions sopts;
  sopts.check_bcc = rc.params.value("check_bcc", true);
  sopts.bcc_max_sources = rc.params.value("bcc_max_sources", 48);
  sopts.check_edges = false;
  const auto sol = solve_dirichlet(setup.graph, setup.K, datum, sopts);

  BuildOptions bopts;
  bopts.directions = rc.grid.directions;
  const auto g_omega = build_graph(rc.group, rc.omega, rc.grid.spacing, bopts);
  ScalarField u;
  u.lat = g_omega.lat;
  u.values = transfer_values(setup.graph, sol.value, g_omega);
  u.valid = g_omega.inside;

  const auto radii = radii_from_params(rc.params, 4.0 * rc.grid.spacing * 2.0);
  double r_max = radii[0];
  for (double r : radii) r_max = std::max(r_max, r);
  const double tau = rc.params.value("tau", -1.0);

  std::vector<Point> probes;
  if (rc.params.contains("probes")) {
    probes = rc.params.at("probes").get<std::vector<Point>>();
  } else {
    Rng rng(subseed(rc.seed, "verify-probes"));
    probes = sample_probes(rc.group, rc.omega, rng,
                           rc.params.value("probe_count", 20),
                           rc.params.value("probe_shrink", 0.3), r_max,
                           2.0 * rc.grid.spacing);
  }

  std::vector<std::string> checks =
      rc.params.value("checks", std::vector<std::string>{"monge"});
  const std::string expect = rc.params.value("expect", std::string("solution_ok"));

  bool failed = false;
  json report;
  if (std::find(checks.begin(), checks.end(), "monge") != checks.end()) {
    json records = json::array();
    for (const auto& x0 : probes) {
      const auto rec = monge_residual(u, rc.ham, g_omega, x0, radii, tau);
      if (monge_class_label(rec.cls) != expect) failed = true;
      records.push_back(monge_record_to_json(rec));
    }
    report["monge"] = std::move(records);
  }
  if (std::find(checks.begin(), checks.end(), "ae") != checks.end()) {
    const double h_fd = rc.params.contains("ae")
                            ? rc.params.at("ae").value("h_fd", rc.grid.spacing)
                            : rc.grid.spacing;
    const double tau_fd = rc.params.contains("ae")
                              ? rc.params.at("ae").value("tau_fd", 0.1)
                              : 0.1;
    const double min_frac = rc.params.contains("ae")
                                ? rc.params.at("ae").value("min_fraction", 0.95)
                                : 0.95;
    const auto rep = ae_subsolution_check(u, rc.ham, rc.group, probes, h_fd, tau_fd);
    if (rep.fraction_passed < min_frac) failed = true;
    report["ae"] = {{"evaluated", rep.evaluated},
                    {"skipped", rep.skipped},
                    {"passed", rep.passed},
                    {"fraction_passed", rep.fraction_passed},
                    {"tau_fd", rep.tau_fd},
                    {"worst_value", rep.worst_value}};
  }
  if (std::find(checks.begin(), checks.end(), "lipschitz") != checks.end()) {
    Rng rng(subseed(rc.seed, "verify-pairs"));
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    const int count = rc.params.value("lipschitz_pairs", 20);
    while (static_cast<int>(pairs.size()) < count) {
      const auto a = sample_inside_node(g_omega, rng, 0.8);
      const auto b = sample_inside_node(g_omega, rng, 0.8);
      if (a != b) pairs.emplace_back(a, b);
    }
    const auto rep = lipschitz_vs_optical(u, g_omega, rc.ham, pairs);
    if (!rep.passed) failed = true;
    report["lipschitz"] = {{"pairs", rep.pairs},
                           {"violations", rep.violations},
                           {"tol", rep.tol},
                           {"worst_excess", rep.worst_excess}};
  }
  report["bcc"] = bcc_to_json(setup.graph, sol.bcc);
  report["solve_status"] = sol.status;

  write_json(join_path(rc.out_dir, "verify.json"), report);
  out.files.push_back("verify.json");
  out.summary = {{"probes", probes.size()}, {"failed", failed}};
  if (failed) {
    out.status = 1;
    out.failure = "verify: a requested classification failed";
  }
  return out;
}

/// Boundary data for the comparison runs: pointwise minima of scaled reverse
/// cones anchored at interior points. Such data always satisfies the
/// compatibility condition; taking a subset of the cones and a nonnegative
/// shift produces data ordered above the original.
struct ConePool {
  std::vector<std::vector<double>> cone_values;  ///< per cone, per shell index
  std::vector<double> lambda;
  std::vector<double> offset;
};

inline ConePool make_cone_pool(const HorizontalGraph& g, const Hamiltonian& K,
                               const std::vector<std::int64_t>& shell, int cones,
                               Rng& rng, double lambda_lo = 0.3, double lambda_hi = 0.9) {
  ConePool pool;
  for (int k = 0; k < cones; ++k) {
    const std::int64_t p = taskdetail::sample_inside_node(g, rng, 0.5);
    const double lam = rng.uniform(lambda_lo, lambda_hi);
    const double off = rng.uniform(-0.2, 0.2);
    DistanceOptions opts;
    opts.kind = MetricKind::OpticalLength;
    opts.ham = &K;
    opts.dir = EdgeDir::Bwd;
    const auto f = shortest_distances(g, {{p, 0.0}}, opts);
    std::vector<double> vals(shell.size());
    for (std::size_t i = 0; i < shell.size(); ++i) vals[i] = f.at(shell[i]);
    pool.cone_values.push_back(std::move(vals));
    pool.lambda.push_back(lam);
    pool.offset.push_back(off);
  }
  return pool;
}

inline std::vector<double> cone_mix(const ConePool& pool, const std::vector<int>& subset,
                                    double shift, std::size_t count) {
  std::vector<double> g(count, kInf);
  for (int k : subset)
    for (std::size_t i = 0; i < count; ++i)
      g[i] = std::min(g[i], pool.lambda[static_cast<std::size_t>(k)] *
                                    pool.cone_values[static_cast<std::size_t>(k)][i] +
                                pool.offset[static_cast<std::size_t>(k)]);
  for (auto& v : g) v += shift;
  return g;
}

inline TaskOutcome run_compare_task(const RunConfig& rc) {
  using namespace taskdetail;
  TaskOutcome out;
  const auto setup = make_solve_setup(rc, rc.grid.spacing);
  const auto shell = region_shell(setup.graph, rc.omega);

  BuildOptions bopts;
  bopts.directions = rc.grid.directions;
  const auto g_omega = build_graph(rc.group, rc.omega, rc.grid.spacing, bopts);

  Rng rng(subseed(rc.seed, "compare"));
  const int pair_count = rc.params.value("pair_count", 10);
  const int cones = rc.params.value("cones", 3);
  const double drop_p = rc.params.value("drop_probability", 0.4);
  const auto pool = make_cone_pool(setup.graph, setup.K, shell, cones, rng);

  SolveOptions sopts;
  sopts.check_bcc = rc.params.value("check_bcc", true);
  sopts.bcc_max_sources = rc.params.value("bcc_max_sources", 16);
  sopts.check_edges = false;

  auto solve_with = [&](const std::vector<double>& gv) {
    BoundaryDatum d;
    d.nodes = shell;
    d.values = gv;
    return solve_dirichlet(setup.graph, setup.K, d, sopts);
  };

  json records = json::array();
  bool any_fail = false;
  for (int i = 0; i < pair_count; ++i) {
    std::vector<int> full(cones);
    for (int k = 0; k < cones; ++k) full[k] = k;
    std::vector<int> subset;
    for (int k = 0; k < cones; ++k)
      if (rng.unit() >= drop_p) subset.push_back(k);
    if (subset.empty()) subset.push_back(static_cast<int>(rng.below(cones)));
    const double shift = rng.uniform(0.0, 0.5);

    const auto g1 = cone_mix(pool, full, 0.0, shell.size());
    const auto g2 = cone_mix(pool, subset, shift, shell.size());
    const auto s1 = solve_with(g1);
    const auto s2 = solve_with(g2);

    ScalarField u, v;
    u.lat = g_omega.lat;
    u.values = transfer_values(setup.graph, s1.value, g_omega);
    u.valid = g_omega.inside;
    v.lat = g_omega.lat;
    v.values = transfer_values(setup.graph, s2.value, g_omega);
    v.valid = g_omega.inside;

    const auto rep = comparison_harness(rc.ham, g_omega, u, v);
    any_fail = any_fail || !rep.passed;
    records.push_back({{"pair", i},
                       {"subset_size", subset.size()},
                       {"shift", shift},
                       {"status", rep.status},
                       {"worst_boundary_excess", rep.worst_boundary_excess},
                       {"worst_interior_excess", rep.worst_interior_excess},
                       {"tol", rep.tol},
                       {"bcc_1", s1.bcc.satisfied},
                       {"bcc_2", s2.bcc.satisfied}});
  }
  write_json(join_path(rc.out_dir, "compare.json"),
             {{"pairs", records}, {"cones", cones}});
  out.files.push_back("compare.json");
  out.summary = {{"pairs", pair_count}, {"failed", any_fail}};
  if (any_fail) {
    out.status = 1;
    out.failure = "compare: comparison violated on a pair";
  }
  return out;
}

inline TaskOutcome run_stability_task(const RunConfig& rc) {
  using namespace taskdetail;
  TaskOutcome out;
  const auto setup = make_solve_setup(rc, rc.grid.spacing);
  const auto shell = region_shell(setup.graph, rc.omega);
  const auto datum = datum_from_params(rc, setup.graph, shell);

  std::vector<Hamiltonian> seq;
  for (const auto& zj : cfg::need(rc.params, "sequence", "stability")) {
    Hamiltonian h = Hamiltonian::uniform(rc.ham.alpha, cfg::zset_from_json(zj, rc.group.m));
    seq.push_back(extend(h.restricted_to(rc.omega), rc.omega));
  }
  Hamiltonian limit = setup.K;
  if (rc.params.contains("limit")) {
    Hamiltonian h = Hamiltonian::uniform(rc.ham.alpha,
                                         cfg::zset_from_json(rc.params.at("limit"), rc.group.m));
    limit = extend(h.restricted_to(rc.omega), rc.omega);
  }

  Rng rng(subseed(rc.seed, "stability"));
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  const int pair_count = rc.params.value("pair_count", 8);
  while (static_cast<int>(pairs.size()) < pair_count) {
    const auto a = sample_inside_node(setup.graph, rng, 0.6);
    const auto b = sample_inside_node(setup.graph, rng, 0.6);
    if (a != b) pairs.emplace_back(a, b);
  }

  const auto radii = radii_from_params(rc.params, 8.0 * rc.grid.spacing);
  double r_max = radii[0];
  for (double r : radii) r_max = std::max(r_max, r);
  const auto probes = sample_probes(rc.group, rc.omega, rng,
                                    rc.params.value("probe_count", 3),
                                    rc.params.value("probe_shrink", 0.3), r_max,
                                    2.0 * rc.grid.spacing);

  const auto rep = stability_harness(setup.graph, seq, limit, datum, pairs, probes, radii);

  json jdev = {{"pair_deviation", rep.pair_deviation},
               {"node_deviation", rep.node_deviation},
               {"pair_monotone", rep.pair_monotone},
               {"node_monotone", rep.node_monotone},
               {"limit_solution_ok", rep.limit_solution_ok},
               {"passed", rep.passed}};
  json probes_json = json::array();
  for (const auto& r : rep.limit_probes) probes_json.push_back(monge_record_to_json(r));
  jdev["limit_probes"] = probes_json;

  bool failed = !rep.passed;
  if (rc.params.contains("max_last_over_first") && !rep.pair_deviation.empty()) {
    const double cap = rc.params.at("max_last_over_first").get<double>();
    const double pr = rep.pair_deviation.back() / rep.pair_deviation.front();
    const double nr = rep.node_deviation.back() / rep.node_deviation.front();
    jdev["pair_ratio"] = pr;
    jdev["node_ratio"] = nr;
    if (pr > cap || nr > cap) failed = true;
  }

  write_json(join_path(rc.out_dir, "stability.json"), jdev);
  out.files.push_back("stability.json");
  out.summary = {{"members", seq.size()}, {"failed", failed}};
  if (failed) {
    out.status = 1;
    out.failure = "stability: deviations grew or the limit failed to verify";
  }
  return out;
}

inline TaskOutcome run_probe_task(const RunConfig& rc) {
  using namespace taskdetail;
  TaskOutcome out;
  const auto raw_pairs =
      cfg::need(rc.params, "pairs", "probe").get<std::vector<std::vector<Point>>>();
  std::vector<std::pair<Point, Point>> pairs;
  for (const auto& pr : raw_pairs) {
    if (pr.size() != 2) throw ConfigError("probe: each pair needs two points");
    pairs.emplace_back(pr[0], pr[1]);
  }
  std::vector<double> spacings =
      rc.params.value("spacings", std::vector<double>{rc.grid.spacing});
  const MetricKind kind = kind_from_string(rc.params.value("kind", std::string("cc")));

  const auto table = convergence_probe(rc.group, rc.omega, &rc.ham, pairs, spacings,
                                       rc.grid.directions, kind);

  {
    auto os = detail::open_out(join_path(rc.out_dir, "probe.csv"));
    os << "pair,spacing,d_graph,d_koranyi,d_euclid\n";
    for (const auto& r : table.rows)
      os << r.pair << "," << fmt_g17(r.spacing) << "," << fmt_g17(r.d_graph) << ","
         << fmt_g17(r.d_koranyi) << "," << fmt_g17(r.d_euclid) << "\n";
    out.files.push_back("probe.csv");
  }

  json j = {{"spacings", table.spacings},
            {"slope_per_spacing", table.slope_per_spacing},
            {"stabilization_flagged", table.stabilization_flagged}};
  bool failed = false;
  if (rc.params.contains("expect_slope")) {
    const auto band = rc.params.at("expect_slope").get<std::vector<double>>();
    if (band.size() != 2) throw ConfigError("probe: expect_slope needs [lo, hi]");
    const double slope = table.slope_per_spacing.back();
    j["finest_slope"] = slope;
    if (slope < band[0] || slope > band[1]) failed = true;
  }
  write_json(join_path(rc.out_dir, "probe.json"), j);
  out.files.push_back("probe.json");
  out.summary = j;
  if (failed) {
    out.status = 1;
    out.failure = "probe: scaling slope outside the expected band";
  }
  return out;
}

/// Validation gate the CLI runs before any task: the Hamiltonian's sandwich
/// is probed at 64 sampled domain points.
inline ValidationReport validate_config(const RunConfig& rc) {
  Rng rng(subseed(rc.seed, "validate"));
  std::vector<Point> samples;
  for (int i = 0; i < 64; ++i)
    samples.push_back(taskdetail::sample_in_domain(rc.omega, rng, 1.0));
  return validate_H(rc.ham, samples, rc.group.m);
}

inline TaskOutcome run_task(const RunConfig& rc) {
  std::filesystem::create_directories(rc.out_dir);
  if (rc.task == "distance") return run_distance_task(rc);
  if (rc.task == "solve") return run_solve_task(rc);
  if (rc.task == "verify") return run_verify_task(rc);
  if (rc.task == "compare") return run_compare_task(rc);
  if (rc.task == "stability") return run_stability_task(rc);
  if (rc.task == "probe") return run_probe_task(rc);
  throw ConfigError("config: unknown task \"" + rc.task + "\"");
}

} // namespace subhj
