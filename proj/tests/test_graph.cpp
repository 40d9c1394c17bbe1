#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include "subhj/graph.hpp"
#include "subhj/rng.hpp"

using namespace subhj;

namespace {

HorizontalGraph small_heis(double h = 0.25, int directions = 8) {
  BuildOptions opts;
  opts.directions = directions;
  return build_graph(GroupSpec::heisenberg1(),
                     DomainSpec::box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}), h, opts);
}

} // namespace

TEST_CASE("stencil sizes and unit controls per direction family") {
  for (int dirs : {4, 8, 16, 32}) {
    const auto st = make_stencil(2, dirs, 0.125);
    CHECK(static_cast<int>(st.offsets.size()) == dirs);
    for (std::size_t k = 0; k < st.offsets.size(); ++k) {
      double n2 = 0.0, p2 = 0.0;
      for (int i = 0; i < 2; ++i) {
        n2 += st.controls[k][static_cast<std::size_t>(i)] *
              st.controls[k][static_cast<std::size_t>(i)];
        p2 += static_cast<double>(st.offsets[k][static_cast<std::size_t>(i)]) *
              static_cast<double>(st.offsets[k][static_cast<std::size_t>(i)]);
      }
      CHECK(n2 == Catch::Approx(1.0).epsilon(1e-12));
      CHECK(st.durations[k] == Catch::Approx(0.125 * std::sqrt(p2)).epsilon(1e-12));
    }
  }
  CHECK(make_stencil(1, 2, 0.1).offsets.size() == 2);
  CHECK(make_stencil(3, 6, 0.1).offsets.size() == 6);
  CHECK(make_stencil(3, 26, 0.1).offsets.size() == 26);
}

TEST_CASE("32-direction stencil moves are pairwise non-parallel") {
  const auto st = make_stencil(2, 32, 0.1);
  for (std::size_t a = 0; a < st.offsets.size(); ++a)
    for (std::size_t b = a + 1; b < st.offsets.size(); ++b) {
      const auto& p = st.offsets[a];
      const auto& q = st.offsets[b];
      const bool parallel = p[0] * q[1] - p[1] * q[0] == 0 &&
                            p[0] * q[0] + p[1] * q[1] > 0;
      CHECK_FALSE(parallel);
    }
}

TEST_CASE("unit-box abelian lattice at half spacing has nine nodes") {
  BuildOptions opts;
  opts.directions = 4;
  const auto g = build_graph(GroupSpec::abelian(2), DomainSpec::box({0.0, 0.0}, {1.0, 1.0}),
                             0.5, opts);
  CHECK(g.node_count == 9);
  CHECK(g.connected());
  CHECK(g.cell_cost(1.25) == Catch::Approx(0.625));
}

TEST_CASE("one stencil move shifts the vertical axis by the swept area") {
  const auto g = small_heis(0.25, 4);
  const std::int64_t start = g.snap_inside({0.0, 1.0, 0.0});
  REQUIRE(start >= 0);
  // flowing the first frame field from (0, 1, 0) for h lands at (h, 1, h)
  bool found = false;
  g.for_each_neighbor(start, EdgeDir::Fwd, [&](std::int64_t j, int k) {
    const auto& p = g.st.offsets[static_cast<std::size_t>(k)];
    if (p[0] == 1 && p[1] == 0) {
      const auto q = g.node_point(j);
      CHECK(q[0] == Catch::Approx(0.25));
      CHECK(q[1] == Catch::Approx(1.0));
      CHECK(q[2] == Catch::Approx(0.25));
      found = true;
    }
  });
  CHECK(found);
  // the same move from the group identity sweeps nothing
  const std::int64_t origin = g.snap_inside({0.0, 0.0, 0.0});
  g.for_each_neighbor(origin, EdgeDir::Fwd, [&](std::int64_t j, int k) {
    const auto& p = g.st.offsets[static_cast<std::size_t>(k)];
    if (p[0] == 1 && p[1] == 0) {
      const auto q = g.node_point(j);
      CHECK(q[2] == 0.0);
    }
  });
}

TEST_CASE("forward and backward edges mirror exactly") {
  const auto g = small_heis(0.25, 8);
  std::set<std::pair<std::int64_t, std::int64_t>> fwd, bwd_rev;
  for (std::int64_t i = 0; i < g.node_count; ++i) {
    if (!g.is_inside(i)) continue;
    g.for_each_neighbor(i, EdgeDir::Fwd, [&](std::int64_t j, int) { fwd.emplace(i, j); });
    g.for_each_neighbor(i, EdgeDir::Bwd, [&](std::int64_t j, int) { bwd_rev.emplace(j, i); });
  }
  CHECK(fwd == bwd_rev);
}

TEST_CASE("edges carry their stencil index in both directions") {
  const auto g = small_heis(0.25, 16);
  Rng rng(43);
  for (int t = 0; t < 200; ++t) {
    const std::int64_t i = static_cast<std::int64_t>(rng.below(g.node_count));
    if (!g.is_inside(i)) continue;
    g.for_each_neighbor(i, EdgeDir::Fwd, [&](std::int64_t j, int k) {
      bool matched = false;
      g.for_each_neighbor(j, EdgeDir::Bwd, [&](std::int64_t back, int kb) {
        if (back == i && kb == k) matched = true;
      });
      CHECK(matched);
    });
  }
}

TEST_CASE("vertical transport is the exact integer cross product") {
  const auto g = small_heis(0.125, 16);
  Rng rng(47);
  for (int t = 0; t < 500; ++t) {
    std::int64_t ifirst[2] = {static_cast<std::int64_t>(rng.below(2001)) - 1000,
                              static_cast<std::int64_t>(rng.below(2001)) - 1000};
    const auto& p = g.st.offsets[rng.below(g.st.offsets.size())];
    int sp[2] = {p[0], p[1]};
    const double cells = g.transport_cells(ifirst, sp, 0);
    CHECK(cells == static_cast<double>(ifirst[1] * sp[0] - ifirst[0] * sp[1]));
  }
}

TEST_CASE("generic step-2 transport agrees with the hard-coded heisenberg law") {
  std::vector<double> table(4, 0.0);
  table[0 * 2 * 1 + 1] = -2.0;  // c(1,2,1)
  table[1 * 2 * 1 + 0] = 2.0;   // c(2,1,1)
  const auto gen = GroupSpec::step2(2, 3, table);
  BuildOptions opts;
  opts.directions = 16;
  const auto dom = DomainSpec::box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
  const auto g1 = build_graph(GroupSpec::heisenberg1(), dom, 0.25, opts);
  const auto g2 = build_graph(gen, dom, 0.25, opts);
  REQUIRE(g1.node_count == g2.node_count);
  Rng rng(53);
  for (int t = 0; t < 300; ++t) {
    std::int64_t ifirst[2] = {static_cast<std::int64_t>(rng.below(65)) - 32,
                              static_cast<std::int64_t>(rng.below(65)) - 32};
    const auto& p = g1.st.offsets[rng.below(g1.st.offsets.size())];
    int sp[2] = {p[0], p[1]};
    CHECK(g1.transport_cells(ifirst, sp, 0) == g2.transport_cells(ifirst, sp, 0));
  }
}

TEST_CASE("interior predicates mask nodes and can disconnect the graph") {
  BuildOptions opts;
  opts.directions = 4;
  auto dom = DomainSpec::box({0.0, 0.0}, {1.0, 1.0}).with_interior("x1 < 0.4 || x1 > 0.6");
  const auto g = build_graph(GroupSpec::abelian(2), dom, 0.125, opts);
  CHECK_FALSE(g.connected());
  const std::int64_t blocked = g.lat.snap({0.5, 0.5});
  CHECK_FALSE(g.is_inside(blocked));
  CHECK(g.snap_inside({0.5, 0.5}) == -1);
  CHECK(g.snap_inside({0.25, 0.5}) >= 0);
}

TEST_CASE("domain shell detection marks the box perimeter") {
  BuildOptions opts;
  opts.directions = 4;
  const auto g = build_graph(GroupSpec::abelian(2), DomainSpec::box({0.0, 0.0}, {1.0, 1.0}),
                             0.25, opts);
  const auto shell = g.boundary_nodes();
  CHECK(shell.size() == 16);
  CHECK_FALSE(g.on_domain_shell(g.snap_inside({0.5, 0.5})));
  CHECK(g.on_domain_shell(g.snap_inside({0.0, 0.5})));
  CHECK(g.on_domain_shell(g.snap_inside({1.0, 1.0})));
}

TEST_CASE("graph cache files round-trip and reject foreign content") {
  const auto g = small_heis(0.25, 16);
  const std::string path = "graph_cache_test.bin";
  save_graph(path, g);
  const auto r = load_graph(path);
  CHECK(r.node_count == g.node_count);
  CHECK(r.h == g.h);
  CHECK(r.lat.same_geometry(g.lat));
  CHECK(r.inside == g.inside);
  CHECK(r.st.offsets == g.st.offsets);
  CHECK(r.group.describe() == g.group.describe());

  std::ofstream bad("graph_cache_bad.bin", std::ios::binary);
  bad << "NOT-A-GRAPH\n12345";
  bad.close();
  CHECK_THROWS_AS(load_graph("graph_cache_bad.bin"), std::runtime_error);
  std::remove(path.c_str());
  std::remove("graph_cache_bad.bin");
}

TEST_CASE("cache keys separate spacing, stencil, and domain") {
  const auto g = GroupSpec::heisenberg1();
  const auto d1 = DomainSpec::box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
  const auto d2 = DomainSpec::box({-1.0, -1.0, -1.0}, {1.0, 1.0, 2.0});
  const auto k = graph_cache_key(g, d1, 0.25, 16);
  CHECK(k != graph_cache_key(g, d1, 0.125, 16));
  CHECK(k != graph_cache_key(g, d1, 0.25, 8));
  CHECK(k != graph_cache_key(g, d2, 0.25, 16));
  CHECK(k == graph_cache_key(g, d1, 0.25, 16));
}

TEST_CASE("edge midpoints are orientation independent") {
  const auto g = small_heis(0.25, 16);
  Rng rng(59);
  for (int t = 0; t < 100; ++t) {
    const std::int64_t i = static_cast<std::int64_t>(rng.below(g.node_count));
    if (!g.is_inside(i)) continue;
    g.for_each_neighbor(i, EdgeDir::Fwd, [&](std::int64_t j, int) {
      const auto mab = g.edge_midpoint(i, j);
      const auto mba = g.edge_midpoint(j, i);
      for (std::size_t a = 0; a < mab.size(); ++a) CHECK(mab[a] == mba[a]);
    });
  }
}
