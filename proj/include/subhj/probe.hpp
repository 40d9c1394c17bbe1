#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "subhj/carnot.hpp"
#include "subhj/distance.hpp"
#include "subhj/domain.hpp"
#include "subhj/graph.hpp"
#include "subhj/util.hpp"

namespace subhj {

struct ProbeRow {
  int pair = 0;
  double spacing = 0.0;
  double d_graph = 0.0;
  double d_koranyi = 0.0;
  double d_euclid = 0.0;
};

struct ProbeTable {
  std::vector<ProbeRow> rows;
  std::vector<std::uint8_t> stabilization_flagged;  ///< per pair
  std::vector<double> slope_per_spacing;  ///< log d_graph vs log d_euclid over pairs
  std::vector<double> spacings;
};

/// Distances for each pair across a spacing ladder, with the homogeneous-norm
/// and Euclidean references. Pairs sharing a source share one run per spacing.
/// A pair is flagged when |d(h_next) - d(h)| fails to shrink down the ladder.
inline ProbeTable convergence_probe(const GroupSpec& group, const DomainSpec& dom,
                                    const Hamiltonian* ham,
                                    const std::vector<std::pair<Point, Point>>& pairs,
                                    const std::vector<double>& spacings,
                                    int directions = 16,
                                    MetricKind kind = MetricKind::CarnotCaratheodory) {
  if (spacings.size() < 1) throw std::invalid_argument("convergence_probe: no spacings");
  for (std::size_t i = 1; i < spacings.size(); ++i)
    if (spacings[i] >= spacings[i - 1])
      throw std::invalid_argument("convergence_probe: spacings must decrease");
  if (pairs.empty()) throw std::invalid_argument("convergence_probe: no pairs");

  ProbeTable table;
  table.spacings = spacings;
  std::vector<std::vector<double>> per_pair(pairs.size());

  for (double h : spacings) {
    BuildOptions bopts;
    bopts.directions = directions;
    bopts.check_connectivity = false;
    const auto g = build_graph(group, dom, h, bopts);

    std::map<std::int64_t, std::vector<std::size_t>> by_source;
    std::vector<std::int64_t> pair_src(pairs.size()), pair_dst(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      pair_src[i] = g.snap_inside(pairs[i].first);
      pair_dst[i] = g.snap_inside(pairs[i].second);
      if (pair_src[i] < 0 || pair_dst[i] < 0)
        throw std::domain_error("convergence_probe: pair snaps outside the domain");
      by_source[pair_src[i]].push_back(i);
    }

    std::vector<double> dval(pairs.size(), kInf);
    for (const auto& [src, idxs] : by_source) {
      DistanceOptions opts;
      opts.kind = kind;
      opts.ham = ham;
      opts.dir = EdgeDir::Fwd;
      for (std::size_t i : idxs) opts.stop_nodes.push_back(pair_dst[i]);
      const auto f = shortest_distances(g, {{src, 0.0}}, opts);
      for (std::size_t i : idxs) dval[i] = f.at(pair_dst[i]);
    }

    std::vector<double> le, lg;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      ProbeRow row;
      row.pair = static_cast<int>(i);
      row.spacing = h;
      row.d_graph = dval[i];
      row.d_koranyi = koranyi_dist(group, pairs[i].first, pairs[i].second);
      double e2 = 0.0;
      for (int a = 0; a < group.n; ++a) e2 += sq(pairs[i].second[a] - pairs[i].first[a]);
      row.d_euclid = std::sqrt(e2);
      table.rows.push_back(row);
      per_pair[i].push_back(row.d_graph);
      if (row.d_graph > 0.0 && row.d_graph < kInf && row.d_euclid > 0.0) {
        le.push_back(std::log(row.d_euclid));
        lg.push_back(std::log(row.d_graph));
      }
    }
    table.slope_per_spacing.push_back(le.size() >= 2 ? ls_slope(le, lg) : 0.0);
  }

  table.stabilization_flagged.assign(pairs.size(), 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& v = per_pair[i];
    for (std::size_t j = 2; j < v.size(); ++j) {
      const double d1 = std::fabs(v[j - 1] - v[j - 2]);
      const double d2 = std::fabs(v[j] - v[j - 1]);
      if (d2 > d1) table.stabilization_flagged[i] = 1;
    }
  }
  return table;
}

} // namespace subhj
