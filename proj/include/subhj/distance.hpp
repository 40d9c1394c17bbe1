#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "subhj/graph.hpp"
#include "subhj/hamiltonian.hpp"
#include "subhj/util.hpp"

namespace subhj {

enum class MetricKind {
  CarnotCaratheodory,  ///< edge weight = move duration (unit-speed horizontal time)
  OpticalLength,       ///< edge weight = sigma*(midpoint, control) * duration
  Koranyi,             ///< no paths: the homogeneous-norm formula, for comparisons
};

struct Source {
  std::int64_t node = -1;
  double offset = 0.0;  ///< added to every distance through this source; may be negative
};

struct DistanceOptions {
  MetricKind kind = MetricKind::CarnotCaratheodory;
  const Hamiltonian* ham = nullptr;  ///< required for OpticalLength
  EdgeDir dir = EdgeDir::Fwd;        ///< Fwd: d(source -> x); Bwd: d(x -> source)
  double bound = kInf;               ///< stop expanding past this value
  std::int64_t stop_node = -1;       ///< stop once this node is settled
  std::vector<std::int64_t> stop_nodes;  ///< stop once all of these are settled
  bool with_predecessors = false;
};

struct DistanceField {
  MetricKind kind = MetricKind::CarnotCaratheodory;
  EdgeDir dir = EdgeDir::Fwd;
  double bound = kInf;
  std::vector<double> value;        ///< per lattice id; kInf = not reached
  std::vector<std::int64_t> pred;   ///< empty unless requested; -1 = none
  std::int64_t settled = 0;
  std::uint64_t relaxations = 0;

  double at(std::int64_t id) const { return value[static_cast<std::size_t>(id)]; }
  bool reached(std::int64_t id) const { return at(id) < kInf; }
};

/// Label-setting shortest distances over the horizontal graph.
///
/// Seeds carry additive offsets, so one run evaluates expressions of the form
/// min over seeds of (offset + distance). Offsets may be negative; edge
/// weights are nonnegative, which keeps the label-setting order valid.
/// Heap ties break on the node index, making the settle order deterministic.
inline DistanceField shortest_distances(const HorizontalGraph& g,
                                        const std::vector<Source>& sources,
                                        const DistanceOptions& opts = {}) {
  if (opts.kind == MetricKind::OpticalLength && opts.ham == nullptr)
    throw std::invalid_argument("shortest_distances: optical length needs a Hamiltonian");
  if (sources.empty()) throw std::invalid_argument("shortest_distances: no sources");

  DistanceField f;
  f.kind = opts.kind;
  f.dir = opts.dir;
  f.bound = opts.bound;
  f.value.assign(static_cast<std::size_t>(g.lat.total()), kInf);
  if (opts.with_predecessors) f.pred.assign(f.value.size(), -1);

  if (opts.kind == MetricKind::Koranyi) {
    for (const auto& s : sources) {
      if (s.node < 0 || s.node >= g.lat.total() || !g.is_inside(s.node))
        throw std::invalid_argument("shortest_distances: source is not a graph node");
      const Point sp = g.node_point(s.node);
      for (std::int64_t id = 0; id < g.lat.total(); ++id) {
        if (!g.is_inside(id)) continue;
        const double v = s.offset + koranyi_dist(g.group, sp, g.node_point(id));
        auto& slot = f.value[static_cast<std::size_t>(id)];
        if (v < slot) slot = v;
      }
    }
    f.settled = g.node_count;
    return f;
  }

  struct Entry {
    double val;
    std::int64_t node;
    bool operator>(const Entry& o) const {
      if (val != o.val) return val > o.val;
      return node > o.node;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

  for (const auto& s : sources) {
    if (s.node < 0 || s.node >= g.lat.total() || !g.is_inside(s.node))
      throw std::invalid_argument("shortest_distances: source is not a graph node");
    auto& slot = f.value[static_cast<std::size_t>(s.node)];
    if (s.offset < slot) {
      slot = s.offset;
      heap.push({s.offset, s.node});
    }
  }

  std::vector<double> neg_controls;
  const int m = g.group.m;
  if (opts.kind == MetricKind::OpticalLength) {
    neg_controls.resize(static_cast<std::size_t>(g.st.directions()) * m);
    for (int k = 0; k < g.st.directions(); ++k)
      for (int i = 0; i < m; ++i)
        neg_controls[static_cast<std::size_t>(k) * m + i] = -g.st.controls[k][i];
  }
  HVec nc(m);
  Point mid(g.group.n);
  std::int64_t iu[kMaxDims], iv[kMaxDims];
  double pu[kMaxDims], pv[kMaxDims];

  std::unordered_set<std::int64_t> awaiting(opts.stop_nodes.begin(),
                                            opts.stop_nodes.end());

  std::vector<std::uint8_t> done(f.value.size(), 0);
  while (!heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    if (done[static_cast<std::size_t>(top.node)]) continue;
    if (top.val > f.value[static_cast<std::size_t>(top.node)]) continue;
    if (top.val > opts.bound) break;
    done[static_cast<std::size_t>(top.node)] = 1;
    ++f.settled;
    if (top.node == opts.stop_node) break;
    if (!awaiting.empty()) {
      awaiting.erase(top.node);
      if (awaiting.empty() && !opts.stop_nodes.empty()) break;
    }

    g.decode(top.node, iu);
    g.point_of(iu, pu);
    g.for_each_neighbor(top.node, opts.dir, [&](std::int64_t v, int k) {
      ++f.relaxations;
      double w;
      if (opts.kind == MetricKind::CarnotCaratheodory) {
        w = g.st.durations[k];
      } else {
        g.decode(v, iv);
        g.point_of(iv, pv);
        for (int a = 0; a < g.group.n; ++a) mid[a] = 0.5 * (pu[a] + pv[a]);
        for (int i = 0; i < m; ++i) nc[i] = neg_controls[static_cast<std::size_t>(k) * m + i];
        // the support of a unit direction lies in [1/alpha, alpha]; clamping
        // removes the rounding wobble of renormalized controls so edge costs
        // inherit the sandwich exactly
        const double s = std::clamp(zset_support(opts.ham->zset_at(mid), nc),
                                    1.0 / opts.ham->alpha, opts.ham->alpha);
        w = s * g.st.durations[k];
      }
      const double cand = top.val + w;
      auto& slot = f.value[static_cast<std::size_t>(v)];
      if (cand < slot) {
        slot = cand;
        if (!f.pred.empty()) f.pred[static_cast<std::size_t>(v)] = top.node;
        heap.push({cand, v});
      }
    });
  }
  return f;
}

inline DistanceField distances_from(const HorizontalGraph& g, std::int64_t node,
                                    DistanceOptions opts = {}) {
  opts.dir = EdgeDir::Fwd;
  return shortest_distances(g, {{node, 0.0}}, opts);
}

/// Distance from a to b (one run, stops once b settles).
inline double dist_between(const HorizontalGraph& g, std::int64_t a, std::int64_t b,
                           DistanceOptions opts = {}) {
  opts.dir = EdgeDir::Fwd;
  opts.stop_node = b;
  if (opts.kind == MetricKind::Koranyi)
    return koranyi_dist(g.group, g.node_point(a), g.node_point(b));
  const auto f = shortest_distances(g, {{a, 0.0}}, opts);
  return f.at(b);
}

/// Distance between arbitrary points, snapped to their nearest graph nodes.
/// Not symmetric for optical length.
inline double dist_point(const HorizontalGraph& g, const Point& x, const Point& y,
                         DistanceOptions opts = {}) {
  const std::int64_t a = g.snap_inside(x);
  const std::int64_t b = g.snap_inside(y);
  if (a < 0 || b < 0)
    throw std::domain_error("dist_point: point snaps outside the domain");
  return dist_between(g, a, b, opts);
}

/// Node sequence of an optimal route ending (Fwd) or starting (Bwd) at `node`,
/// oriented along forward edges. Requires a field built with predecessors.
inline std::vector<std::int64_t> extract_path(const DistanceField& f, std::int64_t node) {
  if (f.pred.empty()) throw std::invalid_argument("extract_path: field has no predecessors");
  if (!f.reached(node)) throw std::invalid_argument("extract_path: node was not reached");
  std::vector<std::int64_t> path;
  for (std::int64_t u = node; u >= 0; u = f.pred[static_cast<std::size_t>(u)]) {
    path.push_back(u);
    if (path.size() > f.value.size())
      throw std::runtime_error("extract_path: predecessor cycle");
  }
  if (f.dir == EdgeDir::Fwd) std::reverse(path.begin(), path.end());
  return path;
}

/// Weight of the edge a -> b through stencil entry k, under the field metric.
inline double edge_weight(const HorizontalGraph& g, const Hamiltonian* ham,
                          MetricKind kind, std::int64_t a, std::int64_t b, int k) {
  if (kind == MetricKind::CarnotCaratheodory) return g.st.durations[k];
  if (ham == nullptr) throw std::invalid_argument("edge_weight: optical length needs a Hamiltonian");
  const Point mid = g.edge_midpoint(a, b);
  const double s =
      std::clamp(ham->sigma(mid, g.st.controls[k]), 1.0 / ham->alpha, ham->alpha);
  return s * g.st.durations[k];
}

} // namespace subhj
