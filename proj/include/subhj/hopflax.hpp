#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subhj/distance.hpp"
#include "subhj/graph.hpp"
#include "subhj/hamiltonian.hpp"
#include "subhj/grid.hpp"

namespace subhj {

struct BoundaryDatum {
  std::vector<std::int64_t> nodes;
  std::vector<double> values;
  std::string provenance = "analytic";

  std::size_t size() const { return nodes.size(); }
};

/// Nodes of `g` lying in `sub` with an axis-adjacent lattice position outside
/// `sub` (or outside the lattice): the discrete shell of a subregion.
inline std::vector<std::int64_t> region_shell(const HorizontalGraph& g,
                                              const DomainSpec& sub) {
  std::vector<std::int64_t> out;
  std::int64_t ix[kMaxDims], jx[kMaxDims];
  Point p(g.group.n);
  for (std::int64_t id = 0; id < g.lat.total(); ++id) {
    if (!g.is_inside(id)) continue;
    if (!sub.contains(g.node_point(id))) continue;
    g.decode(id, ix);
    bool shell = false;
    for (int a = 0; a < g.lat.dims() && !shell; ++a) {
      for (int d = -1; d <= 1 && !shell; d += 2) {
        for (int b = 0; b < g.lat.dims(); ++b) jx[b] = ix[b];
        jx[a] += d;
        if (jx[a] < 0 || jx[a] >= g.lat.count[a]) {
          shell = true;
          continue;
        }
        for (int b = 0; b < g.lat.dims(); ++b)
          p[b] = static_cast<double>(g.lat.base[b] + jx[b]) * g.lat.spacing[b];
        if (!sub.contains(p)) shell = true;
      }
    }
    if (shell) out.push_back(id);
  }
  return out;
}

inline BoundaryDatum make_boundary_datum(const HorizontalGraph& g,
                                         const std::vector<std::int64_t>& shell,
                                         const std::function<double(const Point&)>& fn,
                                         std::int64_t stride = 1) {
  if (stride < 1) throw std::invalid_argument("boundary datum: stride must be >= 1");
  BoundaryDatum d;
  for (std::size_t i = 0; i < shell.size(); i += static_cast<std::size_t>(stride)) {
    d.nodes.push_back(shell[i]);
    d.values.push_back(fn(g.node_point(shell[i])));
  }
  if (d.nodes.empty()) throw std::invalid_argument("boundary datum: empty boundary");
  return d;
}

inline BoundaryDatum make_boundary_datum(const HorizontalGraph& g,
                                         const std::function<double(const Point&)>& fn,
                                         std::int64_t stride = 1) {
  return make_boundary_datum(g, g.boundary_nodes(), fn, stride);
}

struct BccReport {
  bool checked = false;
  bool satisfied = true;
  double tolerance = 0.0;
  double worst_violation = 0.0;  ///< max of g(x) - g(y) - d(x,y); positive = violated
  std::int64_t worst_from = -1;
  std::int64_t worst_to = -1;
  int sources_checked = 0;
};

/// Checks the boundary compatibility condition
///   g(x) - g(y) <= d(x, y) + tol   for boundary points x, y,
/// with d the optical-length distance of the given Hamiltonian on the graph.
/// Sources are subsampled evenly when the datum is large; each run is bounded
/// by the largest value difference it could possibly violate.
inline BccReport check_bcc(const HorizontalGraph& g, const Hamiltonian& ham,
                           const BoundaryDatum& datum, double tolerance,
                           int max_sources = 48) {
  BccReport rep;
  rep.checked = true;
  rep.tolerance = tolerance;
  const std::size_t n = datum.size();
  if (n < 2) return rep;
  double gmin = datum.values[0];
  for (double v : datum.values) gmin = std::min(gmin, v);

  const std::size_t step =
      std::max<std::size_t>(1, (n + static_cast<std::size_t>(max_sources) - 1) /
                                   static_cast<std::size_t>(max_sources));
  for (std::size_t i = 0; i < n; i += step) {
    const std::int64_t x = datum.nodes[i];
    const double gx = datum.values[i];
    if (gx - gmin <= tolerance && gx - gmin <= 0.0) {
      ++rep.sources_checked;
      continue;  // gx is the minimum; no pair from x can violate
    }
    DistanceOptions opts;
    opts.kind = MetricKind::OpticalLength;
    opts.ham = &ham;
    opts.dir = EdgeDir::Fwd;
    opts.bound = gx - gmin - tolerance + ham.alpha * g.h;
    if (opts.bound <= 0.0) {
      ++rep.sources_checked;
      continue;
    }
    const auto d = shortest_distances(g, {{x, 0.0}}, opts);
    ++rep.sources_checked;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dv = d.at(datum.nodes[j]);
      const double gap = gx - datum.values[j] - (dv < kInf ? dv : kInf);
      if (gap > rep.worst_violation) {
        rep.worst_violation = gap;
        rep.worst_from = x;
        rep.worst_to = datum.nodes[j];
      }
    }
  }
  rep.satisfied = rep.worst_violation <= tolerance;
  return rep;
}

struct SolveOptions {
  bool check_bcc = true;
  int bcc_max_sources = 48;
  bool check_edges = true;   ///< verify values are 1-Lipschitz along graph edges
  bool with_predecessors = false;
};

struct SolutionField {
  std::vector<double> value;  ///< per lattice id of the solve graph; kInf outside
  DistanceField raw;
  BccReport bcc;
  std::string status;                  ///< "ok" or "compatibility violated"
  double worst_boundary_gap = 0.0;     ///< max of g(y) - w(y) over the datum
  bool boundary_attained = true;
  double worst_edge_excess = 0.0;      ///< max of w(u) - w(v) - cost(u,v) over edges
  double cell_cost = 0.0;
};

/// Hands the solved values to the verifier as an interpolable scalar field.
inline ScalarField restrict_to_monge_data(const SolutionField& sol,
                                          const HorizontalGraph& g) {
  ScalarField f;
  f.lat = g.lat;
  f.values = sol.value;
  f.valid = g.inside;
  return f;
}

/// Dirichlet problem via the optical-length formula
///   w(x) = min over boundary nodes y of [ d(x, y) + g(y) ],
/// evaluated with one multi-seed run expanding backward from the datum.
/// A compatibility violation is reported but does not stop the solve.
inline SolutionField solve_dirichlet(const HorizontalGraph& g, const Hamiltonian& ham,
                                     const BoundaryDatum& datum,
                                     const SolveOptions& opts = {}) {
  if (datum.nodes.empty()) throw std::invalid_argument("solve_dirichlet: empty datum");
  SolutionField sol;
  sol.cell_cost = g.cell_cost(ham.alpha);

  if (opts.check_bcc)
    sol.bcc = check_bcc(g, ham, datum, 2.0 * sol.cell_cost, opts.bcc_max_sources);
  sol.status = (!opts.check_bcc || sol.bcc.satisfied)
                   ? "ok"
                   : "compatibility violated: w may not attain g";

  std::vector<Source> seeds(datum.size());
  for (std::size_t i = 0; i < datum.size(); ++i)
    seeds[i] = {datum.nodes[i], datum.values[i]};
  DistanceOptions dopts;
  dopts.kind = MetricKind::OpticalLength;
  dopts.ham = &ham;
  dopts.dir = EdgeDir::Bwd;
  dopts.with_predecessors = opts.with_predecessors;
  sol.raw = shortest_distances(g, seeds, dopts);
  sol.value = sol.raw.value;

  for (std::size_t i = 0; i < datum.size(); ++i) {
    const double gap = datum.values[i] - sol.value[static_cast<std::size_t>(datum.nodes[i])];
    sol.worst_boundary_gap = std::max(sol.worst_boundary_gap, gap);
  }
  sol.boundary_attained = sol.worst_boundary_gap <= 2.0 * sol.cell_cost;

  if (opts.check_edges) {
    std::int64_t iu[kMaxDims];
    double pu[kMaxDims], pv[kMaxDims];
    Point mid(g.group.n);
    HVec nc(g.group.m);
    for (std::int64_t u = 0; u < g.lat.total(); ++u) {
      if (!g.is_inside(u) || sol.value[static_cast<std::size_t>(u)] >= kInf) continue;
      g.decode(u, iu);
      g.point_of(iu, pu);
      g.for_each_neighbor(u, EdgeDir::Fwd, [&](std::int64_t v, int k) {
        if (sol.value[static_cast<std::size_t>(v)] >= kInf) return;
        std::int64_t iv[kMaxDims];
        g.decode(v, iv);
        g.point_of(iv, pv);
        for (int a = 0; a < g.group.n; ++a) mid[a] = 0.5 * (pu[a] + pv[a]);
        for (int i = 0; i < g.group.m; ++i) nc[i] = -g.st.controls[k][i];
        const double s = std::clamp(zset_support(ham.zset_at(mid), nc),
                                    1.0 / ham.alpha, ham.alpha);
        const double w = s * g.st.durations[k];
        const double excess = sol.value[static_cast<std::size_t>(u)] -
                              sol.value[static_cast<std::size_t>(v)] - w;
        sol.worst_edge_excess = std::max(sol.worst_edge_excess, excess);
      });
    }
  }
  return sol;
}

/// Copies node values from one graph to another whose lattice nodes coincide
/// geometrically (both lattices are anchored at the origin, so equal spacing
/// means coinciding coordinates). Every in-domain node of `to` must be an
/// in-domain node of `from`.
inline std::vector<double> transfer_values(const HorizontalGraph& from,
                                           const std::vector<double>& vals,
                                           const HorizontalGraph& to) {
  if (from.group.n != to.group.n)
    throw std::invalid_argument("transfer_values: dimension mismatch");
  for (int a = 0; a < from.group.n; ++a)
    if (from.lat.spacing[a] != to.lat.spacing[a])
      throw std::invalid_argument("transfer_values: lattices have different spacing");
  std::vector<double> out(static_cast<std::size_t>(to.lat.total()), kInf);
  std::int64_t ix[kMaxDims], jx[kMaxDims];
  for (std::int64_t id = 0; id < to.lat.total(); ++id) {
    if (!to.is_inside(id)) continue;
    to.decode(id, ix);
    bool ok = true;
    for (int a = 0; a < to.group.n && ok; ++a) {
      jx[a] = to.lat.base[a] + ix[a] - from.lat.base[a];
      ok = jx[a] >= 0 && jx[a] < from.lat.count[a];
    }
    if (!ok) throw std::invalid_argument("transfer_values: node outside the source lattice");
    const std::int64_t src = from.encode(jx);
    if (!from.is_inside(src))
      throw std::invalid_argument("transfer_values: node not in the source domain");
    out[static_cast<std::size_t>(id)] = vals[static_cast<std::size_t>(src)];
  }
  return out;
}

} // namespace subhj
