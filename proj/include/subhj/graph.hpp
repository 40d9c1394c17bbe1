#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "subhj/carnot.hpp"
#include "subhj/domain.hpp"
#include "subhj/grid.hpp"
#include "subhj/util.hpp"

namespace subhj {

inline constexpr int kMaxDims = 8;

/// Primitive horizontal moves. Each entry is an integer first-layer offset p;
/// the control is the unit vector p/|p| and the duration h*|p|, so one move
/// covers exactly the offset p on the first-layer lattice.
struct Stencil {
  std::vector<std::array<int, kMaxDims>> offsets;
  std::vector<HVec> controls;
  std::vector<double> durations;
  int m = 0;

  int directions() const { return static_cast<int>(offsets.size()); }
};

inline Stencil make_stencil(int m, int directions, double h) {
  if (m < 1 || m >= kMaxDims) throw std::invalid_argument("stencil: unsupported rank");
  if (directions < 2 * m)
    throw std::invalid_argument("stencil: need at least 2m directions");
  std::vector<std::vector<int>> offs;
  auto push = [&](std::initializer_list<int> v) { offs.emplace_back(v); };
  if (m == 1) {
    if (directions != 2) throw std::invalid_argument("stencil: rank 1 supports 2 directions");
    push({1});
    push({-1});
  } else if (m == 2) {
    if (directions != 4 && directions != 8 && directions != 16 && directions != 32)
      throw std::invalid_argument("stencil: rank 2 supports 4, 8, 16, or 32 directions");
    push({1, 0}); push({-1, 0}); push({0, 1}); push({0, -1});
    if (directions >= 8) {
      push({1, 1}); push({-1, 1}); push({-1, -1}); push({1, -1});
    }
    if (directions >= 16) {
      push({2, 1}); push({1, 2}); push({-1, 2}); push({-2, 1});
      push({-2, -1}); push({-1, -2}); push({1, -2}); push({2, -1});
    }
    if (directions >= 32) {
      push({3, 1}); push({3, 2}); push({2, 3}); push({1, 3});
      push({-1, 3}); push({-2, 3}); push({-3, 2}); push({-3, 1});
      push({-3, -1}); push({-3, -2}); push({-2, -3}); push({-1, -3});
      push({1, -3}); push({2, -3}); push({3, -2}); push({3, -1});
    }
  } else {
    const int full = 1;
    int pow3 = 1;
    for (int i = 0; i < m; ++i) pow3 *= 3;
    if (directions == 2 * m) {
      for (int a = 0; a < m; ++a) {
        std::vector<int> e(m, 0);
        e[a] = 1;
        offs.push_back(e);
        e[a] = -1;
        offs.push_back(e);
      }
    } else if (directions == pow3 - 1) {
      for (int code = 0; code < pow3; ++code) {
        std::vector<int> e(m);
        int c = code;
        bool zero = true;
        for (int a = 0; a < m; ++a) {
          e[a] = c % 3 - 1;
          zero = zero && e[a] == 0;
          c /= 3;
        }
        if (!zero) offs.push_back(e);
      }
    } else {
      throw std::invalid_argument("stencil: rank >= 3 supports 2m or 3^m-1 directions");
    }
    (void)full;
  }
  Stencil st;
  st.m = m;
  for (const auto& p : offs) {
    std::array<int, kMaxDims> a{};
    double n2 = 0.0;
    for (int i = 0; i < m; ++i) {
      a[i] = p[i];
      n2 += static_cast<double>(p[i]) * p[i];
    }
    const double len = std::sqrt(n2);
    HVec c(m);
    for (int i = 0; i < m; ++i) c[i] = p[i] / len;
    st.offsets.push_back(a);
    st.controls.push_back(std::move(c));
    st.durations.push_back(h * len);
  }
  return st;
}

struct BuildOptions {
  int directions = 16;
  bool check_connectivity = true;
  std::vector<double> spacing_override;  ///< per-axis; empty = layered h^j rule
};

enum class EdgeDir { Fwd, Bwd };

/// Lattice graph of horizontal moves over a domain.
///
/// Nodes are lattice points inside the domain. An edge applies one stencil
/// move: the first layer shifts by the integer offset exactly, and the
/// second-layer transport of the flow is rounded to whole lattice cells.
/// The transport of a constant-control flow depends only on the starting
/// first-layer position, which makes each move exactly invertible: the edge
/// relation enumerated backward is the reverse of the forward one (for the
/// hard-coded groups the rounded transport is computed in integer arithmetic,
/// so this holds bit for bit).
struct HorizontalGraph {
  GroupSpec group;
  DomainSpec dom;
  double h = 0.0;
  Lattice lat;
  Stencil st;
  std::vector<std::uint8_t> inside;
  std::int64_t node_count = 0;

  bool connectivity_checked = false;
  std::int64_t reachable_from_first = 0;  ///< BFS size from the first node

  bool is_inside(std::int64_t id) const { return inside[static_cast<std::size_t>(id)] != 0; }

  bool connected() const {
    return connectivity_checked && reachable_from_first == node_count;
  }

  double cell_cost(double alpha) const { return alpha * h; }

  void decode(std::int64_t id, std::int64_t* ix) const {
    for (int a = 0; a < lat.dims(); ++a) {
      ix[a] = id % lat.count[a];
      id /= lat.count[a];
    }
  }

  std::int64_t encode(const std::int64_t* ix) const {
    std::int64_t id = 0;
    for (int a = lat.dims() - 1; a >= 0; --a) id = id * lat.count[a] + ix[a];
    return id;
  }

  void point_of(const std::int64_t* ix, double* out) const {
    for (int a = 0; a < lat.dims(); ++a)
      out[a] = static_cast<double>(lat.base[a] + ix[a]) * lat.spacing[a];
  }

  /// Second-layer transport of one move, in whole lattice cells.
  /// `ifirst` holds absolute first-layer indices (base + index).
  double transport_cells(const std::int64_t* ifirst, const int* p, int l) const {
    switch (group.kind) {
      case GroupKind::Abelian:
        return 0.0;
      case GroupKind::Heisenberg1:
        return static_cast<double>(ifirst[1] * p[0] - ifirst[0] * p[1]);
      case GroupKind::GenericStep2: {
        // (x . b)_l picks up (1/2) sum_ij c(i,j,l) x_i b_j; in lattice units
        // x_i = h I_i and b_j = h p_j, and the second-layer cell is h^2
        double s = 0.0;
        for (int i = 0; i < group.m; ++i)
          for (int j = 0; j < group.m; ++j)
            s += 0.5 * group.c(i, j, l) * static_cast<double>(ifirst[i]) * p[j];
        return s;
      }
    }
    return 0.0;
  }

  /// Visits neighbors through each stencil move. Fwd: nodes this one reaches.
  /// Bwd: nodes that reach this one (enumerated by inverting each move).
  /// fn(neighbor_id, k) where k indexes the stencil entry of the forward edge.
  template <class Fn>
  void for_each_neighbor(std::int64_t id, EdgeDir dir, Fn&& fn) const {
    std::int64_t ix[kMaxDims];
    decode(id, ix);
    std::int64_t ifirst[kMaxDims];
    for (int a = 0; a < group.m; ++a) ifirst[a] = lat.base[a] + ix[a];
    const int sgn = dir == EdgeDir::Fwd ? 1 : -1;
    const int w2 = group.n - group.m;
    for (int k = 0; k < st.directions(); ++k) {
      const auto& p = st.offsets[k];
      std::int64_t jx[kMaxDims];
      bool ok = true;
      for (int a = 0; a < group.m && ok; ++a) {
        jx[a] = ix[a] + sgn * p[a];
        ok = jx[a] >= 0 && jx[a] < lat.count[a];
      }
      if (!ok) continue;
      int sp[kMaxDims];
      for (int a = 0; a < group.m; ++a) sp[a] = sgn * p[a];
      for (int l = 0; l < w2 && ok; ++l) {
        const double cells = transport_cells(ifirst, sp, l);
        const auto move = std::llround(cells);
        jx[group.m + l] = ix[group.m + l] + move;
        ok = jx[group.m + l] >= 0 && jx[group.m + l] < lat.count[group.m + l];
      }
      if (!ok) continue;
      const std::int64_t j = encode(jx);
      if (!is_inside(j)) continue;
      fn(j, k);
    }
  }

  /// Geometric midpoint of an edge, the coordinate average of its endpoints
  /// (symmetric between the two orientations by construction).
  Point edge_midpoint(std::int64_t a, std::int64_t b) const {
    std::int64_t ia[kMaxDims], ib[kMaxDims];
    decode(a, ia);
    decode(b, ib);
    double pa[kMaxDims], pb[kMaxDims];
    point_of(ia, pa);
    point_of(ib, pb);
    Point mid(lat.dims());
    for (int i = 0; i < lat.dims(); ++i) mid[i] = 0.5 * (pa[i] + pb[i]);
    return mid;
  }

  Point node_point(std::int64_t id) const { return lat.point(id); }

  /// Nearest in-domain lattice node, or -1.
  std::int64_t snap_inside(const Point& p) const {
    const std::int64_t id = lat.snap(p);
    if (id < 0 || !is_inside(id)) return -1;
    return id;
  }

  /// True when an axis-adjacent lattice position is outside the domain or
  /// outside the lattice box: the node sits on the discrete boundary shell.
  bool on_domain_shell(std::int64_t id) const {
    std::int64_t ix[kMaxDims];
    decode(id, ix);
    for (int a = 0; a < lat.dims(); ++a) {
      for (int d = -1; d <= 1; d += 2) {
        const std::int64_t v = ix[a] + d;
        if (v < 0 || v >= lat.count[a]) return true;
        std::int64_t jx[kMaxDims];
        for (int b = 0; b < lat.dims(); ++b) jx[b] = ix[b];
        jx[a] = v;
        if (!is_inside(encode(jx))) return true;
      }
    }
    return false;
  }

  /// In-domain nodes on the discrete boundary shell.
  std::vector<std::int64_t> boundary_nodes() const {
    std::vector<std::int64_t> out;
    for (std::int64_t id = 0; id < lat.total(); ++id)
      if (is_inside(id) && on_domain_shell(id)) out.push_back(id);
    return out;
  }
};

inline HorizontalGraph build_graph(const GroupSpec& group, const DomainSpec& dom,
                                   double h, const BuildOptions& opts = {}) {
  if (dom.dims() != group.n)
    throw std::invalid_argument("build_graph: domain dimension does not match the group");
  if (!(h > 0.0)) throw std::invalid_argument("build_graph: spacing must be positive");
  HorizontalGraph g;
  g.group = group;
  g.dom = dom;
  g.h = h;
  const auto spacing =
      opts.spacing_override.empty() ? layered_spacing(group, h) : opts.spacing_override;
  if (static_cast<int>(spacing.size()) != group.n)
    throw std::invalid_argument("build_graph: spacing vector dimension mismatch");
  g.lat = Lattice::covering(dom.lo, dom.hi, spacing);
  if (g.lat.total() > (std::int64_t{1} << 40))
    throw std::invalid_argument("build_graph: lattice is unreasonably large");
  g.st = make_stencil(group.m, opts.directions, h);
  g.inside.assign(static_cast<std::size_t>(g.lat.total()), 0);
  for (std::int64_t id = 0; id < g.lat.total(); ++id) {
    if (dom.contains(g.lat.point(id))) {
      g.inside[static_cast<std::size_t>(id)] = 1;
      ++g.node_count;
    }
  }
  if (g.node_count == 0) throw std::invalid_argument("build_graph: empty node set");

  if (opts.check_connectivity) {
    g.connectivity_checked = true;
    std::vector<std::uint8_t> seen(g.inside.size(), 0);
    std::vector<std::int64_t> queue;
    std::int64_t first = 0;
    while (!g.is_inside(first)) ++first;
    queue.push_back(first);
    seen[static_cast<std::size_t>(first)] = 1;
    std::size_t head = 0;
    std::int64_t reached = 0;
    while (head < queue.size()) {
      const std::int64_t u = queue[head++];
      ++reached;
      g.for_each_neighbor(u, EdgeDir::Fwd, [&](std::int64_t v, int) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          queue.push_back(v);
        }
      });
    }
    g.reachable_from_first = reached;
  }
  return g;
}

/// Stable identity of a built graph, for cache lookups.
inline std::uint64_t graph_cache_key(const GroupSpec& group, const DomainSpec& dom,
                                     double h, int directions) {
  std::string s = group.describe() + "|" + dom.describe() + "|h=" + fmt_g17(h) +
                  "|dirs=" + std::to_string(directions);
  return fnv1a64(s);
}

namespace detail {

inline constexpr char kGraphMagic[] = "SUBHJ-GRAPH-v1\n";

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("graph cache: truncated file");
  return v;
}

inline void put_string(std::ostream& os, const std::string& s) {
  put<std::uint64_t>(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& is) {
  const auto len = get<std::uint64_t>(is);
  if (len > (1u << 20)) throw std::runtime_error("graph cache: oversized string");
  std::string s(len, '\0');
  is.read(s.data(), static_cast<std::streamsize>(len));
  if (!is) throw std::runtime_error("graph cache: truncated file");
  return s;
}

} // namespace detail

inline void save_graph(const std::string& path, const HorizontalGraph& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("graph cache: cannot open " + path + " for writing");
  os.write(detail::kGraphMagic, sizeof(detail::kGraphMagic) - 1);
  detail::put<std::int32_t>(os, static_cast<std::int32_t>(g.group.kind));
  detail::put<std::int32_t>(os, g.group.n);
  detail::put<std::int32_t>(os, g.group.m);
  detail::put<std::uint64_t>(os, g.group.bracket.size());
  for (double c : g.group.bracket) detail::put(os, c);
  detail::put(os, g.h);
  detail::put<std::int32_t>(os, g.st.directions());
  for (int a = 0; a < g.group.n; ++a) {
    detail::put(os, g.lat.spacing[a]);
    detail::put(os, g.lat.base[a]);
    detail::put(os, g.lat.count[a]);
  }
  for (int a = 0; a < g.group.n; ++a) {
    detail::put(os, g.dom.lo[a]);
    detail::put(os, g.dom.hi[a]);
  }
  detail::put_string(os, g.dom.interior_text);
  detail::put(os, g.dom.boundary_resolution);
  detail::put<std::int64_t>(os, g.node_count);
  detail::put<std::uint8_t>(os, g.connectivity_checked ? 1 : 0);
  detail::put(os, g.reachable_from_first);
  os.write(reinterpret_cast<const char*>(g.inside.data()),
           static_cast<std::streamsize>(g.inside.size()));
  if (!os) throw std::runtime_error("graph cache: write failed for " + path);
}

inline HorizontalGraph load_graph(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("graph cache: cannot open " + path);
  char magic[sizeof(detail::kGraphMagic)] = {};
  is.read(magic, sizeof(detail::kGraphMagic) - 1);
  if (!is || std::strncmp(magic, detail::kGraphMagic, sizeof(detail::kGraphMagic) - 1) != 0)
    throw std::runtime_error("graph cache: bad magic in " + path);
  HorizontalGraph g;
  const auto kind = static_cast<GroupKind>(detail::get<std::int32_t>(is));
  const int n = detail::get<std::int32_t>(is);
  const int m = detail::get<std::int32_t>(is);
  const auto blen = detail::get<std::uint64_t>(is);
  std::vector<double> bracket(blen);
  for (auto& c : bracket) c = detail::get<double>(is);
  switch (kind) {
    case GroupKind::Abelian: g.group = GroupSpec::abelian(n); break;
    case GroupKind::Heisenberg1: g.group = GroupSpec::heisenberg1(); break;
    case GroupKind::GenericStep2: g.group = GroupSpec::step2(m, n, bracket); break;
  }
  g.h = detail::get<double>(is);
  const int dirs = detail::get<std::int32_t>(is);
  g.lat.spacing.resize(n);
  g.lat.base.resize(n);
  g.lat.count.resize(n);
  for (int a = 0; a < n; ++a) {
    g.lat.spacing[a] = detail::get<double>(is);
    g.lat.base[a] = detail::get<std::int64_t>(is);
    g.lat.count[a] = detail::get<std::int64_t>(is);
  }
  std::vector<double> lo(n), hi(n);
  for (int a = 0; a < n; ++a) {
    lo[a] = detail::get<double>(is);
    hi[a] = detail::get<double>(is);
  }
  g.dom = DomainSpec::box(lo, hi);
  const std::string itext = detail::get_string(is);
  if (!itext.empty()) g.dom = g.dom.with_interior(itext);
  g.dom.boundary_resolution = detail::get<double>(is);
  g.node_count = detail::get<std::int64_t>(is);
  g.connectivity_checked = detail::get<std::uint8_t>(is) != 0;
  g.reachable_from_first = detail::get<std::int64_t>(is);
  g.st = make_stencil(m, dirs, g.h);
  g.inside.resize(static_cast<std::size_t>(g.lat.total()));
  is.read(reinterpret_cast<char*>(g.inside.data()),
          static_cast<std::streamsize>(g.inside.size()));
  if (!is) throw std::runtime_error("graph cache: truncated node table in " + path);
  return g;
}

} // namespace subhj
