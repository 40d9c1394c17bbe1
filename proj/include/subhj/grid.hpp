#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "subhj/carnot.hpp"
#include "subhj/util.hpp"

namespace subhj {

/// Axis-aligned lattice with per-axis spacing, globally anchored at 0:
/// node coordinates are integer multiples of the axis spacing, so two
/// lattices with equal spacings agree exactly wherever they overlap.
struct Lattice {
  std::vector<double> spacing;     ///< per-axis spacing
  std::vector<std::int64_t> base;  ///< lowest node, in spacing units
  std::vector<std::int64_t> count; ///< nodes per axis

  int dims() const { return static_cast<int>(spacing.size()); }

  std::int64_t total() const {
    std::int64_t t = 1;
    for (auto c : count) t *= c;
    return t;
  }

  /// Covers [lo, hi] per axis, bounds rounded outward to lattice planes.
  static Lattice covering(const std::vector<double>& lo, const std::vector<double>& hi,
                          const std::vector<double>& spacing) {
    if (lo.size() != hi.size() || lo.size() != spacing.size())
      throw std::invalid_argument("lattice: box and spacing dimensions differ");
    Lattice lat;
    lat.spacing = spacing;
    lat.base.resize(lo.size());
    lat.count.resize(lo.size());
    for (std::size_t a = 0; a < lo.size(); ++a) {
      if (!(spacing[a] > 0.0)) throw std::invalid_argument("lattice: spacing must be positive");
      if (!(hi[a] >= lo[a])) throw std::invalid_argument("lattice: empty box");
      const double eps = 1e-9;
      auto l = static_cast<std::int64_t>(std::floor(lo[a] / spacing[a] + eps));
      auto h = static_cast<std::int64_t>(std::ceil(hi[a] / spacing[a] - eps));
      lat.base[a] = l;
      lat.count[a] = h - l + 1;
    }
    return lat;
  }

  double coord(int axis, std::int64_t i) const {
    return static_cast<double>(base[axis] + i) * spacing[axis];
  }

  Point point(std::int64_t id) const {
    Point p(dims());
    for (int a = 0; a < dims(); ++a) {
      p[a] = coord(a, id % count[a]);
      id /= count[a];
    }
    return p;
  }

  std::int64_t id_from_multi(const std::vector<std::int64_t>& ix) const {
    std::int64_t id = 0;
    for (int a = dims() - 1; a >= 0; --a) id = id * count[a] + ix[a];
    return id;
  }

  std::vector<std::int64_t> multi_from_id(std::int64_t id) const {
    std::vector<std::int64_t> ix(dims());
    for (int a = 0; a < dims(); ++a) {
      ix[a] = id % count[a];
      id /= count[a];
    }
    return ix;
  }

  /// Nearest node, or -1 when the rounded index leaves the lattice.
  std::int64_t snap(const Point& p) const {
    std::int64_t id = 0;
    for (int a = dims() - 1; a >= 0; --a) {
      auto i = static_cast<std::int64_t>(std::llround(p[a] / spacing[a])) - base[a];
      if (i < 0 || i >= count[a]) return -1;
      id = id * count[a] + i;
    }
    return id;
  }

  bool same_geometry(const Lattice& o) const {
    return spacing == o.spacing && base == o.base && count == o.count;
  }
};

/// Spacing vector from a scalar horizontal spacing: layer-j axes get h^j.
inline std::vector<double> layered_spacing(const GroupSpec& g, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("spacing must be positive");
  std::vector<double> sp(g.n);
  for (int a = 0; a < g.n; ++a) sp[a] = g.layer_of(a) == 1 ? h : h * h;
  return sp;
}

/// Grid-sampled scalar function with multilinear interpolation between nodes.
struct ScalarField {
  Lattice lat;
  std::vector<double> values;        ///< per lattice node
  std::vector<std::uint8_t> valid;   ///< optional mask; empty means all valid

  bool node_valid(std::int64_t id) const {
    return valid.empty() || valid[static_cast<std::size_t>(id)] != 0;
  }

  double at(std::int64_t id) const { return values[static_cast<std::size_t>(id)]; }

  /// Multilinear sample. Throws std::domain_error off the lattice or when a
  /// stencil corner is masked out.
  double sample(const Point& p) const {
    const int d = lat.dims();
    if (static_cast<int>(p.size()) != d)
      throw std::invalid_argument("sample: dimension mismatch");
    std::vector<std::int64_t> i0(d);
    std::vector<double> frac(d);
    for (int a = 0; a < d; ++a) {
      double u = p[a] / lat.spacing[a] - static_cast<double>(lat.base[a]);
      double fl = std::floor(u);
      auto i = static_cast<std::int64_t>(fl);
      double f = u - fl;
      // tolerate roundoff at the far face
      if (i == lat.count[a] - 1 && f < 1e-9) { --i; f = 1.0; }
      if (i < 0 && u > -1e-9) { i = 0; f = 0.0; }
      if (i < 0 || i >= lat.count[a] - 1) {
        if (lat.count[a] == 1 && std::abs(u) < 1e-9) { i0[a] = 0; frac[a] = 0.0; continue; }
        throw std::domain_error("sample: point outside the field lattice");
      }
      i0[a] = i;
      frac[a] = f;
    }
    double acc = 0.0;
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
      double w = 1.0;
      std::int64_t id = 0;
      for (int a = d - 1; a >= 0; --a) {
        const int bit = (c >> a) & 1;
        const std::int64_t ia = i0[a] + (lat.count[a] == 1 ? 0 : bit);
        w *= bit ? frac[a] : 1.0 - frac[a];
        id = id * lat.count[a] + ia;
      }
      if (w == 0.0) continue;
      if (!node_valid(id) || !std::isfinite(values[static_cast<std::size_t>(id)]))
        throw std::domain_error("sample: interpolation touches an undefined node");
      acc += w * values[static_cast<std::size_t>(id)];
    }
    return acc;
  }
};

/// Central horizontal difference quotients along the frame flows:
/// component i is (u(x . (h e_i, 0)) - u(x . (-h e_i, 0))) / (2h).
inline HVec horizontal_gradient_fd(const GroupSpec& g, const ScalarField& u,
                                   const Point& x, double h) {
  check_point(g, x, "horizontal_gradient_fd");
  if (!(h > 0.0)) throw std::invalid_argument("horizontal_gradient_fd: h must be positive");
  HVec grad(g.m);
  HVec e(g.m, 0.0);
  for (int i = 0; i < g.m; ++i) {
    e[i] = 1.0;
    const double up = u.sample(horizontal_flow(g, x, e, h));
    const double dn = u.sample(horizontal_flow(g, x, e, -h));
    grad[i] = (up - dn) / (2.0 * h);
    e[i] = 0.0;
  }
  return grad;
}

} // namespace subhj
