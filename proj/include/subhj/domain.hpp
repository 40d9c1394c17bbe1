#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "subhj/carnot.hpp"
#include "subhj/predicate.hpp"
#include "subhj/util.hpp"

namespace subhj {

/// Bounded open set given as a bounding box plus an optional interior
/// predicate; without a predicate the domain is the box itself.
struct DomainSpec {
  std::vector<double> lo, hi;
  PredicatePtr interior;       ///< optional restriction inside the box
  std::string interior_text;   ///< source form of the predicate, if any
  double boundary_resolution = 0.0;  ///< 0 means: follow the grid spacing

  int dims() const { return static_cast<int>(lo.size()); }

  static DomainSpec box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty())
      throw std::invalid_argument("domain: box corners have different dimensions");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i]))
        throw std::invalid_argument("domain: box must have positive extent");
    DomainSpec d;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
  }

  DomainSpec with_interior(const std::string& pred_text) const {
    DomainSpec d = *this;
    d.interior = parse_predicate(pred_text, dims());
    d.interior_text = pred_text;
    return d;
  }

  /// Membership in the closure (closed box, predicate where present).
  bool contains(const Point& p) const {
    if (static_cast<int>(p.size()) != dims())
      throw std::invalid_argument("domain: point dimension mismatch");
    for (int a = 0; a < dims(); ++a)
      if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return !interior || interior->eval(p);
  }

  double diam_euclid() const {
    double s = 0.0;
    for (int a = 0; a < dims(); ++a) s += sq(hi[a] - lo[a]);
    return std::sqrt(s);
  }

  /// Box grown by a per-axis margin.
  DomainSpec grown(const std::vector<double>& margin) const {
    if (margin.size() != lo.size())
      throw std::invalid_argument("domain: margin dimension mismatch");
    DomainSpec d = box(lo, hi);
    for (int a = 0; a < dims(); ++a) {
      d.lo[a] -= margin[a];
      d.hi[a] += margin[a];
    }
    return d;
  }

  std::string describe() const {
    std::string s = "box[";
    for (int a = 0; a < dims(); ++a) {
      if (a) s += ";";
      s += fmt_g17(lo[a]) + "," + fmt_g17(hi[a]);
    }
    s += "]";
    if (interior) s += " where " + interior_text;
    return s;
  }
};

} // namespace subhj
