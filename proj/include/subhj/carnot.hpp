#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "subhj/util.hpp"

namespace subhj {

/// A point in exponential coordinates of the first kind, length n.
using Point = std::vector<double>;

/// A horizontal vector (coefficients on the first-layer frame), length m.
using HVec = std::vector<double>;

enum class GroupKind { Abelian, Heisenberg1, GenericStep2 };

/// Stratified group of step 1 or 2 in exponential coordinates.
///
/// Coordinates split into layers: the first m entries are the horizontal
/// layer, the remaining n - m entries the second layer (step 2 only).
/// For GenericStep2 the bracket table holds c[i][j][l] with
/// [X_i, X_j] = sum_l c[i][j][l] X_{m+l}, antisymmetric in (i, j); the group
/// product is the degree-2 Baker-Campbell-Hausdorff polynomial. Heisenberg1
/// is the same law hard-coded (c[0][1][0] = -2, frame X1 = d/dx1 + x2 d/dx3,
/// X2 = d/dx2 - x1 d/dx3), kept as an independent code path so the two can be
/// cross-checked against each other.
struct GroupSpec {
  GroupKind kind = GroupKind::Abelian;
  int n = 0;     ///< topological dimension
  int m = 0;     ///< horizontal rank
  int step = 1;  ///< 1 or 2

  /// Structure constants, size m*m*(n-m), index (i*m + j)*(n-m) + l.
  std::vector<double> bracket;

  static GroupSpec abelian(int n) {
    if (n < 1) throw std::invalid_argument("abelian group needs n >= 1");
    GroupSpec g;
    g.kind = GroupKind::Abelian;
    g.n = n;
    g.m = n;
    g.step = 1;
    return g;
  }

  static GroupSpec heisenberg1() {
    GroupSpec g;
    g.kind = GroupKind::Heisenberg1;
    g.n = 3;
    g.m = 2;
    g.step = 2;
    return g;
  }

  static GroupSpec step2(int m, int n, std::vector<double> bracket) {
    if (m < 1 || n <= m) throw std::invalid_argument("step-2 group needs n > m >= 1");
    GroupSpec g;
    g.kind = GroupKind::GenericStep2;
    g.n = n;
    g.m = m;
    g.step = 2;
    g.bracket = std::move(bracket);
    const std::size_t want =
        static_cast<std::size_t>(m) * m * (n - m);
    if (g.bracket.size() != want)
      throw std::invalid_argument("bracket table must have m*m*(n-m) entries");
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int l = 0; l < n - m; ++l)
          if (g.c(i, j, l) != -g.c(j, i, l))
            throw std::invalid_argument("bracket table must be antisymmetric");
    return g;
  }

  double c(int i, int j, int l) const {
    return bracket[(static_cast<std::size_t>(i) * m + j) * (n - m) + l];
  }

  int second_width() const { return n - m; }

  /// Layer of coordinate axis `axis` (1 or 2).
  int layer_of(int axis) const { return axis < m ? 1 : 2; }

  std::string describe() const {
    switch (kind) {
      case GroupKind::Abelian: return "abelian(" + std::to_string(n) + ")";
      case GroupKind::Heisenberg1: return "heisenberg1";
      case GroupKind::GenericStep2:
        return "step2(m=" + std::to_string(m) + ",n=" + std::to_string(n) + ")";
    }
    return "?";
  }
};

inline void check_point(const GroupSpec& g, const Point& y, const char* what) {
  if (static_cast<int>(y.size()) != g.n)
    throw std::invalid_argument(std::string(what) + ": point has wrong dimension");
}

inline void check_hvec(const GroupSpec& g, const HVec& v, const char* what) {
  if (static_cast<int>(v.size()) != g.m)
    throw std::invalid_argument(std::string(what) + ": horizontal vector has wrong dimension");
}

inline Point group_mul(const GroupSpec& g, const Point& a, const Point& b) {
  check_point(g, a, "group_mul");
  check_point(g, b, "group_mul");
  Point r(g.n);
  for (int i = 0; i < g.m; ++i) r[i] = a[i] + b[i];
  switch (g.kind) {
    case GroupKind::Abelian:
      break;
    case GroupKind::Heisenberg1:
      r[2] = a[2] + b[2] + a[1] * b[0] - a[0] * b[1];
      break;
    case GroupKind::GenericStep2:
      for (int l = 0; l < g.second_width(); ++l) {
        double s = a[g.m + l] + b[g.m + l];
        for (int i = 0; i < g.m; ++i)
          for (int j = 0; j < g.m; ++j)
            s += 0.5 * g.c(i, j, l) * a[i] * b[j];
        r[g.m + l] = s;
      }
      break;
  }
  return r;
}

inline Point group_inv(const GroupSpec& g, const Point& a) {
  check_point(g, a, "group_inv");
  Point r(g.n);
  for (int i = 0; i < g.n; ++i) r[i] = -a[i];
  return r;
}

/// Intrinsic dilation: lambda on the first layer, lambda^2 on the second.
inline Point dilate(const GroupSpec& g, double lambda, const Point& a) {
  check_point(g, a, "dilate");
  Point r(g.n);
  for (int i = 0; i < g.m; ++i) r[i] = lambda * a[i];
  for (int i = g.m; i < g.n; ++i) r[i] = lambda * lambda * a[i];
  return r;
}

/// Homogeneous gauge norm: (|y1|^(2k!) + |y2|^(2k!/2))^(1/(2k!)) over layers,
/// where k is the step and |.| is the Euclidean norm of a layer block.
inline double koranyi_norm(const GroupSpec& g, const Point& y) {
  check_point(g, y, "koranyi_norm");
  double l1 = 0.0;
  for (int i = 0; i < g.m; ++i) l1 += y[i] * y[i];
  if (g.step == 1) return std::sqrt(l1);
  // step 2: 2k! = 4, exponents 4 and 2 on the layer norms
  double l2 = 0.0;
  for (int i = g.m; i < g.n; ++i) l2 += y[i] * y[i];
  return std::pow(l1 * l1 + l2, 0.25);
}

/// Left-invariant quasi-distance induced by the gauge norm.
inline double koranyi_dist(const GroupSpec& g, const Point& a, const Point& b) {
  return koranyi_norm(g, group_mul(g, group_inv(g, a), b));
}

/// Rows are the horizontal frame fields evaluated at x (m x n, row-major).
inline std::vector<double> frame_matrix(const GroupSpec& g, const Point& x) {
  check_point(g, x, "frame_matrix");
  std::vector<double> f(static_cast<std::size_t>(g.m) * g.n, 0.0);
  for (int i = 0; i < g.m; ++i) f[static_cast<std::size_t>(i) * g.n + i] = 1.0;
  switch (g.kind) {
    case GroupKind::Abelian:
      break;
    case GroupKind::Heisenberg1:
      f[0 * 3 + 2] = x[1];
      f[1 * 3 + 2] = -x[0];
      break;
    case GroupKind::GenericStep2:
      // X_i(x) = e_i + (1/2) sum_j c(j, i, l) x_j on the second layer
      for (int i = 0; i < g.m; ++i)
        for (int l = 0; l < g.second_width(); ++l) {
          double s = 0.0;
          for (int j = 0; j < g.m; ++j) s += 0.5 * g.c(j, i, l) * x[j];
          f[static_cast<std::size_t>(i) * g.n + g.m + l] = s;
        }
      break;
  }
  return f;
}

/// Embeds a horizontal vector as a group element (v, 0).
inline Point horizontal_embed(const GroupSpec& g, const HVec& v) {
  check_hvec(g, v, "horizontal_embed");
  Point p(g.n, 0.0);
  for (int i = 0; i < g.m; ++i) p[i] = v[i];
  return p;
}

/// Endpoint of the horizontal flow with constant control c over duration tau:
/// right translation by the one-parameter subgroup element (tau c, 0).
inline Point horizontal_flow(const GroupSpec& g, const Point& x, const HVec& c,
                             double tau) {
  check_point(g, x, "horizontal_flow");
  check_hvec(g, c, "horizontal_flow");
  HVec step(c);
  for (double& s : step) s *= tau;
  return group_mul(g, x, horizontal_embed(g, step));
}

} // namespace subhj
