#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "subhj/carnot.hpp"
#include "subhj/domain.hpp"
#include "subhj/predicate.hpp"
#include "subhj/rng.hpp"
#include "subhj/util.hpp"

namespace subhj {

struct ZSet;
using ZSetPtr = std::shared_ptr<const ZSet>;

struct ZBall {
  double r = 1.0;
};

/// { p : p^T A^{-1} p <= 1 } for SPD A, so the support function in direction v
/// is sqrt(v^T A v) and the gauge of p is sqrt(p^T A^{-1} p).
struct ZEllipsoid {
  int m = 0;
  std::vector<double> a;     ///< row-major m x m
  std::vector<double> chol;  ///< lower Cholesky factor of a
};

/// Convex hull of the listed vertices; the origin must be an interior point.
/// The gauge uses the facet description, which is computed for rank <= 2.
struct ZPolytope {
  int m = 0;
  std::vector<std::vector<double>> verts;
  std::vector<std::vector<double>> facet_normal;  ///< outward, one per facet
  std::vector<double> facet_offset;               ///< n . x <= offset, offset > 0
};

struct ZScaled {
  ZSetPtr base;
  double factor = 1.0;
};

/// Closed convex sublevel set Z = { p : H(x, p) <= 0 } at a point, in one of
/// four shapes. Symmetry is not assumed; only "origin interior" is.
struct ZSet {
  std::variant<ZBall, ZEllipsoid, ZPolytope, ZScaled> shape;

  static ZSet ball(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
    ZSet z;
    z.shape = ZBall{r};
    return z;
  }

  static ZSet ellipsoid(int m, std::vector<double> a) {
    if (m < 1 || a.size() != static_cast<std::size_t>(m) * m)
      throw std::invalid_argument("ellipsoid matrix must be m x m");
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(a[static_cast<std::size_t>(i) * m + j] -
                     a[static_cast<std::size_t>(j) * m + i]) > 1e-12)
          throw std::invalid_argument("ellipsoid matrix must be symmetric");
    ZEllipsoid e;
    e.m = m;
    e.a = std::move(a);
    e.chol = cholesky(e.a, m);  // throws unless positive definite
    ZSet z;
    z.shape = std::move(e);
    return z;
  }

  static ZSet polytope(std::vector<std::vector<double>> verts);

  static ZSet scaled(ZSet base, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    ZScaled s;
    s.base = std::make_shared<ZSet>(std::move(base));
    s.factor = factor;
    ZSet z;
    z.shape = std::move(s);
    return z;
  }
};

namespace detail {

/// Facets of a planar polytope: convex hull by monotone chain, then one
/// outward halfspace per hull edge.
inline void planar_facets(ZPolytope& p) {
  auto pts = p.verts;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3)
    throw std::invalid_argument("planar polytope needs at least 3 distinct vertices");
  auto cross = [](const std::vector<double>& o, const std::vector<double>& a,
                  const std::vector<double>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::vector<double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& q : pts) {  // lower chain
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], q) <= 0.0) --k;
    hull[k++] = q;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {  // upper chain
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);  // last point repeats the first
  if (hull.size() < 3) throw std::invalid_argument("polytope is degenerate");
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& u = hull[i];
    const auto& v = hull[(i + 1) % hull.size()];
    // hull is counterclockwise, so the outward normal of edge u->v is
    // (dy, -dx)
    std::vector<double> nrm = {v[1] - u[1], -(v[0] - u[0])};
    const double len = norm2(nrm);
    if (len == 0.0) continue;
    nrm[0] /= len;
    nrm[1] /= len;
    const double off = nrm[0] * u[0] + nrm[1] * u[1];
    if (!(off > 0.0))
      throw std::invalid_argument("polytope must contain the origin in its interior");
    p.facet_normal.push_back(std::move(nrm));
    p.facet_offset.push_back(off);
  }
}

inline void interval_facets(ZPolytope& p) {
  double mn = p.verts[0][0], mx = p.verts[0][0];
  for (const auto& v : p.verts) {
    mn = std::min(mn, v[0]);
    mx = std::max(mx, v[0]);
  }
  if (!(mn < 0.0 && mx > 0.0))
    throw std::invalid_argument("polytope must contain the origin in its interior");
  p.facet_normal = {{1.0}, {-1.0}};
  p.facet_offset = {mx, -mn};
}

} // namespace detail

inline ZSet ZSet::polytope(std::vector<std::vector<double>> verts) {
  if (verts.empty()) throw std::invalid_argument("polytope needs vertices");
  const std::size_t m = verts[0].size();
  if (m < 1) throw std::invalid_argument("polytope vertices need at least one coordinate");
  for (const auto& v : verts)
    if (v.size() != m) throw std::invalid_argument("polytope vertices have mixed dimensions");
  ZPolytope p;
  p.m = static_cast<int>(m);
  p.verts = std::move(verts);
  if (m == 1) detail::interval_facets(p);
  else if (m == 2) detail::planar_facets(p);
  // rank >= 3: support works from vertices; the gauge reports unsupported
  ZSet z;
  z.shape = std::move(p);
  return z;
}

/// Minkowski gauge of Z: inf { t > 0 : p in t Z }.
inline double zset_gauge(const ZSet& z, const std::vector<double>& p) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ZBall>) {
          return norm2(p) / s.r;
        } else if constexpr (std::is_same_v<T, ZEllipsoid>) {
          if (static_cast<int>(p.size()) != s.m)
            throw std::invalid_argument("gauge: vector dimension mismatch");
          const auto y = cholesky_solve(s.chol, s.m, p);
          return std::sqrt(std::max(0.0, dot(p, y)));
        } else if constexpr (std::is_same_v<T, ZPolytope>) {
          if (static_cast<int>(p.size()) != s.m)
            throw std::invalid_argument("gauge: vector dimension mismatch");
          if (s.facet_normal.empty())
            throw std::invalid_argument("polytope gauge is implemented for rank <= 2");
          double g = 0.0;
          for (std::size_t f = 0; f < s.facet_normal.size(); ++f)
            g = std::max(g, dot(s.facet_normal[f], p) / s.facet_offset[f]);
          return g;
        } else {
          return zset_gauge(*s.base, p) / s.factor;
        }
      },
      z.shape);
}

/// Support function sup { <q, v> : q in Z }.
inline double zset_support(const ZSet& z, const std::vector<double>& v) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ZBall>) {
          return s.r * norm2(v);
        } else if constexpr (std::is_same_v<T, ZEllipsoid>) {
          if (static_cast<int>(v.size()) != s.m)
            throw std::invalid_argument("support: vector dimension mismatch");
          double q = 0.0;
          for (int i = 0; i < s.m; ++i)
            for (int j = 0; j < s.m; ++j)
              q += v[i] * s.a[static_cast<std::size_t>(i) * s.m + j] * v[j];
          return std::sqrt(std::max(0.0, q));
        } else if constexpr (std::is_same_v<T, ZPolytope>) {
          double best = -kInf;
          for (const auto& q : s.verts) best = std::max(best, dot(q, v));
          return best;
        } else {
          return s.factor * zset_support(*s.base, v);
        }
      },
      z.shape);
}

/// One region of a piecewise Hamiltonian. A null predicate matches always,
/// so the final piece acts as the default.
struct HamiltonianPiece {
  PredicatePtr where;       ///< null means "otherwise"
  std::string where_text;
  ZSet z;
};

/// Hamiltonian described by its zero sublevel sets x -> Z(x), with a declared
/// bound alpha > 1 such that B(1/alpha) within Z(x) within B(alpha).
///
/// H may be restricted to a domain (evaluation outside throws), and may carry
/// an extension gate: outside the gate's region the level set is the alpha
/// ball, the canonical global extension.
struct Hamiltonian {
  double alpha = 0.0;
  std::vector<HamiltonianPiece> pieces;
  std::optional<DomainSpec> domain;  ///< where H is defined; empty = everywhere

  struct Gate {
    DomainSpec inside;
    ZSet outside = ZSet::ball(1.0);
  };
  std::optional<Gate> gate;

  static Hamiltonian uniform(double alpha, ZSet z) {
    Hamiltonian h;
    h.alpha = alpha;
    h.pieces.push_back(HamiltonianPiece{nullptr, "", std::move(z)});
    h.check_shape();
    return h;
  }

  static Hamiltonian piecewise(double alpha, std::vector<HamiltonianPiece> pieces) {
    Hamiltonian h;
    h.alpha = alpha;
    h.pieces = std::move(pieces);
    h.check_shape();
    return h;
  }

  Hamiltonian restricted_to(DomainSpec d) const {
    Hamiltonian h = *this;
    h.domain = std::move(d);
    return h;
  }

  void check_shape() const {
    if (!(alpha > 1.0)) throw std::invalid_argument("hamiltonian: alpha must exceed 1");
    if (pieces.empty()) throw std::invalid_argument("hamiltonian: needs at least one piece");
    if (pieces.back().where)
      throw std::invalid_argument("hamiltonian: last piece must be unconditional");
  }

  const ZSet& zset_at(const Point& x) const {
    if (gate && !gate->inside.contains(x)) return gate->outside;
    if (domain && !domain->contains(x))
      throw std::domain_error("hamiltonian evaluated outside its domain");
    for (const auto& p : pieces)
      if (!p.where || p.where->eval(x)) return p.z;
    throw std::logic_error("hamiltonian: no piece matched");
  }

  /// H(x, p) as gauge(Z(x), p) - 1: negative inside Z(x), zero on its boundary.
  double eval(const Point& x, const std::vector<double>& p) const {
    return zset_gauge(zset_at(x), p) - 1.0;
  }

  /// sigma*(x, v) = sup { <-q, v> : q in Z(x) }, the support function of -Z(x).
  double sigma(const Point& x, const std::vector<double>& v) const {
    std::vector<double> neg(v);
    for (double& t : neg) t = -t;
    return zset_support(zset_at(x), neg);
  }
};

/// Global extension: keep H on omega, use the alpha ball outside. The support
/// function of the extension is alpha |v| outside omega, the largest value the
/// declared bounds allow, so exterior travel is never cheaper than interior.
inline Hamiltonian extend(const Hamiltonian& h, DomainSpec omega) {
  Hamiltonian k = h;
  k.domain.reset();
  k.gate = Hamiltonian::Gate{std::move(omega), ZSet::ball(h.alpha)};
  return k;
}

struct ValidationIssue {
  Point x;
  std::vector<double> direction;
  std::string kind;  ///< "sandwich_lower" or "sandwich_upper"
  double value = 0.0;
};

struct ValidationReport {
  bool ok = true;
  int samples = 0;
  int directions = 0;
  std::vector<ValidationIssue> issues;
};

namespace detail {

inline std::vector<std::vector<double>> sphere_directions(int m, int count,
                                                          std::uint64_t seed) {
  std::vector<std::vector<double>> dirs;
  dirs.reserve(count);
  if (m == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
    return dirs;
  }
  if (m == 2) {
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * 3.14159265358979323846 * i / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  // higher rank: normalized deterministic pseudo-Gaussian directions
  Rng rng(seed);
  while (static_cast<int>(dirs.size()) < count) {
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) {
      // Box-Muller from fully specified uniforms
      const double u1 = std::max(rng.unit(), 1e-16);
      const double u2 = rng.unit();
      v[i] = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * 3.14159265358979323846 * u2);
    }
    const double len = norm2(v);
    if (len < 1e-9) continue;
    for (double& t : v) t /= len;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

} // namespace detail

/// Checks the radial sandwich B(1/alpha) within Z(x) within B(alpha) on the
/// given sample points, probing `directions` unit vectors at each.
inline ValidationReport validate_H(const Hamiltonian& h, const std::vector<Point>& samples,
                                   int m, int directions = 64, double tol = 1e-9) {
  ValidationReport rep;
  rep.samples = static_cast<int>(samples.size());
  rep.directions = directions;
  const auto dirs = detail::sphere_directions(m, directions, 0x5eedULL);
  for (const auto& x : samples) {
    const ZSet& z = h.zset_at(x);
    for (const auto& d : dirs) {
      // B(1/alpha) within Z: the gauge of any unit direction is at most alpha
      const double g = zset_gauge(z, d);
      if (g > h.alpha * (1.0 + tol) + tol)
        rep.issues.push_back({x, d, "sandwich_lower", g});
      // Z within B(alpha): the support in any unit direction is at most alpha
      const double s = zset_support(z, d);
      if (s > h.alpha * (1.0 + tol) + tol)
        rep.issues.push_back({x, d, "sandwich_upper", s});
    }
  }
  rep.ok = rep.issues.empty();
  return rep;
}

} // namespace subhj
