#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "subhj/distance.hpp"
#include "subhj/graph.hpp"
#include "subhj/grid.hpp"
#include "subhj/hamiltonian.hpp"
#include "subhj/hopflax.hpp"
#include "subhj/util.hpp"

namespace subhj {

enum class MongeClass { SolutionOk, SubsolutionOk, SupersolutionOk };

inline const char* monge_class_label(MongeClass c) {
  switch (c) {
    case MongeClass::SolutionOk: return "solution_ok";
    case MongeClass::SubsolutionOk: return "subsolution_ok";
    case MongeClass::SupersolutionOk: return "supersolution_ok";
  }
  return "?";
}

struct MongeProbeRecord {
  Point x0;
  std::int64_t node = -1;  ///< lattice anchor the one-to-all fields start from
  double u_at_x0 = 0.0;    ///< interpolated at the true probe point
  std::vector<double> radii;
  std::vector<double> infima;  ///< per radius; kInf = empty annulus
  double estimate = 0.0;       ///< infimum at the smallest radius
  double tau = 0.0;
  MongeClass cls = MongeClass::SolutionOk;
  std::string violated_side;       ///< "sub" or "super" when not solution_ok
  double violation_margin = 0.0;   ///< amount past tau on the violated side

  bool subsolution_side_ok() const { return cls != MongeClass::SupersolutionOk; }
};

inline std::vector<double> dyadic_radii(double r) {
  return {r, r / 2.0, r / 4.0, r / 8.0};
}

/// Local residual of the optical-length optimality principle at x0:
/// for each radius r, the minimum over nodes z with d_CC(x0,z) in (r/2, r] of
///   (u(z) - u(x0) + d_sigma*(x0, z)) / d_CC(x0, z),
/// from two one-to-all fields anchored at the nearest node. Zero (at the
/// smallest radius, up to tau) certifies the local optimality equation; the
/// sign distinguishes the sub- and supersolution sides.
inline MongeProbeRecord monge_residual(const ScalarField& u, const Hamiltonian& ham,
                                       const HorizontalGraph& g, const Point& x0,
                                       const std::vector<double>& radii,
                                       double tau = -1.0) {
  if (radii.empty()) throw std::invalid_argument("monge_residual: empty radius list");
  if (!u.lat.same_geometry(g.lat))
    throw std::invalid_argument("monge_residual: field and graph lattices differ");
  double r_min = radii[0], r_max = radii[0];
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("monge_residual: radii must be positive");
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
  }
  MongeProbeRecord rec;
  rec.x0 = x0;
  rec.radii = radii;
  rec.tau = tau > 0.0 ? tau : 10.0 * g.cell_cost(ham.alpha) / r_min;

  rec.node = g.snap_inside(x0);
  if (rec.node < 0) throw std::domain_error("monge_residual: probe outside the domain");
  rec.u_at_x0 = u.sample(x0);

  DistanceOptions cc;
  cc.kind = MetricKind::CarnotCaratheodory;
  cc.dir = EdgeDir::Fwd;
  cc.bound = r_max * (1.0 + 1e-12) + g.h;
  const auto dcc = shortest_distances(g, {{rec.node, 0.0}}, cc);

  DistanceOptions so;
  so.kind = MetricKind::OpticalLength;
  so.ham = &ham;
  so.dir = EdgeDir::Fwd;
  so.bound = ham.alpha * r_max * (1.0 + 1e-12) + ham.alpha * g.h;
  const auto dsg = shortest_distances(g, {{rec.node, 0.0}}, so);

  rec.infima.assign(radii.size(), kInf);
  for (std::int64_t id = 0; id < g.lat.total(); ++id) {
    const double d = dcc.at(id);
    if (d > r_max || id == rec.node) continue;
    if (d <= r_max && g.is_inside(id) && g.on_domain_shell(id))
      throw std::domain_error("monge_residual: probe ball touches the boundary");
    if (!u.node_valid(id) || !std::isfinite(u.at(id))) continue;
    const double ds = dsg.at(id);
    if (!(ds < kInf)) continue;
    const double q = (u.at(id) - rec.u_at_x0 + ds) / d;
    for (std::size_t ri = 0; ri < radii.size(); ++ri)
      if (d > radii[ri] / 2.0 && d <= radii[ri])
        rec.infima[ri] = std::min(rec.infima[ri], q);
  }

  std::size_t smallest = 0;
  for (std::size_t ri = 1; ri < radii.size(); ++ri)
    if (radii[ri] < radii[smallest]) smallest = ri;
  rec.estimate = rec.infima[smallest];
  if (!(rec.estimate < kInf))
    throw std::domain_error("monge_residual: empty annulus at the smallest radius");

  const bool sub_ok = rec.estimate >= -rec.tau;
  const bool super_ok = rec.estimate <= rec.tau;
  if (sub_ok && super_ok) {
    rec.cls = MongeClass::SolutionOk;
  } else if (sub_ok) {
    rec.cls = MongeClass::SubsolutionOk;
    rec.violated_side = "super";
    rec.violation_margin = rec.estimate - rec.tau;
  } else {
    rec.cls = MongeClass::SupersolutionOk;
    rec.violated_side = "sub";
    rec.violation_margin = -rec.estimate - rec.tau;
  }
  return rec;
}

struct AeSubsolutionReport {
  int evaluated = 0;
  int skipped = 0;  ///< probes whose finite-difference flows left the field
  int passed = 0;
  double fraction_passed = 0.0;
  double tau_fd = 0.0;
  double worst_value = -kInf;
  Point worst_probe;
  std::vector<double> values;  ///< per evaluated probe, in probe order
};

/// Pointwise check of the almost-everywhere subsolution inequality
/// H(x, grad_H u(x)) <= 0, with the horizontal gradient taken by central
/// differences along the frame flows of the interpolated field.
inline AeSubsolutionReport ae_subsolution_check(const ScalarField& u, const Hamiltonian& ham,
                                                const GroupSpec& group,
                                                const std::vector<Point>& probes,
                                                double h_fd, double tau_fd = 0.1) {
  AeSubsolutionReport rep;
  rep.tau_fd = tau_fd;
  for (const auto& x : probes) {
    double val;
    try {
      const HVec grad = horizontal_gradient_fd(group, u, x, h_fd);
      val = ham.eval(x, grad);
    } catch (const std::domain_error&) {
      ++rep.skipped;
      continue;
    }
    ++rep.evaluated;
    rep.values.push_back(val);
    if (val <= tau_fd) ++rep.passed;
    if (val > rep.worst_value) {
      rep.worst_value = val;
      rep.worst_probe = x;
    }
  }
  rep.fraction_passed = rep.evaluated > 0
                            ? static_cast<double>(rep.passed) / rep.evaluated
                            : 0.0;
  return rep;
}

struct LipschitzReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double tol = 0.0;
  double worst_excess = -kInf;
  std::int64_t worst_from = -1;
  std::int64_t worst_to = -1;
  bool passed = true;
};

/// Checks u(x) - u(y) <= d_sigma*(x, y) + tol on ordered node pairs,
/// grouping pairs by source so each source costs one one-to-all run.
inline LipschitzReport lipschitz_vs_optical(const ScalarField& u, const HorizontalGraph& g,
                                            const Hamiltonian& ham,
                                            const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                                            double tol = -1.0) {
  LipschitzReport rep;
  rep.tol = tol >= 0.0 ? tol : 2.0 * g.cell_cost(ham.alpha);
  std::map<std::int64_t, std::vector<std::int64_t>> by_source;
  for (const auto& [a, b] : pairs) by_source[a].push_back(b);
  DistanceOptions opts;
  opts.kind = MetricKind::OpticalLength;
  opts.ham = &ham;
  opts.dir = EdgeDir::Fwd;
  for (const auto& [a, targets] : by_source) {
    const auto d = shortest_distances(g, {{a, 0.0}}, opts);
    for (std::int64_t b : targets) {
      ++rep.pairs;
      const double excess = u.at(a) - u.at(b) - d.at(b);
      if (excess > rep.worst_excess) {
        rep.worst_excess = excess;
        rep.worst_from = a;
        rep.worst_to = b;
      }
      if (excess > rep.tol) ++rep.violations;
    }
  }
  rep.passed = rep.violations == 0;
  return rep;
}

struct ComparisonReport {
  bool precondition_met = true;  ///< boundary dominance u <= v + tol on the shell
  double worst_boundary_excess = -kInf;
  double worst_interior_excess = -kInf;  ///< max over interior nodes of u - v
  double tol = 0.0;
  bool passed = false;
  std::string status;  ///< "pass", "fail", or "precondition unmet"
};

/// Comparison principle on the graph: if u <= v + tol on the boundary shell,
/// then u - v must stay <= tol at interior nodes.
inline ComparisonReport comparison_harness(const Hamiltonian& ham, const HorizontalGraph& g,
                                           const ScalarField& u_sub, const ScalarField& v_super,
                                           double tol = -1.0) {
  ComparisonReport rep;
  rep.tol = tol >= 0.0 ? tol : 3.0 * g.cell_cost(ham.alpha);
  for (std::int64_t id = 0; id < g.lat.total(); ++id) {
    if (!g.is_inside(id)) continue;
    if (!u_sub.node_valid(id) || !v_super.node_valid(id)) continue;
    const double du = u_sub.at(id);
    const double dv = v_super.at(id);
    if (!std::isfinite(du) || !std::isfinite(dv)) continue;
    const double excess = du - dv;
    if (g.on_domain_shell(id))
      rep.worst_boundary_excess = std::max(rep.worst_boundary_excess, excess);
    else
      rep.worst_interior_excess = std::max(rep.worst_interior_excess, excess);
  }
  rep.precondition_met = rep.worst_boundary_excess <= rep.tol;
  if (!rep.precondition_met) {
    rep.status = "precondition unmet";
    rep.passed = false;
    return rep;
  }
  rep.passed = rep.worst_interior_excess <= rep.tol;
  rep.status = rep.passed ? "pass" : "fail";
  return rep;
}

struct StabilityReport {
  std::vector<double> pair_deviation;  ///< per sequence member, sup over pairs
  std::vector<double> node_deviation;  ///< per sequence member, sup over nodes
  bool pair_monotone = true;
  bool node_monotone = true;
  std::vector<MongeProbeRecord> limit_probes;
  bool limit_solution_ok = true;
  bool passed = false;
};

/// Stability of the metric and of the Dirichlet solution along a Hamiltonian
/// sequence against its limit: deviations must shrink monotonically, and the
/// limit solution must verify as a local optimality solution at the probes.
inline StabilityReport stability_harness(const HorizontalGraph& g,
                                         const std::vector<Hamiltonian>& seq,
                                         const Hamiltonian& limit,
                                         const BoundaryDatum& datum,
                                         const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                                         const std::vector<Point>& probes,
                                         const std::vector<double>& radii) {
  for (const auto& h : seq)
    if (h.alpha != limit.alpha)
      throw std::invalid_argument("stability_harness: Hamiltonians must share one alpha");
  StabilityReport rep;

  std::map<std::int64_t, std::vector<std::int64_t>> by_source;
  for (const auto& [a, b] : pairs) by_source[a].push_back(b);
  auto pair_field = [&](const Hamiltonian& h, std::int64_t a) {
    DistanceOptions opts;
    opts.kind = MetricKind::OpticalLength;
    opts.ham = &h;
    opts.dir = EdgeDir::Fwd;
    return shortest_distances(g, {{a, 0.0}}, opts);
  };

  rep.pair_deviation.assign(seq.size(), 0.0);
  for (const auto& [a, targets] : by_source) {
    const auto dlim = pair_field(limit, a);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto dn = pair_field(seq[i], a);
      for (std::int64_t b : targets)
        rep.pair_deviation[i] =
            std::max(rep.pair_deviation[i], std::fabs(dn.at(b) - dlim.at(b)));
    }
  }

  SolveOptions sopts;
  sopts.check_bcc = false;
  sopts.check_edges = false;
  const auto ulim = solve_dirichlet(g, limit, datum, sopts);
  rep.node_deviation.assign(seq.size(), 0.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto un = solve_dirichlet(g, seq[i], datum, sopts);
    for (std::int64_t id = 0; id < g.lat.total(); ++id) {
      if (!g.is_inside(id)) continue;
      const double a = un.value[static_cast<std::size_t>(id)];
      const double b = ulim.value[static_cast<std::size_t>(id)];
      if (a < kInf && b < kInf)
        rep.node_deviation[i] = std::max(rep.node_deviation[i], std::fabs(a - b));
    }
  }

  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (rep.pair_deviation[i] > rep.pair_deviation[i - 1]) rep.pair_monotone = false;
    if (rep.node_deviation[i] > rep.node_deviation[i - 1]) rep.node_monotone = false;
  }

  const ScalarField uf = restrict_to_monge_data(ulim, g);
  for (const auto& x0 : probes) {
    rep.limit_probes.push_back(monge_residual(uf, limit, g, x0, radii));
    if (rep.limit_probes.back().cls != MongeClass::SolutionOk) rep.limit_solution_ok = false;
  }

  rep.passed = rep.pair_monotone && rep.node_monotone && rep.limit_solution_ok;
  return rep;
}

} // namespace subhj
