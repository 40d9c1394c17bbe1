#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "subhj/carnot.hpp"
#include "subhj/domain.hpp"
#include "subhj/hamiltonian.hpp"
#include "subhj/util.hpp"

namespace subhj {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  double spacing = 1.0 / 16.0;
  int directions = 16;
};

struct ExtensionConfig {
  bool automatic = true;
  std::vector<double> margins;  ///< per axis, used when not automatic
};

struct RunConfig {
  GroupSpec group;
  DomainSpec omega;
  Hamiltonian ham;  ///< restricted to omega
  GridConfig grid;
  ExtensionConfig ext;
  std::string task;
  nlohmann::json params;  ///< the task-specific section, verbatim
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::string config_hash;
  nlohmann::json raw;
};

namespace cfg {

using nlohmann::json;

inline const json& need(const json& j, const char* key, const char* where) {
  const auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(std::string("config: missing \"") + key + "\" in " + where);
  return *it;
}

inline GroupSpec group_from_json(const json& j) {
  const std::string kind = need(j, "kind", "group").get<std::string>();
  if (kind == "abelian") return GroupSpec::abelian(j.value("n", 2));
  if (kind == "heisenberg1") return GroupSpec::heisenberg1();
  if (kind == "step2") {
    const int m = need(j, "m", "group").get<int>();
    const int n = need(j, "n", "group").get<int>();
    const int w2 = n - m;
    std::vector<double> table(static_cast<std::size_t>(m) * m * w2, 0.0);
    for (const auto& e : need(j, "bracket", "group")) {
      const int i = need(e, "i", "bracket entry").get<int>();
      const int jj = need(e, "j", "bracket entry").get<int>();
      const int l = need(e, "l", "bracket entry").get<int>();
      const double c = need(e, "c", "bracket entry").get<double>();
      if (i < 1 || i > m || jj < 1 || jj > m || l < 1 || l > w2)
        throw ConfigError("config: bracket index out of range");
      table[((i - 1) * static_cast<std::size_t>(m) + (jj - 1)) * w2 + (l - 1)] = c;
      table[((jj - 1) * static_cast<std::size_t>(m) + (i - 1)) * w2 + (l - 1)] = -c;
    }
    return GroupSpec::step2(m, n, table);
  }
  throw ConfigError("config: unknown group kind \"" + kind + "\"");
}

inline DomainSpec domain_from_json(const json& j) {
  const auto lo = need(j, "lo", "domain").get<std::vector<double>>();
  const auto hi = need(j, "hi", "domain").get<std::vector<double>>();
  DomainSpec d = DomainSpec::box(lo, hi);
  if (j.contains("interior"))
    d = d.with_interior(j.at("interior").get<std::string>());
  d.boundary_resolution = j.value("boundary_resolution", 0.0);
  return d;
}

inline ZSet zset_from_json(const json& j, int m) {
  const std::string kind = need(j, "kind", "zset").get<std::string>();
  if (kind == "ball") return ZSet::ball(need(j, "r", "zset").get<double>());
  if (kind == "ellipsoid") {
    const auto rows = need(j, "a", "zset").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != m)
      throw ConfigError("config: ellipsoid matrix must be m x m");
    std::vector<double> a;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != m)
        throw ConfigError("config: ellipsoid matrix must be m x m");
      a.insert(a.end(), r.begin(), r.end());
    }
    return ZSet::ellipsoid(m, a);
  }
  if (kind == "polytope") {
    const auto verts = need(j, "vertices", "zset").get<std::vector<std::vector<double>>>();
    std::vector<HVec> vs;
    for (const auto& v : verts) {
      if (static_cast<int>(v.size()) != m)
        throw ConfigError("config: polytope vertices must have m components");
      vs.emplace_back(v.begin(), v.end());
    }
    return ZSet::polytope(vs);
  }
  if (kind == "scaled")
    return ZSet::scaled(zset_from_json(need(j, "base", "zset"), m),
                        need(j, "factor", "zset").get<double>());
  throw ConfigError("config: unknown zset kind \"" + kind + "\"");
}

inline Hamiltonian hamiltonian_from_json(const json& j, const GroupSpec& g,
                                         const DomainSpec& omega) {
  const double alpha = need(j, "alpha", "hamiltonian").get<double>();
  std::vector<HamiltonianPiece> pieces;
  for (const auto& pj : need(j, "pieces", "hamiltonian")) {
    HamiltonianPiece piece;
    if (pj.contains("where")) {
      piece.where_text = pj.at("where").get<std::string>();
      piece.where = parse_predicate(piece.where_text, g.n);
    }
    piece.z = zset_from_json(need(pj, "zset", "hamiltonian piece"), g.m);
    pieces.push_back(std::move(piece));
  }
  Hamiltonian h = Hamiltonian::piecewise(alpha, std::move(pieces));
  return h.restricted_to(omega);
}

} // namespace cfg

/// Per-axis margins for the extended global box: the first layer grows by
/// alpha^2 * diam per side, deeper layers by the dilation-matched power.
inline std::vector<double> default_extension_margins(const GroupSpec& g,
                                                     const DomainSpec& omega,
                                                     double alpha) {
  const double diam = omega.diam_euclid();
  const double first = alpha * alpha * diam;
  std::vector<double> m(static_cast<std::size_t>(g.n));
  for (int a = 0; a < g.n; ++a) {
    const int layer = g.layer_of(a);
    m[static_cast<std::size_t>(a)] = layer == 1 ? first : first * first / 4.0;
  }
  return m;
}

inline RunConfig parse_config(const nlohmann::json& j) {
  using cfg::need;
  RunConfig rc;
  rc.raw = j;
  rc.config_hash = hex64(fnv1a64(j.dump()));
  rc.group = cfg::group_from_json(need(j, "group", "config"));
  rc.omega = cfg::domain_from_json(need(j, "domain", "config"));
  if (rc.omega.dims() != rc.group.n)
    throw ConfigError("config: domain dimension does not match the group");
  rc.ham = cfg::hamiltonian_from_json(need(j, "hamiltonian", "config"), rc.group, rc.omega);
  if (j.contains("grid")) {
    const auto& gj = j.at("grid");
    rc.grid.spacing = gj.value("spacing", rc.grid.spacing);
    rc.grid.directions = gj.value("stencil_directions", rc.grid.directions);
  }
  if (!(rc.grid.spacing > 0.0)) throw ConfigError("config: spacing must be positive");
  if (j.contains("hamiltonian") && j.at("hamiltonian").contains("extension")) {
    const auto& ej = j.at("hamiltonian").at("extension");
    if (ej.contains("margin")) {
      rc.ext.automatic = false;
      rc.ext.margins = ej.at("margin").get<std::vector<double>>();
      if (static_cast<int>(rc.ext.margins.size()) != rc.group.n)
        throw ConfigError("config: extension margin needs one entry per axis");
      for (double m : rc.ext.margins)
        if (!(m > 0.0)) throw ConfigError("config: extension margins must be positive");
    }
  }
  rc.task = need(j, "task", "config").get<std::string>();
  static const char* kTasks[] = {"distance", "solve", "verify", "compare", "stability", "probe"};
  bool known = false;
  for (const char* t : kTasks) known = known || rc.task == t;
  if (!known) throw ConfigError("config: unknown task \"" + rc.task + "\"");
  rc.params = j.contains(rc.task) ? j.at(rc.task) : nlohmann::json::object();
  rc.out_dir = j.value("output", std::string("."));
  if (j.contains("seed")) rc.seed = j.at("seed").get<std::uint64_t>();
  return rc;
}

inline nlohmann::json load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return j;
}

inline std::vector<double> resolved_margins(const RunConfig& rc) {
  return rc.ext.automatic ? default_extension_margins(rc.group, rc.omega, rc.ham.alpha)
                          : rc.ext.margins;
}

} // namespace subhj
