#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "subhj/graph.hpp"
#include "subhj/hopflax.hpp"
#include "subhj/util.hpp"
#include "subhj/verifier.hpp"

namespace subhj {

using nlohmann::json;

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // "\n" endings on every platform
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

inline std::string coord_header(int n, const std::string& tail) {
  std::string s;
  for (int a = 1; a <= n; ++a) s += "y" + std::to_string(a) + ",";
  return s + tail;
}

} // namespace detail

inline void write_field_csv(const std::string& path, const HorizontalGraph& g,
                            const std::vector<double>& values) {
  auto os = detail::open_out(path);
  os << "node_index," << detail::coord_header(g.group.n, "value") << "\n";
  for (std::int64_t id = 0; id < g.lat.total(); ++id) {
    if (!g.is_inside(id)) continue;
    os << id;
    const Point p = g.node_point(id);
    for (double c : p) os << "," << fmt_g17(c);
    os << "," << fmt_g17(values[static_cast<std::size_t>(id)]) << "\n";
  }
}

/// Solution export: coordinates and value, restricted to a subregion when
/// `within` is given.
inline void write_solution_csv(const std::string& path, const HorizontalGraph& g,
                               const std::vector<double>& values,
                               const DomainSpec* within = nullptr) {
  auto os = detail::open_out(path);
  os << detail::coord_header(g.group.n, "w") << "\n";
  for (std::int64_t id = 0; id < g.lat.total(); ++id) {
    if (!g.is_inside(id)) continue;
    const Point p = g.node_point(id);
    if (within != nullptr && !within->contains(p)) continue;
    for (double c : p) os << fmt_g17(c) << ",";
    os << fmt_g17(values[static_cast<std::size_t>(id)]) << "\n";
  }
}

inline void write_path_csv(const std::string& path, const HorizontalGraph& g,
                           const std::vector<std::int64_t>& nodes,
                           const std::vector<double>& cumcost) {
  if (nodes.size() != cumcost.size())
    throw std::invalid_argument("write_path_csv: size mismatch");
  auto os = detail::open_out(path);
  os << "step," << detail::coord_header(g.group.n, "cumcost") << "\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    os << i;
    const Point p = g.node_point(nodes[i]);
    for (double c : p) os << "," << fmt_g17(c);
    os << "," << fmt_g17(cumcost[i]) << "\n";
  }
}

inline void write_boundary_csv(const std::string& path, const HorizontalGraph& g,
                               const BoundaryDatum& datum) {
  auto os = detail::open_out(path);
  os << detail::coord_header(g.group.n, "g") << "\n";
  for (std::size_t i = 0; i < datum.size(); ++i) {
    const Point p = g.node_point(datum.nodes[i]);
    for (double c : p) os << fmt_g17(c) << ",";
    os << fmt_g17(datum.values[i]) << "\n";
  }
}

/// Rows of `y1..yn,g`; a leading header line is skipped if present.
inline std::vector<std::pair<Point, double>> read_boundary_csv(const std::string& path,
                                                               int n) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<std::pair<Point, double>> out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string tok;
    bool numeric = true;
    while (std::getline(ss, tok, ',')) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) {
        numeric = false;
        break;
      }
      fields.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw std::runtime_error("boundary csv: non-numeric row in " + path);
    }
    first = false;
    if (static_cast<int>(fields.size()) != n + 1)
      throw std::runtime_error("boundary csv: expected " + std::to_string(n + 1) +
                               " fields per row in " + path);
    Point p(fields.begin(), fields.end() - 1);
    out.emplace_back(std::move(p), fields.back());
  }
  if (out.empty()) throw std::runtime_error("boundary csv: no samples in " + path);
  return out;
}

/// Snaps tabulated samples to graph nodes; duplicate nodes keep the smaller
/// value (consistent with the minimum in the solution formula).
inline BoundaryDatum boundary_datum_from_samples(
    const HorizontalGraph& g, const std::vector<std::pair<Point, double>>& samples) {
  BoundaryDatum d;
  d.provenance = "tabulated";
  std::vector<std::int64_t> seen_at(static_cast<std::size_t>(g.lat.total()), -1);
  for (const auto& [p, v] : samples) {
    const std::int64_t node = g.snap_inside(p);
    if (node < 0)
      throw std::domain_error("boundary datum: sample snaps outside the domain");
    auto& slot = seen_at[static_cast<std::size_t>(node)];
    if (slot < 0) {
      slot = static_cast<std::int64_t>(d.nodes.size());
      d.nodes.push_back(node);
      d.values.push_back(v);
    } else if (v < d.values[static_cast<std::size_t>(slot)]) {
      d.values[static_cast<std::size_t>(slot)] = v;
    }
  }
  return d;
}

inline json bcc_to_json(const HorizontalGraph& g, const BccReport& rep) {
  json j;
  j["passed"] = rep.satisfied;
  j["checked"] = rep.checked;
  j["tolerance"] = rep.tolerance;
  j["margin"] = rep.worst_violation;
  j["sources_checked"] = rep.sources_checked;
  if (rep.worst_from >= 0 && rep.worst_to >= 0)
    j["worst_pair"] = {g.node_point(rep.worst_from), g.node_point(rep.worst_to)};
  else
    j["worst_pair"] = nullptr;
  return j;
}

inline json monge_record_to_json(const MongeProbeRecord& rec) {
  json j;
  j["probe"] = rec.x0;
  j["radii"] = rec.radii;
  json inf = json::array();
  for (double v : rec.infima)
    inf.push_back(v < kInf ? json(v) : json(nullptr));
  j["infima"] = inf;
  j["estimate"] = rec.estimate;
  j["class"] = monge_class_label(rec.cls);
  j["tau"] = rec.tau;
  if (!rec.violated_side.empty()) {
    j["violated_side"] = rec.violated_side;
    j["violation_margin"] = rec.violation_margin;
  }
  return j;
}

inline void write_json(const std::string& path, const json& j) {
  auto os = detail::open_out(path);
  os << j.dump(2) << "\n";
}

} // namespace subhj
