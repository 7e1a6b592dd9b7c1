#pragma once

// Shortest s-t path as a unit flow on arc variables.

#include <algorithm>
#include <cmath>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "optlab/ilp_core.hpp"
#include "optlab/puzzles/common.hpp"

namespace optlab::puzzles {

struct Arc {
  int from = 0;
  int to = 0;
  double cost = 0.0;
};

/// Nodes are 0..node_count-1.
struct PathInstance {
  int node_count = 0;
  std::vector<Arc> arcs;
  int source = 0;
  int target = 0;
};

inline void validate(const PathInstance& p) {
  auto in_range = [&](int v) { return v >= 0 && v < p.node_count; };
  if (!in_range(p.source) || !in_range(p.target)) throw PuzzleError(PuzzleErrc::InvalidInstance, "source or target out of range");
  if (p.source == p.target) throw PuzzleError(PuzzleErrc::InvalidInstance, "source equals target");
  for (const Arc& a : p.arcs) {
    if (!in_range(a.from) || !in_range(a.to)) throw PuzzleError(PuzzleErrc::InvalidInstance, "arc references a missing node");
    if (!std::isfinite(a.cost) || a.cost < 0) throw PuzzleError(PuzzleErrc::InvalidInstance, "arc cost must be finite and nonnegative");
  }
}

/// Arc k is variable x_<k>; flow_<v> is out - in = +1 / -1 / 0.
inline Model build_shortest_path(const PathInstance& p) {
  validate(p);
  Model m("path");
  std::vector<LinExpr> flow(p.node_count);
  LinExpr obj;
  for (std::size_t k = 0; k < p.arcs.size(); ++k) {
    VarId v = m.add_binary("x_" + std::to_string(k));
    flow[p.arcs[k].from].add_term(v, 1.0);
    flow[p.arcs[k].to].add_term(v, -1.0);
    obj.add_term(v, p.arcs[k].cost);
  }
  for (int v = 0; v < p.node_count; ++v) {
    const double rhs = v == p.source ? 1.0 : v == p.target ? -1.0 : 0.0;
    m.add_constraint("flow_" + std::to_string(v), flow[v], Sense::Eq, rhs);
  }
  m.set_objective(ObjSense::Minimize, obj);
  return m;
}

/// Arc indices along the path from the source. Zero-cost cycles detached from
/// the path may also be selected; they are ignored.
inline std::vector<std::size_t> decode_path(const PathInstance& p, std::span<const double> values) {
  std::vector<std::size_t> out;
  std::vector<bool> used(p.arcs.size(), false);
  int at = p.source;
  while (at != p.target && out.size() <= p.arcs.size()) {
    std::size_t k = 0;
    while (k < p.arcs.size() && (used[k] || values[k] <= 0.5 || p.arcs[k].from != at)) ++k;
    if (k == p.arcs.size()) return {};
    used[k] = true;
    out.push_back(k);
    at = p.arcs[k].to;
  }
  return out;
}

/// Arcs chain from source to target.
inline bool is_connected_path(const PathInstance& p, std::span<const std::size_t> path) {
  int at = p.source;
  for (std::size_t k : path) {
    if (k >= p.arcs.size() || p.arcs[k].from != at) return false;
    at = p.arcs[k].to;
  }
  return at == p.target;
}

inline double path_cost(const PathInstance& p, std::span<const std::size_t> path) {
  double c = 0;
  for (std::size_t k : path) c += p.arcs[k].cost;
  return c;
}

/// Arc list "u v cost", one per line; '#' comments. The node count is one
/// more than the largest index seen, or at least `min_nodes`.
inline PathInstance parse_arcs(std::istream& in, int source, int target, int min_nodes = 0) {
  PathInstance p;
  p.source = source;
  p.target = target;
  p.node_count = std::max({min_nodes, source + 1, target + 1});
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    Arc a;
    if (!(ls >> a.from)) continue;
    std::string rest;
    if (!(ls >> a.to >> a.cost) || (ls >> rest))
      throw PuzzleError(PuzzleErrc::InvalidInstance, "line " + std::to_string(lineno) + ": expected 'u v cost'");
    if (a.from < 0 || a.to < 0) throw PuzzleError(PuzzleErrc::InvalidInstance, "line " + std::to_string(lineno) + ": negative node");
    p.node_count = std::max({p.node_count, a.from + 1, a.to + 1});
    p.arcs.push_back(a);
  }
  validate(p);
  return p;
}

}  // namespace optlab::puzzles
