#pragma once

// Symmetric TSP with degree equalities and lazy subtour cuts, and knight's
// tours as Hamiltonian cycles on the knight-move graph.

#include <cmath>
#include <cstdlib>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "optlab/branch_and_bound.hpp"
#include "optlab/ilp_core.hpp"
#include "optlab/puzzles/common.hpp"

namespace optlab::puzzles {

struct WeightedGraph {
  int n = 0;
  std::vector<std::vector<double>> d;  // symmetric, zero diagonal
  std::vector<std::pair<double, double>> coords;  // optional
  /// Missing edges; when non-empty, allowed[i][j] == false drops edge i-j from the model.
  std::vector<std::vector<bool>> allowed;

  bool has_edge(int i, int j) const { return i != j && (allowed.empty() || allowed[i][j]); }
};

inline void validate(const WeightedGraph& g) {
  if (g.n < 3) throw PuzzleError(PuzzleErrc::InvalidSize, "a tour needs at least 3 nodes");
  if (static_cast<int>(g.d.size()) != g.n) throw PuzzleError(PuzzleErrc::InvalidInstance, "distance matrix size");
  for (int i = 0; i < g.n; ++i) {
    if (static_cast<int>(g.d[i].size()) != g.n) throw PuzzleError(PuzzleErrc::InvalidInstance, "distance matrix size");
    for (int j = 0; j < g.n; ++j) {
      const double x = g.d[i][j];
      if (!std::isfinite(x) || x < 0 || x != g.d[j][i] || (i == j && x != 0))
        throw PuzzleError(PuzzleErrc::InvalidInstance,
                          "distance " + std::to_string(i) + "," + std::to_string(j) + " breaks symmetry or finiteness");
    }
  }
}

inline WeightedGraph euclidean_graph(std::vector<std::pair<double, double>> pts) {
  WeightedGraph g;
  g.n = static_cast<int>(pts.size());
  g.d.assign(g.n, std::vector<double>(g.n, 0.0));
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j)
      g.d[i][j] = g.d[j][i] = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
  g.coords = std::move(pts);
  return g;
}

/// Edge variables y_i_j (i < j) in lexicographic order, skipping missing edges.
struct TspModel {
  Model model;
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // indexed by VarId
  LazyCutHandler subtour_cuts;
};

/// Connected components of the selected edges (value > 0.5).
inline std::vector<std::vector<int>> tour_components(int n, std::span<const std::pair<int, int>> edges,
                                                     std::span<const double> values) {
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < edges.size(); ++k)
    if (values[k] > 0.5) parent[find(edges[k].first)] = find(edges[k].second);
  std::vector<std::vector<int>> comps;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[slot[r]].push_back(i);
  }
  return comps;
}

inline TspModel build_tsp(const WeightedGraph& g) {
  validate(g);
  TspModel out;
  out.n = g.n;
  out.model = Model("tsp_" + std::to_string(g.n));
  Model& m = out.model;
  std::vector<LinExpr> degree(g.n);
  LinExpr obj;
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j) {
      if (!g.has_edge(i, j)) continue;
      VarId v = m.add_binary(cell_name("y", i, j));
      out.edges.emplace_back(i, j);
      degree[i].add_term(v, 1.0);
      degree[j].add_term(v, 1.0);
      obj.add_term(v, g.d[i][j]);
    }
  for (int i = 0; i < g.n; ++i) m.add_constraint("deg_" + std::to_string(i), degree[i], Sense::Eq, 2.0);
  m.set_objective(ObjSense::Minimize, obj);

  out.subtour_cuts = [n = g.n, edges = out.edges](const Model&, std::span<const double> x) {
    std::vector<Constraint> cuts;
    auto comps = tour_components(n, edges, x);
    if (comps.size() == 1) return cuts;
    std::vector<int> comp_of(n);
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (int i : comps[c]) comp_of[i] = static_cast<int>(c);
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const std::size_t s = comps[c].size();
      if (s < 2) continue;
      LinExpr e;
      for (std::size_t k = 0; k < edges.size(); ++k)
        if (comp_of[edges[k].first] == static_cast<int>(c) && comp_of[edges[k].second] == static_cast<int>(c))
          e.add_term(VarId{k}, 1.0);
      cuts.push_back(Constraint{"", std::move(e), Sense::Le, static_cast<double>(s) - 1.0});
    }
    return cuts;
  };
  return out;
}

/// Walks the selected edges from node 0. Returns the cycle order, or an empty
/// list when the selection is not a single Hamiltonian cycle.
inline std::vector<int> decode_tour(const TspModel& tm, std::span<const double> values) {
  std::vector<std::vector<int>> adj(tm.n);
  for (std::size_t k = 0; k < tm.edges.size(); ++k)
    if (values[k] > 0.5) {
      adj[tm.edges[k].first].push_back(tm.edges[k].second);
      adj[tm.edges[k].second].push_back(tm.edges[k].first);
    }
  for (const auto& a : adj)
    if (a.size() != 2) return {};
  std::vector<int> order{0};
  int prev = -1, cur = 0;
  while (true) {
    int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
    if (next == 0) break;
    order.push_back(next);
    prev = cur;
    cur = next;
    if (static_cast<int>(order.size()) > tm.n) return {};
  }
  if (static_cast<int>(order.size()) != tm.n) return {};
  return order;
}

/// True when `order` visits each of 0..n-1 once.
inline bool is_permutation_of(std::span<const int> order, int n) {
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int v : order) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

inline double cycle_length(const WeightedGraph& g, std::span<const int> order) {
  double len = 0;
  for (std::size_t k = 0; k < order.size(); ++k) len += g.d[order[k]][order[(k + 1) % order.size()]];
  return len;
}

struct TourResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<int> order;
  double length = 0.0;
  SolveStats stats;
};

inline TourResult solve_tsp(const WeightedGraph& g, SolveConfig cfg = {}) {
  TspModel tm = build_tsp(g);
  cfg.lazy = tm.subtour_cuts;
  Solution s = solve(tm.model, cfg);
  TourResult out;
  out.status = s.status;
  out.stats = s.stats;
  if (s.has_incumbent) {
    out.order = decode_tour(tm, s.values);
    out.length = s.objective;
  }
  return out;
}

/// Distance matrix text: "n" then either n lines of "x y" coordinates or an
/// n x n matrix. '#' starts a comment.
inline WeightedGraph parse_tsp(std::istream& in) {
  std::vector<double> nums;
  std::vector<std::size_t> per_line;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::size_t before = nums.size();
    double x;
    while (ls >> x) nums.push_back(x);
    if (!ls.eof()) throw PuzzleError(PuzzleErrc::InvalidInstance, "bad number in TSP input");
    if (nums.size() > before) per_line.push_back(nums.size() - before);
  }
  if (nums.empty() || per_line[0] != 1 || nums[0] != std::floor(nums[0]) || nums[0] < 1)
    throw PuzzleError(PuzzleErrc::InvalidInstance, "TSP input must start with the node count");
  const auto n = static_cast<std::size_t>(nums[0]);
  if (nums.size() == 1 + 2 * n && n != 2) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(nums[1 + 2 * i], nums[2 + 2 * i]);
    WeightedGraph g = euclidean_graph(std::move(pts));
    validate(g);
    return g;
  }
  if (nums.size() == 1 + n * n) {
    WeightedGraph g;
    g.n = static_cast<int>(n);
    g.d.assign(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g.d[i][j] = nums[1 + i * n + j];
    validate(g);
    return g;
  }
  throw PuzzleError(PuzzleErrc::InvalidInstance, "expected n coordinate pairs or an n x n matrix");
}

// ---------------------------------------------------------------------------
// Knight's tours

/// Cell (r, c), 1-based, is node (r-1)*n + (c-1). Open tours add node n*n.
struct KnightModel {
  TspModel tsp;
  int n = 0;
  bool closed = true;
};

inline bool knight_move(std::pair<int, int> a, std::pair<int, int> b) {
  const int dr = std::abs(a.first - b.first), dc = std::abs(a.second - b.second);
  return (dr == 1 && dc == 2) || (dr == 2 && dc == 1);
}

inline KnightModel build_knight_tour(int n, bool closed) {
  if (n < 3) throw PuzzleError(PuzzleErrc::InvalidSize, "knight board must be at least 3 x 3");
  const int cells = n * n;
  WeightedGraph g;
  g.n = closed ? cells : cells + 1;
  g.d.assign(g.n, std::vector<double>(g.n, 0.0));
  g.allowed.assign(g.n, std::vector<bool>(g.n, false));
  for (int a = 0; a < cells; ++a)
    for (int b = 0; b < cells; ++b)
      if (knight_move({a / n, a % n}, {b / n, b % n})) {
        g.allowed[a][b] = true;
        g.d[a][b] = 1.0;
      }
  if (!closed)
    for (int a = 0; a < cells; ++a) g.allowed[a][cells] = g.allowed[cells][a] = true;  // zero cost
  KnightModel km{build_tsp(g), n, closed};
  km.tsp.model.set_name((closed ? "knight_closed_" : "knight_open_") + std::to_string(n));
  return km;
}

/// Visiting order as 1-based (row, col). An open tour is the cycle cut at the dummy node.
inline std::vector<std::pair<int, int>> decode_knight(const KnightModel& km, std::span<const double> values) {
  std::vector<int> cyc = decode_tour(km.tsp, values);
  if (cyc.empty()) return {};
  const int cells = km.n * km.n;
  if (!km.closed) {
    std::size_t at = 0;
    while (cyc[at] != cells) ++at;
    std::vector<int> rot;
    for (std::size_t k = 1; k < cyc.size(); ++k) rot.push_back(cyc[(at + k) % cyc.size()]);
    cyc = std::move(rot);
  }
  std::vector<std::pair<int, int>> out;
  for (int v : cyc) out.emplace_back(v / km.n + 1, v % km.n + 1);
  return out;
}

/// Each cell once, consecutive cells a knight move apart (and last to first when closed).
inline bool is_knight_tour(int n, std::span<const std::pair<int, int>> seq, bool closed) {
  if (static_cast<int>(seq.size()) != n * n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n * n), false);
  for (auto [r, c] : seq) {
    if (r < 1 || r > n || c < 1 || c > n || seen[(r - 1) * n + (c - 1)]) return false;
    seen[(r - 1) * n + (c - 1)] = true;
  }
  for (std::size_t k = 0; k + 1 < seq.size(); ++k)
    if (!knight_move(seq[k], seq[k + 1])) return false;
  return !closed || knight_move(seq.back(), seq.front());
}

/// Board of move numbers (1-based), right-aligned.
inline std::string render_knight(int n, std::span<const std::pair<int, int>> seq) {
  std::vector<int> num(static_cast<std::size_t>(n * n), 0);
  for (std::size_t k = 0; k < seq.size(); ++k) num[(seq[k].first - 1) * n + (seq[k].second - 1)] = static_cast<int>(k + 1);
  const std::size_t w = std::to_string(n * n).size();
  std::string out;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      std::string s = std::to_string(num[r * n + c]);
      if (c) out += ' ';
      out += std::string(w - s.size(), ' ') + s;
    }
    out += '\n';
  }
  return out;
}

}  // namespace optlab::puzzles
