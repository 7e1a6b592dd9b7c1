#pragma once

// 0/1 knapsack: pick items under a weight limit, maximize total utility.

#include <cmath>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "optlab/ilp_core.hpp"
#include "optlab/puzzles/common.hpp"

namespace optlab::puzzles {

struct KnapsackItem {
  std::string name;
  double weight = 0.0;
  double utility = 0.0;
};

struct KnapsackInstance {
  std::vector<KnapsackItem> items;
  double capacity = 0.0;
};

inline void validate(const KnapsackInstance& k) {
  if (!std::isfinite(k.capacity) || k.capacity < 0)
    throw PuzzleError(PuzzleErrc::InvalidInstance, "capacity must be finite and nonnegative");
  for (const KnapsackItem& it : k.items)
    if (!std::isfinite(it.weight) || it.weight < 0 || !std::isfinite(it.utility))
      throw PuzzleError(PuzzleErrc::InvalidInstance, "item " + it.name + " has a bad weight or utility");
}

/// Variable x_<i> per item i (0-based, in input order).
inline Model build_knapsack(const KnapsackInstance& k) {
  validate(k);
  Model m("knapsack");
  LinExpr load, obj;
  for (std::size_t i = 0; i < k.items.size(); ++i) {
    VarId v = m.add_binary("x_" + std::to_string(i));
    load.add_term(v, k.items[i].weight);
    obj.add_term(v, k.items[i].utility);
  }
  m.add_constraint("capacity", load, Sense::Le, k.capacity);
  m.set_objective(ObjSense::Maximize, obj);
  return m;
}

inline std::vector<std::string> decode_knapsack(const KnapsackInstance& k, std::span<const double> values) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k.items.size(); ++i)
    if (values[i] > 0.5) out.push_back(k.items[i].name);
  return out;
}

/// Selected names exist, are distinct, and fit the capacity.
inline bool fits_capacity(const KnapsackInstance& k, std::span<const std::string> chosen, double tol = 1e-9) {
  std::vector<bool> used(k.items.size(), false);
  double w = 0;
  for (const std::string& name : chosen) {
    std::size_t i = 0;
    while (i < k.items.size() && (used[i] || k.items[i].name != name)) ++i;
    if (i == k.items.size()) return false;
    used[i] = true;
    w += k.items[i].weight;
  }
  return w <= k.capacity + tol;
}

/// CSV lines "name,weight,utility". An optional header line starting with
/// "name" and '#' comments are skipped. The capacity comes separately.
inline KnapsackInstance parse_knapsack_csv(std::istream& in, double capacity) {
  KnapsackInstance k;
  k.capacity = capacity;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || (lineno == 1 && line.rfind("name", 0) == 0)) continue;
    std::istringstream ls(line);
    std::string name, w, u;
    if (!std::getline(ls, name, ',') || !std::getline(ls, w, ',') || !std::getline(ls, u))
      throw PuzzleError(PuzzleErrc::InvalidInstance, "line " + std::to_string(lineno) + ": expected name,weight,utility");
    try {
      std::size_t pw = 0, pu = 0;
      KnapsackItem it{name, std::stod(w, &pw), std::stod(u, &pu)};
      if (w.find_first_not_of(' ', pw) != std::string::npos || u.find_first_not_of(' ', pu) != std::string::npos)
        throw std::invalid_argument("trailing");
      k.items.push_back(std::move(it));
    } catch (const std::logic_error&) {
      throw PuzzleError(PuzzleErrc::InvalidInstance, "line " + std::to_string(lineno) + ": bad number");
    }
  }
  validate(k);
  return k;
}

}  // namespace optlab::puzzles
