#pragma once

// LP-based branch and bound with lazy constraints and enumeration of all
// optimal 0/1 points.
//
// Search rules:
//   * depth-first; the ceil child is explored before the floor child
//   * branch on the most fractional integer variable, lowest index on ties
//   * a node is pruned when its LP bound cannot beat the incumbent by more
//     than kPruneTol (objectives compared after normalizing to maximization)
//   * integer candidates are shown to the lazy handler first; any returned
//     cuts join the global model and the node is re-solved

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "optlab/ilp_core.hpp"
#include "optlab/simplex.hpp"

namespace optlab {

inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kPruneTol = 1e-6;

enum class SolveStatus { Optimal, Infeasible, Unbounded, LimitReached };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::LimitReached: return "LimitReached";
  }
  return "?";
}

enum class BnbErrc { InvalidLazyCut, UnboundedIntegerVariable, NotBinaryModel };

class BnbError : public std::runtime_error {
 public:
  BnbError(BnbErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  BnbErrc code() const noexcept { return code_; }

 private:
  BnbErrc code_;
};

struct SolveStats {
  std::size_t nodes_explored = 0;
  std::size_t lp_iterations_total = 0;
  std::size_t cuts_added = 0;
  double wall_time = 0.0;  // seconds
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_incumbent = false;
  std::vector<double> values;  // by VarId; empty without an incumbent
  double objective = 0.0;
  SolveStats stats;
  std::vector<Constraint> lazy_cuts;  // every cut appended during the search
};

/// Receives the model (including earlier cuts) and an integer candidate;
/// returns constraints the candidate violates, or nothing to accept it.
using LazyCutHandler = std::function<std::vector<Constraint>(const Model&, std::span<const double>)>;

struct Progress {
  std::size_t nodes = 0;
  std::size_t open_nodes = 0;
  std::optional<double> incumbent;
  double elapsed = 0.0;
};

struct SolveConfig {
  std::optional<double> time_limit;  // seconds
  std::optional<std::size_t> node_limit;
  LazyCutHandler lazy;
  SimplexOptions lp;
  /// Prune with ceil(bound) when every objective coefficient sits on an
  /// integer variable and is integral. Off by default.
  bool integral_objective_pruning = false;
  std::function<void(const Progress&)> on_progress;
  std::size_t progress_interval = 1000;
};

struct BoundChange {
  VarId var;
  double lower = -kInf;
  double upper = kInf;
};

/// Open subproblem: root bounds tightened by `restrictions`.
struct Node {
  std::vector<BoundChange> restrictions;
  double parent_bound = kInf;  // maximization-normalized LP value of the parent
  std::size_t depth = 0;
};

/// Most fractional integer variable (|frac - 0.5| minimal), lowest index on ties.
inline std::optional<VarId> select_branch_variable(const Model& model, std::span<const double> values,
                                                   double tol = kIntegralityTol) {
  std::optional<VarId> best;
  double best_score = kInf;
  for (std::size_t j = 0; j < model.num_vars(); ++j) {
    if (!is_integral_kind(model.variables()[j].kind)) continue;
    const double x = values[j];
    const double frac = x - std::floor(x);
    if (frac <= tol || frac >= 1.0 - tol) continue;
    const double score = std::abs(frac - 0.5);
    if (score < best_score) {
      best_score = score;
      best = VarId{j};
    }
  }
  return best;
}

/// Maximization-normalized pruning test.
inline bool prune_by_bound(double bound, std::optional<double> incumbent) {
  return incumbent && bound <= *incumbent + kPruneTol;
}

/// True when every objective term is an integer coefficient on an integer variable.
inline bool objective_is_integral(const Model& model) {
  for (const auto& [idx, c] : model.objective().expr.terms()) {
    if (!is_integral_kind(model.variables()[idx].kind)) return false;
    if (c != std::round(c)) return false;
  }
  return model.objective().expr.constant() == std::round(model.objective().expr.constant());
}

namespace bnb_detail {

class Search {
 public:
  Search(const Model& model, const SolveConfig& cfg)
      : model_(model), cfg_(cfg), start_(std::chrono::steady_clock::now()) {
    sign_ = model_.objective().sense == ObjSense::Maximize ? 1.0 : -1.0;
    for (const Variable& v : model_.variables()) {
      if (is_integral_kind(v.kind) && (!std::isfinite(v.lower) || !std::isfinite(v.upper)))
        throw BnbError(BnbErrc::UnboundedIntegerVariable,
                       "integer variable " + v.name + " needs finite bounds for branch and bound");
      root_lower_.push_back(v.lower);
      root_upper_.push_back(v.upper);
    }
    integral_obj_ = cfg_.integral_objective_pruning && objective_is_integral(model_);
  }

  Solution run() {
    std::vector<Node> stack;
    stack.push_back(Node{});
    while (!stack.empty()) {
      if (limit_hit()) return finish(SolveStatus::LimitReached);
      Node node = std::move(stack.back());
      stack.pop_back();
      if (incumbent_ && prune(node.parent_bound)) continue;
      ++result_.stats.nodes_explored;
      report(stack.size());
      auto outcome = process(node);
      if (outcome == Outcome::Unbounded) return finish(SolveStatus::Unbounded);
      if (outcome != Outcome::Branch) continue;
      // Floor child pushed first so the ceil child is popped first.
      const double x = branch_value_;
      const VarId v = branch_var_;
      Node floor_child{node.restrictions, node_bound_, node.depth + 1};
      floor_child.restrictions.push_back({v, -kInf, std::floor(x)});
      Node ceil_child{std::move(node.restrictions), node_bound_, node.depth + 1};
      ceil_child.restrictions.push_back({v, std::ceil(x), kInf});
      stack.push_back(std::move(floor_child));
      stack.push_back(std::move(ceil_child));
    }
    return finish(incumbent_ ? SolveStatus::Optimal : SolveStatus::Infeasible);
  }

 private:
  enum class Outcome { Pruned, Infeasible, Accepted, Branch, Unbounded };

  bool limit_hit() const {
    if (cfg_.node_limit && result_.stats.nodes_explored >= *cfg_.node_limit) return true;
    if (cfg_.time_limit && elapsed() >= *cfg_.time_limit) return true;
    return false;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool prune(double bound) const {
    if (integral_obj_ && std::isfinite(bound)) bound = std::floor(bound + kPruneTol);
    return prune_by_bound(bound, incumbent_);
  }

  void report(std::size_t open) {
    if (!cfg_.on_progress || cfg_.progress_interval == 0) return;
    if (result_.stats.nodes_explored % cfg_.progress_interval != 0) return;
    Progress p;
    p.nodes = result_.stats.nodes_explored;
    p.open_nodes = open;
    if (incumbent_) p.incumbent = sign_ * *incumbent_;
    p.elapsed = elapsed();
    cfg_.on_progress(p);
  }

  Outcome process(const Node& node) {
    std::vector<double> lo = root_lower_;
    std::vector<double> hi = root_upper_;
    for (const BoundChange& r : node.restrictions) {
      lo[r.var.index] = std::max(lo[r.var.index], r.lower);
      hi[r.var.index] = std::min(hi[r.var.index], r.upper);
    }
    while (true) {
      LpResult lp = solve_relaxation(model_, lo, hi, cfg_.lp);
      result_.stats.lp_iterations_total += lp.iterations;
      if (lp.status == LpStatus::Infeasible) return Outcome::Infeasible;
      if (lp.status == LpStatus::Unbounded) return Outcome::Unbounded;
      node_bound_ = sign_ * lp.objective;
      if (prune(node_bound_)) return Outcome::Pruned;
      if (auto v = select_branch_variable(model_, lp.values)) {
        branch_var_ = *v;
        branch_value_ = lp.values[v->index];
        return Outcome::Branch;
      }
      std::vector<double> candidate = std::move(lp.values);
      for (std::size_t j = 0; j < candidate.size(); ++j)
        if (is_integral_kind(model_.variables()[j].kind)) candidate[j] = std::round(candidate[j]);
      if (cfg_.lazy) {
        std::vector<Constraint> cuts = cfg_.lazy(model_, candidate);
        if (!cuts.empty()) {
          add_cuts(std::move(cuts), candidate);
          continue;
        }
      }
      incumbent_ = sign_ * evaluate(model_.objective().expr, candidate);
      result_.values = std::move(candidate);
      return Outcome::Accepted;
    }
  }

  void add_cuts(std::vector<Constraint> cuts, std::span<const double> candidate) {
    for (Constraint& c : cuts) {
      for (const auto& [idx, coeff] : c.expr.terms())
        if (idx >= model_.num_vars())
          throw BnbError(BnbErrc::InvalidLazyCut, "lazy cut references unknown variable");
      if (violation(c, evaluate(c.expr, candidate)) <= kIntegralityTol)
        throw BnbError(BnbErrc::InvalidLazyCut,
                       "lazy cut '" + c.name + "' is not violated by the candidate solution");
      std::string name = c.name;
      if (name.empty() || !is_valid_identifier(name) || model_.has_constraint(name)) {
        do name = "lazy_" + std::to_string(++cut_serial_);
        while (model_.has_constraint(name));
      }
      ConstraintId id = model_.add_constraint(name, c.expr, c.sense, c.rhs);
      result_.lazy_cuts.push_back(model_.constraint(id));
      ++result_.stats.cuts_added;
    }
  }

  Solution finish(SolveStatus status) {
    result_.status = status;
    result_.has_incumbent = incumbent_.has_value();
    if (incumbent_) {
      result_.objective = sign_ * *incumbent_;
    } else {
      result_.values.clear();
    }
    if (status == SolveStatus::Unbounded) {
      result_.has_incumbent = false;
      result_.values.clear();
    }
    result_.stats.wall_time = elapsed();
    return std::move(result_);
  }

  Model model_;
  const SolveConfig& cfg_;
  std::chrono::steady_clock::time_point start_;
  double sign_ = 1.0;
  bool integral_obj_ = false;
  std::vector<double> root_lower_;
  std::vector<double> root_upper_;
  std::optional<double> incumbent_;  // maximization-normalized
  double node_bound_ = kInf;
  VarId branch_var_;
  double branch_value_ = 0.0;
  std::size_t cut_serial_ = 0;
  Solution result_;
};

}  // namespace bnb_detail

/// Exact ILP solve. Lazy cuts found during the search are returned in
/// Solution::lazy_cuts; the input model is not modified.
inline Solution solve(const Model& model, const SolveConfig& config = {}) {
  return bnb_detail::Search(model, config).run();
}

/// Copy of `model` plus enough lazy cuts that a plain solve (no handler)
/// already returns a point the handler accepts. Returns nullopt when a solve
/// stops without an optimum.
inline std::optional<Model> absorb_lazy_cuts(const Model& model, const LazyCutHandler& lazy,
                                             const SolveConfig& config = {}) {
  Model work = model;
  SolveConfig cfg = config;
  cfg.lazy = nullptr;
  std::size_t serial = 0;
  while (true) {
    Solution s = solve(work, cfg);
    if (s.status == SolveStatus::Infeasible) return work;
    if (s.status != SolveStatus::Optimal) return std::nullopt;
    std::vector<Constraint> cuts = lazy(work, s.values);
    if (cuts.empty()) return work;
    for (const Constraint& c : cuts) {
      std::string name = c.name;
      if (name.empty() || !is_valid_identifier(name) || work.has_constraint(name)) {
        do name = "lazy_" + std::to_string(++serial);
        while (work.has_constraint(name));
      }
      work.add_constraint(name, c.expr, c.sense, c.rhs);
    }
  }
}

struct Enumeration {
  SolveStatus status = SolveStatus::Infeasible;  // status of the first (optimizing) solve
  double optimum = 0.0;
  std::vector<Solution> solutions;
  bool complete = false;  // false when a limit or max_solutions stopped the search
  SolveStats stats;       // totals over all solves
};

/// Every variable that appears in the objective or a constraint must be Binary.
inline void require_binary(const Model& model) {
  std::vector<bool> used(model.num_vars(), false);
  for (const auto& [idx, c] : model.objective().expr.terms()) used[idx] = true;
  for (const Constraint& c : model.constraints())
    for (const auto& [idx, coeff] : c.expr.terms()) used[idx] = true;
  for (std::size_t j = 0; j < model.num_vars(); ++j)
    if (used[j] && model.variables()[j].kind != VarKind::Binary)
      throw BnbError(BnbErrc::NotBinaryModel, "variable " + model.variables()[j].name + " is not binary");
}

/// All distinct optimal 0/1 points, found by re-solving under an
/// objective-equality band and one no-good cut per solution found.
inline Enumeration enumerate_optimal(const Model& model, const SolveConfig& config, std::size_t max_solutions) {
  require_binary(model);
  const auto start = std::chrono::steady_clock::now();
  auto remaining = [&]() -> std::optional<double> {
    if (!config.time_limit) return std::nullopt;
    double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::max(0.0, *config.time_limit - used);
  };
  auto accumulate = [](SolveStats& total, const SolveStats& s) {
    total.nodes_explored += s.nodes_explored;
    total.lp_iterations_total += s.lp_iterations_total;
    total.cuts_added += s.cuts_added;
  };

  Enumeration out;
  Model work = model;
  SolveConfig cfg = config;
  cfg.time_limit = remaining();
  Solution first = solve(work, cfg);
  accumulate(out.stats, first.stats);
  out.status = first.status;
  if (first.status != SolveStatus::Optimal) {
    if (first.status == SolveStatus::LimitReached && first.has_incumbent) out.solutions.push_back(first);
    out.complete = first.status == SolveStatus::Infeasible;
    out.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }
  out.optimum = first.objective;
  for (const Constraint& c : first.lazy_cuts) work.add_constraint(c.name, c.expr, c.sense, c.rhs);

  LinExpr obj = model.objective().expr;
  work.add_constraint("enum_obj_lo", obj, Sense::Ge, out.optimum - kIntegralityTol);
  work.add_constraint("enum_obj_hi", obj, Sense::Le, out.optimum + kIntegralityTol);

  Solution current = std::move(first);
  std::size_t serial = 0;
  while (true) {
    current.lazy_cuts.clear();
    out.solutions.push_back(current);
    if (out.solutions.size() >= max_solutions) break;

    LinExpr nogood;
    double ones = 0.0;
    for (std::size_t j = 0; j < work.num_vars(); ++j) {
      if (work.variables()[j].kind != VarKind::Binary) continue;
      if (current.values[j] > 0.5) {
        nogood.add_term(VarId{j}, 1.0);
        ones += 1.0;
      } else {
        nogood.add_term(VarId{j}, -1.0);
      }
    }
    std::string name;
    do name = "nogood_" + std::to_string(++serial);
    while (work.has_constraint(name));
    work.add_constraint(name, nogood, Sense::Le, ones - 1.0);

    cfg.time_limit = remaining();
    Solution next = solve(work, cfg);
    accumulate(out.stats, next.stats);
    for (const Constraint& c : next.lazy_cuts) work.add_constraint(c.name, c.expr, c.sense, c.rhs);
    if (next.status == SolveStatus::Infeasible) {
      out.complete = true;
      break;
    }
    if (next.status != SolveStatus::Optimal) {
      if (next.has_incumbent) {
        next.lazy_cuts.clear();
        out.solutions.push_back(std::move(next));
      }
      break;
    }
    current = std::move(next);
  }
  out.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace optlab
