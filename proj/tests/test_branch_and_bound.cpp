#include <gtest/gtest.h>

#include <random>
#include <set>

#include "optlab/branch_and_bound.hpp"
#include "optlab/puzzles/knapsack.hpp"
#include "optlab/puzzles/queens.hpp"
#include "oracles.hpp"

using namespace optlab;

namespace {

struct RandomIlp {
  Model model;
  std::vector<int> c;
  std::vector<oracle::BinRow> rows;
};

RandomIlp random_binary_ilp(std::mt19937_64& rng) {
  RandomIlp out;
  const int n = 2 + static_cast<int>(rng() % 11);
  const int m = 1 + static_cast<int>(rng() % 6);
  for (int j = 0; j < n; ++j) out.model.add_binary("x" + std::to_string(j));
  for (int i = 0; i < m; ++i) {
    oracle::BinRow row;
    LinExpr e;
    int positive = 0;
    for (int j = 0; j < n; ++j) {
      const int a = static_cast<int>(rng() % 11) - 3;
      row.a.push_back(a);
      e.add_term(VarId{static_cast<std::size_t>(j)}, a);
      positive += std::max(a, 0);
    }
    const int kind = static_cast<int>(rng() % 5);
    row.sense = kind == 0 ? 1 : kind == 1 ? 0 : -1;
    row.rhs = positive == 0 ? 0 : static_cast<int>(rng() % (positive + 1)) - (row.sense > 0 ? 2 : 0);
    out.model.add_constraint("r" + std::to_string(i), e,
                             row.sense < 0 ? Sense::Le : row.sense == 0 ? Sense::Eq : Sense::Ge, row.rhs);
    out.rows.push_back(row);
  }
  LinExpr obj;
  for (int j = 0; j < n; ++j) {
    out.c.push_back(static_cast<int>(rng() % 21) - 8);
    obj.add_term(VarId{static_cast<std::size_t>(j)}, out.c.back());
  }
  out.model.set_objective(ObjSense::Maximize, obj);
  return out;
}

std::set<std::vector<int>> as_points(const Enumeration& e) {
  std::set<std::vector<int>> pts;
  for (const Solution& s : e.solutions) {
    std::vector<int> p;
    for (double v : s.values) p.push_back(static_cast<int>(std::lround(v)));
    pts.insert(p);
  }
  return pts;
}

}  // namespace

TEST(BranchAndBound, EightQueensOptimum) {
  Solution s = solve(puzzles::build_queens(8));
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 8.0, 1e-9);
  EXPECT_TRUE(check_feasible(puzzles::build_queens(8), s.values).feasible);
  EXPECT_TRUE(puzzles::is_non_attacking(puzzles::decode_queens(puzzles::build_queens(8), s.values)));
}

TEST(BranchAndBound, IntegralRelaxationNeedsOneNode) {
  Model m;
  VarId x = m.add_variable("x", 0, 10, VarKind::Integer);
  VarId y = m.add_variable("y", 0, 10, VarKind::Integer);
  m.add_constraint("a", LinExpr(x) + LinExpr(y), Sense::Le, 4);
  m.set_objective(ObjSense::Maximize, LinExpr(x) * 3.0 + LinExpr(y) * 2.0);
  Solution s = solve(m);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 12.0, 1e-9);
  EXPECT_EQ(s.stats.nodes_explored, 1u);
}

TEST(BranchAndBound, KnapsackMatchesEnumeration) {
  const std::vector<double> w{23, 31, 29, 44, 53, 38, 63, 85, 89, 82, 12, 17};
  const std::vector<double> u{92, 57, 49, 68, 60, 43, 67, 84, 87, 72, 20, 31};
  puzzles::KnapsackInstance k;
  k.capacity = 165;
  for (std::size_t i = 0; i < w.size(); ++i) k.items.push_back({"i" + std::to_string(i), w[i], u[i]});
  Solution s = solve(puzzles::build_knapsack(k));
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, oracle::knapsack_brute_force(w, u, 165), 1e-9);
  auto chosen = puzzles::decode_knapsack(k, s.values);
  EXPECT_TRUE(puzzles::fits_capacity(k, chosen));
}

TEST(BranchAndBound, InfeasibleAndMinimize) {
  Model m;
  VarId x = m.add_binary("x");
  VarId y = m.add_binary("y");
  m.add_constraint("a", LinExpr(x) + LinExpr(y), Sense::Ge, 3);
  EXPECT_EQ(solve(m).status, SolveStatus::Infeasible);

  Model n;
  VarId p = n.add_variable("p", 0, 9, VarKind::Integer);
  VarId q = n.add_variable("q", 0, 9, VarKind::Integer);
  n.add_constraint("c", LinExpr(p) * 2.0 + LinExpr(q) * 2.0, Sense::Ge, 7);
  n.set_objective(ObjSense::Minimize, LinExpr(p) * 3.0 + LinExpr(q) * 5.0);
  Solution s = solve(n);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 12.0, 1e-9);
}

TEST(BranchAndBound, UnboundedRelaxation) {
  Model m;
  VarId x = m.add_binary("x");
  VarId y = m.add_variable("y", 0, kInf, VarKind::Continuous);
  m.set_objective(ObjSense::Maximize, LinExpr(x) + LinExpr(y));
  EXPECT_EQ(solve(m).status, SolveStatus::Unbounded);
}

TEST(BranchAndBound, IntegerVariablesNeedFiniteBounds) {
  Model m;
  m.add_variable("z", 0, kInf, VarKind::Integer);
  try {
    solve(m);
    FAIL();
  } catch (const BnbError& e) {
    EXPECT_EQ(e.code(), BnbErrc::UnboundedIntegerVariable);
  }
}

TEST(BranchAndBound, NodeLimitKeepsIncumbent) {
  SolveConfig cfg;
  cfg.node_limit = 3;
  Solution s = solve(puzzles::build_queens_blocking(6), cfg);
  EXPECT_EQ(s.status, SolveStatus::LimitReached);
  EXPECT_LE(s.stats.nodes_explored, 3u);
}

TEST(BranchAndBound, Deterministic) {
  Model m = puzzles::build_queens(7);
  Solution a = solve(m);
  Solution b = solve(m);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.stats.nodes_explored, b.stats.nodes_explored);
  EXPECT_EQ(a.stats.lp_iterations_total, b.stats.lp_iterations_total);
}

TEST(BranchRules, PruneAgainstIncumbent) {
  EXPECT_TRUE(prune_by_bound(7.2, 8.0));
  EXPECT_TRUE(prune_by_bound(8.0000001, 8.0));
  EXPECT_FALSE(prune_by_bound(8.5, 8.0));
  EXPECT_FALSE(prune_by_bound(7.2, std::nullopt));
}

TEST(BranchRules, MostFractionalVariable) {
  Model m;
  m.add_binary("a");
  m.add_binary("b");
  m.add_variable("c", 0, 1, VarKind::Continuous);
  std::vector<double> v{0.5, 0.3, 0.5};
  EXPECT_EQ(select_branch_variable(m, v)->index, 0u);
  v = {0.3, 0.6, 0.5};
  EXPECT_EQ(select_branch_variable(m, v)->index, 1u);
  v = {1.0, 0.0, 0.5};
  EXPECT_FALSE(select_branch_variable(m, v).has_value());
}

TEST(LazyCuts, InertHandlerChangesNothing) {
  Model m = puzzles::build_queens(6);
  SolveConfig cfg;
  int calls = 0;
  cfg.lazy = [&](const Model&, std::span<const double>) {
    ++calls;
    return std::vector<Constraint>{};
  };
  Solution with = solve(m, cfg);
  Solution without = solve(m);
  EXPECT_GT(calls, 0);
  EXPECT_EQ(with.objective, without.objective);
  EXPECT_EQ(with.values, without.values);
  EXPECT_EQ(with.stats.cuts_added, 0u);
}

TEST(LazyCuts, CutsAreNamedAndApplied) {
  // maximize x+y+z, forbid more than one variable through lazy cuts only
  Model m;
  for (const char* n : {"x", "y", "z"}) m.add_binary(n);
  m.set_objective(ObjSense::Maximize, LinExpr(VarId{0}) + LinExpr(VarId{1}) + LinExpr(VarId{2}));
  SolveConfig cfg;
  cfg.lazy = [](const Model&, std::span<const double> v) {
    std::vector<Constraint> cuts;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b)
        if (v[a] > 0.5 && v[b] > 0.5)
          cuts.push_back(Constraint{"", LinExpr(VarId{a}) + LinExpr(VarId{b}), Sense::Le, 1});
    return cuts;
  };
  Solution s = solve(m, cfg);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
  ASSERT_FALSE(s.lazy_cuts.empty());
  EXPECT_EQ(s.lazy_cuts.front().name, "lazy_1");
  EXPECT_EQ(s.stats.cuts_added, s.lazy_cuts.size());
  EXPECT_EQ(m.num_constraints(), 0u);

  auto closed = absorb_lazy_cuts(m, cfg.lazy);
  ASSERT_TRUE(closed);
  Solution plain = solve(*closed);
  EXPECT_NEAR(plain.objective, 1.0, 1e-9);
}

TEST(LazyCuts, SatisfiedCutIsRejected) {
  Model m;
  VarId x = m.add_binary("x");
  m.set_objective(ObjSense::Maximize, LinExpr(x));
  SolveConfig cfg;
  cfg.lazy = [](const Model&, std::span<const double>) {
    return std::vector<Constraint>{Constraint{"loose", LinExpr(VarId{0}), Sense::Le, 5}};
  };
  try {
    solve(m, cfg);
    FAIL();
  } catch (const BnbError& e) {
    EXPECT_EQ(e.code(), BnbErrc::InvalidLazyCut);
  }
}

TEST(Enumerate, SmallQueensCounts) {
  const std::pair<int, std::size_t> expected[] = {{1, 1}, {4, 2}, {5, 10}, {6, 4}};
  for (auto [n, count] : expected) {
    Enumeration e = enumerate_optimal(puzzles::build_queens(n), {}, 1000);
    EXPECT_TRUE(e.complete);
    EXPECT_EQ(e.solutions.size(), count) << "n=" << n;
    EXPECT_NEAR(e.optimum, n, 1e-9);
    EXPECT_EQ(as_points(e).size(), count);
    EXPECT_EQ(oracle::queens_solutions(n).size(), count);
  }
}

TEST(Enumerate, MaxSolutionsStopsEarly) {
  Enumeration e = enumerate_optimal(puzzles::build_queens(5), {}, 3);
  EXPECT_FALSE(e.complete);
  EXPECT_EQ(e.solutions.size(), 3u);
}

TEST(Enumerate, RequiresBinaryModel) {
  Model m;
  VarId x = m.add_variable("x", 0, 3, VarKind::Integer);
  m.set_objective(ObjSense::Maximize, LinExpr(x));
  try {
    enumerate_optimal(m, {}, 10);
    FAIL();
  } catch (const BnbError& e) {
    EXPECT_EQ(e.code(), BnbErrc::NotBinaryModel);
  }
}

TEST(BranchAndBoundProperty, RandomBinaryProgramsMatchEnumeration) {
  std::mt19937_64 rng(314);
  int infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    RandomIlp ilp = random_binary_ilp(rng);
    auto best = oracle::binary_brute_force(ilp.c, ilp.rows);
    Solution s = solve(ilp.model);
    if (!best) {
      EXPECT_EQ(s.status, SolveStatus::Infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(s.status, SolveStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, *best, 1e-6) << "trial " << trial;
    EXPECT_TRUE(check_feasible(ilp.model, s.values).feasible) << "trial " << trial;
    LpResult root = solve_relaxation(ilp.model);
    ASSERT_EQ(root.status, LpStatus::Optimal);
    EXPECT_GE(root.objective, *best - 1e-6);
  }
  EXPECT_GT(infeasible, 0);
}

TEST(BranchAndBoundProperty, IntegralObjectivePruningKeepsOptimum) {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 60; ++trial) {
    RandomIlp ilp = random_binary_ilp(rng);
    SolveConfig fast;
    fast.integral_objective_pruning = true;
    Solution a = solve(ilp.model);
    Solution b = solve(ilp.model, fast);
    ASSERT_EQ(a.status, b.status);
    if (a.status == SolveStatus::Optimal) EXPECT_NEAR(a.objective, b.objective, 1e-9);
    EXPECT_LE(b.stats.nodes_explored, a.stats.nodes_explored);
  }
}
