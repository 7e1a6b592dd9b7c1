#include <gtest/gtest.h>

#include <random>
#include <unordered_map>
#include <vector>

#include "optlab/ilp_core.hpp"
#include "optlab/puzzles/queens.hpp"
#include "oracles.hpp"

using namespace optlab;

TEST(Model, FirstBinaryGetsIdZero) {
  Model m;
  VarId v = m.add_binary("x_1_1");
  EXPECT_EQ(v.index, 0u);
  EXPECT_EQ(m.variable(v).kind, VarKind::Binary);
  EXPECT_EQ(m.variable(v).lower, 0.0);
  EXPECT_EQ(m.variable(v).upper, 1.0);
}

TEST(Model, RejectsLowerAboveUpper) {
  Model m;
  try {
    m.add_variable("x", 2.0, 1.0, VarKind::Continuous);
    FAIL() << "expected InvalidBounds";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.code(), ModelErrc::InvalidBounds);
  }
}

TEST(Model, RejectsBinaryWithOtherBounds) {
  Model m;
  EXPECT_THROW(m.add_variable("b", 0.0, 2.0, VarKind::Binary), ModelError);
  VarId x = m.add_variable("x", 1.0, 1.0, VarKind::Integer);
  EXPECT_THROW(m.set_kind(x, VarKind::Binary), ModelError);
}

TEST(Model, RejectsBadIdentifiersAndDuplicates) {
  Model m;
  for (const char* bad : {"", "1x", "x-y", "x y", "x.y", "\xc3\xa4"}) {
    try {
      m.add_binary(bad);
      FAIL() << "accepted '" << bad << "'";
    } catch (const ModelError& e) {
      EXPECT_EQ(e.code(), ModelErrc::BadIdentifier);
    }
  }
  m.add_binary("_ok9");
  try {
    m.add_binary("_ok9");
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.code(), ModelErrc::DuplicateName);
  }
  m.add_constraint("c", LinExpr(VarId{0}), Sense::Le, 1);
  try {
    m.add_constraint("c", LinExpr(VarId{0}), Sense::Le, 1);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.code(), ModelErrc::DuplicateName);
  }
}

TEST(Model, SixtyFourBinariesForABoard) {
  Model m;
  for (int i = 1; i <= 8; ++i)
    for (int j = 1; j <= 8; ++j) {
      VarId v = m.add_binary(puzzles::cell_name("x", i, j));
      EXPECT_EQ(v.index, static_cast<std::size_t>((i - 1) * 8 + (j - 1)));
    }
  EXPECT_EQ(m.num_vars(), 64u);
}

TEST(ModelProperty, IdsAreDense) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Model m;
    const int n = static_cast<int>(rng() % 200);
    for (int k = 0; k < n; ++k) EXPECT_EQ(m.add_binary("v" + std::to_string(k)).index, static_cast<std::size_t>(k));
    EXPECT_EQ(m.num_vars(), static_cast<std::size_t>(n));
  }
}

TEST(Constraint, RowSevenHasEightTerms) {
  Model m = puzzles::build_queens(8);
  ASSERT_TRUE(m.has_constraint("row_7"));
  const Constraint* row7 = nullptr;
  for (const Constraint& c : m.constraints())
    if (c.name == "row_7") row7 = &c;
  ASSERT_NE(row7, nullptr);
  EXPECT_EQ(row7->expr.size(), 8u);
  EXPECT_EQ(row7->sense, Sense::Le);
  EXPECT_EQ(row7->rhs, 1.0);
  for (int j = 1; j <= 8; ++j) EXPECT_EQ(row7->expr.coeff(puzzles::queen_var(8, 7, j)), 1.0);
}

TEST(Constraint, ConstantIsFoldedIntoRhs) {
  Model m;
  VarId x = m.add_variable("x", 0, 10, VarKind::Continuous);
  LinExpr e = LinExpr(x) + LinExpr(3.0);
  ConstraintId id = m.add_constraint("c", e, Sense::Le, 5.0);
  EXPECT_EQ(m.constraint(id).rhs, 2.0);
  EXPECT_EQ(m.constraint(id).expr.constant(), 0.0);
}

TEST(Constraint, UnknownVariableIsRejected) {
  Model m;
  for (int k = 0; k < 4; ++k) m.add_binary("x" + std::to_string(k));
  try {
    m.add_constraint("c", LinExpr(VarId{99}), Sense::Le, 1);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.code(), ModelErrc::UnknownVariable);
  }
  EXPECT_THROW(m.set_objective(ObjSense::Maximize, LinExpr(VarId{4})), ModelError);
}

TEST(LinExprTest, NoZeroOrNonFiniteEntries) {
  LinExpr e;
  e.add_term(VarId{0}, 2.0);
  e.add_term(VarId{0}, -2.0);
  EXPECT_EQ(e.size(), 0u);
  EXPECT_THROW(e.add_term(VarId{1}, std::numeric_limits<double>::infinity()), ModelError);
  EXPECT_THROW(e.add_constant(std::nan("")), ModelError);
}

TEST(Evaluate, AllOnesQueensObjectiveIs64) {
  Model m = puzzles::build_queens(8);
  std::vector<double> ones(64, 1.0);
  EXPECT_EQ(evaluate(m.objective().expr, ones), 64.0);
}

TEST(Evaluate, EmptyExpressionIsZero) {
  std::vector<double> v{3.0, 4.0};
  EXPECT_EQ(evaluate(LinExpr{}, v), 0.0);
}

TEST(Evaluate, HandArithmetic) {
  LinExpr e;
  e.add_term(VarId{0}, 3.0);
  e.add_term(VarId{1}, 2.0);
  std::unordered_map<std::size_t, double> at{{0, 4.0}, {1, 0.0}};
  EXPECT_EQ(evaluate(e, at), 12.0);
}

TEST(Evaluate, MissingValueThrows) {
  LinExpr e;
  e.add_term(VarId{0}, 3.0);
  e.add_term(VarId{5}, 1.0);
  std::unordered_map<std::size_t, double> at{{0, 4.0}};
  try {
    evaluate(e, at);
    FAIL();
  } catch (const ModelError& err) {
    EXPECT_EQ(err.code(), ModelErrc::MissingValue);
  }
  std::vector<double> short_values{1.0};
  EXPECT_THROW(evaluate(e, short_values), ModelError);
}

TEST(EvaluateProperty, IsLinear) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    LinExpr e1, e2;
    for (int k = 0; k < 6; ++k) {
      e1.add_term(VarId{rng() % 20}, coef(rng));
      e2.add_term(VarId{rng() % 20}, coef(rng));
    }
    e1.add_constant(coef(rng));
    e2.add_constant(coef(rng));
    const double a = coef(rng);
    std::vector<double> v(20);
    for (double& x : v) x = coef(rng);
    const double lhs = evaluate(e1 * a + e2, v);
    const double rhs = a * evaluate(e1, v) + evaluate(e2, v);
    EXPECT_NEAR(lhs, rhs, 1e-9 * (1 + std::abs(rhs)));
  }
}

TEST(CheckFeasible, TwoQueensInOneColumnReportsTheColumn) {
  Model m = puzzles::build_queens(8);
  std::vector<double> x(64, 0.0);
  x[puzzles::queen_var(8, 2, 3).index] = 1;
  x[puzzles::queen_var(8, 6, 3).index] = 1;
  FeasibilityReport r = check_feasible(m, x);
  EXPECT_FALSE(r.feasible);
  EXPECT_NE(std::find(r.violated.begin(), r.violated.end(), "col_3"), r.violated.end());
  EXPECT_EQ(std::find(r.violated.begin(), r.violated.end(), "row_2"), r.violated.end());
}

TEST(CheckFeasible, EmptyBoardIsFeasible) {
  Model m = puzzles::build_queens(8);
  std::vector<double> x(64, 0.0);
  EXPECT_TRUE(check_feasible(m, x).feasible);
}

TEST(CheckFeasible, BacktrackingPlacementsAreFeasible) {
  Model m = puzzles::build_queens(8);
  for (const auto& p : oracle::queens_solutions(8)) {
    std::vector<double> x(64, 0.0);
    for (auto [r, c] : p) x[puzzles::queen_var(8, r, c).index] = 1;
    ASSERT_TRUE(check_feasible(m, x).feasible);
  }
}

TEST(CheckFeasible, ReportsBoundsAndIntegrality) {
  Model m;
  m.add_variable("x", 0, 3, VarKind::Integer);
  std::vector<double> v{2.5};
  auto r = check_feasible(m, v);
  EXPECT_EQ(r.violated, std::vector<std::string>{"integrality:x"});
  v[0] = 4;
  r = check_feasible(m, v);
  EXPECT_EQ(r.violated, std::vector<std::string>{"bound:x"});
}

TEST(CheckFeasibleProperty, MonotoneInTolerance) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 2);
  Model m = puzzles::build_queens(5);
  const double tols[] = {1e-9, 1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x(25);
    for (double& v : x) v = rng() % 3 == 0 ? u(rng) : static_cast<double>(rng() % 2);
    bool was_feasible = false;
    for (double t : tols) {
      const bool f = check_feasible(m, x, t).feasible;
      if (was_feasible) EXPECT_TRUE(f) << "tol " << t;
      was_feasible = was_feasible || f;
    }
  }
}

TEST(ModelProperty, StoredConstraintsHaveNoConstant) {
  std::mt19937_64 rng(23);
  Model m;
  for (int k = 0; k < 10; ++k) m.add_variable("x" + std::to_string(k), -5, 5, VarKind::Continuous);
  for (int k = 0; k < 100; ++k) {
    LinExpr e;
    e.add_term(VarId{rng() % 10}, static_cast<double>(rng() % 7) - 3);
    e.add_constant(static_cast<double>(rng() % 11) - 5);
    m.add_constraint("c" + std::to_string(k), e, static_cast<Sense>(rng() % 3), 1.0);
  }
  for (const Constraint& c : m.constraints()) EXPECT_EQ(c.expr.constant(), 0.0);
}
