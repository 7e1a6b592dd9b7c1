#pragma once

// Non-attacking queens: the maximization model with one 0/1 variable per
// square, and the minimum blocking placement (no further non-attacking queen
// can be added).

#include <cstdlib>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "optlab/ilp_core.hpp"
#include "optlab/puzzles/common.hpp"

namespace optlab::puzzles {

struct QueensOptions {
  /// Skip the two single-square diagonals in each direction; x <= 1 already
  /// follows from the binary domain.
  bool drop_trivial_diagonals = false;
};

/// Queens as 1-based (row, col) squares.
struct QueensBoard {
  int n = 0;
  std::set<std::pair<int, int>> queens;
};

/// Variable x_i_j (1-based) lives at VarId (i-1)*n + (j-1).
inline VarId queen_var(int n, int row, int col) {
  return VarId{static_cast<std::size_t>((row - 1) * n + (col - 1))};
}

namespace queens_detail {

inline void add_variables(Model& m, int n) {
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) m.add_binary(cell_name("x", i, j));
}

inline std::string signed_suffix(int k) { return k < 0 ? "m" + std::to_string(-k) : std::to_string(k); }

// Row, column and both diagonal families, each "at most one queen".
inline void add_line_constraints(Model& m, int n, const QueensOptions& opt) {
  for (int i = 1; i <= n; ++i) {
    LinExpr e;
    for (int j = 1; j <= n; ++j) e.add_term(queen_var(n, i, j), 1.0);
    m.add_constraint("row_" + std::to_string(i), e, Sense::Le, 1.0);
  }
  for (int j = 1; j <= n; ++j) {
    LinExpr e;
    for (int i = 1; i <= n; ++i) e.add_term(queen_var(n, i, j), 1.0);
    m.add_constraint("col_" + std::to_string(j), e, Sense::Le, 1.0);
  }
  // Up-diagonals share i + j = k.
  for (int k = 2; k <= 2 * n; ++k) {
    LinExpr e;
    for (int i = 1; i <= n; ++i) {
      int j = k - i;
      if (j >= 1 && j <= n) e.add_term(queen_var(n, i, j), 1.0);
    }
    if (opt.drop_trivial_diagonals && e.size() <= 1) continue;
    m.add_constraint("up_" + std::to_string(k), e, Sense::Le, 1.0);
  }
  // Down-diagonals share i - j = k.
  for (int k = -(n - 1); k <= n - 1; ++k) {
    LinExpr e;
    for (int i = 1; i <= n; ++i) {
      int j = i - k;
      if (j >= 1 && j <= n) e.add_term(queen_var(n, i, j), 1.0);
    }
    if (opt.drop_trivial_diagonals && e.size() <= 1) continue;
    m.add_constraint("down_" + signed_suffix(k), e, Sense::Le, 1.0);
  }
}

inline void check_size(int n) {
  if (n < 1) throw PuzzleError(PuzzleErrc::InvalidSize, "board size must be at least 1");
}

}  // namespace queens_detail

inline bool queens_attack(int r1, int c1, int r2, int c2) {
  return r1 == r2 || c1 == c2 || r1 + c1 == r2 + c2 || r1 - c1 == r2 - c2;
}

/// max sum x_i_j subject to at most one queen per row, column and diagonal.
inline Model build_queens(int n, const QueensOptions& opt = {}) {
  queens_detail::check_size(n);
  Model m("queens_" + std::to_string(n));
  queens_detail::add_variables(m, n);
  queens_detail::add_line_constraints(m, n, opt);
  LinExpr obj;
  for (std::size_t v = 0; v < m.num_vars(); ++v) obj.add_term(VarId{v}, 1.0);
  m.set_objective(ObjSense::Maximize, obj);
  return m;
}

/// Fewest non-attacking queens such that every square is occupied or attacked.
inline Model build_queens_blocking(int n, const QueensOptions& opt = {}) {
  queens_detail::check_size(n);
  Model m("queens_block_" + std::to_string(n));
  queens_detail::add_variables(m, n);
  queens_detail::add_line_constraints(m, n, opt);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      LinExpr e;
      for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l)
          if (queens_attack(i, j, k, l)) e.add_term(queen_var(n, k, l), 1.0);
      m.add_constraint(cell_name("cover", i, j), e, Sense::Ge, 1.0);
    }
  }
  LinExpr obj;
  for (std::size_t v = 0; v < m.num_vars(); ++v) obj.add_term(VarId{v}, 1.0);
  m.set_objective(ObjSense::Minimize, obj);
  return m;
}

inline int queens_board_size(const Model& model) {
  int n = 0;
  while (static_cast<std::size_t>((n + 1) * (n + 1)) <= model.num_vars()) ++n;
  if (static_cast<std::size_t>(n * n) != model.num_vars())
    throw PuzzleError(PuzzleErrc::BadSolution, "model is not a square queens board");
  return n;
}

inline QueensBoard decode_queens(const Model& model, std::span<const double> values) {
  QueensBoard board;
  board.n = queens_board_size(model);
  for (int i = 1; i <= board.n; ++i)
    for (int j = 1; j <= board.n; ++j)
      if (values[queen_var(board.n, i, j).index] > 0.5) board.queens.emplace(i, j);
  return board;
}

/// Pairwise non-attacking check that does not consult any model.
inline bool is_non_attacking(const QueensBoard& b) {
  std::vector<std::pair<int, int>> q(b.queens.begin(), b.queens.end());
  for (auto [r, c] : q)
    if (r < 1 || r > b.n || c < 1 || c > b.n) return false;
  for (std::size_t a = 0; a < q.size(); ++a)
    for (std::size_t k = a + 1; k < q.size(); ++k)
      if (queens_attack(q[a].first, q[a].second, q[k].first, q[k].second)) return false;
  return true;
}

/// Non-attacking and no square is left where another queen could go.
inline bool is_blocking(const QueensBoard& b) {
  if (!is_non_attacking(b)) return false;
  for (int i = 1; i <= b.n; ++i) {
    for (int j = 1; j <= b.n; ++j) {
      bool covered = false;
      for (auto [r, c] : b.queens)
        if (queens_attack(i, j, r, c)) covered = true;
      if (!covered) return false;
    }
  }
  return true;
}

inline std::string render_queens(const QueensBoard& b) {
  std::string out;
  for (int i = 1; i <= b.n; ++i) {
    for (int j = 1; j <= b.n; ++j) {
      if (j > 1) out += ' ';
      out += b.queens.contains({i, j}) ? 'Q' : '.';
    }
    out += '\n';
  }
  return out;
}

}  // namespace optlab::puzzles
