#pragma once

// 9x9 Sudoku with the three-index 0/1 formulation x_r_c_v, plus a
// uniqueness check by one no-good re-solve.

#include <array>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optlab/branch_and_bound.hpp"
#include "optlab/ilp_core.hpp"
#include "optlab/puzzles/common.hpp"

namespace optlab::puzzles {

/// cells[r][c] in 0..9, 0 = blank. Indices are 0-based here; names are 1-based.
struct SudokuGrid {
  std::array<std::array<int, 9>, 9> cells{};
  friend bool operator==(const SudokuGrid&, const SudokuGrid&) = default;
};

inline VarId sudoku_var(int r, int c, int v) {  // 1-based
  return VarId{static_cast<std::size_t>(((r - 1) * 9 + (c - 1)) * 9 + (v - 1))};
}

inline int sudoku_box(int r, int c) { return ((r - 1) / 3) * 3 + (c - 1) / 3 + 1; }

/// Givens in range and pairwise all-different per row, column and box.
inline bool givens_consistent(const SudokuGrid& g) {
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) {
      const int v = g.cells[r][c];
      if (v < 0 || v > 9) return false;
      if (v == 0) continue;
      for (int k = 0; k < 9; ++k) {
        if (k != c && g.cells[r][k] == v) return false;
        if (k != r && g.cells[k][c] == v) return false;
        const int rr = (r / 3) * 3 + k / 3, cc = (c / 3) * 3 + k % 3;
        if ((rr != r || cc != c) && g.cells[rr][cc] == v) return false;
      }
    }
  return true;
}

/// Complete and every row, column and box holds 1..9 once.
inline bool is_valid_solution(const SudokuGrid& g) {
  for (const auto& row : g.cells)
    for (int v : row)
      if (v < 1 || v > 9) return false;
  return givens_consistent(g);
}

/// Every given of `puzzle` is kept in `solution`.
inline bool respects_givens(const SudokuGrid& puzzle, const SudokuGrid& solution) {
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c)
      if (puzzle.cells[r][c] != 0 && puzzle.cells[r][c] != solution.cells[r][c]) return false;
  return true;
}

inline SudokuGrid transpose(const SudokuGrid& g) {
  SudokuGrid t;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) t.cells[c][r] = g.cells[r][c];
  return t;
}

/// Givens are pinned by bounds: the variable becomes Integer with bounds [1, 1]
/// (a Binary variable always carries [0, 1]).
inline Model build_sudoku(const SudokuGrid& g) {
  if (!givens_consistent(g)) throw PuzzleError(PuzzleErrc::InvalidInstance, "givens clash");
  Model m("sudoku");
  for (int r = 1; r <= 9; ++r)
    for (int c = 1; c <= 9; ++c)
      for (int v = 1; v <= 9; ++v) {
        const std::string name = "x_" + std::to_string(r) + "_" + std::to_string(c) + "_" + std::to_string(v);
        if (g.cells[r - 1][c - 1] == v)
          m.add_variable(name, 1.0, 1.0, VarKind::Integer);
        else
          m.add_binary(name);
      }
  auto family = [&](const char* prefix, auto&& var_of) {
    for (int a = 1; a <= 9; ++a)
      for (int b = 1; b <= 9; ++b) {
        LinExpr e;
        for (int k = 1; k <= 9; ++k) e.add_term(var_of(a, b, k), 1.0);
        m.add_constraint(cell_name(prefix, a, b), e, Sense::Eq, 1.0);
      }
  };
  family("cell", [](int r, int c, int v) { return sudoku_var(r, c, v); });
  family("row", [](int r, int v, int c) { return sudoku_var(r, c, v); });
  family("col", [](int c, int v, int r) { return sudoku_var(r, c, v); });
  family("box", [](int b, int v, int k) {
    const int r = ((b - 1) / 3) * 3 + (k - 1) / 3 + 1;
    const int c = ((b - 1) % 3) * 3 + (k - 1) % 3 + 1;
    return sudoku_var(r, c, v);
  });
  m.set_objective(ObjSense::Minimize, LinExpr{});
  return m;
}

inline SudokuGrid decode_sudoku(std::span<const double> values) {
  SudokuGrid g;
  for (int r = 1; r <= 9; ++r)
    for (int c = 1; c <= 9; ++c)
      for (int v = 1; v <= 9; ++v)
        if (values[sudoku_var(r, c, v).index] > 0.5) g.cells[r - 1][c - 1] = v;
  return g;
}

enum class Uniqueness { Unique, Multiple, Infeasible, LimitReached };

inline const char* to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::Unique: return "Unique";
    case Uniqueness::Multiple: return "Multiple";
    case Uniqueness::Infeasible: return "Infeasible";
    case Uniqueness::LimitReached: return "LimitReached";
  }
  return "?";
}

struct UniquenessResult {
  Uniqueness verdict = Uniqueness::Infeasible;
  std::optional<SudokuGrid> solution;
  std::optional<SudokuGrid> second;  // witness when Multiple
  SolveStats stats;
};

inline UniquenessResult check_unique(const SudokuGrid& g, const SolveConfig& cfg = {}) {
  UniquenessResult out;
  Model m = build_sudoku(g);
  Solution first = solve(m, cfg);
  out.stats = first.stats;
  if (first.status == SolveStatus::Infeasible) return out;
  if (first.status != SolveStatus::Optimal) {
    out.verdict = Uniqueness::LimitReached;
    return out;
  }
  out.solution = decode_sudoku(first.values);
  // At most 80 of the 81 chosen assignments may repeat.
  LinExpr nogood;
  for (std::size_t j = 0; j < first.values.size(); ++j)
    if (first.values[j] > 0.5) nogood.add_term(VarId{j}, 1.0);
  m.add_constraint("nogood", nogood, Sense::Le, 80.0);
  Solution second = solve(m, cfg);
  out.stats.nodes_explored += second.stats.nodes_explored;
  out.stats.lp_iterations_total += second.stats.lp_iterations_total;
  out.stats.wall_time += second.stats.wall_time;
  if (second.status == SolveStatus::Infeasible) {
    out.verdict = Uniqueness::Unique;
  } else if (second.status == SolveStatus::Optimal) {
    out.verdict = Uniqueness::Multiple;
    out.second = decode_sudoku(second.values);
  } else {
    out.verdict = Uniqueness::LimitReached;
  }
  return out;
}

/// Nine lines of nine characters: digits 1-9, '.' or '0' for blanks.
/// Blank lines and lines starting with '#' are skipped.
inline SudokuGrid parse_sudoku(std::istream& in) {
  SudokuGrid g;
  std::string line;
  int r = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (r == 9) throw PuzzleError(PuzzleErrc::InvalidInstance, "more than 9 rows");
    if (line.size() != 9) throw PuzzleError(PuzzleErrc::InvalidInstance, "row " + std::to_string(r + 1) + " needs 9 characters");
    for (int c = 0; c < 9; ++c) {
      const char ch = line[c];
      if (ch == '.' || ch == '0') continue;
      if (ch < '1' || ch > '9') throw PuzzleError(PuzzleErrc::InvalidInstance, std::string("bad character '") + ch + "'");
      g.cells[r][c] = ch - '0';
    }
    ++r;
  }
  if (r != 9) throw PuzzleError(PuzzleErrc::InvalidInstance, "expected 9 rows");
  return g;
}

inline std::string render_sudoku(const SudokuGrid& g) {
  std::string out;
  for (const auto& row : g.cells) {
    for (int v : row) out += v == 0 ? '.' : static_cast<char>('0' + v);
    out += '\n';
  }
  return out;
}

}  // namespace optlab::puzzles
