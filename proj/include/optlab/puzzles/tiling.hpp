#pragma once

// Tiling an R x C room with square tiles of the allowed sizes: exact cover of
// the cells with the fewest tiles.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "optlab/ilp_core.hpp"
#include "optlab/puzzles/common.hpp"

namespace optlab::puzzles {

struct TilingInstance {
  int rows = 0;
  int cols = 0;
  std::vector<int> sizes;
};

/// One a x a tile with its top-left cell (1-based).
struct TilePlacement {
  int size = 0;
  int top = 0;
  int left = 0;
  friend auto operator<=>(const TilePlacement&, const TilePlacement&) = default;
};

inline void validate(const TilingInstance& t) {
  if (t.rows < 1 || t.cols < 1) throw PuzzleError(PuzzleErrc::InvalidInstance, "room must be at least 1 x 1");
  if (t.sizes.empty()) throw PuzzleError(PuzzleErrc::InvalidInstance, "no tile sizes given");
  for (int a : t.sizes)
    if (a < 1 || a > std::min(t.rows, t.cols))
      throw PuzzleError(PuzzleErrc::InvalidInstance, "tile size " + std::to_string(a) + " does not fit the room");
}

/// Every placement in variable order.
inline std::vector<TilePlacement> tiling_placements(const TilingInstance& t) {
  std::vector<int> sizes = t.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::vector<TilePlacement> out;
  for (int a : sizes)
    for (int r = 1; r + a - 1 <= t.rows; ++r)
      for (int c = 1; c + a - 1 <= t.cols; ++c) out.push_back({a, r, c});
  return out;
}

inline Model build_tiling(const TilingInstance& t) {
  validate(t);
  Model m("tiling_" + std::to_string(t.rows) + "x" + std::to_string(t.cols));
  const std::vector<TilePlacement> places = tiling_placements(t);
  std::vector<std::vector<LinExpr>> cover(t.rows, std::vector<LinExpr>(t.cols));
  LinExpr obj;
  for (const TilePlacement& p : places) {
    VarId v = m.add_binary("t_" + std::to_string(p.size) + "_" + std::to_string(p.top) + "_" + std::to_string(p.left));
    obj.add_term(v, 1.0);
    for (int r = p.top; r < p.top + p.size; ++r)
      for (int c = p.left; c < p.left + p.size; ++c) cover[r - 1][c - 1].add_term(v, 1.0);
  }
  for (int r = 1; r <= t.rows; ++r)
    for (int c = 1; c <= t.cols; ++c) m.add_constraint(cell_name("cover", r, c), cover[r - 1][c - 1], Sense::Eq, 1.0);
  m.set_objective(ObjSense::Minimize, obj);
  return m;
}

inline std::vector<TilePlacement> decode_tiling(const TilingInstance& t, std::span<const double> values) {
  const std::vector<TilePlacement> places = tiling_placements(t);
  std::vector<TilePlacement> out;
  for (std::size_t k = 0; k < places.size(); ++k)
    if (values[k] > 0.5) out.push_back(places[k]);
  return out;
}

/// Exact-cover check on the grid itself.
inline bool is_exact_cover(const TilingInstance& t, std::span<const TilePlacement> tiles) {
  std::vector<int> count(static_cast<std::size_t>(t.rows * t.cols), 0);
  for (const TilePlacement& p : tiles) {
    if (std::find(t.sizes.begin(), t.sizes.end(), p.size) == t.sizes.end()) return false;
    if (p.top < 1 || p.left < 1 || p.top + p.size - 1 > t.rows || p.left + p.size - 1 > t.cols) return false;
    for (int r = p.top; r < p.top + p.size; ++r)
      for (int c = p.left; c < p.left + p.size; ++c) ++count[(r - 1) * t.cols + (c - 1)];
  }
  return std::all_of(count.begin(), count.end(), [](int k) { return k == 1; });
}

/// Grid picture: each tile drawn with a letter (A, B, ...).
inline std::string render_tiling(const TilingInstance& t, std::span<const TilePlacement> tiles) {
  std::vector<std::string> grid(t.rows, std::string(static_cast<std::size_t>(t.cols), '?'));
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    const char mark = k < 26 ? static_cast<char>('A' + k) : k < 52 ? static_cast<char>('a' + k - 26) : '#';
    const TilePlacement& p = tiles[k];
    for (int r = p.top; r < p.top + p.size; ++r)
      for (int c = p.left; c < p.left + p.size; ++c) grid[r - 1][c - 1] = mark;
  }
  std::string out;
  for (const std::string& row : grid) out += row + "\n";
  return out;
}

}  // namespace optlab::puzzles
