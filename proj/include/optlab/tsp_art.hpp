#pragma once

// Stippled tour drawings: sample dark pixels of a grayscale image, connect
// them with a short closed tour, and write the tour as an SVG path.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "optlab/branch_and_bound.hpp"
#include "optlab/puzzles/tour.hpp"

namespace optlab::art {

enum class ArtErrc { AllWhiteImage, TooLarge, TooFewPoints, BadImage, DuplicatePoint };

class ArtError : public std::runtime_error {
 public:
  ArtError(ArtErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ArtErrc code() const noexcept { return code_; }

 private:
  ArtErrc code_;
};

/// SplitMix64. state += 0x9E3779B97F4A7C15, then
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Top 53 bits scaled to [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, bound) by multiply-shift on the top 32 bits.
  std::uint32_t below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(((next() >> 32) * static_cast<std::uint64_t>(bound)) >> 32);
  }

 private:
  std::uint64_t state_;
};

/// Row-major 8-bit grayscale, 0 = black, 255 = white.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

namespace detail {

inline void skip_pgm_space(std::istream& in) {
  while (true) {
    int ch = in.peek();
    if (ch == '#') {
      std::string rest;
      std::getline(in, rest);
    } else if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      in.get();
    } else {
      return;
    }
  }
}

inline int read_pgm_int(std::istream& in) {
  skip_pgm_space(in);
  int v = -1;
  if (!(in >> v) || v < 0) throw ArtError(ArtErrc::BadImage, "malformed PGM header");
  return v;
}

}  // namespace detail

/// PGM P2 (ASCII) or P5 (binary), maxval up to 255. Values are rescaled to 0..255.
inline GrayImage read_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
    throw ArtError(ArtErrc::BadImage, "not a P2/P5 PGM file");
  GrayImage img;
  img.width = detail::read_pgm_int(in);
  img.height = detail::read_pgm_int(in);
  const int maxval = detail::read_pgm_int(in);
  if (img.width < 1 || img.height < 1) throw ArtError(ArtErrc::BadImage, "empty image");
  if (maxval < 1 || maxval > 255) throw ArtError(ArtErrc::BadImage, "maxval must be 1..255");
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);
  auto scale = [&](int v) {
    if (v > maxval) throw ArtError(ArtErrc::BadImage, "pixel above maxval");
    return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  };
  if (magic[1] == '2') {
    for (std::size_t i = 0; i < count; ++i) img.pixels[i] = scale(detail::read_pgm_int(in));
  } else {
    in.get();  // single whitespace after maxval
    std::vector<char> raw(count);
    in.read(raw.data(), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) throw ArtError(ArtErrc::BadImage, "truncated P5 data");
    for (std::size_t i = 0; i < count; ++i) img.pixels[i] = scale(static_cast<unsigned char>(raw[i]));
  }
  return img;
}

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct PointSet {
  std::vector<Point> points;
  std::uint64_t seed = 0;
  friend bool operator==(const PointSet&, const PointSet&) = default;
};

/// Rejection sampling: a uniform pixel (x, then y) is accepted with
/// probability 1 - gray/255. Pixels already taken are drawn again.
/// Each point is the pixel's integer coordinate.
inline PointSet sample_points(const GrayImage& img, std::size_t count, std::uint64_t seed) {
  if (img.width < 1 || img.height < 1 || img.pixels.empty()) throw ArtError(ArtErrc::BadImage, "empty image");
  if (count < 1) throw ArtError(ArtErrc::TooFewPoints, "count must be at least 1");
  const std::size_t dark = static_cast<std::size_t>(
      std::count_if(img.pixels.begin(), img.pixels.end(), [](std::uint8_t g) { return g < 255; }));
  if (dark == 0) throw ArtError(ArtErrc::AllWhiteImage, "image has no dark pixels");
  if (dark < count) throw ArtError(ArtErrc::AllWhiteImage, "image has fewer dark pixels than requested points");
  SplitMix64 rng(seed);
  PointSet out;
  out.seed = seed;
  std::vector<bool> taken(img.pixels.size(), false);
  const std::size_t budget = 10000 * count;
  for (std::size_t attempt = 0; attempt < budget && out.points.size() < count; ++attempt) {
    const int x = static_cast<int>(rng.below(static_cast<std::uint32_t>(img.width)));
    const int y = static_cast<int>(rng.below(static_cast<std::uint32_t>(img.height)));
    const double darkness = 1.0 - img.at(x, y) / 255.0;
    if (rng.uniform() >= darkness) continue;
    const std::size_t idx = static_cast<std::size_t>(y) * img.width + x;
    if (taken[idx]) continue;
    taken[idx] = true;
    out.points.push_back({static_cast<double>(x), static_cast<double>(y)});
  }
  if (out.points.size() < count)
    throw ArtError(ArtErrc::AllWhiteImage, "sampling budget exhausted after " + std::to_string(budget) + " attempts");
  return out;
}

struct Tour {
  std::vector<std::size_t> order;
  double length = 0.0;
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double tour_length(std::span<const Point> pts, std::span<const std::size_t> order) {
  double len = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) len += distance(pts[order[k]], pts[order[(k + 1) % order.size()]]);
  return len;
}

inline void require_tourable(std::span<const Point> pts) {
  if (pts.size() < 3) throw ArtError(ArtErrc::TooFewPoints, "a tour needs at least 3 points");
  std::set<std::pair<double, double>> seen;
  for (const Point& p : pts)
    if (!seen.emplace(p.x, p.y).second) throw ArtError(ArtErrc::DuplicatePoint, "duplicate point");
}

struct HeuristicBudget {
  std::optional<std::size_t> max_moves;
  std::optional<double> time_limit;  // seconds
};

struct HeuristicTrace {
  double nearest_neighbor_length = 0.0;
  std::size_t moves = 0;
  std::vector<double> lengths;  // after each accepted 2-opt move, when recorded
};

/// Nearest neighbour from point 0 (lowest index on ties), then first-improvement
/// 2-opt until no move gains more than 1e-12 or the budget runs out.
inline Tour heuristic_tour(std::span<const Point> pts, const HeuristicBudget& budget = {},
                           HeuristicTrace* trace = nullptr) {
  require_tourable(pts);
  const std::size_t n = pts.size();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> order{0};
  std::vector<bool> used(n, false);
  used[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    const Point& cur = pts[order.back()];
    std::size_t best = n;
    double best_d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = distance(cur, pts[j]);
      if (best == n || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    used[best] = true;
    order.push_back(best);
  }
  double len = tour_length(pts, order);
  if (trace) trace->nearest_neighbor_length = len;

  std::size_t moves = 0;
  auto out_of_budget = [&] {
    if (budget.max_moves && moves >= *budget.max_moves) return true;
    if (budget.time_limit &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >= *budget.time_limit)
      return true;
    return false;
  };
  bool improved = true;
  while (improved && !out_of_budget()) {
    improved = false;
    for (std::size_t i = 0; i + 2 < n && !out_of_budget(); ++i) {
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // same edge pair
        const Point& a = pts[order[i]];
        const Point& b = pts[order[i + 1]];
        const Point& c = pts[order[j]];
        const Point& d = pts[order[(j + 1) % n]];
        const double gain = distance(a, b) + distance(c, d) - distance(a, c) - distance(b, d);
        if (gain <= 1e-12) continue;
        std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i + 1), order.begin() + static_cast<std::ptrdiff_t>(j + 1));
        const double next = tour_length(pts, order);
        if (next > len - 1e-12) {  // rounding ate the gain; undo
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i + 1), order.begin() + static_cast<std::ptrdiff_t>(j + 1));
          continue;
        }
        len = next;
        ++moves;
        if (trace) trace->lengths.push_back(len);
        improved = true;
        if (out_of_budget()) break;
      }
    }
  }
  if (trace) trace->moves = moves;
  return Tour{std::move(order), len};
}

inline constexpr std::size_t kDefaultExactCap = 12;

/// Provably optimal tour through branch and bound with lazy subtour cuts.
inline Tour exact_tour(std::span<const Point> pts, std::size_t cap = kDefaultExactCap, SolveConfig cfg = {}) {
  require_tourable(pts);
  if (pts.size() > cap)
    throw ArtError(ArtErrc::TooLarge, std::to_string(pts.size()) + " points exceed the exact cap of " + std::to_string(cap));
  std::vector<std::pair<double, double>> xy;
  for (const Point& p : pts) xy.emplace_back(p.x, p.y);
  puzzles::TourResult r = puzzles::solve_tsp(puzzles::euclidean_graph(std::move(xy)), std::move(cfg));
  if (r.status != SolveStatus::Optimal || r.order.empty())
    throw std::runtime_error(std::string("exact tour solve ended with status ") + to_string(r.status));
  Tour t;
  for (int v : r.order) t.order.push_back(static_cast<std::size_t>(v));
  t.length = tour_length(pts, t.order);
  return t;
}

struct SvgStyle {
  double stroke_width = 1.0;
  std::string stroke = "black";
  std::string background = "white";
};

/// Shortest round-trip decimal text.
inline std::string fmt_num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// One closed path through the points in tour order. The viewBox is the
/// bounding box grown by 5% of its larger side on every edge.
inline std::string render_svg(std::span<const Point> pts, const Tour& tour, const SvgStyle& style = {}) {
  if (tour.order.size() != pts.size() || pts.empty()) throw std::invalid_argument("tour does not match the points");
  double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
  for (const Point& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  double span = std::max(x1 - x0, y1 - y0);
  if (span == 0.0) span = 1.0;
  const double m = 0.05 * span;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << fmt_num(x0 - m) << ' '
     << fmt_num(y0 - m) << ' ' << fmt_num(x1 - x0 + 2 * m) << ' ' << fmt_num(y1 - y0 + 2 * m) << "\">\n";
  if (!style.background.empty())
    os << "<rect x=\"" << fmt_num(x0 - m) << "\" y=\"" << fmt_num(y0 - m) << "\" width=\"" << fmt_num(x1 - x0 + 2 * m)
       << "\" height=\"" << fmt_num(y1 - y0 + 2 * m) << "\" fill=\"" << style.background << "\"/>\n";
  os << "<path fill=\"none\" stroke=\"" << style.stroke << "\" stroke-width=\"" << fmt_num(style.stroke_width)
     << "\" stroke-linejoin=\"round\" d=\"";
  for (std::size_t k = 0; k < tour.order.size(); ++k) {
    const Point& p = pts[tour.order[k]];
    os << (k == 0 ? "M" : " L") << fmt_num(p.x) << ' ' << fmt_num(p.y);
  }
  os << " Z\"/>\n</svg>\n";
  return os.str();
}

/// "x y" per line; blank lines and '#' comments skipped.
inline std::vector<Point> read_points(std::istream& in) {
  std::vector<Point> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    Point p;
    if (!(ls >> p.x)) continue;
    std::string rest;
    if (!(ls >> p.y) || (ls >> rest)) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'x y'");
    out.push_back(p);
  }
  return out;
}

}  // namespace optlab::art
