#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <regex>
#include <sstream>

#include "optlab/tsp_art.hpp"
#include "oracles.hpp"
#include "xml_check.hpp"

using namespace optlab;
using namespace optlab::art;

namespace {

GrayImage solid(int w, int h, std::uint8_t gray) {
  return GrayImage{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w * h), gray)};
}

std::vector<Point> random_points(std::mt19937_64& rng, int n) {
  std::set<std::pair<int, int>> seen;
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < n) {
    const int x = static_cast<int>(rng() % 1000), y = static_cast<int>(rng() % 1000);
    if (seen.emplace(x, y).second) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
  }
  return pts;
}

double optimum(const std::vector<Point>& pts) {
  std::vector<std::vector<double>> d(pts.size(), std::vector<double>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) d[i][j] = distance(pts[i], pts[j]);
  return oracle::tsp_brute_force(d);
}

bool is_tour(const Tour& t, std::size_t n) {
  std::vector<std::size_t> o = t.order;
  std::sort(o.begin(), o.end());
  for (std::size_t k = 0; k < o.size(); ++k)
    if (o[k] != k) return false;
  return o.size() == n;
}

}  // namespace

TEST(SplitMix, ReferenceSequence) {
  SplitMix64 a(0);
  EXPECT_EQ(a.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(a.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(a.next(), 0x06c45d188009454fULL);
  SplitMix64 b(42);
  EXPECT_EQ(b.next(), 0xbdd732262feb6e95ULL);
  SplitMix64 c(7);
  for (int k = 0; k < 1000; ++k) {
    const double u = c.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(c.below(13), 13u);
  }
}

TEST(Sampling, AllBlackGivesExactCount) {
  PointSet ps = sample_points(solid(40, 30, 0), 100, 1);
  EXPECT_EQ(ps.points.size(), 100u);
  std::set<std::pair<double, double>> distinct;
  for (const Point& p : ps.points) {
    distinct.emplace(p.x, p.y);
    EXPECT_GE(p.x, 0);
    EXPECT_LT(p.x, 40);
    EXPECT_GE(p.y, 0);
    EXPECT_LT(p.y, 30);
  }
  EXPECT_EQ(distinct.size(), 100u);
}

TEST(Sampling, AllWhiteImageFails) {
  try {
    sample_points(solid(10, 10, 255), 5, 1);
    FAIL();
  } catch (const ArtError& e) {
    EXPECT_EQ(e.code(), ArtErrc::AllWhiteImage);
  }
}

TEST(Sampling, FewerDarkPixelsThanPoints) {
  GrayImage img = solid(10, 10, 255);
  img.pixels[3] = 0;
  img.pixels[7] = 0;
  EXPECT_EQ(sample_points(img, 2, 1).points.size(), 2u);
  try {
    sample_points(img, 3, 1);
    FAIL();
  } catch (const ArtError& e) {
    EXPECT_EQ(e.code(), ArtErrc::AllWhiteImage);
  }
}

TEST(Sampling, BudgetExhaustion) {
  // one pixel of 10,000 accepted with probability 1/255: about 2.5 million draws expected, budget 10,000
  GrayImage img = solid(100, 100, 255);
  img.pixels[4242] = 254;
  try {
    sample_points(img, 1, 3);
    FAIL();
  } catch (const ArtError& e) {
    EXPECT_EQ(e.code(), ArtErrc::AllWhiteImage);
  }
}

TEST(Sampling, SameSeedSamePoints) {
  GrayImage img = solid(64, 64, 0);
  for (std::size_t k = 0; k < img.pixels.size(); ++k) img.pixels[k] = static_cast<std::uint8_t>((k * 37) % 256);
  EXPECT_EQ(sample_points(img, 300, 9), sample_points(img, 300, 9));
  EXPECT_NE(sample_points(img, 300, 9).points, sample_points(img, 300, 10).points);
}

TEST(SamplingProperty, WhiteHalfStaysEmpty) {
  GrayImage img = solid(200, 200, 255);
  for (int y = 0; y < 200; ++y)
    for (int x = 0; x < 100; ++x) img.pixels[static_cast<std::size_t>(y) * 200 + x] = 0;
  PointSet ps = sample_points(img, 10000, 2024);
  ASSERT_EQ(ps.points.size(), 10000u);
  for (const Point& p : ps.points) ASSERT_LT(p.x, 100.0);
}

TEST(Pgm, AsciiAndBinary) {
  std::istringstream p2("P2\n# comment\n3 2\n255\n0 128 255\n10 20 30\n");
  GrayImage a = read_pgm(p2);
  EXPECT_EQ(a.width, 3);
  EXPECT_EQ(a.height, 2);
  EXPECT_EQ(a.at(1, 0), 128);
  EXPECT_EQ(a.at(2, 1), 30);
  std::string bin = "P5\n2 2\n255\n";
  bin += std::string{'\x00', '\x7f', '\xff', '\x01'};
  std::istringstream p5(bin);
  GrayImage b = read_pgm(p5);
  EXPECT_EQ(b.at(1, 0), 127);
  EXPECT_EQ(b.at(0, 1), 255);
  std::istringstream bad("P6\n1 1\n255\n");
  EXPECT_THROW(read_pgm(bad), ArtError);
  std::istringstream maxval("P2\n2 1\n15\n0 15\n");
  EXPECT_EQ(read_pgm(maxval).at(1, 0), 255);
}

TEST(Heuristic, UnitSquare) {
  std::vector<Point> pts{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  Tour t = heuristic_tour(pts);
  EXPECT_NEAR(t.length, 4.0, 1e-12);
  EXPECT_TRUE(is_tour(t, 4));
}

TEST(Heuristic, RejectsDegenerateInput) {
  std::vector<Point> two{{0, 0}, {1, 1}};
  EXPECT_THROW(heuristic_tour(two), ArtError);
  std::vector<Point> dup{{0, 0}, {1, 1}, {0, 0}};
  try {
    heuristic_tour(dup);
    FAIL();
  } catch (const ArtError& e) {
    EXPECT_EQ(e.code(), ArtErrc::DuplicatePoint);
  }
}

TEST(HeuristicProperty, TwoOptOnlyImproves) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts = random_points(rng, 5 + static_cast<int>(rng() % 120));
    HeuristicTrace trace;
    Tour t = heuristic_tour(pts, {}, &trace);
    ASSERT_TRUE(is_tour(t, pts.size()));
    EXPECT_LE(t.length, trace.nearest_neighbor_length);
    double prev = trace.nearest_neighbor_length;
    for (double len : trace.lengths) {
      EXPECT_LT(len, prev - 1e-12);
      prev = len;
    }
    EXPECT_EQ(trace.moves, trace.lengths.size());
    EXPECT_NEAR(tour_length(pts, t.order), t.length, 1e-9 * t.length);
  }
}

TEST(HeuristicProperty, MoveBudgetIsHonoured) {
  std::mt19937_64 rng(32);
  auto pts = random_points(rng, 200);
  HeuristicTrace trace;
  HeuristicBudget budget;
  budget.max_moves = 5;
  heuristic_tour(pts, budget, &trace);
  EXPECT_LE(trace.moves, 5u);
}

TEST(HeuristicProperty, NinePointsCloseToOptimum) {
  std::mt19937_64 rng(9);
  int close = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto pts = random_points(rng, 9);
    const double best = optimum(pts);
    Tour t = heuristic_tour(pts);
    EXPECT_GE(t.length, best - 1e-9);
    if (t.length <= best * 1.05) ++close;
  }
  EXPECT_GE(close, 90);
}

TEST(Exact, TriangleAndTenPoints) {
  std::vector<Point> tri{{0, 0}, {3, 0}, {0, 4}};
  Tour t = exact_tour(tri);
  EXPECT_NEAR(t.length, 12.0, 1e-9);
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 3; ++trial) {
    auto pts = random_points(rng, 10);
    Tour e = exact_tour(pts);
    EXPECT_TRUE(is_tour(e, 10));
    EXPECT_NEAR(e.length, optimum(pts), 1e-6);
    EXPECT_NEAR(tour_length(pts, e.order), e.length, 1e-9 * e.length);
  }
}

TEST(Exact, ThirteenPointsTooLarge) {
  std::mt19937_64 rng(13);
  auto pts = random_points(rng, 13);
  try {
    exact_tour(pts);
    FAIL();
  } catch (const ArtError& e) {
    EXPECT_EQ(e.code(), ArtErrc::TooLarge);
  }
  EXPECT_NO_THROW(exact_tour(pts, 13));
}

TEST(Svg, OnePathThroughAllPoints) {
  std::vector<Point> pts{{0, 0}, {10, 0}, {0, 5}};
  Tour t = heuristic_tour(pts);
  SvgStyle style;
  style.stroke_width = 0.25;
  const std::string svg = render_svg(pts, t, style);
  std::regex path_re("<path[^>]*\\sd=\"([^\"]*)\"");
  auto begin = std::sregex_iterator(svg.begin(), svg.end(), path_re);
  ASSERT_EQ(std::distance(begin, std::sregex_iterator()), 1);
  const std::string d = (*begin)[1];
  EXPECT_EQ(std::count(d.begin(), d.end(), 'M') + std::count(d.begin(), d.end(), 'L'), 3);
  EXPECT_EQ(d.back(), 'Z');
  EXPECT_NE(svg.find("stroke-width=\"0.25\""), std::string::npos);
  // 5% of the larger side (10) on each edge
  EXPECT_NE(svg.find("viewBox=\"-0.5 -0.5 11 6\""), std::string::npos) << svg;
  EXPECT_TRUE(well_formed_xml(svg));
  EXPECT_EQ(svg, render_svg(pts, t, style));
}

TEST(SvgProperty, SampledArtIsWellFormed) {
  GrayImage img = solid(50, 50, 255);
  for (int y = 10; y < 40; ++y)
    for (int x = 10; x < 40; ++x) img.pixels[static_cast<std::size_t>(y) * 50 + x] = static_cast<std::uint8_t>(x * 4);
  PointSet ps = sample_points(img, 300, 5);
  Tour t = heuristic_tour(ps.points);
  const std::string svg = render_svg(ps.points, t);
  EXPECT_TRUE(well_formed_xml(svg));
  EXPECT_FALSE(well_formed_xml("<svg><path></svg>"));
}

TEST(Points, ReadPointList) {
  std::istringstream in("# xy\n1 2\n\n3.5 4\n");
  auto pts = read_points(in);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].x, 3.5);
  std::istringstream bad("1 2 3\n");
  EXPECT_THROW(read_points(bad), std::invalid_argument);
}
