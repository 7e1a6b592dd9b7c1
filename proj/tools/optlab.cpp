// optlab: build, emit, solve, count and render the puzzle models.
//
// Exit codes: 0 solved (optimal, feasible, unique or multiple), 2 infeasible,
// 3 time or node limit reached, 4 unbounded, 1 usage or input errors.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "optlab/optlab.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace optlab;
using namespace optlab::puzzles;

enum class LogLevel { Quiet, Info, Debug };

struct Common {
  std::optional<double> time_limit;
  std::optional<std::size_t> node_limit;
  bool json = false;
  std::string emit_lp;
  bool relax_only = false;
  bool count_all = false;
  std::size_t max_solutions = 1000000;
  LogLevel log = LogLevel::Info;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return art::fmt_num(v); }

// Everything a subcommand wants to print.
struct Report {
  std::string status = "Infeasible";
  std::optional<double> objective;
  json values = json::object();
  SolveStats stats;
  json extra = json::object();
  std::string text;
  int exit_code = 2;
};

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return 0;
    case SolveStatus::Infeasible: return 2;
    case SolveStatus::LimitReached: return 3;
    case SolveStatus::Unbounded: return 4;
  }
  return 1;
}

json named_values(const Model& m, std::span<const double> values) {
  json out = json::object();
  for (std::size_t j = 0; j < values.size() && j < m.num_vars(); ++j)
    if (values[j] != 0.0) out[m.variables()[j].name] = values[j];
  return out;
}

void print(const Report& r, const Common& c) {
  if (c.json) {
    json j;
    j["status"] = r.status;
    j["objective"] = r.objective ? json(*r.objective) : json(nullptr);
    j["values"] = r.values;
    j["stats"] = {{"nodes", r.stats.nodes_explored},
                  {"lp_iterations", r.stats.lp_iterations_total},
                  {"cuts", r.stats.cuts_added},
                  {"wall_time", r.stats.wall_time}};
    for (auto& [k, v] : r.extra.items()) j[k] = v;
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << "status " << r.status << "\n";
  if (r.objective) {
    const char* label = r.status == "Optimal" ? "optimum " : r.status == "LimitReached" ? "incumbent " : "objective ";
    std::cout << label << num(*r.objective) << "\n";
  }
  std::cout << r.text;
  if (c.log != LogLevel::Quiet)
    std::fprintf(stderr, "nodes %zu lp_iterations %zu cuts %zu time %.3fs\n", r.stats.nodes_explored,
                 r.stats.lp_iterations_total, r.stats.cuts_added, r.stats.wall_time);
}

SolveConfig make_config(const Common& c) {
  SolveConfig cfg;
  cfg.time_limit = c.time_limit;
  cfg.node_limit = c.node_limit;
  if (c.log != LogLevel::Quiet) {
    cfg.progress_interval = c.log == LogLevel::Debug ? 100 : 1000;
    cfg.on_progress = [](const Progress& p) {
      std::fprintf(stderr, "nodes %zu open %zu incumbent %s elapsed %.1fs\n", p.nodes, p.open_nodes,
                   p.incumbent ? num(*p.incumbent).c_str() : "-", p.elapsed);
    };
  }
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Result of running a model through the solver under the common flags.
struct Run {
  Report report;
  std::optional<Solution> solution;  // set for a plain solve
  std::optional<Enumeration> enumeration;
};

Run run_model(const Model& m, const Common& c, const LazyCutHandler& lazy = {}) {
  SolveConfig cfg = make_config(c);
  if (!c.emit_lp.empty()) {
    if (lazy) {
      // Fold in the lazy cuts a plain solve needs, so the file reproduces the objective.
      SolveConfig quiet = cfg;
      quiet.on_progress = nullptr;
      std::optional<Model> closed = absorb_lazy_cuts(m, lazy, quiet);
      if (!closed) std::fprintf(stderr, "warning: limit hit while closing lazy cuts; writing the base model\n");
      write_file(c.emit_lp, write_lp(closed ? *closed : m));
    } else {
      write_file(c.emit_lp, write_lp(m));
    }
  }
  Run run;
  Report& r = run.report;
  if (c.relax_only) {
    LpResult lp = solve_relaxation(m, cfg.lp);
    r.status = to_string(lp.status);
    r.stats.lp_iterations_total = lp.iterations;
    r.exit_code = lp.status == LpStatus::Optimal ? 0 : lp.status == LpStatus::Infeasible ? 2 : 4;
    if (lp.status == LpStatus::Optimal) {
      r.objective = lp.objective;
      r.values = named_values(m, lp.values);
    }
    return run;
  }
  cfg.lazy = lazy;
  if (c.count_all) {
    Enumeration e = enumerate_optimal(m, cfg, c.max_solutions);
    r.stats = e.stats;
    r.status = to_string(e.status);
    r.exit_code = exit_code_for(e.status);
    if (e.status == SolveStatus::Optimal && !e.complete) {
      r.status = "LimitReached";
      r.exit_code = 3;
    }
    if (!e.solutions.empty()) {
      r.objective = e.solutions.front().objective;
      r.values = named_values(m, e.solutions.front().values);
    }
    r.extra["solutions"] = e.solutions.size();
    r.extra["complete"] = e.complete;
    r.text += "solutions " + std::to_string(e.solutions.size()) + (e.complete ? "" : " (incomplete)") + "\n";
    run.enumeration = std::move(e);
    return run;
  }
  Solution s = solve(m, cfg);
  r.stats = s.stats;
  r.status = to_string(s.status);
  r.exit_code = exit_code_for(s.status);
  if (s.has_incumbent) {
    r.objective = s.objective;
    r.values = named_values(m, s.values);
  }
  run.solution = std::move(s);
  return run;
}

// Values of the first solution found, if any.
const std::vector<double>* best_values(const Run& run) {
  if (run.solution && run.solution->has_incumbent) return &run.solution->values;
  if (run.enumeration && !run.enumeration->solutions.empty()) return &run.enumeration->solutions.front().values;
  return nullptr;
}

/// "1..12", "2,3,5" or a mix such as "1..3,7".
std::vector<int> parse_sizes(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string part;
  auto to_int = [&](const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw UsageError("--sizes: bad number '" + s + "'");
    return v;
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    if (auto dots = part.find(".."); dots != std::string::npos) {
      int lo = to_int(part.substr(0, dots)), hi = to_int(part.substr(dots + 2));
      if (lo > hi) throw UsageError("--sizes: empty range '" + part + "'");
      for (int a = lo; a <= hi; ++a) out.push_back(a);
    } else {
      out.push_back(to_int(part));
    }
  }
  if (out.empty()) throw UsageError("--sizes: no sizes given");
  return out;
}

void add_common(CLI::App* app, Common& c, bool counting) {
  app->add_option("--time-limit", c.time_limit, "Wall-clock limit in seconds")->check(CLI::NonNegativeNumber);
  app->add_option("--node-limit", c.node_limit, "Branch-and-bound node limit");
  app->add_flag("--json", c.json, "Machine-readable output");
  app->add_option("--emit-lp", c.emit_lp, "Write the model in LP format to FILE");
  app->add_flag("--relax-only,--relax", c.relax_only, "Solve only the LP relaxation");
  if (counting) {
    app->add_flag("--count-all", c.count_all, "Enumerate every optimal 0/1 solution");
    app->add_option("--max-solutions", c.max_solutions, "Stop enumeration after this many solutions");
  }
}

LogLevel log_level_from_env() {
  const char* v = std::getenv("OPTLAB_LOG");
  if (!v || !*v) return LogLevel::Info;
  std::string s = v;
  if (s == "quiet") return LogLevel::Quiet;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  throw UsageError("OPTLAB_LOG must be quiet, info or debug (got '" + s + "')");
}

art::PointSet random_points(std::size_t n, std::uint64_t seed, double side) {
  art::SplitMix64 rng(seed);
  art::PointSet ps;
  ps.seed = seed;
  std::set<std::pair<double, double>> seen;
  while (ps.points.size() < n) {
    art::Point p{static_cast<double>(rng.below(static_cast<std::uint32_t>(side))),
                 static_cast<double>(rng.below(static_cast<std::uint32_t>(side)))};
    if (seen.emplace(p.x, p.y).second) ps.points.push_back(p);
  }
  return ps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optlab: integer programming puzzle lab"};
  app.require_subcommand(1);
  Common c;

  std::string lp_file;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a model in LP format");
  solve_cmd->add_option("file", lp_file, "LP file ('-' for stdin)")->required();
  add_common(solve_cmd, c, true);

  int n = 8;
  bool keep_diag = false, drop_diag = false;
  auto* queens_cmd = app.add_subcommand("queens", "Maximum non-attacking queens");
  auto* block_cmd = app.add_subcommand("queens-block", "Fewest queens that block every free square");
  for (auto* cmd : {queens_cmd, block_cmd}) {
    cmd->add_option("-n", n, "Board size")->check(CLI::PositiveNumber);
    auto* k = cmd->add_flag("--keep-trivial-diagonals", keep_diag, "Emit single-square diagonals (default)");
    auto* d = cmd->add_flag("--drop-trivial-diagonals", drop_diag, "Skip single-square diagonals");
    k->excludes(d);
    add_common(cmd, c, true);
  }

  std::string sudoku_file;
  bool unique = false;
  auto* sudoku_cmd = app.add_subcommand("sudoku", "Solve a 9x9 Sudoku");
  sudoku_cmd->add_option("file", sudoku_file, "9 lines of 9 characters, '.' for blanks ('-' for stdin)")->required();
  sudoku_cmd->add_flag("--unique", unique, "Also decide whether the solution is unique");
  add_common(sudoku_cmd, c, false);

  std::string tsp_file;
  std::optional<std::size_t> tsp_random;
  std::uint64_t seed = 1;
  auto* tsp_cmd = app.add_subcommand("tsp", "Exact symmetric TSP with lazy subtour cuts");
  auto* tsp_file_opt = tsp_cmd->add_option("file", tsp_file, "n, then n coordinate lines or an n x n matrix");
  auto* tsp_rand_opt = tsp_cmd->add_option("--random", tsp_random, "Random points on a 1000 x 1000 grid");
  tsp_file_opt->excludes(tsp_rand_opt);
  tsp_cmd->add_option("--seed", seed, "Seed for --random");
  add_common(tsp_cmd, c, true);

  bool closed = false, open = false;
  auto* knight_cmd = app.add_subcommand("knight", "Knight's tour");
  knight_cmd->add_option("-n", n, "Board size")->check(CLI::PositiveNumber);
  auto* cl = knight_cmd->add_flag("--closed", closed, "Closed tour (default)");
  auto* op = knight_cmd->add_flag("--open", open, "Open tour");
  cl->excludes(op);
  add_common(knight_cmd, c, false);

  std::string knap_file;
  double capacity = 0;
  auto* knap_cmd = app.add_subcommand("knapsack", "0/1 knapsack from CSV name,weight,utility");
  knap_cmd->add_option("file", knap_file, "CSV file ('-' for stdin)")->required();
  knap_cmd->add_option("--capacity", capacity, "Weight limit")->required()->check(CLI::NonNegativeNumber);
  add_common(knap_cmd, c, true);

  std::vector<int> dims;
  std::optional<int> rows, cols;
  std::string sizes = "";
  auto* tiling_cmd = app.add_subcommand("tiling", "Fewest square tiles covering a room");
  auto* dims_opt = tiling_cmd->add_option("dims", dims, "R C")->expected(2);
  tiling_cmd->add_option("--rows", rows, "Room rows")->excludes(dims_opt);
  tiling_cmd->add_option("--cols", cols, "Room columns")->excludes(dims_opt);
  tiling_cmd->add_option("--sizes", sizes, "Tile sizes, e.g. 1..12 or 1,2,3 (default 1..min(R,C)-1)");
  add_common(tiling_cmd, c, true);

  std::string path_file;
  int source = -1, target = -1, nodes = 0;
  auto* path_cmd = app.add_subcommand("path", "Shortest path from an arc list 'u v cost'");
  path_cmd->add_option("file", path_file, "Arc list ('-' for stdin)")->required();
  path_cmd->add_option("--source", source, "Source node")->required();
  path_cmd->add_option("--target", target, "Target node")->required();
  path_cmd->add_option("--nodes", nodes, "Node count when larger than the arcs imply");
  add_common(path_cmd, c, true);

  std::string art_file, svg_file;
  std::size_t art_points = 200;
  double stroke = 1.0;
  std::optional<std::size_t> max_moves;
  std::size_t exact_cap = art::kDefaultExactCap;
  auto* art_cmd = app.add_subcommand("art", "Stipple an image or point list and draw a tour");
  art_cmd->add_option("file", art_file, "PGM (P2/P5) image or 'x y' point list")->required();
  art_cmd->add_option("--points", art_points, "Points to sample from an image")->check(CLI::PositiveNumber);
  art_cmd->add_option("--seed", seed, "Sampling seed");
  art_cmd->add_option("--svg", svg_file, "Write the drawing to FILE");
  art_cmd->add_option("--stroke-width", stroke, "SVG stroke width");
  art_cmd->add_option("--max-moves", max_moves, "2-opt move budget");
  art_cmd->add_option("--exact-cap", exact_cap, "Largest point count solved exactly");
  art_cmd->add_option("--time-limit", c.time_limit, "2-opt time budget in seconds");
  art_cmd->add_flag("--json", c.json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  }

  try {
    c.log = log_level_from_env();
    Report report;

    if (*solve_cmd) {
      Model m = parse_lp(read_file(lp_file));
      Run run = run_model(m, c);
      report = std::move(run.report);
      if (!c.json)
        for (auto& [name, v] : report.values.items()) report.text += name + " " + num(v.get<double>()) + "\n";

    } else if (*queens_cmd || *block_cmd) {
      QueensOptions opt;
      opt.drop_trivial_diagonals = drop_diag;
      Model m = *queens_cmd ? build_queens(n, opt) : build_queens_blocking(n, opt);
      Run run = run_model(m, c);
      report = std::move(run.report);
      if (!c.relax_only)
        if (const auto* v = best_values(run)) {
          QueensBoard b = decode_queens(m, *v);
          json q = json::array();
          for (auto [r, col] : b.queens) q.push_back({r, col});
          report.extra["queens"] = q;
          report.extra["non_attacking"] = is_non_attacking(b);
          if (*block_cmd) report.extra["blocking"] = is_blocking(b);
          report.text += render_queens(b);
        }

    } else if (*sudoku_cmd) {
      std::istringstream in(read_file(sudoku_file));
      SudokuGrid g = parse_sudoku(in);
      if (unique && !c.relax_only) {
        if (!c.emit_lp.empty()) write_file(c.emit_lp, write_lp(build_sudoku(g)));
        UniquenessResult u = check_unique(g, make_config(c));
        report.stats = u.stats;
        report.status = to_string(u.verdict);
        report.exit_code = u.verdict == Uniqueness::Infeasible ? 2 : u.verdict == Uniqueness::LimitReached ? 3 : 0;
        report.extra["uniqueness"] = to_string(u.verdict);
        if (u.solution) {
          report.objective = 0.0;
          report.text += render_sudoku(*u.solution);
          report.extra["grid"] = render_sudoku(*u.solution);
          report.extra["valid"] = is_valid_solution(*u.solution) && respects_givens(g, *u.solution);
        }
        if (u.second) {
          report.text += "second solution\n" + render_sudoku(*u.second);
          report.extra["second"] = render_sudoku(*u.second);
        }
      } else {
        Model m = build_sudoku(g);
        Run run = run_model(m, c);
        report = std::move(run.report);
        if (!c.relax_only)
          if (const auto* v = best_values(run)) {
            SudokuGrid s = decode_sudoku(*v);
            report.text += render_sudoku(s);
            report.extra["grid"] = render_sudoku(s);
            report.extra["valid"] = is_valid_solution(s) && respects_givens(g, s);
          }
      }

    } else if (*tsp_cmd) {
      WeightedGraph g;
      if (tsp_random) {
        if (*tsp_random < 3) throw UsageError("--random needs at least 3 points");
        art::PointSet ps = random_points(*tsp_random, seed, 1000.0);
        std::vector<std::pair<double, double>> xy;
        for (const auto& p : ps.points) xy.emplace_back(p.x, p.y);
        g = euclidean_graph(std::move(xy));
      } else if (!tsp_file.empty()) {
        std::istringstream in(read_file(tsp_file));
        g = parse_tsp(in);
      } else {
        throw UsageError("tsp needs a file or --random N");
      }
      TspModel tm = build_tsp(g);
      Run run = run_model(tm.model, c, tm.subtour_cuts);
      report = std::move(run.report);
      if (!c.relax_only)
        if (const auto* v = best_values(run)) {
          std::vector<int> order = decode_tour(tm, *v);
          report.extra["tour"] = order;
          std::string line = "tour";
          for (int i : order) line += " " + std::to_string(i);
          report.text += line + "\n";
        }

    } else if (*knight_cmd) {
      KnightModel km = build_knight_tour(n, !open);
      Run run = run_model(km.tsp.model, c, km.tsp.subtour_cuts);
      report = std::move(run.report);
      if (!c.relax_only)
        if (const auto* v = best_values(run)) {
          auto seq = decode_knight(km, *v);
          json cells = json::array();
          for (auto [r, col] : seq) cells.push_back({r, col});
          report.extra["tour"] = cells;
          report.extra["valid"] = is_knight_tour(n, seq, !open);
          report.text += render_knight(n, seq);
        }

    } else if (*knap_cmd) {
      std::istringstream in(read_file(knap_file));
      KnapsackInstance k = parse_knapsack_csv(in, capacity);
      Model m = build_knapsack(k);
      Run run = run_model(m, c);
      report = std::move(run.report);
      if (!c.relax_only)
        if (const auto* v = best_values(run)) {
          auto chosen = decode_knapsack(k, *v);
          report.extra["selected"] = chosen;
          for (const auto& name : chosen) report.text += name + "\n";
        }

    } else if (*tiling_cmd) {
      TilingInstance t;
      if (!dims.empty()) {
        t.rows = dims[0];
        t.cols = dims[1];
      } else if (rows && cols) {
        t.rows = *rows;
        t.cols = *cols;
      } else {
        throw UsageError("tiling needs R C or --rows/--cols");
      }
      if (sizes.empty()) {
        const int top = std::max(1, std::min(t.rows, t.cols) - 1);
        sizes = "1.." + std::to_string(top);
      }
      t.sizes = parse_sizes(sizes);
      Model m = build_tiling(t);
      Run run = run_model(m, c);
      report = std::move(run.report);
      if (!c.relax_only)
        if (const auto* v = best_values(run)) {
          auto tiles = decode_tiling(t, *v);
          json arr = json::array();
          for (const auto& p : tiles) arr.push_back({p.size, p.top, p.left});
          report.extra["tiles"] = arr;
          report.extra["exact_cover"] = is_exact_cover(t, tiles);
          report.text += "tiles " + std::to_string(tiles.size()) + "\n";
          for (const auto& p : tiles)
            report.text += "size " + std::to_string(p.size) + " at " + std::to_string(p.top) + " " + std::to_string(p.left) + "\n";
          report.text += render_tiling(t, tiles);
        }

    } else if (*path_cmd) {
      std::istringstream in(read_file(path_file));
      PathInstance p = parse_arcs(in, source, target, nodes);
      Model m = build_shortest_path(p);
      Run run = run_model(m, c);
      report = std::move(run.report);
      if (!c.relax_only)
        if (const auto* v = best_values(run)) {
          auto arcs = decode_path(p, *v);
          json arr = json::array();
          for (std::size_t k : arcs) {
            const Arc& a = p.arcs[k];
            arr.push_back({a.from, a.to, a.cost});
            report.text += std::to_string(a.from) + " -> " + std::to_string(a.to) + " cost " + num(a.cost) + "\n";
          }
          report.extra["arcs"] = arr;
        }

    } else if (*art_cmd) {
      std::string data = read_file(art_file);
      art::PointSet ps;
      ps.seed = seed;
      if (data.size() >= 2 && data[0] == 'P' && (data[1] == '2' || data[1] == '5')) {
        std::istringstream in(data);
        ps = art::sample_points(art::read_pgm(in), art_points, seed);
      } else {
        std::istringstream in(data);
        ps.points = art::read_points(in);
      }
      art::Tour tour;
      bool exact = ps.points.size() <= exact_cap;
      if (exact) {
        tour = art::exact_tour(ps.points, exact_cap);
      } else {
        tour = art::heuristic_tour(ps.points, art::HeuristicBudget{max_moves, c.time_limit});
      }
      art::SvgStyle style;
      style.stroke_width = stroke;
      std::string svg = art::render_svg(ps.points, tour, style);
      if (!svg_file.empty()) write_file(svg_file, svg);
      report.status = exact ? "Optimal" : "Heuristic";
      report.exit_code = 0;
      report.objective = tour.length;
      report.extra["points"] = ps.points.size();
      report.extra["tour"] = tour.order;
      report.text += "points " + std::to_string(ps.points.size()) + "\n";
      report.text += "length " + num(tour.length) + "\n";
      if (svg_file.empty() && !c.json) report.text += svg;
    }

    print(report, c);
    return report.exit_code;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
