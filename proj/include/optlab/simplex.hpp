#pragma once

// Two-phase primal simplex on a dense tableau. Solves the continuous
// relaxation of a Model; integrality markers are ignored here.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "optlab/ilp_core.hpp"

namespace optlab {

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

class IterationLimitExceeded : public std::runtime_error {
 public:
  explicit IterationLimitExceeded(std::size_t limit)
      : std::runtime_error("IterationLimitExceeded: simplex pivot cap " + std::to_string(limit) + " reached") {}
};

struct SimplexOptions {
  std::size_t max_iterations = 100000;
  double cost_tol = 1e-9;
  double feas_tol = 1e-7;
  double pivot_tol = 1e-10;
  /// Consecutive degenerate pivots before switching to Bland's rule;
  /// unset means 3 * (rows + cols).
  std::optional<std::size_t> bland_after;
  bool allow_bland = true;
  /// Relax the ratio test by feas_tol and prefer large pivots among the
  /// near-ties. When false, ties are exact (within 1e-12).
  bool harris_ratio_test = true;
  /// Omit an upper-bound row when another row with nonnegative coefficients
  /// already implies it. Does not change the feasible region.
  bool skip_implied_upper_rows = true;
  bool record_trace = false;
};

enum class ColumnKind { Structural, StructuralNeg, Slack, BoundSlack, Artificial };

/// How an original variable is recovered from standard-form columns:
/// value = offset + sign * col (+ neg column subtracted when split).
struct VarMapping {
  enum class Mode { Shifted, Reflected, Split, Fixed };
  Mode mode = Mode::Shifted;
  std::size_t column = 0;
  std::size_t neg_column = 0;
  double offset = 0.0;
};

struct RowOrigin {
  enum class Kind { Constraint, UpperBound };
  Kind kind = Kind::Constraint;
  std::size_t index = 0;  // constraint index or variable index
};

/// min cost . x  s.t.  A x = b, x >= 0, b >= 0, with an identity basis at start.
struct StandardForm {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // row-major rows x cols
  std::vector<double> b;
  std::vector<double> cost;
  double cost_offset = 0.0;  // constant added to cost . x to give the minimized objective
  double objective_sign = 1.0;  // model objective = objective_sign * (cost . x + cost_offset)
  std::vector<std::size_t> basis;
  std::vector<ColumnKind> column_kind;
  std::vector<VarMapping> var_map;
  std::vector<RowOrigin> row_origin;

  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

  std::size_t count(ColumnKind k) const {
    return static_cast<std::size_t>(std::count(column_kind.begin(), column_kind.end(), k));
  }
  std::size_t upper_bound_rows() const {
    return static_cast<std::size_t>(std::count_if(row_origin.begin(), row_origin.end(), [](const RowOrigin& o) {
      return o.kind == RowOrigin::Kind::UpperBound;
    }));
  }
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;  // by VarId, present iff Optimal
  double objective = 0.0;      // model sense, meaningful iff Optimal
  std::size_t iterations = 0;
  std::optional<std::size_t> unbounded_column;  // standard-form certificate column
  std::vector<double> phase2_trace;  // model objective after each phase-2 pivot
  bool bland_engaged = false;
};

namespace simplex_detail {

struct SparseRow {
  std::vector<std::pair<std::size_t, double>> coeffs;  // structural column -> coefficient
  double rhs = 0.0;
  Sense sense = Sense::Le;
  RowOrigin origin;
};

}  // namespace simplex_detail

/// Builds the standard form using explicit bounds (e.g. branch-and-bound node bounds).
inline StandardForm to_standard_form(const Model& model, std::span<const double> lower,
                                     std::span<const double> upper, bool skip_implied_upper_rows = false) {
  using simplex_detail::SparseRow;
  const std::size_t n = model.num_vars();
  StandardForm sf;
  sf.var_map.resize(n);
  std::vector<ColumnKind> kinds;

  // Structural columns.
  for (std::size_t j = 0; j < n; ++j) {
    VarMapping& m = sf.var_map[j];
    const double lo = lower[j];
    const double hi = upper[j];
    if (lo == hi) {
      m.mode = VarMapping::Mode::Fixed;
      m.offset = lo;
    } else if (std::isfinite(lo)) {
      m.mode = VarMapping::Mode::Shifted;
      m.offset = lo;
      m.column = kinds.size();
      kinds.push_back(ColumnKind::Structural);
    } else if (std::isfinite(hi)) {
      m.mode = VarMapping::Mode::Reflected;
      m.offset = hi;
      m.column = kinds.size();
      kinds.push_back(ColumnKind::Structural);
    } else {
      m.mode = VarMapping::Mode::Split;
      m.column = kinds.size();
      kinds.push_back(ColumnKind::Structural);
      m.neg_column = kinds.size();
      kinds.push_back(ColumnKind::StructuralNeg);
    }
  }
  const std::size_t structural = kinds.size();

  // Substitute x = offset + sign * col into every row.
  auto substitute = [&](const LinExpr& expr, double& rhs, std::vector<std::pair<std::size_t, double>>& out) {
    for (const auto& [idx, c] : expr.terms()) {
      const VarMapping& m = sf.var_map[idx];
      switch (m.mode) {
        case VarMapping::Mode::Fixed: rhs -= c * m.offset; break;
        case VarMapping::Mode::Shifted:
          rhs -= c * m.offset;
          out.emplace_back(m.column, c);
          break;
        case VarMapping::Mode::Reflected:
          rhs -= c * m.offset;
          out.emplace_back(m.column, -c);
          break;
        case VarMapping::Mode::Split:
          out.emplace_back(m.column, c);
          out.emplace_back(m.neg_column, -c);
          break;
      }
    }
  };

  std::vector<SparseRow> rows;
  rows.reserve(model.num_constraints() + n);
  for (std::size_t i = 0; i < model.num_constraints(); ++i) {
    const Constraint& c = model.constraints()[i];
    SparseRow r;
    r.rhs = c.rhs;
    r.sense = c.sense;
    r.origin = {RowOrigin::Kind::Constraint, i};
    substitute(c.expr, r.rhs, r.coeffs);
    rows.push_back(std::move(r));
  }

  // Upper bound rows for shifted variables with a finite upper bound.
  std::vector<double> implied_cap(structural, kInf);
  if (skip_implied_upper_rows) {
    for (const SparseRow& r : rows) {
      double sign = 0.0;
      bool all_nonneg = std::all_of(r.coeffs.begin(), r.coeffs.end(), [](auto& p) { return p.second >= 0; });
      bool all_nonpos = std::all_of(r.coeffs.begin(), r.coeffs.end(), [](auto& p) { return p.second <= 0; });
      if ((r.sense == Sense::Le || r.sense == Sense::Eq) && all_nonneg) sign = 1.0;
      else if ((r.sense == Sense::Ge || r.sense == Sense::Eq) && all_nonpos) sign = -1.0;
      if (sign == 0.0) continue;
      for (const auto& [col, c] : r.coeffs) {
        double a = sign * c;
        if (a > 0) implied_cap[col] = std::min(implied_cap[col], sign * r.rhs / a);
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const VarMapping& m = sf.var_map[j];
    if (m.mode != VarMapping::Mode::Shifted || !std::isfinite(upper[j])) continue;
    double width = upper[j] - lower[j];
    if (implied_cap[m.column] <= width + 1e-12) continue;
    SparseRow r;
    r.rhs = width;
    r.sense = Sense::Le;
    r.origin = {RowOrigin::Kind::UpperBound, j};
    r.coeffs.emplace_back(m.column, 1.0);
    rows.push_back(std::move(r));
  }

  // Slack / surplus columns, then artificial columns where no +1 slack exists.
  const std::size_t m_rows = rows.size();
  std::vector<std::optional<std::size_t>> slack_col(m_rows);
  std::vector<double> slack_sign(m_rows, 0.0);
  std::vector<double> row_scale(m_rows, 1.0);
  for (std::size_t i = 0; i < m_rows; ++i) {
    if (rows[i].rhs < 0) row_scale[i] = -1.0;
    if (rows[i].sense == Sense::Eq) continue;
    slack_col[i] = kinds.size();
    kinds.push_back(rows[i].origin.kind == RowOrigin::Kind::UpperBound ? ColumnKind::BoundSlack : ColumnKind::Slack);
    slack_sign[i] = rows[i].sense == Sense::Le ? 1.0 : -1.0;
  }
  std::vector<std::optional<std::size_t>> art_col(m_rows);
  for (std::size_t i = 0; i < m_rows; ++i) {
    if (slack_col[i] && slack_sign[i] * row_scale[i] > 0) continue;
    art_col[i] = kinds.size();
    kinds.push_back(ColumnKind::Artificial);
  }

  sf.rows = m_rows;
  sf.cols = kinds.size();
  sf.column_kind = std::move(kinds);
  sf.a.assign(sf.rows * sf.cols, 0.0);
  sf.b.resize(sf.rows);
  sf.basis.resize(sf.rows);
  sf.row_origin.resize(sf.rows);
  for (std::size_t i = 0; i < m_rows; ++i) {
    const double s = row_scale[i];
    for (const auto& [col, c] : rows[i].coeffs) sf.at(i, col) += s * c;
    if (slack_col[i]) sf.at(i, *slack_col[i]) = s * slack_sign[i];
    sf.b[i] = s * rows[i].rhs;
    if (art_col[i]) {
      sf.at(i, *art_col[i]) = 1.0;
      sf.basis[i] = *art_col[i];
    } else {
      sf.basis[i] = *slack_col[i];
    }
    sf.row_origin[i] = rows[i].origin;
  }

  // Minimization costs.
  const Objective& obj = model.objective();
  sf.objective_sign = obj.sense == ObjSense::Maximize ? -1.0 : 1.0;
  sf.cost.assign(sf.cols, 0.0);
  sf.cost_offset = sf.objective_sign * obj.expr.constant();
  for (const auto& [idx, c] : obj.expr.terms()) {
    const VarMapping& m = sf.var_map[idx];
    const double cs = sf.objective_sign * c;
    switch (m.mode) {
      case VarMapping::Mode::Fixed: sf.cost_offset += cs * m.offset; break;
      case VarMapping::Mode::Shifted:
        sf.cost_offset += cs * m.offset;
        sf.cost[m.column] += cs;
        break;
      case VarMapping::Mode::Reflected:
        sf.cost_offset += cs * m.offset;
        sf.cost[m.column] -= cs;
        break;
      case VarMapping::Mode::Split:
        sf.cost[m.column] += cs;
        sf.cost[m.neg_column] -= cs;
        break;
    }
  }
  return sf;
}

inline StandardForm to_standard_form(const Model& model, bool skip_implied_upper_rows = false) {
  std::vector<double> lo;
  std::vector<double> hi;
  for (const Variable& v : model.variables()) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
  }
  return to_standard_form(model, lo, hi, skip_implied_upper_rows);
}

namespace simplex_detail {

class Tableau {
 public:
  Tableau(StandardForm& sf, const SimplexOptions& opt)
      : sf_(sf), opt_(opt), d_(sf.cols + 1, 0.0), a0_(sf.a), b0_(sf.b), row_id_(sf.rows) {
    eligible_.assign(sf.cols, true);
    for (std::size_t i = 0; i < sf.rows; ++i) row_id_[i] = i;
  }

  enum class Outcome { Optimal, Unbounded };

  std::size_t iterations() const { return iterations_; }
  bool bland_engaged() const { return bland_engaged_; }
  std::optional<std::size_t> unbounded_column() const { return unbounded_col_; }
  std::vector<double>& trace() { return trace_; }

  /// Sets reduced costs for the given cost vector against the current basis.
  void price(std::span<const double> cost) {
    if (cost.data() != cost_.data()) cost_.assign(cost.begin(), cost.end());
    std::fill(d_.begin(), d_.end(), 0.0);
    for (std::size_t j = 0; j < sf_.cols; ++j) d_[j] = cost[j];
    for (std::size_t i = 0; i < sf_.rows; ++i) {
      const double cb = cost[sf_.basis[i]];
      if (cb == 0.0) continue;
      const double* row = &sf_.a[i * sf_.cols];
      for (std::size_t j = 0; j < sf_.cols; ++j) d_[j] -= cb * row[j];
      d_[sf_.cols] -= cb * sf_.b[i];
    }
  }

  /// Enough pivots since the last rebuild for round-off to matter.
  bool drifted() const { return since_refactor_ >= kRefactorMin; }

  /// True when some eligible column has a negative reduced cost.
  bool improvable() const { return choose_entering(false) != kNone; }

  /// Current minimized objective value of the priced cost vector.
  double objective() const { return -d_[sf_.cols]; }

  Outcome run(bool phase2, double objective_scale, double objective_shift) {
    std::size_t degenerate_run = 0;
    const std::size_t bland_limit = opt_.bland_after.value_or(3 * (sf_.rows + sf_.cols));
    bool bland = false;
    while (true) {
      const std::size_t enter = choose_entering(bland);
      if (enter == kNone) return Outcome::Optimal;
      const std::size_t leave = choose_leaving(enter, bland);
      if (leave == kNone) {
        unbounded_col_ = enter;
        return Outcome::Unbounded;
      }
      if (iterations_ >= opt_.max_iterations) throw IterationLimitExceeded(opt_.max_iterations);
      // A slightly negative rhs (allowed by the relaxed ratio test) is
      // snapped to zero so the pivot never worsens the objective.
      if (sf_.b[leave] < 0.0) sf_.b[leave] = 0.0;
      const double step = sf_.b[leave] / sf_.at(leave, enter);
      const double gain = -d_[enter] * step;
      pivot(leave, enter);
      ++iterations_;
      if (++since_refactor_ >= kRefactorEvery) {
        refactor();
        reprice();
      }
      if (gain <= kStallGain) {
        if (++degenerate_run >= bland_limit && opt_.allow_bland) {
          bland = true;
          bland_engaged_ = true;
        }
      } else {
        // Progress leaves the stalled vertex; Dantzig pricing resumes.
        degenerate_run = 0;
        bland = false;
      }
      if (phase2 && opt_.record_trace) trace_.push_back(objective_scale * (objective() + objective_shift));
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t cols = sf_.cols;
    double* prow = &sf_.a[r * cols];

    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < cols; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    sf_.b[r] *= inv;
    // Nonzero pattern of the pivot row, reused for every elimination.
    nz_.clear();
    for (std::size_t j = 0; j < cols; ++j)
      if (prow[j] != 0.0) nz_.push_back(j);
    for (std::size_t i = 0; i < sf_.rows; ++i) {
      if (i == r) continue;
      double* row = &sf_.a[i * cols];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) {
        row[j] -= f * prow[j];
        if (std::abs(row[j]) < kDropTol) row[j] = 0.0;
      }
      row[c] = 0.0;
      sf_.b[i] -= f * sf_.b[r];
      if (std::abs(sf_.b[i]) < 1e-11) sf_.b[i] = 0.0;
    }
    const double f = d_[c];
    if (f != 0.0) {
      for (std::size_t j : nz_) d_[j] -= f * prow[j];
      d_[c] = 0.0;
      d_[cols] -= f * sf_.b[r];
    }
    sf_.basis[r] = c;
  }

  void bar_column(std::size_t c) { eligible_[c] = false; }

  /// Rebuilds the tableau as B^-1 [A | b] from the original rows for the
  /// current basis (Gauss-Jordan, partial pivoting). Returns false and keeps
  /// the current tableau when the basis matrix is numerically singular.
  bool refactor() {
    since_refactor_ = 0;
    const std::size_t m = sf_.rows, n = sf_.cols, w = n + 1;
    std::vector<double> bm(m * m), x(m * w);
    for (std::size_t i = 0; i < m; ++i) {
      const double* orig = &a0_[row_id_[i] * n];
      for (std::size_t k = 0; k < m; ++k) bm[i * m + k] = orig[sf_.basis[k]];
      std::copy_n(orig, n, &x[i * w]);
      x[i * w + n] = b0_[row_id_[i]];
    }
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < m; ++i)
        if (std::abs(bm[i * m + k]) > std::abs(bm[p * m + k])) p = i;
      if (std::abs(bm[p * m + k]) < 1e-9) return false;
      if (p != k) {
        std::swap_ranges(&bm[p * m], &bm[p * m] + m, &bm[k * m]);
        std::swap_ranges(&x[p * w], &x[p * w] + w, &x[k * w]);
      }
      const double inv = 1.0 / bm[k * m + k];
      for (std::size_t j = 0; j < m; ++j) bm[k * m + j] *= inv;
      for (std::size_t j = 0; j < w; ++j) x[k * w + j] *= inv;
      nz_.clear();
      for (std::size_t j = 0; j < w; ++j)
        if (x[k * w + j] != 0.0) nz_.push_back(j);
      for (std::size_t i = 0; i < m; ++i) {
        if (i == k) continue;
        const double f = bm[i * m + k];
        if (f == 0.0) continue;
        for (std::size_t j = k; j < m; ++j) bm[i * m + j] -= f * bm[k * m + j];
        for (std::size_t j : nz_) x[i * w + j] -= f * x[k * w + j];
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      double* row = &sf_.a[i * n];
      for (std::size_t j = 0; j < n; ++j) {
        const double v = x[i * w + j];
        row[j] = std::abs(v) < kDropTol ? 0.0 : v;
      }
      for (std::size_t k = 0; k < m; ++k) row[sf_.basis[k]] = k == i ? 1.0 : 0.0;
      const double bv = x[i * w + n];
      sf_.b[i] = std::abs(bv) < kDropTol ? 0.0 : bv;
    }
    return true;
  }

  /// Prices against the cost vector last passed to price().
  void reprice() {
    if (!cost_.empty()) price(cost_);
  }

  /// Removes row r (used for redundant rows whose artificial cannot leave).
  void drop_row(std::size_t r) {
    const std::size_t last = sf_.rows - 1;
    if (r != last) {
      std::copy_n(&sf_.a[last * sf_.cols], sf_.cols, &sf_.a[r * sf_.cols]);
      sf_.b[r] = sf_.b[last];
      sf_.basis[r] = sf_.basis[last];
      sf_.row_origin[r] = sf_.row_origin[last];
      row_id_[r] = row_id_[last];
    }
    row_id_.pop_back();
    sf_.a.resize(last * sf_.cols);
    sf_.b.pop_back();
    sf_.basis.pop_back();
    sf_.row_origin.pop_back();
    --sf_.rows;
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  // Entries below this after elimination are round-off and are zeroed.
  static constexpr double kDropTol = 1e-11;
  // Objective gain at or below this counts as a degenerate pivot.
  static constexpr double kStallGain = 1e-9;
  static constexpr double kBlandPivotRatio = 1e-2;
  // Rows whose largest non-artificial entry is below this are treated as
  // redundant when driving artificials out after phase one.
  static constexpr double kDriveOutPivot = 1e-7;
  // Pivots between tableau rebuilds.
  static constexpr std::size_t kRefactorEvery = 1000;
  static constexpr std::size_t kRefactorMin = 100;

 private:
  std::size_t choose_entering(bool bland) const {
    std::size_t best = kNone;
    double best_d = -opt_.cost_tol;
    for (std::size_t j = 0; j < sf_.cols; ++j) {
      if (!eligible_[j]) continue;
      if (d_[j] < best_d) {
        best = j;
        if (bland) return j;
        best_d = d_[j];
      }
    }
    return best;
  }

  // Two-pass ratio test. Pass one finds the minimum ratio with every rhs
  // relaxed by feas_tol; pass two picks, among rows within that bound, the
  // largest pivot element (smallest basic column index under Bland's rule).
  std::size_t choose_leaving(std::size_t c, bool bland) const {
    double bound = kInf;
    for (std::size_t i = 0; i < sf_.rows; ++i) {
      const double a = sf_.at(i, c);
      if (a <= opt_.pivot_tol) continue;
      bound = std::min(bound, (std::max(0.0, sf_.b[i]) + ratio_slack()) / a);
    }
    if (bound == kInf) return kNone;
    std::size_t best = kNone;
    double best_a = 0.0;
    for (std::size_t i = 0; i < sf_.rows; ++i) {
      const double a = sf_.at(i, c);
      if (a <= opt_.pivot_tol || std::max(0.0, sf_.b[i]) / a > bound) continue;
      if (a > best_a) {
        best = i;
        best_a = a;
      }
    }
    if (!bland) return best;
    // Bland: smallest basic column among candidates whose pivot is not tiny
    // relative to the largest one.
    for (std::size_t i = 0; i < sf_.rows; ++i) {
      const double a = sf_.at(i, c);
      if (a < kBlandPivotRatio * best_a || std::max(0.0, sf_.b[i]) / a > bound) continue;
      if (sf_.basis[i] < sf_.basis[best]) best = i;
    }
    return best;
  }

  double ratio_slack() const { return opt_.harris_ratio_test ? opt_.feas_tol : 1e-12; }

  StandardForm& sf_;
  const SimplexOptions& opt_;
  std::vector<double> d_;  // reduced costs; last entry is -objective
  std::vector<bool> eligible_;
  std::vector<std::size_t> nz_;
  std::vector<double> cost_;
  std::vector<double> a0_;  // original rows, for refactor()
  std::vector<double> b0_;
  std::vector<std::size_t> row_id_;  // original row behind each tableau row
  std::size_t since_refactor_ = 0;
  std::size_t iterations_ = 0;
  bool bland_engaged_ = false;
  std::optional<std::size_t> unbounded_col_;
  std::vector<double> trace_;
};

}  // namespace simplex_detail

/// Column values of an optimal standard-form tableau.
inline std::vector<double> column_values(const StandardForm& sf) {
  std::vector<double> x(sf.cols, 0.0);
  for (std::size_t i = 0; i < sf.rows; ++i) x[sf.basis[i]] = sf.b[i];
  return x;
}

/// Runs both phases on `sf` in place. Returns column-level status; variable
/// values are filled by solve_relaxation.
inline LpResult solve_standard_form(StandardForm& sf, const SimplexOptions& opt = {}) {
  using simplex_detail::Tableau;
  LpResult result;
  Tableau tab(sf, opt);

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1_cost(sf.cols, 0.0);
  bool has_artificial = false;
  for (std::size_t j = 0; j < sf.cols; ++j) {
    if (sf.column_kind[j] == ColumnKind::Artificial) {
      phase1_cost[j] = 1.0;
      has_artificial = true;
    }
  }
  if (has_artificial) {
    tab.price(phase1_cost);
    tab.run(false, 1.0, 0.0);
    // Clear drift before judging feasibility; resume if the rebuilt
    // tableau still has an improving column.
    for (int round = 0; round < 3 && tab.drifted() && tab.refactor(); ++round) {
      tab.reprice();
      if (!tab.improvable()) break;
      tab.run(false, 1.0, 0.0);
    }
    if (tab.objective() > opt.feas_tol) {
      result.status = LpStatus::Infeasible;
      result.iterations = tab.iterations();
      result.bland_engaged = tab.bland_engaged();
      return result;
    }
    // Drive remaining artificials out of the basis or drop their rows.
    for (std::size_t i = 0; i < sf.rows;) {
      if (sf.column_kind[sf.basis[i]] != ColumnKind::Artificial) {
        ++i;
        continue;
      }
      std::size_t best = Tableau::kNone;
      double best_mag = Tableau::kDriveOutPivot;
      for (std::size_t j = 0; j < sf.cols; ++j) {
        if (sf.column_kind[j] == ColumnKind::Artificial) continue;
        const double mag = std::abs(sf.at(i, j));
        if (mag > best_mag) {
          best_mag = mag;
          best = j;
        }
      }
      if (best == Tableau::kNone) {
        tab.drop_row(i);
      } else {
        // The artificial sits at zero within tolerance; pin it there so the
        // pivot leaves every other basic value untouched.
        sf.b[i] = 0.0;
        tab.pivot(i, best);
        ++i;
      }
    }
    for (std::size_t j = 0; j < sf.cols; ++j)
      if (sf.column_kind[j] == ColumnKind::Artificial) tab.bar_column(j);
  }

  // Phase 2.
  tab.price(sf.cost);
  if (opt.record_trace)
    tab.trace().push_back(sf.objective_sign * (tab.objective() + sf.cost_offset));
  auto outcome = tab.run(true, sf.objective_sign, sf.cost_offset);
  for (int round = 0; round < 3 && outcome == Tableau::Outcome::Optimal && tab.drifted() && tab.refactor(); ++round) {
    tab.reprice();
    if (!tab.improvable()) break;
    outcome = tab.run(true, sf.objective_sign, sf.cost_offset);
  }
  result.iterations = tab.iterations();
  result.bland_engaged = tab.bland_engaged();
  result.phase2_trace = std::move(tab.trace());
  if (outcome == Tableau::Outcome::Unbounded) {
    result.status = LpStatus::Unbounded;
    result.unbounded_column = tab.unbounded_column();
    return result;
  }
  result.status = LpStatus::Optimal;
  result.objective = sf.objective_sign * (tab.objective() + sf.cost_offset);
  return result;
}

/// Maps optimal column values back to model variables.
inline std::vector<double> recover_values(const StandardForm& sf) {
  const std::vector<double> x = column_values(sf);
  std::vector<double> values(sf.var_map.size());
  for (std::size_t j = 0; j < sf.var_map.size(); ++j) {
    const VarMapping& m = sf.var_map[j];
    switch (m.mode) {
      case VarMapping::Mode::Fixed: values[j] = m.offset; break;
      case VarMapping::Mode::Shifted: values[j] = m.offset + x[m.column]; break;
      case VarMapping::Mode::Reflected: values[j] = m.offset - x[m.column]; break;
      case VarMapping::Mode::Split: values[j] = x[m.column] - x[m.neg_column]; break;
    }
  }
  return values;
}

/// LP relaxation under explicit variable bounds.
inline LpResult solve_relaxation(const Model& model, std::span<const double> lower, std::span<const double> upper,
                                 const SimplexOptions& opt = {}) {
  for (std::size_t j = 0; j < model.num_vars(); ++j) {
    if (lower[j] > upper[j] + opt.feas_tol) {
      LpResult r;
      r.status = LpStatus::Infeasible;
      return r;
    }
  }
  StandardForm sf = to_standard_form(model, lower, upper, opt.skip_implied_upper_rows);
  LpResult result = solve_standard_form(sf, opt);
  if (result.status == LpStatus::Optimal) {
    result.values = recover_values(sf);
    result.objective = evaluate(model.objective().expr, result.values);
  }
  return result;
}

inline LpResult solve_relaxation(const Model& model, const SimplexOptions& opt = {}) {
  std::vector<double> lo;
  std::vector<double> hi;
  lo.reserve(model.num_vars());
  hi.reserve(model.num_vars());
  for (const Variable& v : model.variables()) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
  }
  return solve_relaxation(model, lo, hi, opt);
}

}  // namespace optlab
