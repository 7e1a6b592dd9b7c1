#pragma once

// Core model types: variables, sparse linear expressions, constraints and
// the Model container shared by the LP writer, the simplex engine and the
// branch-and-bound search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace optlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-6;

enum class ModelErrc {
  DuplicateName,
  InvalidBounds,
  BadIdentifier,
  UnknownVariable,
  MissingValue,
  NonFiniteCoefficient,
};

inline const char* to_string(ModelErrc e) {
  switch (e) {
    case ModelErrc::DuplicateName: return "DuplicateName";
    case ModelErrc::InvalidBounds: return "InvalidBounds";
    case ModelErrc::BadIdentifier: return "BadIdentifier";
    case ModelErrc::UnknownVariable: return "UnknownVariable";
    case ModelErrc::MissingValue: return "MissingValue";
    case ModelErrc::NonFiniteCoefficient: return "NonFiniteCoefficient";
  }
  return "ModelError";
}

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ModelErrc code() const noexcept { return code_; }

 private:
  ModelErrc code_;
};

/// Dense, model-local variable handle.
struct VarId {
  std::size_t index = 0;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

struct ConstraintId {
  std::size_t index = 0;
  friend auto operator<=>(const ConstraintId&, const ConstraintId&) = default;
};

enum class VarKind { Continuous, Integer, Binary };
enum class Sense { Le, Eq, Ge };
enum class ObjSense { Maximize, Minimize };

inline bool is_integral_kind(VarKind k) { return k != VarKind::Continuous; }

/// Identifiers must survive an LP-file round trip without escaping.
inline bool is_valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
}

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Sparse linear expression: sum of coefficient * variable plus a constant.
/// Zero coefficients are never stored.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) { check_finite(constant); }
  LinExpr(VarId v, double coeff = 1.0) { add_term(v, coeff); }  // NOLINT(google-explicit-constructor)

  LinExpr& add_term(VarId v, double coeff) {
    check_finite(coeff);
    if (coeff == 0.0) return *this;
    auto it = terms_.find(v.index);
    if (it == terms_.end()) {
      terms_.emplace(v.index, coeff);
    } else {
      it->second += coeff;
      if (it->second == 0.0) terms_.erase(it);
    }
    return *this;
  }

  LinExpr& add_constant(double c) {
    check_finite(c);
    constant_ += c;
    return *this;
  }

  LinExpr& operator+=(const LinExpr& o) {
    for (const auto& [idx, c] : o.terms_) add_term(VarId{idx}, c);
    return add_constant(o.constant_);
  }
  LinExpr& operator-=(const LinExpr& o) { return *this += o * -1.0; }
  LinExpr& operator*=(double a) {
    check_finite(a);
    if (a == 0.0) {
      terms_.clear();
      constant_ = 0.0;
      return *this;
    }
    for (auto& [idx, c] : terms_) c *= a;
    constant_ *= a;
    return *this;
  }

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

  /// Terms ordered by variable index.
  const std::map<std::size_t, double>& terms() const { return terms_; }
  double constant() const { return constant_; }
  double coeff(VarId v) const {
    auto it = terms_.find(v.index);
    return it == terms_.end() ? 0.0 : it->second;
  }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  friend bool operator==(const LinExpr&, const LinExpr&) = default;

 private:
  static void check_finite(double v) {
    if (!std::isfinite(v)) throw ModelError(ModelErrc::NonFiniteCoefficient, "coefficient must be finite");
  }

  std::map<std::size_t, double> terms_;
  double constant_ = 0.0;
};

/// Sum of unit-coefficient terms.
inline LinExpr sum_of(std::span<const VarId> vars) {
  LinExpr e;
  for (VarId v : vars) e.add_term(v, 1.0);
  return e;
}

struct Constraint {
  std::string name;
  LinExpr expr;  // constant is always zero once stored in a Model
  Sense sense = Sense::Le;
  double rhs = 0.0;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Objective {
  ObjSense sense = ObjSense::Maximize;
  LinExpr expr;
  friend bool operator==(const Objective&, const Objective&) = default;
};

/// Variable assignment indexed by VarId; NaN marks a missing value.
using Assignment = std::vector<double>;

inline double evaluate(const LinExpr& expr, std::span<const double> values) {
  double total = expr.constant();
  for (const auto& [idx, c] : expr.terms()) {
    if (idx >= values.size() || std::isnan(values[idx]))
      throw ModelError(ModelErrc::MissingValue, "no value for variable index " + std::to_string(idx));
    total += c * values[idx];
  }
  return total;
}

inline double evaluate(const LinExpr& expr, const std::unordered_map<std::size_t, double>& values) {
  double total = expr.constant();
  for (const auto& [idx, c] : expr.terms()) {
    auto it = values.find(idx);
    if (it == values.end())
      throw ModelError(ModelErrc::MissingValue, "no value for variable index " + std::to_string(idx));
    total += c * it->second;
  }
  return total;
}

class Model {
 public:
  Model() = default;
  explicit Model(std::string name) : name_(std::move(name)) {}

  VarId add_variable(const std::string& name, double lower, double upper, VarKind kind) {
    if (!is_valid_identifier(name)) throw ModelError(ModelErrc::BadIdentifier, "'" + name + "'");
    if (std::isnan(lower) || std::isnan(upper) || lower > upper || lower == kInf || upper == -kInf)
      throw ModelError(ModelErrc::InvalidBounds, name);
    if (kind == VarKind::Binary && (lower != 0.0 || upper != 1.0))
      throw ModelError(ModelErrc::InvalidBounds, name + ": binary variables have bounds [0, 1]");
    if (var_index_.contains(name)) throw ModelError(ModelErrc::DuplicateName, "variable " + name);
    VarId id{variables_.size()};
    variables_.push_back(Variable{name, lower, upper, kind});
    var_index_.emplace(name, id.index);
    return id;
  }

  VarId add_binary(const std::string& name) { return add_variable(name, 0.0, 1.0, VarKind::Binary); }

  ConstraintId add_constraint(const std::string& name, const LinExpr& expr, Sense sense, double rhs) {
    if (!is_valid_identifier(name)) throw ModelError(ModelErrc::BadIdentifier, "'" + name + "'");
    if (!std::isfinite(rhs)) throw ModelError(ModelErrc::NonFiniteCoefficient, "rhs of " + name);
    if (con_index_.contains(name)) throw ModelError(ModelErrc::DuplicateName, "constraint " + name);
    check_vars(expr, name);
    Constraint c{name, expr, sense, rhs - expr.constant()};
    c.expr.add_constant(-expr.constant());
    ConstraintId id{constraints_.size()};
    constraints_.push_back(std::move(c));
    con_index_.emplace(name, id.index);
    return id;
  }

  void set_objective(ObjSense sense, const LinExpr& expr) {
    check_vars(expr, "objective");
    objective_ = Objective{sense, expr};
  }

  void set_bounds(VarId v, double lower, double upper) {
    Variable& var = variables_.at(v.index);
    if (lower > upper || (var.kind == VarKind::Binary && (lower != 0.0 || upper != 1.0)))
      throw ModelError(ModelErrc::InvalidBounds, var.name);
    var.lower = lower;
    var.upper = upper;
  }

  void set_kind(VarId v, VarKind kind) {
    Variable& var = variables_.at(v.index);
    if (kind == VarKind::Binary && (var.lower != 0.0 || var.upper != 1.0))
      throw ModelError(ModelErrc::InvalidBounds, var.name + ": binary variables have bounds [0, 1]");
    var.kind = kind;
  }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Variable& variable(VarId v) const { return variables_.at(v.index); }
  const Constraint& constraint(ConstraintId c) const { return constraints_.at(c.index); }
  const Objective& objective() const { return objective_; }
  std::size_t num_vars() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  std::optional<VarId> find_variable(std::string_view name) const {
    auto it = var_index_.find(std::string(name));
    if (it == var_index_.end()) return std::nullopt;
    return VarId{it->second};
  }
  bool has_constraint(std::string_view name) const { return con_index_.contains(std::string(name)); }

  /// Structural equality: same variables, constraints and objective in order.
  friend bool operator==(const Model& a, const Model& b) {
    return a.variables_ == b.variables_ && a.constraints_ == b.constraints_ && a.objective_ == b.objective_;
  }

 private:
  void check_vars(const LinExpr& expr, const std::string& where) const {
    for (const auto& [idx, c] : expr.terms())
      if (idx >= variables_.size())
        throw ModelError(ModelErrc::UnknownVariable,
                         "variable index " + std::to_string(idx) + " in " + where);
  }

  std::string name_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  Objective objective_;
  std::unordered_map<std::string, std::size_t> var_index_;
  std::unordered_map<std::string, std::size_t> con_index_;
};

/// Violated-constraint residual, or zero when the row holds.
inline double violation(const Constraint& c, double lhs) {
  switch (c.sense) {
    case Sense::Le: return std::max(0.0, lhs - c.rhs);
    case Sense::Ge: return std::max(0.0, c.rhs - lhs);
    case Sense::Eq: return std::abs(lhs - c.rhs);
  }
  return 0.0;
}

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::string> violated;  // constraint names, then "bound:<var>" / "integrality:<var>"
};

inline FeasibilityReport check_feasible(const Model& model, std::span<const double> values,
                                        double tol = kFeasibilityTol) {
  if (values.size() < model.num_vars())
    throw ModelError(ModelErrc::MissingValue, "assignment covers " + std::to_string(values.size()) +
                                                  " of " + std::to_string(model.num_vars()) + " variables");
  FeasibilityReport report;
  for (const Constraint& c : model.constraints()) {
    if (violation(c, evaluate(c.expr, values)) > tol) report.violated.push_back(c.name);
  }
  for (std::size_t j = 0; j < model.num_vars(); ++j) {
    const Variable& v = model.variables()[j];
    double x = values[j];
    if (std::isnan(x)) throw ModelError(ModelErrc::MissingValue, v.name);
    if (x < v.lower - tol || x > v.upper + tol) report.violated.push_back("bound:" + v.name);
    if (is_integral_kind(v.kind) && std::abs(x - std::round(x)) > tol)
      report.violated.push_back("integrality:" + v.name);
  }
  report.feasible = report.violated.empty();
  return report;
}

}  // namespace optlab
