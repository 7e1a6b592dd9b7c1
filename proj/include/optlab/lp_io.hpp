#pragma once

// Reader and writer for a subset of the CPLEX LP text format.
//
// Written layout (byte-exact):
//
//   Maximize | Minimize
//   obj: + x + 2 y
//   Subject To
//   c1: + x + y <= 1
//   Bounds            (only when some bound differs from 0 <= v <= inf)
//   Generals          (only when integer variables exist)
//   Binaries          (only when binary variables exist)
//   End
//
// The reader is more tolerant: keywords are case-insensitive, tokens may be
// split over lines, `\` starts a comment running to end of line, and numbers
// may use scientific notation.

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "optlab/ilp_core.hpp"

namespace optlab {

enum class LpErrc { SyntaxError, UnknownSection, DuplicateConstraintName };

class LpParseError : public std::runtime_error {
 public:
  LpParseError(LpErrc code, std::size_t line, std::size_t column, std::string expected)
      : std::runtime_error(format(code, line, column, expected)),
        code_(code), line_(line), column_(column), expected_(std::move(expected)) {}

  LpErrc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  static std::string format(LpErrc code, std::size_t line, std::size_t column, const std::string& expected) {
    const char* kind = code == LpErrc::SyntaxError        ? "SyntaxError"
                       : code == LpErrc::UnknownSection   ? "UnknownSection"
                                                          : "DuplicateConstraintName";
    return std::string(kind) + " at " + std::to_string(line) + ":" + std::to_string(column) + ": " + expected;
  }

  LpErrc code_;
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

namespace lp_detail {

/// Shortest fixed-notation decimal that round-trips to the same double.
inline std::string format_number(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  if (v == 0.0) return "0";
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  if (res.ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, res.ptr);
}

inline void append_expr(std::string& out, const LinExpr& expr, const Model& model, bool with_constant) {
  bool any = false;
  for (const auto& [idx, c] : expr.terms()) {
    out += c < 0 ? " -" : " +";
    double mag = std::abs(c);
    if (mag != 1.0) {
      out += ' ';
      out += format_number(mag);
    }
    out += ' ';
    out += model.variables()[idx].name;
    any = true;
  }
  if (with_constant && expr.constant() != 0.0) {
    out += expr.constant() < 0 ? " - " : " + ";
    out += format_number(std::abs(expr.constant()));
    any = true;
  }
  if (!any) out += " 0";
}

inline const char* sense_token(Sense s) {
  switch (s) {
    case Sense::Le: return "<=";
    case Sense::Eq: return "=";
    case Sense::Ge: return ">=";
  }
  return "<=";
}

}  // namespace lp_detail

/// Serializes a model. Output is a pure function of the model.
inline std::string write_lp(const Model& model) {
  using lp_detail::append_expr;
  using lp_detail::format_number;
  const auto& vars = model.variables();

  std::vector<bool> referenced(vars.size(), false);
  for (const auto& [idx, c] : model.objective().expr.terms()) referenced[idx] = true;
  for (const Constraint& c : model.constraints())
    for (const auto& [idx, coeff] : c.expr.terms()) referenced[idx] = true;

  std::string out;
  out += model.objective().sense == ObjSense::Maximize ? "Maximize\n" : "Minimize\n";
  out += "obj:";
  append_expr(out, model.objective().expr, model, true);
  out += "\nSubject To\n";
  for (const Constraint& c : model.constraints()) {
    out += c.name;
    out += ':';
    append_expr(out, c.expr, model, false);
    out += ' ';
    out += lp_detail::sense_token(c.sense);
    out += ' ';
    out += format_number(c.rhs);
    out += '\n';
  }

  std::string bounds;
  std::string generals;
  std::string binaries;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Variable& v = vars[j];
    if (v.kind == VarKind::Binary) {
      binaries += v.name + "\n";
      continue;
    }
    if (v.kind == VarKind::Integer) generals += v.name + "\n";
    const bool default_lower = v.lower == 0.0;
    const bool default_upper = v.upper == kInf;
    if (v.lower == -kInf && v.upper == kInf) {
      bounds += v.name + " free\n";
    } else if (default_lower && default_upper) {
      // declare otherwise invisible continuous variables so they survive a round trip
      if (!referenced[j] && v.kind == VarKind::Continuous) bounds += v.name + " >= 0\n";
    } else if (default_lower) {
      bounds += v.name + " <= " + format_number(v.upper) + "\n";
    } else if (default_upper) {
      bounds += v.name + " >= " + format_number(v.lower) + "\n";
    } else {
      bounds += format_number(v.lower) + " <= " + v.name + " <= " + format_number(v.upper) + "\n";
    }
  }
  if (!bounds.empty()) out += "Bounds\n" + bounds;
  if (!generals.empty()) out += "Generals\n" + generals;
  if (!binaries.empty()) out += "Binaries\n" + binaries;
  out += "End\n";
  return out;
}

namespace lp_detail {

enum class Tok { Ident, Number, Plus, Minus, Colon, Le, Ge, Eq, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  std::size_t line = 0;
  std::size_t column = 0;
  bool line_start = false;
};

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']' ||
         c == '{' || c == '}' || c == '#' || c == '$' || c == '%' || c == '&' || c == '~' || c == '\'' ||
         c == '@' || c == '^' || c == '!' || c == '"' || c == '?' || c == ';' || c == '/' ||
         c == ',' || c == '(' || c == ')';
}

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> toks;
  std::size_t line = 1;
  std::size_t col = 1;
  bool line_start = true;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    i += n;
    col += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      line_start = true;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '\\') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    t.line_start = line_start;
    line_start = false;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < text.size() &&
                                                        std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          j = k;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(text.substr(i, j - i));
      double v = 0.0;
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size())
        throw LpParseError(LpErrc::SyntaxError, line, col, "well-formed number, got '" + t.text + "'");
      t.number = v;
      advance(j - i);
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '+') {
      t.kind = Tok::Plus;
      t.text = "+";
      advance(1);
    } else if (c == '-') {
      t.kind = Tok::Minus;
      t.text = "-";
      advance(1);
    } else if (c == ':') {
      t.kind = Tok::Colon;
      t.text = ":";
      advance(1);
    } else if (c == '<' || c == '>' || c == '=') {
      std::size_t n = 1;
      if (i + 1 < text.size() && text[i + 1] == '=' && c != '=') n = 2;
      else if (c == '=' && i + 1 < text.size() && (text[i + 1] == '<' || text[i + 1] == '>')) {
        n = 2;
        c = text[i + 1];
      }
      t.kind = c == '<' ? Tok::Le : c == '>' ? Tok::Ge : Tok::Eq;
      t.text = std::string(text.substr(i, n));
      advance(n);
    } else {
      throw LpParseError(LpErrc::SyntaxError, line, col, std::string("valid character, got '") + c + "'");
    }
    toks.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  end.line_start = true;
  toks.push_back(end);
  return toks;
}

inline std::string lower(std::string_view s) {
  std::string r(s);
  for (char& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return r;
}

enum class Section { None, Objective, Constraints, Bounds, Generals, Binaries, End };

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Model parse() {
    skip_to_objective();
    parse_objective();
    Section last = Section::Objective;
    while (true) {
      Section s = section_at(pos_);
      if (s == Section::None) {
        const Token& t = peek();
        if (t.kind == Tok::End) throw error(t, "End");
        throw error(t, "section keyword");
      }
      if (s <= last) throw error(peek(), "sections in order Subject To, Bounds, Generals, Binaries, End");
      consume_section_keyword(s);
      last = s;
      switch (s) {
        case Section::Constraints: parse_constraints(); break;
        case Section::Bounds: parse_bounds(); break;
        case Section::Generals: parse_kind_list(VarKind::Integer); break;
        case Section::Binaries: parse_kind_list(VarKind::Binary); break;
        case Section::End:
          if (peek().kind != Tok::End) throw error(peek(), "end of input after End");
          return std::move(model_);
        default: break;
      }
    }
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  LpParseError error(const Token& t, const std::string& expected) const {
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    return LpParseError(LpErrc::SyntaxError, t.line, t.column, "expected " + expected + ", got " + got);
  }

  // Recognizes a section keyword starting at token index i (only at line start).
  Section section_at(std::size_t i) const {
    if (i >= toks_.size()) return Section::None;
    const Token& t = toks_[i];
    if (t.kind != Tok::Ident || !t.line_start) return Section::None;
    std::string w = lower(t.text);
    if (w == "subject" && i + 1 < toks_.size() && toks_[i + 1].kind == Tok::Ident &&
        lower(toks_[i + 1].text) == "to")
      return Section::Constraints;
    if (w == "such" && i + 1 < toks_.size() && toks_[i + 1].kind == Tok::Ident &&
        lower(toks_[i + 1].text) == "that")
      return Section::Constraints;
    if (w == "st" || w == "s.t." || w == "st.") return Section::Constraints;
    if (w == "bounds" || w == "bound") return Section::Bounds;
    if (w == "generals" || w == "general" || w == "gen") return Section::Generals;
    if (w == "binaries" || w == "binary" || w == "bin") return Section::Binaries;
    if (w == "end") return Section::End;
    if (w == "semi-continuous" || w == "semis" || w == "semi" || w == "sos" || w == "pwl" ||
        w == "ranges" || w == "lazy" || w == "user" || w == "declarations")
      throw LpParseError(LpErrc::UnknownSection, t.line, t.column, "unsupported section '" + t.text + "'");
    return Section::None;
  }

  void consume_section_keyword(Section s) {
    std::string w = lower(peek().text);
    next();
    if (s == Section::Constraints && (w == "subject" || w == "such")) next();
  }

  void skip_to_objective() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) throw error(t, "Maximize or Minimize");
    std::string w = lower(t.text);
    if (w == "maximize" || w == "maximum" || w == "max" || w == "maximise") {
      sense_ = ObjSense::Maximize;
    } else if (w == "minimize" || w == "minimum" || w == "min" || w == "minimise") {
      sense_ = ObjSense::Minimize;
    } else {
      throw LpParseError(LpErrc::UnknownSection, t.line, t.column,
                         "expected Maximize or Minimize, got '" + t.text + "'");
    }
    next();
  }

  VarId var(const std::string& name, const Token& at) {
    if (auto v = model_.find_variable(name)) return *v;
    if (!is_valid_identifier(name)) throw error(at, "identifier of letters, digits and '_'");
    return model_.add_variable(name, 0.0, kInf, VarKind::Continuous);
  }

  // Optional "name:" label.
  std::string label() {
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon && section_at(pos_) == Section::None) {
      std::string name = next().text;
      next();
      return name;
    }
    return {};
  }

  bool expression_ends() const {
    const Token& t = peek();
    return t.kind == Tok::End || t.kind == Tok::Le || t.kind == Tok::Ge || t.kind == Tok::Eq ||
           section_at(pos_) != Section::None;
  }

  // Reads terms until a relational operator, section keyword or end of input.
  LinExpr expression(bool stop_at_label) {
    LinExpr e;
    bool first = true;
    while (true) {
      if (expression_ends()) break;
      if (stop_at_label && !first && peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) break;
      double sign = 1.0;
      bool had_sign = false;
      while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
        if (next().kind == Tok::Minus) sign = -sign;
        had_sign = true;
      }
      if (!first && !had_sign) throw error(peek(), "'+' or '-' between terms");
      const Token& t = peek();
      if (t.kind == Tok::Number) {
        double coeff = next().number * sign;
        if (peek().kind == Tok::Ident && section_at(pos_) == Section::None &&
            !(peek(1).kind == Tok::Colon)) {
          const Token& v = next();
          e.add_term(var(v.text, v), coeff);
        } else {
          e.add_constant(coeff);
        }
      } else if (t.kind == Tok::Ident && section_at(pos_) == Section::None) {
        const Token& v = next();
        e.add_term(var(v.text, v), sign);
      } else {
        throw error(t, "variable or number");
      }
      first = false;
    }
    return e;
  }

  void parse_objective() {
    std::string name = label();
    (void)name;
    LinExpr e = expression(false);
    if (peek().kind == Tok::Le || peek().kind == Tok::Ge || peek().kind == Tok::Eq)
      throw error(peek(), "objective terms or section keyword");
    objective_ = std::move(e);
    model_.set_objective(sense_, objective_);
  }

  double signed_number() {
    double sign = 1.0;
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus)
      if (next().kind == Tok::Minus) sign = -sign;
    const Token& t = peek();
    if (t.kind == Tok::Number) return sign * next().number;
    if (t.kind == Tok::Ident) {
      std::string w = lower(t.text);
      if (w == "inf" || w == "infinity") {
        next();
        return sign * kInf;
      }
    }
    throw error(t, "number");
  }

  void parse_constraints() {
    std::size_t auto_id = 0;
    while (section_at(pos_) == Section::None && peek().kind != Tok::End) {
      const Token& start = peek();
      std::string name = label();
      LinExpr e = expression(true);
      const Token& op = peek();
      Sense s;
      if (op.kind == Tok::Le) s = Sense::Le;
      else if (op.kind == Tok::Ge) s = Sense::Ge;
      else if (op.kind == Tok::Eq) s = Sense::Eq;
      else throw error(op, "'<=', '>=' or '='");
      next();
      double rhs = signed_number();
      if (!std::isfinite(rhs)) throw error(peek(), "finite right-hand side");
      if (name.empty()) {
        do name = "R" + std::to_string(++auto_id);
        while (model_.has_constraint(name));
      }
      if (model_.has_constraint(name))
        throw LpParseError(LpErrc::DuplicateConstraintName, start.line, start.column,
                           "constraint name '" + name + "' already used");
      if (!is_valid_identifier(name)) throw error(start, "identifier of letters, digits and '_'");
      model_.add_constraint(name, e, s, rhs);
    }
    // Objective variables were declared before the constraints; keep the objective in sync.
    model_.set_objective(sense_, objective_);
  }

  static bool is_relop(Tok k) { return k == Tok::Le || k == Tok::Ge || k == Tok::Eq; }

  bool at_value() const {
    const Token& t = peek();
    if (t.kind == Tok::Number || t.kind == Tok::Plus || t.kind == Tok::Minus) return true;
    if (t.kind == Tok::Ident) {
      std::string w = lower(t.text);
      return (w == "inf" || w == "infinity") && is_relop(peek(1).kind);
    }
    return false;
  }

  void apply(VarId v, Tok op, double value, bool var_on_left) {
    const Variable& cur = model_.variable(v);
    double lo = cur.lower;
    double hi = cur.upper;
    if (op == Tok::Eq) {
      lo = hi = value;
    } else if ((op == Tok::Le) == var_on_left) {
      hi = value;
    } else {
      lo = value;
    }
    if (lo > hi) throw error(toks_[pos_ - 1], "lower bound not above upper bound");
    if (cur.kind == VarKind::Binary) model_.set_kind(v, VarKind::Integer);
    model_.set_bounds(v, lo, hi);
  }

  void parse_bounds() {
    while (section_at(pos_) == Section::None && peek().kind != Tok::End) {
      if (at_value()) {
        double first = signed_number();
        const Token& op1 = peek();
        if (!is_relop(op1.kind)) throw error(op1, "'<=' or '>='");
        next();
        const Token& vt = peek();
        if (vt.kind != Tok::Ident) throw error(vt, "variable");
        next();
        VarId v = var(vt.text, vt);
        apply(v, op1.kind, first, false);
        if (is_relop(peek().kind)) {
          Tok op2 = next().kind;
          apply(v, op2, signed_number(), true);
        }
      } else if (peek().kind == Tok::Ident) {
        const Token& vt = next();
        VarId v = var(vt.text, vt);
        if (peek().kind == Tok::Ident && lower(peek().text) == "free") {
          next();
          model_.set_bounds(v, -kInf, kInf);
          continue;
        }
        const Token& op = peek();
        if (!is_relop(op.kind)) throw error(op, "'<=', '>=', '=' or 'free'");
        next();
        apply(v, op.kind, signed_number(), true);
      } else {
        throw error(peek(), "bound");
      }
    }
  }

  void parse_kind_list(VarKind kind) {
    while (section_at(pos_) == Section::None && peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) throw error(t, "variable name");
      next();
      VarId v = var(t.text, t);
      if (kind == VarKind::Binary) {
        model_.set_kind(v, VarKind::Integer);
        model_.set_bounds(v, 0.0, 1.0);
      }
      model_.set_kind(v, kind);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Model model_;
  ObjSense sense_ = ObjSense::Maximize;
  LinExpr objective_;
};

}  // namespace lp_detail

/// Parses LP text. Variables are numbered in order of first appearance.
inline Model parse_lp(std::string_view text) { return lp_detail::Parser(text).parse(); }

}  // namespace optlab
