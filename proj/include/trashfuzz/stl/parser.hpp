#pragma once

// Text syntax for formulas and law packs.
//
//   formula  := or_expr
//   or_expr  := and_expr { "or" and_expr }
//   and_expr := unary { "and" unary }
//   unary    := "not" unary | ("G"|"F") [interval] unary | "X" unary | binder
//   binder   := atom { "U" [interval] atom }
//   atom     := "(" formula ")" | expr cmp expr | "true" | "false" | ident
//   interval := "[" int "," (int | "inf") "]"
//
// A bare identifier `v` abbreviates `v > 0`. Law packs are sequences of
// `law <name> ["description"] { <formula> }` blocks with `#` line comments.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trashfuzz/error.hpp"
#include "trashfuzz/stl/formula.hpp"

namespace trashfuzz::stl {

struct Law {
  std::string name;
  std::string description;
  Formula formula;
};

namespace detail {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
inline bool digit(char c) { return c >= '0' && c <= '9'; }

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t start = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.type = Tok::Ident;
      t.text = std::string(src.substr(start, j - start));
      advance(j - i);
    } else if (digit(c) || (c == '.' && i + 1 < src.size() && digit(src[i + 1]))) {
      std::size_t j = i;
      while (j < src.size() && digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && digit(src[k])) {
          while (k < src.size() && digit(src[k])) ++k;
          j = k;
        }
      }
      t.type = Tok::Number;
      t.text = std::string(src.substr(start, j - start));
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string s;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < src.size()) ++j;
        s.push_back(src[j]);
        ++j;
      }
      if (j >= src.size() || src[j] != '"')
        throw SyntaxError(line, col, {"closing quote"}, "\"");
      t.type = Tok::String;
      t.text = std::move(s);
      advance(j + 1 - i);
    } else {
      static constexpr std::string_view two[] = {"<=", ">=", "==", "!="};
      t.type = Tok::Punct;
      std::string_view rest = src.substr(i);
      bool matched = false;
      for (auto op : two) {
        if (rest.substr(0, 2) == op) {
          t.text = std::string(op);
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("()[]{},+-*/<>").find(c) == std::string_view::npos)
          throw SyntaxError(line, col, {}, std::string(1, c));
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.type = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

inline bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"and", "or", "not", "G", "F", "X",
                                           "U", "true", "false", "law"};
  return kw.count(s) != 0;
}

class Parser {
public:
  static constexpr int kMaxNesting = 1000;

  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse_single() {
    auto f = formula();
    if (f && !at_end()) fail_here("end of input");
    if (!f || !at_end()) raise();
    return *f;
  }

  std::vector<Law> parse_pack() {
    std::vector<Law> laws;
    std::set<std::string> names;
    while (!at_end()) {
      if (!keyword("law")) {
        fail_here("law");
        raise();
      }
      Law law;
      const Token& name_tok = peek();
      if (name_tok.type != Tok::Ident || is_keyword(name_tok.text)) {
        fail_here("law name");
        raise();
      }
      law.name = name_tok.text;
      ++pos_;
      if (!names.insert(law.name).second)
        throw SyntaxError(name_tok.line, name_tok.column, {"unique law name"}, name_tok.text);
      if (peek().type == Tok::String) law.description = toks_[pos_++].text;
      if (!punct("{")) {
        fail_here("{");
        raise();
      }
      auto f = formula();
      if (!f) raise();
      if (!punct("}")) {
        fail_here("}");
        raise();
      }
      law.formula = *f;
      laws.push_back(std::move(law));
      far_ = 0;
      far_expected_.clear();
    }
    if (laws.empty()) {
      fail_here("law");
      raise();
    }
    return laws;
  }

private:
  using Opt = std::optional<Formula>;

  struct Depth {
    Parser& p;
    explicit Depth(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxNesting) {
        const Token& t = p.peek();
        throw SyntaxError(t.line, t.column, {"shallower nesting"}, t.text);
      }
    }
    ~Depth() { --p.depth_; }
  };

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().type == Tok::End; }

  bool punct(const char* p) {
    if (peek().type == Tok::Punct && peek().text == p) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool keyword(const char* k) {
    if (peek().type == Tok::Ident && peek().text == k) {
      ++pos_;
      return true;
    }
    return false;
  }

  void fail_here(const std::string& expected) {
    if (pos_ > far_) {
      far_ = pos_;
      far_expected_.clear();
    }
    if (pos_ == far_ &&
        std::find(far_expected_.begin(), far_expected_.end(), expected) == far_expected_.end())
      far_expected_.push_back(expected);
  }

  [[noreturn]] void raise() const {
    const Token& t = toks_[std::min(far_, toks_.size() - 1)];
    throw SyntaxError(t.line, t.column, far_expected_,
                      t.type == Tok::End ? "end of input" : t.text);
  }

  Opt formula() {
    Depth guard(*this);
    return or_expr();
  }

  Opt or_expr() {
    auto lhs = and_expr();
    if (!lhs) return std::nullopt;
    for (;;) {
      std::size_t save = pos_;
      if (!keyword("or")) {
        fail_here("or");
        return lhs;
      }
      auto rhs = and_expr();
      if (!rhs) {
        pos_ = save;
        return lhs;
      }
      lhs = Formula::disjunction(*lhs, *rhs);
    }
  }

  Opt and_expr() {
    auto lhs = unary();
    if (!lhs) return std::nullopt;
    for (;;) {
      std::size_t save = pos_;
      if (!keyword("and")) {
        fail_here("and");
        return lhs;
      }
      auto rhs = unary();
      if (!rhs) {
        pos_ = save;
        return lhs;
      }
      lhs = Formula::conjunction(*lhs, *rhs);
    }
  }

  Opt unary() {
    Depth guard(*this);
    std::size_t save = pos_;
    if (keyword("not")) {
      if (auto f = unary()) return Formula::negation(*f);
      pos_ = save;
      return std::nullopt;
    }
    if (keyword("X")) {
      if (auto f = unary()) return Formula::next(*f);
      pos_ = save;
      return std::nullopt;
    }
    bool always = peek().type == Tok::Ident && peek().text == "G";
    bool eventually = peek().type == Tok::Ident && peek().text == "F";
    if (always || eventually) {
      ++pos_;
      Interval iv;
      if (peek().type == Tok::Punct && peek().text == "[") {
        auto i = interval();
        if (!i) {
          pos_ = save;
          return std::nullopt;
        }
        iv = *i;
      }
      auto f = unary();
      if (!f) {
        pos_ = save;
        return std::nullopt;
      }
      return always ? Formula::always(iv, *f) : Formula::eventually(iv, *f);
    }
    return binder();
  }

  Opt binder() {
    auto lhs = atom();
    if (!lhs) return std::nullopt;
    for (;;) {
      std::size_t save = pos_;
      if (!keyword("U")) {
        fail_here("U");
        return lhs;
      }
      Interval iv;
      if (peek().type == Tok::Punct && peek().text == "[") {
        auto i = interval();
        if (!i) {
          pos_ = save;
          return lhs;
        }
        iv = *i;
      }
      auto rhs = atom();
      if (!rhs) {
        pos_ = save;
        return lhs;
      }
      lhs = Formula::until(iv, *lhs, *rhs);
    }
  }

  std::optional<std::uint64_t> integer() {
    const Token& t = peek();
    if (t.type != Tok::Number) return std::nullopt;
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) return std::nullopt;
    ++pos_;
    return v;
  }

  std::optional<Interval> interval() {
    if (!punct("[")) {
      fail_here("[");
      return std::nullopt;
    }
    auto lo = integer();
    if (!lo) {
      fail_here("integer");
      return std::nullopt;
    }
    if (!punct(",")) {
      fail_here(",");
      return std::nullopt;
    }
    Interval iv;
    iv.lower = *lo;
    if (peek().type == Tok::Ident && peek().text == "inf") {
      ++pos_;
    } else {
      std::size_t at = pos_;
      auto hi = integer();
      if (!hi) {
        fail_here("integer");
        fail_here("inf");
        return std::nullopt;
      }
      if (*hi < *lo || *hi == Interval::kUnbounded) {
        pos_ = at;
        fail_here("upper bound >= lower bound");
        return std::nullopt;
      }
      iv.upper = *hi;
    }
    if (!punct("]")) {
      fail_here("]");
      return std::nullopt;
    }
    return iv;
  }

  Opt atom() {
    Depth guard(*this);
    std::size_t save = pos_;
    if (auto cmp = comparison()) return cmp;
    pos_ = save;
    if (punct("(")) {
      auto f = formula();
      if (f && punct(")")) return f;
      if (f) fail_here(")");
      pos_ = save;
    } else {
      fail_here("(");
    }
    const Token& t = peek();
    if (t.type == Tok::Ident) {
      if (t.text == "true") {
        ++pos_;
        return Formula::truth();
      }
      if (t.text == "false") {
        ++pos_;
        return Formula::falsity();
      }
      if (!is_keyword(t.text)) {
        ++pos_;
        return Formula::prop(Proposition{LinearExpr::signal(t.text), Comparator::Greater});
      }
    }
    fail_here("proposition");
    return std::nullopt;
  }

  Opt comparison() {
    auto lhs = expr();
    if (!lhs) return std::nullopt;
    static const std::pair<const char*, Comparator> ops[] = {
        {"<=", Comparator::LessEq}, {">=", Comparator::GreaterEq}, {"==", Comparator::Equal},
        {"!=", Comparator::NotEqual}, {"<", Comparator::Less},      {">", Comparator::Greater}};
    for (const auto& [text, cmp] : ops) {
      if (punct(text)) {
        auto rhs = expr();
        if (!rhs) return std::nullopt;
        return Formula::prop(Proposition::compare(*lhs, cmp, *rhs));
      }
    }
    fail_here("comparison operator");
    return std::nullopt;
  }

  std::optional<LinearExpr> expr() {
    Depth guard(*this);
    auto lhs = term();
    if (!lhs) return std::nullopt;
    for (;;) {
      bool plus = punct("+");
      bool minus = !plus && punct("-");
      if (!plus && !minus) return lhs;
      auto rhs = term();
      if (!rhs) return std::nullopt;
      if (plus) *lhs += *rhs;
      else *lhs -= *rhs;
    }
  }

  std::optional<LinearExpr> term() {
    auto lhs = factor();
    if (!lhs) return std::nullopt;
    for (;;) {
      std::size_t at = pos_;
      bool mul = punct("*");
      bool div = !mul && punct("/");
      if (!mul && !div) return lhs;
      auto rhs = factor();
      if (!rhs) return std::nullopt;
      if (mul) {
        if (rhs->is_constant()) {
          *lhs *= rhs->constant();
        } else if (lhs->is_constant()) {
          double k = lhs->constant();
          *lhs = *rhs * k;
        } else {
          pos_ = at;
          fail_here("constant factor");
          return std::nullopt;
        }
      } else {
        if (!rhs->is_constant() || rhs->constant() == 0.0) {
          pos_ = at;
          fail_here("nonzero constant divisor");
          return std::nullopt;
        }
        *lhs *= 1.0 / rhs->constant();
      }
    }
  }

  std::optional<LinearExpr> factor() {
    Depth guard(*this);
    if (punct("-")) {
      auto f = factor();
      if (!f) return std::nullopt;
      return -*f;
    }
    if (punct("+")) return factor();
    const Token& t = peek();
    if (t.type == Tok::Number) {
      double v = 0;
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc() || p != t.text.data() + t.text.size() || !std::isfinite(v)) {
        fail_here("finite number");
        return std::nullopt;
      }
      ++pos_;
      return LinearExpr(v);
    }
    if (t.type == Tok::Ident && !is_keyword(t.text)) {
      ++pos_;
      return LinearExpr::signal(t.text);
    }
    if (punct("(")) {
      auto e = expr();
      if (!e) return std::nullopt;
      if (!punct(")")) {
        fail_here(")");
        return std::nullopt;
      }
      return e;
    }
    fail_here("expression");
    return std::nullopt;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t far_ = 0;
  std::vector<std::string> far_expected_;
  int depth_ = 0;
};

inline std::string number_text(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string interval_text(const Interval& i) {
  if (i.is_default()) return "";
  return "[" + std::to_string(i.lower) + "," +
         (i.bounded() ? std::to_string(i.upper) : std::string("inf")) + "]";
}

}  // namespace detail

inline Formula parse_spec(std::string_view text) {
  detail::Parser p(detail::tokenize(text));
  return p.parse_single();
}

inline std::vector<Law> parse_law_pack(std::string_view text) {
  detail::Parser p(detail::tokenize(text));
  return p.parse_pack();
}

inline std::string format(const Proposition& p) {
  const auto& terms = p.expr.terms();
  if (p.cmp == Comparator::Greater && p.expr.constant() == 0.0 && terms.size() == 1 &&
      terms[0].second == 1.0)
    return terms[0].first;
  std::string out;
  if (terms.empty()) out = "0";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& [name, coef] = terms[i];
    double mag = std::fabs(coef);
    if (i == 0) {
      if (coef < 0) out += "-";
    } else {
      out += coef < 0 ? " - " : " + ";
    }
    if (mag != 1.0) out += detail::number_text(mag) + "*";
    out += name;
  }
  out += " ";
  out += to_string(p.cmp);
  out += " ";
  out += detail::number_text(-p.expr.constant());
  return out;
}

inline std::string format(const Formula& f) {
  switch (f.kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Prop: return format(f.proposition());
    case Kind::Not: return "not (" + format(f.lhs()) + ")";
    case Kind::Next: return "X (" + format(f.lhs()) + ")";
    case Kind::Always: return "G" + detail::interval_text(f.interval()) + " (" + format(f.lhs()) + ")";
    case Kind::Eventually:
      return "F" + detail::interval_text(f.interval()) + " (" + format(f.lhs()) + ")";
    case Kind::And: return "(" + format(f.lhs()) + ") and (" + format(f.rhs()) + ")";
    case Kind::Or: return "(" + format(f.lhs()) + ") or (" + format(f.rhs()) + ")";
    case Kind::Until: {
      std::string iv = detail::interval_text(f.interval());
      return "(" + format(f.lhs()) + ") U" + iv + " (" + format(f.rhs()) + ")";
    }
  }
  return "";
}

inline std::string format_law_pack(const std::vector<Law>& laws) {
  std::string out;
  for (const auto& law : laws) {
    out += "law " + law.name;
    if (!law.description.empty()) out += " \"" + law.description + "\"";
    out += " {\n  " + format(law.formula) + "\n}\n";
  }
  return out;
}

}  // namespace trashfuzz::stl
