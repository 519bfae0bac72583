#pragma once

// Abstract syntax of the traffic-law specification language: linear
// propositions over named signals combined with boolean and bounded
// temporal operators. Time is measured in integer trace steps.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace trashfuzz::stl {

/// Linear combination `constant + sum(coef_i * signal_i)`. Terms are kept
/// sorted by signal name with duplicates merged and zero coefficients dropped.
class LinearExpr {
public:
  using Term = std::pair<std::string, double>;

  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  static LinearExpr signal(std::string name, double coef = 1.0) {
    LinearExpr e;
    if (coef != 0.0) e.terms_.emplace_back(std::move(name), coef);
    return e;
  }

  const std::vector<Term>& terms() const noexcept { return terms_; }
  double constant() const noexcept { return constant_; }
  bool is_constant() const noexcept { return terms_.empty(); }

  LinearExpr& operator+=(const LinearExpr& o) {
    for (const auto& [name, coef] : o.terms_) add_term(name, coef);
    constant_ += o.constant_;
    return *this;
  }
  LinearExpr& operator-=(const LinearExpr& o) {
    for (const auto& [name, coef] : o.terms_) add_term(name, -coef);
    constant_ -= o.constant_;
    return *this;
  }
  LinearExpr& operator*=(double k) {
    if (k == 0.0) {
      terms_.clear();
    } else {
      for (auto& t : terms_) t.second *= k;
    }
    constant_ *= k;
    return *this;
  }

  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(LinearExpr a, double k) { return a *= k; }
  friend LinearExpr operator-(LinearExpr a) { return a *= -1.0; }

  friend bool operator==(const LinearExpr& a, const LinearExpr& b) {
    return a.constant_ == b.constant_ && a.terms_ == b.terms_;
  }

private:
  void add_term(const std::string& name, double coef) {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), name,
                               [](const Term& t, const std::string& n) { return t.first < n; });
    if (it != terms_.end() && it->first == name) {
      it->second += coef;
      if (it->second == 0.0) terms_.erase(it);
    } else if (coef != 0.0) {
      terms_.insert(it, Term{name, coef});
    }
  }

  std::vector<Term> terms_;
  double constant_ = 0.0;
};

enum class Comparator { Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

inline const char* to_string(Comparator c) {
  switch (c) {
    case Comparator::Less: return "<";
    case Comparator::LessEq: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEq: return ">=";
    case Comparator::Equal: return "==";
    case Comparator::NotEqual: return "!=";
  }
  return "?";
}

/// `expr cmp 0`; any `e1 cmp e2` is stored as `(e1 - e2) cmp 0`.
struct Proposition {
  LinearExpr expr;
  Comparator cmp = Comparator::Greater;

  static Proposition compare(const LinearExpr& lhs, Comparator cmp, const LinearExpr& rhs) {
    return Proposition{lhs - rhs, cmp};
  }

  friend bool operator==(const Proposition& a, const Proposition& b) {
    return a.cmp == b.cmp && a.expr == b.expr;
  }
};

/// Closed step interval `[lower, upper]`; `upper == kUnbounded` means infinity.
struct Interval {
  static constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

  std::uint64_t lower = 0;
  std::uint64_t upper = kUnbounded;

  bool bounded() const noexcept { return upper != kUnbounded; }
  bool is_default() const noexcept { return lower == 0 && upper == kUnbounded; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Kind { True, False, Prop, Not, And, Or, Until, Next, Always, Eventually };

class Formula;

namespace detail {
struct Node;
}

/// Immutable formula handle with value semantics; subtrees are shared.
class Formula {
public:
  Formula();  // the constant `true`

  static Formula truth();
  static Formula falsity();
  static Formula prop(Proposition p);
  static Formula negation(Formula f);
  static Formula conjunction(Formula a, Formula b);
  static Formula disjunction(Formula a, Formula b);
  static Formula until(Interval i, Formula a, Formula b);
  static Formula next(Formula f);
  static Formula always(Interval i, Formula f);
  static Formula eventually(Interval i, Formula f);

  Kind kind() const noexcept;
  const Proposition& proposition() const;
  const Interval& interval() const;
  /// Sole operand of unary nodes, left operand of binary ones.
  const Formula& lhs() const;
  const Formula& rhs() const;
  const Formula& operand() const { return lhs(); }

  std::size_t depth() const;
  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

private:
  explicit Formula(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  Kind kind = Kind::True;
  Proposition prop;
  Interval interval;
  Formula lhs;
  Formula rhs;
};

}  // namespace detail

// A null node stands for `true`, so default-constructed child handles inside
// nodes cost nothing.
inline Formula::Formula() = default;

inline Formula Formula::truth() { return Formula(); }

inline Formula Formula::falsity() {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::False;
  return Formula(std::move(n));
}

inline Formula Formula::prop(Proposition p) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Prop;
  n->prop = std::move(p);
  return Formula(std::move(n));
}

inline Formula Formula::negation(Formula f) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Not;
  n->lhs = std::move(f);
  return Formula(std::move(n));
}

inline Formula Formula::conjunction(Formula a, Formula b) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::And;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Formula(std::move(n));
}

inline Formula Formula::disjunction(Formula a, Formula b) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Or;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Formula(std::move(n));
}

inline Formula Formula::until(Interval i, Formula a, Formula b) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Until;
  n->interval = i;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Formula(std::move(n));
}

inline Formula Formula::next(Formula f) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Next;
  n->lhs = std::move(f);
  return Formula(std::move(n));
}

inline Formula Formula::always(Interval i, Formula f) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Always;
  n->interval = i;
  n->lhs = std::move(f);
  return Formula(std::move(n));
}

inline Formula Formula::eventually(Interval i, Formula f) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Eventually;
  n->interval = i;
  n->lhs = std::move(f);
  return Formula(std::move(n));
}

inline Kind Formula::kind() const noexcept { return node_ ? node_->kind : Kind::True; }
namespace detail {
inline const Node& empty_node() {
  static const Node n;
  return n;
}
}  // namespace detail

inline const Proposition& Formula::proposition() const {
  return (node_ ? *node_ : detail::empty_node()).prop;
}
inline const Interval& Formula::interval() const {
  return (node_ ? *node_ : detail::empty_node()).interval;
}
inline const Formula& Formula::lhs() const { return (node_ ? *node_ : detail::empty_node()).lhs; }
inline const Formula& Formula::rhs() const { return (node_ ? *node_ : detail::empty_node()).rhs; }

inline bool is_leaf(Kind k) { return k == Kind::True || k == Kind::False || k == Kind::Prop; }
inline bool is_binary(Kind k) { return k == Kind::And || k == Kind::Or || k == Kind::Until; }
inline bool has_interval(Kind k) {
  return k == Kind::Until || k == Kind::Always || k == Kind::Eventually;
}

inline std::size_t Formula::depth() const {
  if (is_leaf(kind())) return 1;
  std::size_t d = lhs().depth();
  if (is_binary(kind())) d = std::max(d, rhs().depth());
  return d + 1;
}

inline std::size_t Formula::size() const {
  if (is_leaf(kind())) return 1;
  std::size_t s = 1 + lhs().size();
  if (is_binary(kind())) s += rhs().size();
  return s;
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::True:
    case Kind::False: return true;
    case Kind::Prop: return a.proposition() == b.proposition();
    case Kind::Not:
    case Kind::Next: return a.lhs() == b.lhs();
    case Kind::Always:
    case Kind::Eventually: return a.interval() == b.interval() && a.lhs() == b.lhs();
    case Kind::And:
    case Kind::Or: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case Kind::Until:
      return a.interval() == b.interval() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

// Short builders used throughout tests and the law pack tooling.
inline Formula operator!(Formula f) { return Formula::negation(std::move(f)); }
inline Formula operator&&(Formula a, Formula b) {
  return Formula::conjunction(std::move(a), std::move(b));
}
inline Formula operator||(Formula a, Formula b) {
  return Formula::disjunction(std::move(a), std::move(b));
}

/// Collects the names of all signals referenced by `f`, sorted and unique.
inline std::vector<std::string> signals_of(const Formula& f) {
  std::vector<std::string> out;
  auto walk = [&out](const auto& self, const Formula& g) -> void {
    if (g.kind() == Kind::Prop) {
      for (const auto& t : g.proposition().expr.terms()) out.push_back(t.first);
      return;
    }
    if (is_leaf(g.kind())) return;
    self(self, g.lhs());
    if (is_binary(g.kind())) self(self, g.rhs());
  };
  walk(walk, f);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace trashfuzz::stl
