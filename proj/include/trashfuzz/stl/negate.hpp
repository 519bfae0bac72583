#pragma once

// Negation pushed down to the propositions, so the result contains no Not
// node and has robustness exactly equal to that of `not f`.

#include "trashfuzz/stl/formula.hpp"

namespace trashfuzz::stl {

inline Comparator negate(Comparator c) {
  switch (c) {
    case Comparator::Less: return Comparator::GreaterEq;
    case Comparator::GreaterEq: return Comparator::Less;
    case Comparator::LessEq: return Comparator::Greater;
    case Comparator::Greater: return Comparator::LessEq;
    case Comparator::Equal: return Comparator::NotEqual;
    case Comparator::NotEqual: return Comparator::Equal;
  }
  return c;
}

inline Proposition negate_prop(const Proposition& m) { return Proposition{m.expr, negate(m.cmp)}; }

inline Formula negate(const Formula& f);

namespace detail {

// not (a U[0,u] b), with Na = N(a), Nb = N(b):
//   G[0,u] Nb  or  ((Nb or Na) U[0,u] Na)
// Either b never holds in the window, or a fails at some step t1 while b
// has failed at every step before (and at) t1.
inline Formula negated_until_from_zero(std::uint64_t upper, const Formula& na, const Formula& nb) {
  Interval iv{0, upper};
  return Formula::disjunction(Formula::always(iv, nb),
                              Formula::until(iv, Formula::disjunction(nb, na), na));
}

}  // namespace detail

/// Negation normal form of `not f`.
///
/// For a U[l,u] b with l > 0 the left operand must also hold on [0, l-1],
/// so the negation is `F[0,l-1] Na or G[l,l] (not (a U[0,u-l] b))`. Next
/// becomes G[1,1], which agrees with X everywhere except at the last step,
/// where X gives -LARGE and the negation must give +LARGE.
inline Formula negate(const Formula& f) {
  switch (f.kind()) {
    case Kind::True: return Formula::falsity();
    case Kind::False: return Formula::truth();
    case Kind::Prop: return Formula::prop(negate_prop(f.proposition()));
    case Kind::Not: {
      // N(not p) = p, but p itself may contain Not nodes; N(N(p)) removes them.
      return negate(negate(f.lhs()));
    }
    case Kind::And: return Formula::disjunction(negate(f.lhs()), negate(f.rhs()));
    case Kind::Or: return Formula::conjunction(negate(f.lhs()), negate(f.rhs()));
    case Kind::Next: return Formula::always(Interval{1, 1}, negate(f.lhs()));
    case Kind::Always: return Formula::eventually(f.interval(), negate(f.lhs()));
    case Kind::Eventually: return Formula::always(f.interval(), negate(f.lhs()));
    case Kind::Until: {
      const Interval iv = f.interval();
      Formula na = negate(f.lhs());
      Formula nb = negate(f.rhs());
      if (iv.lower == 0) return detail::negated_until_from_zero(iv.upper, na, nb);
      std::uint64_t rest = iv.bounded() ? iv.upper - iv.lower : Interval::kUnbounded;
      return Formula::disjunction(
          Formula::eventually(Interval{0, iv.lower - 1}, na),
          Formula::always(Interval{iv.lower, iv.lower},
                          detail::negated_until_from_zero(rest, na, nb)));
    }
  }
  return f;
}

}  // namespace trashfuzz::stl
