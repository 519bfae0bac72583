#pragma once

#include "trashfuzz/stl/formula.hpp"

namespace trashfuzz::stl {

/// Rewrites F_I p as `true U_I p` and G_I p as `not (true U_I not p)`.
/// The `true` used here is the constant node, whose robustness is +LARGE;
/// a literal `0 >= 0` proposition would evaluate to 0 and break the identity.
inline Formula desugar(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Prop: return f;
    case Kind::Not: return Formula::negation(desugar(f.lhs()));
    case Kind::Next: return Formula::next(desugar(f.lhs()));
    case Kind::And: return Formula::conjunction(desugar(f.lhs()), desugar(f.rhs()));
    case Kind::Or: return Formula::disjunction(desugar(f.lhs()), desugar(f.rhs()));
    case Kind::Until:
      return Formula::until(f.interval(), desugar(f.lhs()), desugar(f.rhs()));
    case Kind::Eventually:
      return Formula::until(f.interval(), Formula::truth(), desugar(f.lhs()));
    case Kind::Always:
      return Formula::negation(Formula::until(f.interval(), Formula::truth(),
                                              Formula::negation(desugar(f.lhs()))));
  }
  return f;
}

}  // namespace trashfuzz::stl
