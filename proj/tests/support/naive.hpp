#pragma once

// Brute-force robustness straight from the pointwise definition: every
// operator recomputes its operands at every time point it needs. Shares no
// code with the library evaluator beyond the formula and trace types.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "trashfuzz/stl/formula.hpp"
#include "trashfuzz/stl/trace.hpp"

namespace tftest {

using namespace trashfuzz::stl;

inline double naive_rho(const Formula& f, const Trace& tr, std::size_t t, double L = 1.0e9) {
  const std::size_t n = tr.length();
  auto last_in_window = [&](const Interval& iv) -> std::size_t {
    return iv.bounded() && iv.upper <= n - 1 - t ? t + static_cast<std::size_t>(iv.upper) : n - 1;
  };
  switch (f.kind()) {
    case Kind::True: return L;
    case Kind::False: return -L;
    case Kind::Prop: {
      const auto& p = f.proposition();
      double v = p.expr.constant();
      for (const auto& [name, coef] : p.expr.terms()) v += coef * tr.at(name, t);
      switch (p.cmp) {
        case Comparator::Less:
        case Comparator::LessEq: return -v;
        case Comparator::Greater:
        case Comparator::GreaterEq: return v;
        case Comparator::Equal: return -std::abs(v);
        case Comparator::NotEqual: return std::abs(v);
      }
      return v;
    }
    case Kind::Not: return -naive_rho(f.lhs(), tr, t, L);
    case Kind::And: return std::min(naive_rho(f.lhs(), tr, t, L), naive_rho(f.rhs(), tr, t, L));
    case Kind::Or: return std::max(naive_rho(f.lhs(), tr, t, L), naive_rho(f.rhs(), tr, t, L));
    case Kind::Next: return t + 1 < n ? naive_rho(f.lhs(), tr, t + 1, L) : -L;
    case Kind::Always: {
      double inf = L;
      const Interval& iv = f.interval();
      if (t + iv.lower < n)
        for (std::size_t k = t + iv.lower; k <= last_in_window(iv); ++k) inf = std::min(inf, naive_rho(f.lhs(), tr, k, L));
      return inf;
    }
    case Kind::Eventually: {
      double sup = -L;
      const Interval& iv = f.interval();
      if (t + iv.lower < n)
        for (std::size_t k = t + iv.lower; k <= last_in_window(iv); ++k) sup = std::max(sup, naive_rho(f.lhs(), tr, k, L));
      return sup;
    }
    case Kind::Until: {
      double sup = -L;
      const Interval& iv = f.interval();
      if (t + iv.lower < n)
        for (std::size_t t1 = t + iv.lower; t1 <= last_in_window(iv); ++t1) {
          double inf = L;
          for (std::size_t t2 = t; t2 <= t1; ++t2) inf = std::min(inf, naive_rho(f.lhs(), tr, t2, L));
          sup = std::max(sup, std::min(naive_rho(f.rhs(), tr, t1, L), inf));
        }
      return sup;
    }
  }
  return 0.0;
}

inline const std::vector<std::string>& random_signals() {
  static const std::vector<std::string> s = {"a", "b", "c"};
  return s;
}

/// Values on a quarter grid so ties between operands are common.
inline Trace random_trace(std::mt19937_64& rng, std::size_t max_len = 20) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<int> val(-40, 40);
  Trace tr(random_signals());
  std::size_t n = len(rng);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> row;
    for (std::size_t i = 0; i < random_signals().size(); ++i) row.push_back(val(rng) / 4.0);
    tr.push(row);
  }
  return tr;
}

inline Interval random_interval(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> lo(0, 6), span(0, 10), unb(0, 3);
  Interval iv;
  iv.lower = static_cast<std::uint64_t>(lo(rng));
  if (unb(rng) != 0) iv.upper = iv.lower + static_cast<std::uint64_t>(span(rng));
  return iv;
}

inline Formula random_prop(std::mt19937_64& rng) {
  const auto& sig = random_signals();
  std::uniform_int_distribution<std::size_t> pick(0, sig.size() - 1);
  std::uniform_int_distribution<int> cmp(0, 5), k(-8, 8), two(0, 3);
  LinearExpr e = LinearExpr::signal(sig[pick(rng)], 1.0);
  if (two(rng) == 0) e += LinearExpr::signal(sig[pick(rng)], k(rng) / 2.0);
  e -= LinearExpr(k(rng) / 2.0);
  return Formula::prop(Proposition{e, static_cast<Comparator>(cmp(rng))});
}

inline Formula random_formula(std::mt19937_64& rng, std::size_t depth) {
  std::uniform_int_distribution<int> op(0, depth == 0 ? 0 : 10);
  switch (op(rng)) {
    case 0:
    case 1: {
      std::uniform_int_distribution<int> c(0, 20);
      int x = c(rng);
      if (x == 0) return Formula::truth();
      if (x == 1) return Formula::falsity();
      return random_prop(rng);
    }
    case 2: return Formula::negation(random_formula(rng, depth - 1));
    case 3: return Formula::conjunction(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 4: return Formula::disjunction(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 5:
    case 6:
      return Formula::until(random_interval(rng), random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 7: return Formula::next(random_formula(rng, depth - 1));
    case 8: return Formula::always(random_interval(rng), random_formula(rng, depth - 1));
    default: return Formula::eventually(random_interval(rng), random_formula(rng, depth - 1));
  }
}

}  // namespace tftest
