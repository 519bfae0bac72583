#pragma once

// Quantitative robustness over finite traces. Every node is evaluated as a
// whole series (one value per time step) bottom-up, so each subformula is
// visited once per trace.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "trashfuzz/error.hpp"
#include "trashfuzz/stl/formula.hpp"
#include "trashfuzz/stl/trace.hpp"

namespace trashfuzz::stl {

struct RobustnessOptions {
  /// Finite stand-in for infinity: value of `true`, of an empty inf, and
  /// (negated) of an empty sup.
  double large = 1.0e9;
};

/// Value of `constant + sum(coef * signal)` at step t, summed in term order.
inline double evaluate_expr(const LinearExpr& e, const Trace& tr, std::size_t t) {
  double v = e.constant();
  for (const auto& [name, coef] : e.terms()) v += coef * tr.at(name, t);
  return v;
}

inline double proposition_robustness(Comparator cmp, double value) {
  switch (cmp) {
    case Comparator::Less:
    case Comparator::LessEq: return -value;
    case Comparator::Greater:
    case Comparator::GreaterEq: return value;
    case Comparator::NotEqual: return std::fabs(value);
    case Comparator::Equal: return -std::fabs(value);
  }
  return value;
}

namespace detail {

// Last index covered by the window starting at t with offset `upper`,
// clipped to the trace end.
inline std::size_t window_end(std::size_t t, const Interval& iv, std::size_t n) {
  if (!iv.bounded() || iv.upper >= n - t) return n - 1;
  return t + static_cast<std::size_t>(iv.upper);
}

inline std::vector<double> series(const Formula& f, const Trace& tr, double L) {
  const std::size_t n = tr.length();
  std::vector<double> out(n);
  switch (f.kind()) {
    case Kind::True: std::fill(out.begin(), out.end(), L); break;
    case Kind::False: std::fill(out.begin(), out.end(), -L); break;
    case Kind::Prop: {
      const auto& p = f.proposition();
      std::vector<const std::vector<double>*> cols;
      for (const auto& term : p.expr.terms()) cols.push_back(&tr.column(term.first));
      for (std::size_t t = 0; t < n; ++t) {
        double v = p.expr.constant();
        for (std::size_t k = 0; k < cols.size(); ++k) v += p.expr.terms()[k].second * (*cols[k])[t];
        out[t] = proposition_robustness(p.cmp, v);
      }
      break;
    }
    case Kind::Not: {
      out = series(f.lhs(), tr, L);
      for (auto& v : out) v = -v;
      break;
    }
    case Kind::And:
    case Kind::Or: {
      auto a = series(f.lhs(), tr, L);
      auto b = series(f.rhs(), tr, L);
      bool conj = f.kind() == Kind::And;
      for (std::size_t t = 0; t < n; ++t) out[t] = conj ? std::min(a[t], b[t]) : std::max(a[t], b[t]);
      break;
    }
    case Kind::Next: {
      auto a = series(f.lhs(), tr, L);
      for (std::size_t t = 0; t < n; ++t) out[t] = t + 1 < n ? a[t + 1] : -L;
      break;
    }
    case Kind::Always:
    case Kind::Eventually: {
      auto a = series(f.lhs(), tr, L);
      const bool always = f.kind() == Kind::Always;
      const Interval iv = f.interval();
      if (!iv.bounded()) {
        // Suffix scan: the window of t is [t + lower, n - 1].
        double acc = always ? L : -L;
        std::vector<double> suffix(n + 1, acc);
        for (std::size_t k = n; k-- > 0;) {
          acc = always ? std::min(acc, std::max(a[k], -L)) : std::max(acc, std::min(a[k], L));
          suffix[k] = acc;
        }
        for (std::size_t t = 0; t < n; ++t)
          out[t] = iv.lower >= n - t ? suffix[n] : suffix[t + iv.lower];
        break;
      }
      for (std::size_t t = 0; t < n; ++t) {
        double acc = always ? L : -L;
        if (iv.lower < n - t) {
          std::size_t hi = window_end(t, iv, n);
          for (std::size_t k = t + iv.lower; k <= hi; ++k)
            acc = always ? std::min(acc, std::max(a[k], -L)) : std::max(acc, std::min(a[k], L));
        }
        out[t] = acc;
      }
      break;
    }
    case Kind::Until: {
      auto a = series(f.lhs(), tr, L);
      auto b = series(f.rhs(), tr, L);
      const Interval iv = f.interval();
      for (std::size_t t = 0; t < n; ++t) {
        double best = -L;
        if (iv.lower < n - t) {
          std::size_t hi = window_end(t, iv, n);
          double run = L;  // inf of the left operand over [t, t1]
          for (std::size_t t1 = t; t1 <= hi; ++t1) {
            run = std::min(run, a[t1]);
            if (t1 >= t + iv.lower) best = std::max(best, std::min(b[t1], run));
          }
        }
        out[t] = best;
      }
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Robustness of f at every step of tr.
inline std::vector<double> robustness_series(const Formula& f, const Trace& tr,
                                             const RobustnessOptions& opt = {}) {
  if (tr.empty()) throw IndexOutOfRange(0, 0);
  return detail::series(f, tr, opt.large);
}

inline double robustness(const Formula& f, const Trace& tr, std::size_t t = 0,
                         const RobustnessOptions& opt = {}) {
  if (t >= tr.length()) throw IndexOutOfRange(t, tr.length());
  for (const auto& s : signals_of(f))
    if (!tr.has(s)) throw UnknownSignal(s);
  return detail::series(f, tr, opt.large)[t];
}

/// Satisfaction is strict: a robustness of exactly 0 counts as a violation.
inline bool satisfies(const Formula& f, const Trace& tr, const RobustnessOptions& opt = {}) {
  return robustness(f, tr, 0, opt) > 0.0;
}

}  // namespace trashfuzz::stl
