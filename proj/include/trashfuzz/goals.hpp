#pragma once

// Violation goals: smaller formulas whose violation implies violation of the
// source formula. A campaign tries to violate each goal separately.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "trashfuzz/error.hpp"
#include "trashfuzz/stl/formula.hpp"
#include "trashfuzz/stl/negate.hpp"
#include "trashfuzz/stl/parser.hpp"

namespace trashfuzz {

struct ViolationGoal {
  std::string id;
  stl::Formula formula;
};

struct GoalSet {
  stl::Formula source;
  std::vector<ViolationGoal> goals;
};

inline constexpr std::size_t kDefaultGoalCap = 4096;

namespace detail {

struct PartialGoal {
  std::vector<std::string> path;
  stl::Formula formula;
};

inline std::vector<PartialGoal> prefixed(std::string seg, std::vector<PartialGoal> goals) {
  for (auto& g : goals) g.path.insert(g.path.begin(), seg);
  return goals;
}

inline std::vector<PartialGoal> theta(const stl::Formula& f, std::size_t cap) {
  using stl::Formula;
  using stl::Kind;
  auto check = [&](std::size_t count) {
    if (count > cap) throw GoalExplosion(stl::format(f), cap);
  };
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Prop: return {PartialGoal{{}, f}};
    case Kind::Not: return prefixed("not", theta(stl::negate(f.lhs()), cap));
    case Kind::And: {
      auto left = prefixed("and-left", theta(f.lhs(), cap));
      auto right = prefixed("and-right", theta(f.rhs(), cap));
      check(left.size() + right.size());
      left.insert(left.end(), right.begin(), right.end());
      return left;
    }
    case Kind::Or:
    case Kind::Until: {
      auto left = theta(f.lhs(), cap);
      auto right = theta(f.rhs(), cap);
      if (!left.empty() && right.size() > cap / left.size()) check(cap + 1);
      check(left.size() * right.size());
      const bool until = f.kind() == Kind::Until;
      std::vector<PartialGoal> out;
      out.reserve(left.size() * right.size());
      for (std::size_t i = 0; i < left.size(); ++i) {
        for (std::size_t j = 0; j < right.size(); ++j) {
          PartialGoal g;
          g.path = {std::string(until ? "U-left-" : "or-left-") + std::to_string(i),
                    "right-" + std::to_string(j)};
          g.formula = until ? Formula::until(f.interval(), left[i].formula, right[j].formula)
                            : Formula::disjunction(left[i].formula, right[j].formula);
          out.push_back(std::move(g));
        }
      }
      return out;
    }
    case Kind::Next: {
      auto inner = theta(f.lhs(), cap);
      for (auto& g : inner) g.formula = Formula::next(g.formula);
      return prefixed("X", std::move(inner));
    }
    case Kind::Always:
    case Kind::Eventually: {
      const bool always = f.kind() == Kind::Always;
      auto inner = theta(f.lhs(), cap);
      for (auto& g : inner)
        g.formula = always ? Formula::always(f.interval(), g.formula)
                           : Formula::eventually(f.interval(), g.formula);
      return prefixed(always ? "G" : "F", std::move(inner));
    }
  }
  return {};
}

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace detail

/// Violation goals of `f` in deterministic order. Ids are `name` followed by
/// the decomposition path, e.g. `speed_limit/G/and-right`.
inline GoalSet decompose(const stl::Formula& f, const std::string& name = "goal",
                         std::size_t cap = kDefaultGoalCap) {
  GoalSet set;
  set.source = f;
  for (auto& g : detail::theta(f, cap)) {
    std::string id = name;
    for (const auto& seg : g.path) id += "/" + seg;
    set.goals.push_back(ViolationGoal{std::move(id), std::move(g.formula)});
  }
  return set;
}

/// Number of goals decompose(f) would produce, saturating at 2^64-1.
inline std::uint64_t goal_count(const stl::Formula& f) {
  using stl::Kind;
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Prop: return 1;
    case Kind::Not: return goal_count(stl::negate(f.lhs()));
    case Kind::And: return detail::sat_add(goal_count(f.lhs()), goal_count(f.rhs()));
    case Kind::Or:
    case Kind::Until: return detail::sat_mul(goal_count(f.lhs()), goal_count(f.rhs()));
    case Kind::Next:
    case Kind::Always:
    case Kind::Eventually: return goal_count(f.lhs());
  }
  return 0;
}

}  // namespace trashfuzz
