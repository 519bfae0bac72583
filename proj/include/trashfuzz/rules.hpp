#pragma once

// The twelve placement rules that make a scenario "natural". Each rule
// reports the slack of its tightest instance, so a passing rule tells how far
// an object may move before it fails.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/geometry.hpp"
#include "trashfuzz/map_model.hpp"
#include "trashfuzz/scenario.hpp"

namespace trashfuzz {

inline constexpr int kRuleCount = 12;
/// Margin reported by a rule with no instance to check.
inline constexpr double kVacuousMargin = 1.0e9;

struct RuleResult {
  bool passed = true;
  double margin = kVacuousMargin;
  std::string witness;  // tightest instance, empty when vacuous
};

struct RuleReport {
  std::array<RuleResult, kRuleCount> per_rule;  // index 0 holds rule 1

  bool valid() const {
    return std::all_of(per_rule.begin(), per_rule.end(), [](const RuleResult& r) { return r.passed; });
  }
  const RuleResult& rule(int id) const { return per_rule.at(static_cast<std::size_t>(id - 1)); }
  std::vector<int> failed() const {
    std::vector<int> out;
    for (int i = 0; i < kRuleCount; ++i)
      if (!per_rule[static_cast<std::size_t>(i)].passed) out.push_back(i + 1);
    return out;
  }
};

/// Tree clearance from corners and drain pipes by tree height.
inline double tree_clearance(double height) {
  if (height < 1.5) return 1.0;
  if (height < 5.0) return 1.5;
  return 2.5;
}

/// Tree clearance from fixed infrastructure by tree height.
inline double tree_infra_clearance(double height) { return height < 5.0 ? 2.0 : 2.5; }

namespace detail {

struct Placed {
  std::size_t index;
  const ObjectDef* def;
  geo::Vec2 center;
  double yaw;
  geo::Shape shape;
};

class RuleAccumulator {
public:
  explicit RuleAccumulator(bool strict) : strict_(strict) {}

  void add(double margin, const std::string& witness) {
    if (margin < r_.margin) {
      r_.margin = margin;
      r_.witness = witness;
    }
    r_.passed = strict_ ? r_.margin > 0.0 : r_.margin >= 0.0;
  }
  RuleResult result() const { return r_; }

private:
  bool strict_;
  RuleResult r_;
};

inline std::string obj_name(const Placed& p) {
  return "object " + std::to_string(p.index) + " (" + p.def->name + ")";
}

}  // namespace detail

/// Distance from a shape to the nearest road's paved area.
inline double nearest_road_distance(const geo::Shape& s, const MapModel& map) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& r : map.roads) d = std::min(d, road_distance(s, r));
  return d;
}

/// Evaluates all rules. Objects in the movable category are subject to the
/// trash-bin rules 9-12, objects in the fixed-position category to rules 1-3,
/// and the tree rules 4-8 apply to the `tree` class.
inline RuleReport check_rules(const Scenario& s, const MapModel& map, const Library& lib) {
  using detail::Placed;
  using detail::RuleAccumulator;
  std::vector<Placed> placed;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    const ObjectDef& d = lib.at(o.type_id);
    placed.push_back(Placed{i, &d, world_position(s.ego_start, o), world_yaw_deg(s.ego_start, o),
                            footprint(s.ego_start, o, d)});
  }

  std::vector<RuleAccumulator> acc;
  for (int r = 1; r <= kRuleCount; ++r) acc.emplace_back(r != 10);
  auto add = [&](int rule, double margin, const std::string& w) {
    acc[static_cast<std::size_t>(rule - 1)].add(margin, w);
  };

  std::vector<double> road_dist(placed.size());
  for (std::size_t i = 0; i < placed.size(); ++i) road_dist[i] = nearest_road_distance(placed[i].shape, map);

  for (const auto& p : placed) {
    const std::string who = detail::obj_name(p);
    const ObjectDef& d = *p.def;

    if (d.fixed()) {
      double fw = std::numeric_limits<double>::infinity();
      for (const auto& f : map.footways) fw = std::min(fw, geo::distance(p.shape, f));
      for (std::size_t r = 0; r < map.roads.size(); ++r) {
        const Road& road = map.roads[r];
        double dr = road_distance(p.shape, road);
        add(1, std::min(dr, fw), who + " vs road " + road.name + " / footway");
        if (road.lane_count >= 2) add(2, dr - 0.6, who + " vs road " + road.name);
        else add(3, dr - 10.0, who + " vs road " + road.name);
      }
    }

    if (d.is("tree")) {
      double c = tree_clearance(d.height);
      for (auto q : map.corners) add(4, geo::distance(p.shape, q) - c, who + " vs corner");
      for (auto q : map.pipes) add(5, geo::distance(p.shape, q) - c, who + " vs pipe");
      for (auto q : map.lamps) add(6, geo::distance(p.shape, q) - 3.0, who + " vs lamp");
      double ci = tree_infra_clearance(d.height);
      for (auto q : map.fixed_infra) add(7, geo::distance(p.shape, q) - ci, who + " vs fixed infrastructure");
      for (const auto& l : map.traffic_lights)
        add(7, geo::distance(p.shape, l.position) - ci, who + " vs traffic light");
      for (const auto& q : placed)
        if (q.index != p.index && q.def->fixed() && !q.def->is("tree"))
          add(7, geo::distance(p.shape, q.shape) - ci, who + " vs " + detail::obj_name(q));
      for (const auto& e : map.footpath_crossings)
        add(8, geo::distance(p.shape, e) - 3.0, who + " vs footpath crossing edge");
    }

    if (!d.fixed()) {
      double m9 = road_dist[p.index];
      for (const auto& fp : map.footpaths)
        m9 = std::min(m9, std::max(geo::distance(p.shape, fp.polygon), fp.width - d.width - 1.5));
      add(9, m9, who);

      for (const auto& q : placed)
        if (q.index != p.index) add(10, geo::distance(p.shape, q.shape) - 0.5, who + " vs " + detail::obj_name(q));
      for (auto q : map.lamps) add(10, geo::distance(p.shape, q) - 0.5, who + " vs lamp");
      for (auto q : map.fixed_infra) add(10, geo::distance(p.shape, q) - 0.5, who + " vs fixed infrastructure");

      // Handle direction against the direction toward the nearest road.
      geo::Vec2 nearest = p.center;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : map.roads) {
        geo::Vec2 c = geo::closest_point(r.centerline_shape(), p.center);
        double dd = geo::dist(c, p.center);
        if (dd < best) {
          best = dd;
          nearest = c;
        }
      }
      geo::Vec2 to_road = nearest - p.center;
      double len = geo::norm(to_road);
      double alignment = 0.0;
      if (len > 0.0) alignment = geo::dot(geo::rotate(d.handle_axis, p.yaw), to_road * (1.0 / len));
      add(11, 0.2 - alignment, who);

      for (const auto& q : placed)
        if (q.index != p.index)
          add(12, road_dist[q.index] + geo::distance(p.shape, q.shape) - road_dist[p.index],
              who + " behind " + detail::obj_name(q));
    }
  }

  RuleReport report;
  for (int r = 0; r < kRuleCount; ++r) report.per_rule[static_cast<std::size_t>(r)] = acc[static_cast<std::size_t>(r)].result();
  return report;
}

inline nlohmann::json to_json(const RuleReport& r) {
  nlohmann::json rules = nlohmann::json::array();
  for (int i = 0; i < kRuleCount; ++i) {
    const auto& x = r.per_rule[static_cast<std::size_t>(i)];
    nlohmann::json e = {{"rule", i + 1}, {"passed", x.passed}, {"margin", x.margin}};
    e["witness"] = x.witness.empty() ? nlohmann::json(nullptr) : nlohmann::json(x.witness);
    rules.push_back(std::move(e));
  }
  return {{"format_version", 1}, {"valid", r.valid()}, {"rules", rules}};
}

}  // namespace trashfuzz
