#pragma once

// Deterministic desk-scale driving simulator: a point-mass ego following one
// lane of a route, a rule-following planner, and a perception channel that
// planted misperception bugs can corrupt. Ground truth is never altered.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"
#include "trashfuzz/map_model.hpp"
#include "trashfuzz/rules.hpp"
#include "trashfuzz/scenario.hpp"
#include "trashfuzz/stl/trace.hpp"
#include "trashfuzz/sut.hpp"

namespace trashfuzz {

enum class LightColor { Red = 0, Yellow = 1, Green = 2, None = 3 };

enum class TriggerKind { RotatedNearRoad, AdjacentPair, NearLight };
enum class EffectKind { Misclassify, MergeAs, TrafficLightOverride, Ignore };

struct BugTrigger {
  TriggerKind kind = TriggerKind::RotatedNearRoad;
  std::set<std::string> classes;          // empty = any class
  std::set<std::string> partner_classes;  // AdjacentPair only
  double rotation_min = 0.0;              // RotatedNearRoad: object rotation arc, degrees
  double rotation_max = 360.0;
  double max_road_distance = std::numeric_limits<double>::infinity();
  double max_gap = 0.0;  // AdjacentPair / NearLight (0 = no gap requirement)
  double light_radius = 0.0;
  int min_count = 1;
  double sensor_range = 30.0;  // ego must be this close for the trigger to fire
};

struct BugEffect {
  EffectKind kind = EffectKind::Ignore;
  std::string from;  // Misclassify
  std::string to;    // Misclassify / MergeAs
  LightColor color = LightColor::Green;
};

struct PlantedBug {
  std::string name;
  BugTrigger trigger;
  BugEffect effect;
  int persistence = 1;  // steps the effect lasts after the trigger last held
};

struct LightSchedule {
  double initial_red = 15.0;
  double green = 30.0;
  double yellow = 3.0;
  double red = 30.0;

  LightColor at(double t) const {
    if (t < initial_red) return LightColor::Red;
    double c = std::fmod(t - initial_red, green + yellow + red);
    if (c < green) return LightColor::Green;
    if (c < green + yellow) return LightColor::Yellow;
    return LightColor::Red;
  }
};

/// Roadside clutter near a light makes the (bug-free) driver cautious: lower
/// target speed and gentler acceleration around the junction.
struct CautionConfig {
  double radius = 25.0;
  double before = 40.0;
  double after = 20.0;
  double saturation = 3.0;
  double accel_reduction = 0.5;
  double speed_reduction = 0.25;
};

/// Near-miss placements: closeness to a trigger condition falls linearly to 0
/// over these distances beyond the threshold, and scales the planner's
/// reaction to the doubtful perception.
struct PrecursorConfig {
  bool enabled = true;
  double rotation_falloff = 90.0;
  double road_falloff = 4.0;
  double gap_falloff = 5.0;
  double light_falloff = 20.0;
  double hesitation_slowdown = 0.4;
  double hesitation_brake = 0.8;  // braking rate grows up to (1 + this) x comfort
  double nudge_offset = 0.3;
  double nudge_heading = 1.5;  // degrees at full closeness
  double merge_slowdown = 0.5;
  double stop_shift = 0.9;   // stop point creeps toward the stop line
  double start_delay = 2.5;  // seconds of hesitation at a fresh green
};

struct ToySimConfig {
  double dt = 0.1;
  int horizon = 600;
  double max_speed = 12.0;
  double max_accel = 2.5;
  double comfort_decel = 3.0;
  double emergency_decel = 8.0;
  LightSchedule lights;
  CautionConfig caution;
  double pedestrian_stop_gap = 4.0;
  double pedestrian_wait = 2.0;
  double swerve_offset = 0.6;
  double swerve_rate = 0.6;
  double pass_speed = 3.0;
  double obstacle_stop_gap = 5.0;
  double hazard_delay = 3.0;
  PrecursorConfig precursor;
  std::vector<PlantedBug> perception_bugs;
};

inline const std::vector<std::string>& toy_signal_names() {
  static const std::vector<std::string> names = {
      "time",          "x",           "y",           "heading",
      "speed",         "accel",       "lane_id",     "distance_to_stopline",
      "perceived_light_color", "actual_light_color", "is_stopped", "at_destination",
      "signal_left",   "signal_right", "signal_hazard"};
  return names;
}

/// The four-bug pack: two misclassification bugs and two light overrides.
inline std::vector<PlantedBug> default_bug_pack() {
  std::vector<PlantedBug> bugs;
  {
    PlantedBug b;
    b.name = "bin_as_pedestrian";
    b.trigger.kind = TriggerKind::RotatedNearRoad;
    b.trigger.classes = {"bin"};
    b.trigger.rotation_min = 120.0;
    b.trigger.rotation_max = 240.0;
    b.trigger.max_road_distance = 2.0;
    b.trigger.sensor_range = 14.0;
    b.effect = {EffectKind::Misclassify, "bin", "pedestrian", LightColor::Green};
    b.persistence = 80;
    bugs.push_back(b);
  }
  {
    PlantedBug b;
    b.name = "bin_bench_merge";
    b.trigger.kind = TriggerKind::AdjacentPair;
    b.trigger.classes = {"bin"};
    b.trigger.partner_classes = {"bench"};
    b.trigger.max_gap = 1.0;
    b.trigger.max_road_distance = 4.5;
    b.trigger.sensor_range = 30.0;
    b.effect = {EffectKind::MergeAs, "", "unknown", LightColor::Green};
    b.persistence = 80;
    bugs.push_back(b);
  }
  {
    PlantedBug b;
    b.name = "light_green_override";
    b.trigger.kind = TriggerKind::NearLight;
    b.trigger.classes = {"bin"};
    b.trigger.min_count = 2;
    b.trigger.max_gap = 1.5;
    b.trigger.light_radius = 15.0;
    b.trigger.sensor_range = 60.0;
    b.effect = {EffectKind::TrafficLightOverride, "", "", LightColor::Green};
    b.persistence = 30;
    bugs.push_back(b);
  }
  {
    PlantedBug b;
    b.name = "light_red_override";
    b.trigger.kind = TriggerKind::NearLight;
    b.trigger.min_count = 3;
    b.trigger.light_radius = 8.0;
    b.trigger.sensor_range = 60.0;
    b.effect = {EffectKind::TrafficLightOverride, "", "", LightColor::Red};
    b.persistence = 30;
    bugs.push_back(b);
  }
  return bugs;
}

inline ToySimConfig default_toy_sim_config() {
  ToySimConfig cfg;
  cfg.perception_bugs = default_bug_pack();
  return cfg;
}

namespace detail {

inline const char* to_string(TriggerKind k) {
  switch (k) {
    case TriggerKind::RotatedNearRoad: return "rotated_near_road";
    case TriggerKind::AdjacentPair: return "adjacent_pair";
    case TriggerKind::NearLight: return "near_light";
  }
  return "?";
}
inline const char* to_string(EffectKind k) {
  switch (k) {
    case EffectKind::Misclassify: return "misclassify";
    case EffectKind::MergeAs: return "merge_as";
    case EffectKind::TrafficLightOverride: return "traffic_light_override";
    case EffectKind::Ignore: return "ignore";
  }
  return "?";
}
inline const char* color_name(LightColor c) {
  switch (c) {
    case LightColor::Red: return "red";
    case LightColor::Yellow: return "yellow";
    case LightColor::Green: return "green";
    case LightColor::None: return "none";
  }
  return "?";
}
inline LightColor color_from(const std::string& s) {
  if (s == "red") return LightColor::Red;
  if (s == "yellow") return LightColor::Yellow;
  if (s == "green") return LightColor::Green;
  if (s == "none") return LightColor::None;
  throw SchemaError("unknown light color '" + s + "'");
}

}  // namespace detail

inline nlohmann::json to_json(const ToySimConfig& c) {
  nlohmann::json bugs = nlohmann::json::array();
  for (const auto& b : c.perception_bugs) {
    nlohmann::json t = {{"kind", detail::to_string(b.trigger.kind)},
                        {"classes", b.trigger.classes},
                        {"sensor_range", b.trigger.sensor_range}};
    if (b.trigger.kind == TriggerKind::RotatedNearRoad) {
      t["rotation_min"] = b.trigger.rotation_min;
      t["rotation_max"] = b.trigger.rotation_max;
    }
    if (b.trigger.kind == TriggerKind::AdjacentPair) t["partner_classes"] = b.trigger.partner_classes;
    if (std::isfinite(b.trigger.max_road_distance)) t["max_road_distance"] = b.trigger.max_road_distance;
    if (b.trigger.max_gap > 0) t["max_gap"] = b.trigger.max_gap;
    if (b.trigger.kind == TriggerKind::NearLight) {
      t["light_radius"] = b.trigger.light_radius;
      t["min_count"] = b.trigger.min_count;
    }
    nlohmann::json e = {{"kind", detail::to_string(b.effect.kind)}};
    if (b.effect.kind == EffectKind::Misclassify) {
      e["from"] = b.effect.from;
      e["to"] = b.effect.to;
    }
    if (b.effect.kind == EffectKind::MergeAs) e["as"] = b.effect.to;
    if (b.effect.kind == EffectKind::TrafficLightOverride) e["color"] = detail::color_name(b.effect.color);
    bugs.push_back({{"name", b.name}, {"trigger", t}, {"effect", e}, {"persistence", b.persistence}});
  }
  return {{"format_version", 1},
          {"dt", c.dt},
          {"horizon", c.horizon},
          {"max_speed", c.max_speed},
          {"max_accel", c.max_accel},
          {"comfort_decel", c.comfort_decel},
          {"emergency_decel", c.emergency_decel},
          {"light_schedule",
           {{"initial_red", c.lights.initial_red}, {"green", c.lights.green}, {"yellow", c.lights.yellow}, {"red", c.lights.red}}},
          {"caution",
           {{"radius", c.caution.radius}, {"before", c.caution.before}, {"after", c.caution.after},
            {"saturation", c.caution.saturation}, {"accel_reduction", c.caution.accel_reduction},
            {"speed_reduction", c.caution.speed_reduction}}},
          {"pedestrian_stop_gap", c.pedestrian_stop_gap},
          {"pedestrian_wait", c.pedestrian_wait},
          {"swerve_offset", c.swerve_offset},
          {"swerve_rate", c.swerve_rate},
          {"pass_speed", c.pass_speed},
          {"obstacle_stop_gap", c.obstacle_stop_gap},
          {"hazard_delay", c.hazard_delay},
          {"precursor",
           {{"enabled", c.precursor.enabled}, {"rotation_falloff", c.precursor.rotation_falloff},
            {"road_falloff", c.precursor.road_falloff}, {"gap_falloff", c.precursor.gap_falloff},
            {"light_falloff", c.precursor.light_falloff}, {"hesitation_slowdown", c.precursor.hesitation_slowdown},
            {"hesitation_brake", c.precursor.hesitation_brake}, {"nudge_offset", c.precursor.nudge_offset},
            {"nudge_heading", c.precursor.nudge_heading}, {"merge_slowdown", c.precursor.merge_slowdown},
            {"stop_shift", c.precursor.stop_shift}, {"start_delay", c.precursor.start_delay}}},
          {"perception_bugs", bugs}};
}

/// Missing fields keep their defaults; a missing bug list means no bugs.
inline ToySimConfig toy_sim_config_from_json(const nlohmann::json& j) {
  ToySimConfig c;
  try {
    if (j.at("format_version").get<int>() != 1) throw SchemaError("unsupported sim config format_version");
    c.dt = j.value("dt", c.dt);
    c.horizon = j.value("horizon", c.horizon);
    c.max_speed = j.value("max_speed", c.max_speed);
    c.max_accel = j.value("max_accel", c.max_accel);
    c.comfort_decel = j.value("comfort_decel", c.comfort_decel);
    c.emergency_decel = j.value("emergency_decel", c.emergency_decel);
    if (j.contains("light_schedule")) {
      const auto& l = j["light_schedule"];
      c.lights.initial_red = l.value("initial_red", c.lights.initial_red);
      c.lights.green = l.value("green", c.lights.green);
      c.lights.yellow = l.value("yellow", c.lights.yellow);
      c.lights.red = l.value("red", c.lights.red);
    }
    if (j.contains("caution")) {
      const auto& k = j["caution"];
      c.caution.radius = k.value("radius", c.caution.radius);
      c.caution.before = k.value("before", c.caution.before);
      c.caution.after = k.value("after", c.caution.after);
      c.caution.saturation = k.value("saturation", c.caution.saturation);
      c.caution.accel_reduction = k.value("accel_reduction", c.caution.accel_reduction);
      c.caution.speed_reduction = k.value("speed_reduction", c.caution.speed_reduction);
    }
    c.pedestrian_stop_gap = j.value("pedestrian_stop_gap", c.pedestrian_stop_gap);
    c.pedestrian_wait = j.value("pedestrian_wait", c.pedestrian_wait);
    c.swerve_offset = j.value("swerve_offset", c.swerve_offset);
    c.swerve_rate = j.value("swerve_rate", c.swerve_rate);
    c.pass_speed = j.value("pass_speed", c.pass_speed);
    c.obstacle_stop_gap = j.value("obstacle_stop_gap", c.obstacle_stop_gap);
    c.hazard_delay = j.value("hazard_delay", c.hazard_delay);
    if (j.contains("precursor")) {
      const auto& p = j["precursor"];
      auto& q = c.precursor;
      q.enabled = p.value("enabled", q.enabled);
      q.rotation_falloff = p.value("rotation_falloff", q.rotation_falloff);
      q.road_falloff = p.value("road_falloff", q.road_falloff);
      q.gap_falloff = p.value("gap_falloff", q.gap_falloff);
      q.light_falloff = p.value("light_falloff", q.light_falloff);
      q.hesitation_slowdown = p.value("hesitation_slowdown", q.hesitation_slowdown);
      q.hesitation_brake = p.value("hesitation_brake", q.hesitation_brake);
      q.nudge_offset = p.value("nudge_offset", q.nudge_offset);
      q.nudge_heading = p.value("nudge_heading", q.nudge_heading);
      q.merge_slowdown = p.value("merge_slowdown", q.merge_slowdown);
      q.stop_shift = p.value("stop_shift", q.stop_shift);
      q.start_delay = p.value("start_delay", q.start_delay);
    }
    for (const auto& b : j.value("perception_bugs", nlohmann::json::array())) {
      PlantedBug bug;
      bug.name = b.at("name").get<std::string>();
      bug.persistence = b.value("persistence", 1);
      const auto& t = b.at("trigger");
      auto kind = t.at("kind").get<std::string>();
      if (kind == "rotated_near_road") bug.trigger.kind = TriggerKind::RotatedNearRoad;
      else if (kind == "adjacent_pair") bug.trigger.kind = TriggerKind::AdjacentPair;
      else if (kind == "near_light") bug.trigger.kind = TriggerKind::NearLight;
      else throw SchemaError("unknown trigger kind '" + kind + "'");
      bug.trigger.classes = t.value("classes", std::set<std::string>{});
      bug.trigger.partner_classes = t.value("partner_classes", std::set<std::string>{});
      bug.trigger.rotation_min = t.value("rotation_min", 0.0);
      bug.trigger.rotation_max = t.value("rotation_max", 360.0);
      bug.trigger.max_road_distance = t.value("max_road_distance", std::numeric_limits<double>::infinity());
      bug.trigger.max_gap = t.value("max_gap", 0.0);
      bug.trigger.light_radius = t.value("light_radius", 0.0);
      bug.trigger.min_count = t.value("min_count", 1);
      bug.trigger.sensor_range = t.value("sensor_range", 30.0);
      const auto& e = b.at("effect");
      auto ek = e.at("kind").get<std::string>();
      if (ek == "misclassify") {
        bug.effect.kind = EffectKind::Misclassify;
        bug.effect.from = e.at("from").get<std::string>();
        bug.effect.to = e.at("to").get<std::string>();
      } else if (ek == "merge_as") {
        bug.effect.kind = EffectKind::MergeAs;
        bug.effect.to = e.at("as").get<std::string>();
      } else if (ek == "traffic_light_override") {
        bug.effect.kind = EffectKind::TrafficLightOverride;
        bug.effect.color = detail::color_from(e.at("color").get<std::string>());
      } else if (ek == "ignore") {
        bug.effect.kind = EffectKind::Ignore;
      } else {
        throw SchemaError("unknown effect kind '" + ek + "'");
      }
      c.perception_bugs.push_back(std::move(bug));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed sim config JSON: ") + e.what());
  }
  if (!(c.dt > 0) || c.horizon < 1) throw SchemaError("sim config needs dt > 0 and horizon >= 1");
  for (const auto& b : c.perception_bugs)
    if (b.persistence < 1) throw SchemaError("bug '" + b.name + "' needs persistence >= 1");
  return c;
}

namespace detail {

struct SimObject {
  const ObjectDef* def;
  geo::Vec2 center;
  geo::Shape shape;
  double rotation;
  double road_distance;
  double along;    // position along the route
  double lateral;  // signed offset from the ego lane, positive = left
};

// One way a bug can fire: the objects involved, the point the ego must come
// within sensor range of, and how close the placement is to the trigger
// condition (1 = condition met).
struct TriggerInstance {
  std::vector<std::size_t> objects;
  geo::Vec2 anchor;
  double along;
  bool needs_ahead;  // only fires while the anchor is still ahead of the ego
  double closeness;
};

inline bool class_match(const std::set<std::string>& wanted, const ObjectDef& d) {
  if (wanted.empty()) return true;
  for (const auto& c : wanted)
    if (d.is(c)) return true;
  return false;
}

inline double arc_distance(double rot, double lo, double hi) {
  rot = geo::normalize_deg(rot);
  auto inside = lo <= hi ? (rot >= lo && rot <= hi) : (rot >= lo || rot <= hi);
  if (inside) return 0.0;
  auto circ = [](double a, double b) {
    double d = std::fabs(geo::normalize_deg(a - b));
    return std::min(d, 360.0 - d);
  };
  return std::min(circ(rot, lo), circ(rot, hi));
}

// 1 within the limit, falling linearly to 0 over `falloff` beyond it.
inline double ramp(double excess, double falloff) {
  if (excess <= 0.0) return 1.0;
  return std::max(0.0, 1.0 - excess / falloff);
}

struct LightOnRoute {
  geo::Vec2 position;
  double stopline;  // along the route
};

}  // namespace detail

/// Every way each bug could fire, with its closeness to the trigger
/// condition. Instances with zero closeness are dropped; the sensor-range
/// part of a trigger is checked per step.
inline std::vector<std::vector<detail::TriggerInstance>> trigger_instances(
    const std::vector<PlantedBug>& bugs, const std::vector<detail::SimObject>& objs,
    const std::vector<detail::LightOnRoute>& lights, const PrecursorConfig& pc) {
  using detail::ramp;
  std::vector<std::vector<detail::TriggerInstance>> out(bugs.size());
  for (std::size_t b = 0; b < bugs.size(); ++b) {
    const BugTrigger& t = bugs[b].trigger;
    auto road_ok = [&](const detail::SimObject& o) {
      return std::isfinite(t.max_road_distance) ? ramp(o.road_distance - t.max_road_distance, pc.road_falloff) : 1.0;
    };
    switch (t.kind) {
      case TriggerKind::RotatedNearRoad:
        for (std::size_t i = 0; i < objs.size(); ++i) {
          const auto& o = objs[i];
          if (!detail::class_match(t.classes, *o.def)) continue;
          double q = ramp(detail::arc_distance(o.rotation, t.rotation_min, t.rotation_max), pc.rotation_falloff) *
                     road_ok(o);
          if (q > 0) out[b].push_back({{i}, o.center, o.along, true, q});
        }
        break;
      case TriggerKind::AdjacentPair:
        for (std::size_t i = 0; i < objs.size(); ++i) {
          if (!detail::class_match(t.classes, *objs[i].def)) continue;
          for (std::size_t k = 0; k < objs.size(); ++k) {
            if (k == i || !detail::class_match(t.partner_classes, *objs[k].def)) continue;
            double gap = geo::distance(objs[i].shape, objs[k].shape);
            double q = ramp(gap - t.max_gap, pc.gap_falloff) * road_ok(objs[i]) * road_ok(objs[k]);
            if (q <= 0) continue;
            geo::Vec2 mid = (objs[i].center + objs[k].center) * 0.5;
            out[b].push_back({{i, k}, mid, std::min(objs[i].along, objs[k].along), true, q});
          }
        }
        break;
      case TriggerKind::NearLight:
        for (const auto& l : lights) {
          // The min_count matching objects nearest the light.
          std::vector<std::pair<double, std::size_t>> near;
          for (std::size_t i = 0; i < objs.size(); ++i)
            if (detail::class_match(t.classes, *objs[i].def)) near.push_back({geo::dist(objs[i].center, l.position), i});
          std::sort(near.begin(), near.end());
          std::size_t need = static_cast<std::size_t>(std::max(1, t.min_count));
          if (near.size() > need) near.resize(need);
          double q = 0.0;
          std::vector<std::size_t> ids;
          for (auto [d, i] : near) {
            q += ramp(d - t.light_radius, pc.light_falloff);
            ids.push_back(i);
          }
          q /= static_cast<double>(need);
          if (t.max_gap > 0) {
            double gap = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < ids.size(); ++a)
              for (std::size_t c = a + 1; c < ids.size(); ++c)
                gap = std::min(gap, geo::distance(objs[ids[a]].shape, objs[ids[c]].shape));
            q *= 0.5 + 0.5 * (std::isfinite(gap) ? ramp(gap - t.max_gap, pc.gap_falloff) : 0.0);
          }
          if (q > 0) out[b].push_back({ids, l.position, l.stopline, false, q});
        }
        break;
    }
  }
  return out;
}

/// Simulates the scenario. The planner accelerates toward the speed limit,
/// stops 1 m before the stop line for a perceived red (or a yellow it can
/// still stop for), stops short of perceived pedestrians and then creeps
/// around them, and stops indefinitely before perceived unknown obstacles.
/// Placements close to a bug's trigger condition degrade perception
/// confidence and make the planner react in proportion.
inline stl::Trace run_toy_sim(const Scenario& s, const ToySimConfig& cfg, const MapModel& map,
                              const Library& lib) {
  if (!(cfg.dt > 0) || cfg.horizon < 1) throw InvalidScenario("invalid simulator configuration");
  for (const auto& o : s.objects) {
    if (!std::isfinite(o.forward) || !std::isfinite(o.right) || !std::isfinite(o.rotation))
      throw InvalidScenario("scenario has non-finite object coordinates");
    lib.at(o.type_id);
  }
  Route route = find_route(map, {s.ego_start.x, s.ego_start.y}, s.ego_destination);
  const Road& road = map.roads[route.road];
  const PrecursorConfig& pc = cfg.precursor;
  const double dt = cfg.dt;

  std::vector<detail::SimObject> objs;
  for (const auto& o : s.objects) {
    const ObjectDef& d = lib.at(o.type_id);
    geo::Shape shape = footprint(s.ego_start, o, d);
    geo::Vec2 c = world_position(s.ego_start, o);
    objs.push_back({&d, c, shape, o.rotation, nearest_road_distance(shape, map), route.along(c),
                    route.centerline.lateral(c) - route.offset});
  }

  std::vector<detail::LightOnRoute> lights;
  for (const auto& l : map.traffic_lights) {
    double along = route.along(l.position) - l.stopline_setback;
    if (std::fabs(route.centerline.lateral(l.position)) <= 15.0 && along > 0 && along < route.length())
      lights.push_back({l.position, along});
  }
  std::sort(lights.begin(), lights.end(), [](const auto& a, const auto& b) { return a.stopline < b.stopline; });

  const auto instances = trigger_instances(cfg.perception_bugs, objs, lights, pc);
  // Last step at which each trigger instance fully held.
  std::vector<std::vector<long>> last_fire(instances.size());
  for (std::size_t b = 0; b < instances.size(); ++b) last_fire[b].assign(instances[b].size(), -1000000000L);

  double clutter = 0.0;
  if (!lights.empty())
    for (const auto& o : objs)
      clutter += std::max(0.0, 1.0 - geo::dist(o.center, lights.front().position) / cfg.caution.radius);
  const double clutter_level = std::min(1.0, clutter / cfg.caution.saturation);

  // Highest speed from which the ego still stops within `gap` at `decel`,
  // accounting for one step of travel before braking takes effect.
  auto stop_speed = [&](double gap, double decel) {
    if (gap <= 0.0) return 0.0;
    return decel * (std::sqrt(dt * dt + 2.0 * gap / decel) - dt);
  };

  stl::Trace tr(toy_signal_names(), dt);
  double along = 0.0, v = 0.0, a = 0.0, lat = 0.0, lat_rate = 0.0;
  bool sig_left = false, sig_right = false, hazard = false;
  std::set<std::size_t> passed;
  std::optional<std::size_t> passing;  // phantom pedestrian being passed
  double ped_wait = 0.0, blocked_for = 0.0;
  double green_since = -1.0;
  LightColor last_perceived = LightColor::None;

  for (long step = 0; step < cfg.horizon; ++step) {
    const double time = static_cast<double>(step) * dt;
    const LightColor actual = lights.empty() ? LightColor::None : cfg.lights.at(time);
    geo::Vec2 pos = route.position(along) + geo::rotate({0, 1}, route.heading_deg(along)) * lat;

    // Perception. Full triggers fire their effect (with persistence);
    // near-misses in sensor range only lower confidence.
    std::optional<LightColor> override_color;
    std::vector<std::size_t> phantoms;
    std::vector<double> blockers;
    double hesitation = 0.0, merge_doubt = 0.0, stop_shift = 0.0, start_doubt = 0.0;
    std::optional<std::size_t> nudge_obj;
    double nudge = 0.0;
    for (std::size_t b = 0; b < instances.size(); ++b) {
      const PlantedBug& bug = cfg.perception_bugs[b];
      for (std::size_t k = 0; k < instances[b].size(); ++k) {
        const auto& inst = instances[b][k];
        bool sensed = (!inst.needs_ahead || inst.along > along) && geo::dist(pos, inst.anchor) <= bug.trigger.sensor_range;
        if (sensed && inst.closeness >= 1.0) last_fire[b][k] = step;
        if (step - last_fire[b][k] < bug.persistence) {
          switch (bug.effect.kind) {
            case EffectKind::TrafficLightOverride:
              if (!override_color) override_color = bug.effect.color;
              break;
            case EffectKind::Misclassify: phantoms.push_back(inst.objects.front()); break;
            case EffectKind::MergeAs: blockers.push_back(inst.along); break;
            case EffectKind::Ignore: break;
          }
          continue;
        }
        if (!pc.enabled || !sensed) continue;
        const double q = inst.closeness;
        switch (bug.effect.kind) {
          case EffectKind::Misclassify:
            hesitation = std::max(hesitation, q);
            if (q > nudge && !passed.count(inst.objects.front())) {
              nudge = q;
              nudge_obj = inst.objects.front();
            }
            break;
          case EffectKind::MergeAs: merge_doubt = std::max(merge_doubt, q); break;
          case EffectKind::TrafficLightOverride:
            if (bug.effect.color == LightColor::Green) stop_shift = std::max(stop_shift, q);
            else start_doubt = std::max(start_doubt, q);
            break;
          case EffectKind::Ignore: break;
        }
      }
    }
    const LightColor perceived = lights.empty() ? LightColor::None : override_color.value_or(actual);
    if (perceived == LightColor::Green && last_perceived != LightColor::Green) green_since = time;
    last_perceived = perceived;

    const detail::LightOnRoute* next_light = nullptr;
    for (const auto& l : lights)
      if (l.stopline - along > -12.0 || &l == &lights.back()) {
        next_light = &l;
        break;
      }
    const double dist_stop = next_light ? next_light->stopline - along : 1000.0;

    const bool at_dest = along >= route.length() - 0.5;
    const bool stopped = v < 0.05;
    double heading = route.heading_deg(along);
    if (v > 1e-9) heading += geo::rad2deg(std::atan2(lat_rate, v));
    const double lane_w = road.width / road.lane_count;
    const int lane = std::clamp(static_cast<int>(std::floor((route.offset + lat + road.width / 2) / lane_w)), 0,
                                road.lane_count - 1);

    tr.push({time, pos.x, pos.y, heading, v, a, static_cast<double>(lane), dist_stop, static_cast<double>(perceived),
             static_cast<double>(actual), stopped ? 1.0 : 0.0, at_dest ? 1.0 : 0.0, sig_left ? 1.0 : 0.0,
             sig_right ? 1.0 : 0.0, hazard ? 1.0 : 0.0});
    if (at_dest) break;

    // Planning: target speed, then a speed cap for every stop target.
    const bool near_light = next_light && along > next_light->stopline - cfg.caution.before &&
                            along < next_light->stopline + cfg.caution.after;
    const double c = near_light ? clutter_level : 0.0;
    const double a_max = cfg.max_accel * (1.0 - cfg.caution.accel_reduction * c);
    double v_target = cfg.max_speed * (1.0 - cfg.caution.speed_reduction * c);
    v_target *= (1.0 - pc.hesitation_slowdown * hesitation) * (1.0 - pc.merge_slowdown * merge_doubt);
    if (passing) v_target = std::min(v_target, cfg.pass_speed);
    const double brake = cfg.comfort_decel * (1.0 + pc.hesitation_brake * hesitation);

    double v_cap = std::numeric_limits<double>::infinity();
    double stop_gap = std::numeric_limits<double>::infinity();
    auto add_stop = [&](double gap) {
      stop_gap = std::min(stop_gap, gap);
      v_cap = std::min(v_cap, stop_speed(gap, cfg.comfort_decel));
    };

    if (next_light) {
      const double gap = next_light->stopline - 1.0 + pc.stop_shift * stop_shift - along;
      if ((perceived == LightColor::Red || perceived == LightColor::Yellow) && gap > -0.5) {
        const double decel = perceived == LightColor::Yellow ? cfg.comfort_decel : cfg.emergency_decel;
        if (v * v / (2.0 * decel) <= gap + 0.5) add_stop(gap);
      }
      // Doubt about a fresh green holds a stopped ego a little longer.
      if (perceived == LightColor::Green && stopped && gap > -0.5 && gap < 1.5 &&
          time - green_since < pc.start_delay * start_doubt)
        add_stop(gap);
    }

    std::optional<std::size_t> ped;
    for (auto i : phantoms) {
      if (passed.count(i) || (passing && *passing == i) || objs[i].along <= along) continue;
      if (!ped || objs[i].along < objs[*ped].along) ped = i;
    }
    if (ped) {
      const double gap = objs[*ped].along - cfg.pedestrian_stop_gap - along;
      add_stop(gap);
      if (stopped && gap < 1.0) {
        ped_wait += dt;
        if (ped_wait >= cfg.pedestrian_wait) {
          passing = *ped;
          ped_wait = 0.0;
        }
      }
    } else {
      ped_wait = 0.0;
    }

    bool blocked = false;
    for (double bl : blockers) {
      if (bl <= along) continue;
      const double gap = bl - cfg.obstacle_stop_gap - along;
      add_stop(gap);
      blocked = blocked || gap < 1.0;
    }
    blocked_for = blocked && stopped ? blocked_for + dt : 0.0;
    hazard = blocked && blocked_for >= cfg.hazard_delay;

    // Easing toward a lower target is capped by the (hesitation-scaled)
    // braking rate; stop targets may brake up to the emergency rate.
    double a_cmd = std::clamp((v_target - v) / dt, -brake, a_max);
    a_cmd = std::min(a_cmd, std::max(-cfg.emergency_decel, (v_cap - v) / dt));
    double v_new = std::max(0.0, v + a_cmd * dt);
    if (std::isfinite(stop_gap))
      v_new = std::min(v_new, std::max(std::max(stop_gap, 0.0) / dt, v - cfg.emergency_decel * dt));
    a = (v_new - v) / dt;
    v = v_new;
    along += v * dt;

    // Lateral: an unsignaled swerve around a phantom pedestrian, a small
    // unsignaled nudge away from a doubtful object, otherwise back to the
    // lane centre with the indicator on.
    if (passing && along > objs[*passing].along + 2.0) {
      passed.insert(*passing);
      passing.reset();
    }
    double target = 0.0, rate = cfg.swerve_rate;
    bool signaled = true;
    if (passing) {
      target = (objs[*passing].lateral < 0 ? 1.0 : -1.0) * cfg.swerve_offset;
      signaled = false;
    } else if (nudge_obj && objs[*nudge_obj].along > along) {
      target = (objs[*nudge_obj].lateral < 0 ? 1.0 : -1.0) * pc.nudge_offset * nudge;
      rate = v * std::tan(geo::deg2rad(pc.nudge_heading * nudge));
      signaled = false;
    }
    const double dlat = target - lat;
    lat_rate = 0.0;
    if (std::fabs(dlat) > 1e-9 && v > 1.0 && rate > 0.0) {
      const double m = std::min(std::fabs(dlat), rate * dt);
      lat += std::copysign(m, dlat);
      lat_rate = std::copysign(m / dt, dlat);
      if (std::fabs(target - lat) < 1e-9) lat = target;
    }
    sig_left = signaled && lat_rate > 0;
    sig_right = signaled && lat_rate < 0;
  }
  return tr;
}

inline SutInterface toy_sim_sut(const MapModel& map, const Library& lib, const ToySimConfig& cfg) {
  SutInterface sut;
  sut.declared_signals = toy_signal_names();
  sut.step_seconds = cfg.dt;
  sut.parallel_safe = true;
  sut.run = [map, lib, cfg](const Scenario& s) { return run_toy_sim(s, cfg, map, lib); };
  return sut;
}

}  // namespace trashfuzz
