#pragma once

// Road map features referenced by the placement rules and the simulator.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"
#include "trashfuzz/geometry.hpp"

namespace trashfuzz {

struct Road {
  std::string name;
  std::vector<geo::Vec2> centerline;
  int lane_count = 1;
  double width = 3.5;

  geo::Shape centerline_shape() const { return geo::Shape::polyline(centerline); }
};

struct Footpath {
  geo::Shape polygon;
  double width = 0.0;
};

struct TrafficLight {
  geo::Vec2 position;
  double heading_deg = 0.0;
  /// Distance the stop line lies before the light's projection on the lane.
  double stopline_setback = 4.0;
};

struct MapModel {
  std::vector<Road> roads;
  std::vector<geo::Shape> footways;
  std::vector<Footpath> footpaths;
  std::vector<geo::Shape> footpath_crossings;  // edge segments
  std::vector<geo::Vec2> corners;
  std::vector<geo::Vec2> pipes;
  std::vector<geo::Vec2> lamps;
  std::vector<geo::Vec2> fixed_infra;
  std::vector<TrafficLight> traffic_lights;
};

inline int lane_count(const Road& r) { return r.lane_count; }

/// Distance from a shape to the paved area of a road (centerline buffered by
/// half the width); 0 when they overlap.
inline double road_distance(const geo::Shape& s, const Road& r) {
  return std::max(0.0, geo::distance(s, r.centerline_shape()) - r.width / 2.0);
}

inline void validate_map(const MapModel& m) {
  auto finite = [](geo::Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); };
  auto check_shape = [&](const geo::Shape& s, bool polygon, const char* what) {
    if (polygon && s.pts.size() < 3) throw MalformedMap(std::string(what) + " needs >= 3 vertices");
    for (auto p : s.pts)
      if (!finite(p)) throw MalformedMap(std::string(what) + " has a non-finite coordinate");
  };
  if (m.roads.empty()) throw MalformedMap("map has no roads");
  for (const auto& r : m.roads) {
    if (r.lane_count < 1) throw MalformedMap("road '" + r.name + "' has lane_count < 1");
    if (!(r.width > 0.0)) throw MalformedMap("road '" + r.name + "' has non-positive width");
    if (r.centerline.size() < 2) throw MalformedMap("road '" + r.name + "' centerline too short");
    for (auto p : r.centerline)
      if (!finite(p)) throw MalformedMap("road '" + r.name + "' has a non-finite coordinate");
  }
  for (const auto& f : m.footways) check_shape(f, true, "footway");
  for (const auto& f : m.footpaths) {
    check_shape(f.polygon, true, "footpath");
    if (!(f.width > 0.0)) throw MalformedMap("footpath has non-positive width");
  }
  for (const auto& c : m.footpath_crossings) {
    if (c.pts.size() != 2) throw MalformedMap("footpath crossing edge needs 2 points");
    check_shape(c, false, "footpath crossing");
  }
  for (const auto* list : {&m.corners, &m.pipes, &m.lamps, &m.fixed_infra})
    for (auto p : *list)
      if (!finite(p)) throw MalformedMap("point feature has a non-finite coordinate");
  for (const auto& l : m.traffic_lights)
    if (!finite(l.position) || !std::isfinite(l.heading_deg))
      throw MalformedMap("traffic light has a non-finite pose");
}

namespace detail {

inline geo::Vec2 point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<geo::Vec2> points_from_json(const nlohmann::json& j) {
  std::vector<geo::Vec2> out;
  for (const auto& p : j) out.push_back(point_from_json(p));
  return out;
}

inline nlohmann::json points_to_json(const std::vector<geo::Vec2>& pts) {
  nlohmann::json a = nlohmann::json::array();
  for (auto p : pts) a.push_back({p.x, p.y});
  return a;
}

}  // namespace detail

inline MapModel map_from_json(const nlohmann::json& j) {
  MapModel m;
  try {
    if (j.at("format_version").get<int>() != 1) throw SchemaError("unsupported map format_version");
    for (const auto& r : j.at("roads")) {
      Road road;
      road.name = r.value("name", std::string());
      road.centerline = detail::points_from_json(r.at("centerline"));
      road.lane_count = r.at("lane_count").get<int>();
      road.width = r.at("width").get<double>();
      m.roads.push_back(std::move(road));
    }
    for (const auto& f : j.value("footways", nlohmann::json::array()))
      m.footways.push_back(geo::Shape::polygon(detail::points_from_json(f)));
    for (const auto& f : j.value("footpaths", nlohmann::json::array()))
      m.footpaths.push_back(Footpath{geo::Shape::polygon(detail::points_from_json(f.at("polygon"))),
                                     f.at("width").get<double>()});
    for (const auto& c : j.value("footpath_crossings", nlohmann::json::array()))
      m.footpath_crossings.push_back(geo::Shape::polyline(detail::points_from_json(c)));
    m.corners = detail::points_from_json(j.value("corners", nlohmann::json::array()));
    m.pipes = detail::points_from_json(j.value("pipes", nlohmann::json::array()));
    m.lamps = detail::points_from_json(j.value("lamps", nlohmann::json::array()));
    m.fixed_infra = detail::points_from_json(j.value("fixed_infra", nlohmann::json::array()));
    for (const auto& l : j.value("traffic_lights", nlohmann::json::array())) {
      TrafficLight tl;
      tl.position = {l.at("x").get<double>(), l.at("y").get<double>()};
      tl.heading_deg = l.value("heading_deg", 0.0);
      tl.stopline_setback = l.value("stopline_setback", 4.0);
      m.traffic_lights.push_back(tl);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed map JSON: ") + e.what());
  }
  validate_map(m);
  return m;
}

inline nlohmann::json to_json(const MapModel& m) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["roads"] = nlohmann::json::array();
  for (const auto& r : m.roads)
    j["roads"].push_back({{"name", r.name},
                          {"centerline", detail::points_to_json(r.centerline)},
                          {"lane_count", r.lane_count},
                          {"width", r.width}});
  j["footways"] = nlohmann::json::array();
  for (const auto& f : m.footways) j["footways"].push_back(detail::points_to_json(f.pts));
  j["footpaths"] = nlohmann::json::array();
  for (const auto& f : m.footpaths)
    j["footpaths"].push_back({{"polygon", detail::points_to_json(f.polygon.pts)}, {"width", f.width}});
  j["footpath_crossings"] = nlohmann::json::array();
  for (const auto& c : m.footpath_crossings)
    j["footpath_crossings"].push_back(detail::points_to_json(c.pts));
  j["corners"] = detail::points_to_json(m.corners);
  j["pipes"] = detail::points_to_json(m.pipes);
  j["lamps"] = detail::points_to_json(m.lamps);
  j["fixed_infra"] = detail::points_to_json(m.fixed_infra);
  j["traffic_lights"] = nlohmann::json::array();
  for (const auto& l : m.traffic_lights)
    j["traffic_lights"].push_back({{"x", l.position.x},
                                   {"y", l.position.y},
                                   {"heading_deg", l.heading_deg},
                                   {"stopline_setback", l.stopline_setback}});
  return j;
}

/// Ego route: a stretch of one road's centerline, driven at a fixed lateral
/// offset (positive = left of the centerline).
struct Route {
  std::size_t road = 0;
  geo::Polyline centerline;
  double s_start = 0.0;
  double s_end = 0.0;
  double offset = 0.0;

  double length() const { return s_end - s_start; }
  geo::Vec2 position(double along) const {
    double s = s_start + along;
    geo::Vec2 base = centerline.at(s);
    geo::Vec2 left = geo::rotate({0, 1}, centerline.heading_deg(s));
    return base + left * offset;
  }
  double heading_deg(double along) const { return centerline.heading_deg(s_start + along); }
  /// Distance along the route of the point nearest to p.
  double along(geo::Vec2 p) const { return centerline.project(p) - s_start; }
};

/// Finds a road whose paved area contains both endpoints with the
/// destination downstream of the start.
inline Route find_route(const MapModel& m, geo::Vec2 start, geo::Vec2 destination) {
  double best = std::numeric_limits<double>::infinity();
  Route route;
  bool found = false;
  for (std::size_t i = 0; i < m.roads.size(); ++i) {
    const Road& r = m.roads[i];
    geo::Shape cl = r.centerline_shape();
    double ds = geo::distance(cl, start), dd = geo::distance(cl, destination);
    if (ds > r.width / 2.0 || dd > r.width / 2.0) continue;
    geo::Polyline pl(r.centerline);
    double s0 = pl.project(start), s1 = pl.project(destination);
    if (s1 <= s0) continue;
    if (std::max(ds, dd) < best) {
      best = std::max(ds, dd);
      route.road = i;
      route.centerline = pl;
      route.s_start = s0;
      route.s_end = s1;
      route.offset = pl.lateral(start);
      found = true;
    }
  }
  if (!found) throw NoRoute("no road connects the ego start to its destination");
  return route;
}

}  // namespace trashfuzz
