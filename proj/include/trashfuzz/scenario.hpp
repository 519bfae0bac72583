#pragma once

// Scenarios: the ego route plus placed roadside objects, and their n x 4
// matrix encoding (forward, right, rotation, type) used by the search.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"
#include "trashfuzz/geometry.hpp"

namespace trashfuzz {

enum class Category { Movable, FixedPosition };

struct ObjectDef {
  int type_id = 0;
  std::string name;
  Category category = Category::Movable;
  std::set<std::string> classes;
  double width = 0.5;  // along the local x axis
  double depth = 0.5;
  double height = 1.0;
  geo::Vec2 handle_axis{1.0, 0.0};

  bool is(const std::string& cls) const { return classes.count(cls) != 0; }
  bool fixed() const { return category == Category::FixedPosition; }
};

inline const std::set<std::string>& known_classes() {
  static const std::set<std::string> c = {"bin",  "tree", "bench", "hydrant", "lamp",
                                          "box",  "bag",  "cart",  "pole",    "other"};
  return c;
}

class Library {
public:
  Library() = default;
  explicit Library(std::vector<ObjectDef> defs) : defs_(std::move(defs)) {
    for (std::size_t i = 0; i < defs_.size(); ++i) {
      const auto& d = defs_[i];
      if (d.type_id != static_cast<int>(i)) throw SchemaError("library type ids must be 0..n-1 in order");
      if (!(d.width > 0 && d.depth > 0 && d.height > 0))
        throw SchemaError("object '" + d.name + "' needs positive dimensions");
      if (std::fabs(geo::norm(d.handle_axis) - 1.0) > 1e-9)
        throw SchemaError("object '" + d.name + "' handle_axis must be a unit vector");
      for (const auto& c : d.classes)
        if (!known_classes().count(c)) throw SchemaError("object '" + d.name + "' has unknown class " + c);
    }
  }

  std::size_t size() const { return defs_.size(); }
  const std::vector<ObjectDef>& defs() const { return defs_; }
  const ObjectDef& at(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= defs_.size()) throw UnknownTypeId(id);
    return defs_[static_cast<std::size_t>(id)];
  }
  int id_of(const std::string& name) const {
    for (const auto& d : defs_)
      if (d.name == name) return d.type_id;
    throw SchemaError("no library object named '" + name + "'");
  }

private:
  std::vector<ObjectDef> defs_;
};

/// The 15-entry demo library. Dimensions and heights are artifact choices.
inline Library default_library() {
  auto def = [](int id, std::string name, Category cat, std::set<std::string> cls, double w,
                double d, double h) {
    ObjectDef o;
    o.type_id = id;
    o.name = std::move(name);
    o.category = cat;
    o.classes = std::move(cls);
    o.width = w;
    o.depth = d;
    o.height = h;
    return o;
  };
  const auto M = Category::Movable;
  const auto F = Category::FixedPosition;
  return Library({
      def(0, "TrashBin(Green)", M, {"bin"}, 0.6, 0.6, 1.0),
      def(1, "TrashBin(Yellow)", M, {"bin"}, 0.6, 0.6, 1.0),
      def(2, "TrashBin(Red)", M, {"bin"}, 0.6, 0.6, 1.0),
      def(3, "TrashBin(Blue)", M, {"bin"}, 0.6, 0.6, 1.0),
      def(4, "BigTrashBin", M, {"bin"}, 1.6, 1.0, 1.3),
      def(5, "ShoppingCart", M, {"cart"}, 1.0, 0.6, 1.0),
      def(6, "WarningStand", M, {"other"}, 0.6, 0.4, 1.0),
      def(7, "TrashBag", M, {"bag"}, 0.5, 0.5, 0.5),
      def(8, "Bench0", F, {"bench"}, 1.8, 0.6, 0.9),
      def(9, "Bench1", F, {"bench"}, 1.8, 0.6, 0.9),
      def(10, "BusStopPole", F, {"pole"}, 0.3, 0.3, 2.5),
      def(11, "Hydrant", F, {"hydrant"}, 0.4, 0.4, 0.8),
      def(12, "Tree0", F, {"tree"}, 0.8, 0.8, 1.2),
      def(13, "Tree1", F, {"tree"}, 1.2, 1.2, 3.0),
      def(14, "Tree2", F, {"tree"}, 2.0, 2.0, 6.0),
  });
}

inline nlohmann::json to_json(const Library& lib) {
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& d : lib.defs())
    objs.push_back({{"type_id", d.type_id},
                    {"name", d.name},
                    {"category", d.fixed() ? "fixed_position" : "movable"},
                    {"classes", d.classes},
                    {"footprint", {{"width", d.width}, {"depth", d.depth}}},
                    {"height", d.height},
                    {"handle_axis", {d.handle_axis.x, d.handle_axis.y}}});
  return {{"format_version", 1}, {"objects", objs}};
}

inline Library library_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw SchemaError("unsupported library format_version");
    std::vector<ObjectDef> defs;
    for (const auto& o : j.at("objects")) {
      ObjectDef d;
      d.type_id = o.at("type_id").get<int>();
      d.name = o.at("name").get<std::string>();
      auto cat = o.at("category").get<std::string>();
      if (cat == "movable") d.category = Category::Movable;
      else if (cat == "fixed_position") d.category = Category::FixedPosition;
      else throw SchemaError("unknown category '" + cat + "'");
      d.classes = o.at("classes").get<std::set<std::string>>();
      d.width = o.at("footprint").at("width").get<double>();
      d.depth = o.at("footprint").at("depth").get<double>();
      d.height = o.at("height").get<double>();
      auto h = o.value("handle_axis", std::vector<double>{1.0, 0.0});
      if (h.size() != 2) throw SchemaError("handle_axis must have 2 components");
      d.handle_axis = {h[0], h[1]};
      defs.push_back(std::move(d));
    }
    return Library(std::move(defs));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed library JSON: ") + e.what());
  }
}

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 0.0;
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct PlacedObject {
  double forward = 0.0;
  double right = 0.0;   // positive = ego's right
  double rotation = 0.0;  // degrees, [0, 360)
  int type_id = 0;
  friend bool operator==(const PlacedObject&, const PlacedObject&) = default;
};

struct Scenario {
  Pose ego_start;
  geo::Vec2 ego_destination;
  std::vector<PlacedObject> objects;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Box of admissible (forward, right) placements relative to the ego start.
struct PlacementRegion {
  double forward_min = 0.0;
  double forward_max = 150.0;
  double right_min = -30.0;
  double right_max = 30.0;

  bool contains(double forward, double right) const {
    return forward >= forward_min && forward <= forward_max && right >= right_min &&
           right <= right_max;
  }
};

/// World position of an object placed relative to the ego start pose.
inline geo::Vec2 world_position(const Pose& ego, const PlacedObject& o) {
  return geo::Vec2{ego.x, ego.y} + geo::rotate({o.forward, -o.right}, ego.heading_deg);
}

inline double world_yaw_deg(const Pose& ego, const PlacedObject& o) {
  return geo::normalize_deg(ego.heading_deg + o.rotation);
}

inline geo::Shape footprint(const Pose& ego, const PlacedObject& o, const ObjectDef& d) {
  return geo::oriented_rect(world_position(ego, o), d.width, d.depth, world_yaw_deg(ego, o));
}

enum class Dimension { Forward = 0, Right = 1, Rotation = 2, Type = 3 };

inline const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::Forward: return "forward";
    case Dimension::Right: return "right";
    case Dimension::Rotation: return "rotation";
    case Dimension::Type: return "type";
  }
  return "?";
}

struct EncodedScenario {
  std::vector<std::array<double, 4>> rows;

  std::size_t size() const { return rows.size(); }
  double cell(std::size_t row, Dimension d) const { return rows.at(row)[static_cast<int>(d)]; }
  friend bool operator==(const EncodedScenario&, const EncodedScenario&) = default;
};

inline EncodedScenario encode(const Scenario& s) {
  EncodedScenario e;
  e.rows.reserve(s.objects.size());
  for (const auto& o : s.objects)
    e.rows.push_back({o.forward, o.right, o.rotation, static_cast<double>(o.type_id)});
  return e;
}

inline Scenario decode(const EncodedScenario& m, const Pose& ego_start, geo::Vec2 destination,
                       const Library& lib) {
  Scenario s;
  s.ego_start = ego_start;
  s.ego_destination = destination;
  for (const auto& r : m.rows) {
    for (double v : r)
      if (!std::isfinite(v)) throw NonFiniteValue("encoded scenario contains a non-finite value");
    double t = r[3];
    if (t != std::floor(t) || t < 0 || t >= static_cast<double>(lib.size())) throw UnknownTypeId(t);
    s.objects.push_back(PlacedObject{r[0], r[1], geo::normalize_deg(r[2]), static_cast<int>(t)});
  }
  return s;
}

inline nlohmann::json to_json(const Scenario& s) {
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& o : s.objects)
    objs.push_back({{"forward", o.forward},
                    {"right", o.right},
                    {"rotation_deg", o.rotation},
                    {"type", o.type_id}});
  return {{"format_version", 1},
          {"ego_start", {{"x", s.ego_start.x}, {"y", s.ego_start.y}, {"heading_deg", s.ego_start.heading_deg}}},
          {"ego_destination", {{"x", s.ego_destination.x}, {"y", s.ego_destination.y}}},
          {"objects", objs}};
}

/// Parses a scenario; `type` may be a library id or an object name.
inline Scenario scenario_from_json(const nlohmann::json& j, const Library& lib) {
  try {
    if (j.at("format_version").get<int>() != 1) throw SchemaError("unsupported scenario format_version");
    EncodedScenario e;
    const auto& st = j.at("ego_start");
    Pose start{st.at("x").get<double>(), st.at("y").get<double>(), st.value("heading_deg", 0.0)};
    const auto& de = j.at("ego_destination");
    geo::Vec2 dest{de.at("x").get<double>(), de.at("y").get<double>()};
    for (const auto& o : j.at("objects")) {
      const auto& t = o.at("type");
      double type = t.is_string() ? lib.id_of(t.get<std::string>()) : t.get<double>();
      e.rows.push_back({o.at("forward").get<double>(), o.at("right").get<double>(),
                        o.at("rotation_deg").get<double>(), type});
    }
    return decode(e, start, dest, lib);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed scenario JSON: ") + e.what());
  }
}

/// 64-bit FNV-1a, used for content-addressed ids and scenario hashes.
inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

inline std::string scenario_hash(const Scenario& s) { return hex64(fnv1a(to_json(s).dump())); }

}  // namespace trashfuzz
