#pragma once

// Rule-compliant scenario generation and single-cell mutation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "trashfuzz/error.hpp"
#include "trashfuzz/map_model.hpp"
#include "trashfuzz/rules.hpp"
#include "trashfuzz/scenario.hpp"

namespace trashfuzz {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// The ego route shared by every scenario of a campaign.
struct RouteSpec {
  Pose start{0.0, -1.75, 0.0};
  geo::Vec2 destination{140.0, -1.75};
};

/// Per object type, the 1 m cells of the placement region where a lone
/// object of that type passes every rule for at least one of eight
/// rotations. Computed lazily, once per type.
class ComplianceMasks {
public:
  static constexpr double kCell = 1.0;

  ComplianceMasks(const MapModel& map, const Library& lib, const PlacementRegion& region,
                  const RouteSpec& route)
      : map_(map), lib_(lib), region_(region), route_(route), masks_(lib.size()), once_(lib.size()) {}

  struct Cell {
    double forward;
    double right;
  };

  const std::vector<Cell>& cells(int type_id) {
    auto t = static_cast<std::size_t>(type_id);
    std::call_once(once_.at(t), [&] { masks_[t] = compute(type_id); });
    return masks_[t];
  }

private:
  std::vector<Cell> compute(int type_id) const {
    std::vector<Cell> out;
    Scenario s;
    s.ego_start = route_.start;
    s.ego_destination = route_.destination;
    s.objects.resize(1);
    for (double f = region_.forward_min + kCell / 2; f <= region_.forward_max; f += kCell) {
      for (double r = region_.right_min + kCell / 2; r <= region_.right_max; r += kCell) {
        for (int k = 0; k < 8; ++k) {
          s.objects[0] = PlacedObject{f, r, 45.0 * k, type_id};
          if (check_rules(s, map_, lib_).valid()) {
            out.push_back(Cell{f, r});
            break;
          }
        }
      }
    }
    return out;
  }

  MapModel map_;
  Library lib_;
  PlacementRegion region_;
  RouteSpec route_;
  std::vector<std::vector<Cell>> masks_;
  std::vector<std::once_flag> once_;
};

namespace detail {

inline std::string mask_key(const MapModel& map, const Library& lib, const PlacementRegion& region,
                            const RouteSpec& route) {
  nlohmann::json j = {{"map", to_json(map)},
                      {"lib", to_json(lib)},
                      {"region", {region.forward_min, region.forward_max, region.right_min, region.right_max}},
                      {"route", {route.start.x, route.start.y, route.start.heading_deg,
                                 route.destination.x, route.destination.y}}};
  return j.dump();
}

}  // namespace detail

/// Shared mask cache keyed by the full (map, library, region, route) content.
inline ComplianceMasks& compliance_masks(const MapModel& map, const Library& lib,
                                         const PlacementRegion& region, const RouteSpec& route) {
  static std::shared_mutex mu;
  static std::map<std::string, std::unique_ptr<ComplianceMasks>> cache;
  std::string key = detail::mask_key(map, lib, region, route);
  {
    std::shared_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  std::unique_lock lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<ComplianceMasks>(map, lib, region, route);
  return *slot;
}

struct SamplerOptions {
  PlacementRegion region;
  RouteSpec route;
  int tries_per_object = 400;
};

/// Appends one object of a uniformly random type: a cell from that type's
/// compliant mask with sub-cell jitter and a uniform rotation. The candidate
/// is kept only if the scenario still passes every rule, so pairwise
/// constraints (rules 7, 10, 12) hold as objects arrive. False if no
/// candidate fits within the try budget.
inline bool add_valid_object(Scenario& s, const MapModel& map, const Library& lib, Rng& rng,
                             const SamplerOptions& opt = {}) {
  auto& masks = compliance_masks(map, lib, opt.region, opt.route);
  int type = static_cast<int>(uniform_index(rng, lib.size()));
  const auto& cells = masks.cells(type);
  if (cells.empty()) throw RegionEmpty(lib.at(type).name);
  for (int t = 0; t < opt.tries_per_object; ++t) {
    const auto& c = cells[uniform_index(rng, cells.size())];
    double h = ComplianceMasks::kCell / 2;
    PlacedObject o{std::clamp(c.forward + uniform(rng, -h, h), opt.region.forward_min, opt.region.forward_max),
                   std::clamp(c.right + uniform(rng, -h, h), opt.region.right_min, opt.region.right_max),
                   geo::normalize_deg(uniform(rng, 0.0, 360.0)), type};
    s.objects.push_back(o);
    if (check_rules(s, map, lib).valid()) return true;
    s.objects.pop_back();
  }
  return false;
}

/// Draws a compliant scenario of n objects, restarting from scratch when an
/// object cannot be fitted.
inline Scenario sample_valid(const MapModel& map, const Library& lib, std::size_t n, Rng& rng,
                             const SamplerOptions& opt = {}) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Scenario s;
    s.ego_start = opt.route.start;
    s.ego_destination = opt.route.destination;
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) ok = add_valid_object(s, map, lib, rng, opt);
    if (ok) return s;
  }
  throw RegionEmpty("a scenario of " + std::to_string(n) + " objects");
}

/// Rebuilds a possibly non-compliant scenario: objects are re-added in order
/// and each one that breaks a rule is replaced by a fresh compliant draw.
inline Scenario repair(const Scenario& in, const MapModel& map, const Library& lib, Rng& rng,
                       const SamplerOptions& opt = {}) {
  if (check_rules(in, map, lib).valid()) return in;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Scenario s = in;
    s.objects.clear();
    bool ok = true;
    for (const auto& o : in.objects) {
      s.objects.push_back(o);
      if (opt.region.contains(o.forward, o.right) && check_rules(s, map, lib).valid()) continue;
      s.objects.pop_back();
      ok = add_valid_object(s, map, lib, rng, opt);
      if (!ok) break;
    }
    if (ok) return s;
  }
  return sample_valid(map, lib, in.objects.size(), rng, opt);
}

/// Baseline: positions, rotations and types drawn uniformly, rules ignored.
inline Scenario sample_uniform(const Library& lib, std::size_t n, Rng& rng,
                               const SamplerOptions& opt = {}) {
  Scenario s;
  s.ego_start = opt.route.start;
  s.ego_destination = opt.route.destination;
  for (std::size_t k = 0; k < n; ++k) {
    double f = uniform(rng, opt.region.forward_min, opt.region.forward_max);
    double r = uniform(rng, opt.region.right_min, opt.region.right_max);
    double rot = geo::normalize_deg(uniform(rng, 0.0, 360.0));
    int type = static_cast<int>(uniform_index(rng, lib.size()));
    s.objects.push_back(PlacedObject{f, r, rot, type});
  }
  return s;
}

struct MutationOptions {
  double position_step = 3.0;
  double rotation_step = 45.0;
  int retries = 64;
  /// Resolution of the projection scan, in meters or degrees.
  double projection_resolution = 0.05;
  PlacementRegion region;
};

struct Mutation {
  Scenario scenario;
  std::size_t index = 0;
  Dimension dimension = Dimension::Forward;
  double delta = 0.0;  // new cell minus old cell; 1.0 for type swaps
};

inline double get_cell(const PlacedObject& o, Dimension d) {
  switch (d) {
    case Dimension::Forward: return o.forward;
    case Dimension::Right: return o.right;
    case Dimension::Rotation: return o.rotation;
    case Dimension::Type: return o.type_id;
  }
  return 0.0;
}

inline void set_cell(PlacedObject& o, Dimension d, double v) {
  switch (d) {
    case Dimension::Forward: o.forward = v; break;
    case Dimension::Right: o.right = v; break;
    case Dimension::Rotation: o.rotation = geo::normalize_deg(v); break;
    case Dimension::Type: o.type_id = static_cast<int>(v); break;
  }
}

namespace detail {

inline bool in_region(const PlacedObject& o, const PlacementRegion& r) {
  return r.contains(o.forward, o.right);
}

// Candidate passes if it stays in the region, changes the cell, and keeps
// every rule satisfied.
inline bool admissible(Scenario& s, std::size_t idx, Dimension dim, double value, double old,
                       const MapModel& map, const Library& lib, const PlacementRegion& region) {
  PlacedObject saved = s.objects[idx];
  set_cell(s.objects[idx], dim, value);
  bool ok = get_cell(s.objects[idx], dim) != old && in_region(s.objects[idx], region) &&
            check_rules(s, map, lib).valid();
  if (!ok) s.objects[idx] = saved;
  return ok;
}

}  // namespace detail

/// Nearest compliant value to `target` for one cell, scanning from the target
/// back toward the current value; the cell must end up different from its
/// current value. Continuous dimensions only.
inline std::optional<Scenario> project_cell(const Scenario& s, std::size_t idx, Dimension dim,
                                            double target, const MapModel& map, const Library& lib,
                                            const MutationOptions& opt = {}) {
  Scenario out = s;
  double old = get_cell(s.objects.at(idx), dim);
  double span = target - old;
  double h = opt.projection_resolution;
  int steps = static_cast<int>(std::ceil(std::fabs(span) / h));
  for (int k = 0; k < steps; ++k) {
    double v = target - std::copysign(h * k, span);
    if (detail::admissible(out, idx, dim, v, old, map, lib, opt.region)) return out;
  }
  return std::nullopt;
}

/// Changes exactly one cell of the encoded scenario and keeps it compliant.
/// Random draws are tried first; if all fail, the nearest compliant value
/// along the dimension (or the nearest type id) is used.
inline Mutation mutate_element(const Scenario& s, std::size_t idx, Dimension dim, Rng& rng,
                               const MapModel& map, const Library& lib,
                               const MutationOptions& opt = {}) {
  if (idx >= s.objects.size()) throw InvalidScenario("object index out of range");
  Mutation m;
  m.scenario = s;
  m.index = idx;
  m.dimension = dim;
  Scenario& out = m.scenario;
  const double old = get_cell(s.objects[idx], dim);

  if (dim == Dimension::Type) {
    if (lib.size() < 2) throw MutationStuck("library has a single type");
    for (int t = 0; t < opt.retries; ++t) {
      auto pick = uniform_index(rng, lib.size() - 1);
      double v = static_cast<double>(pick >= static_cast<std::size_t>(old) ? pick + 1 : pick);
      if (detail::admissible(out, idx, dim, v, old, map, lib, opt.region)) {
        m.delta = 1.0;
        return m;
      }
    }
    std::vector<int> order;
    for (std::size_t i = 0; i < lib.size(); ++i)
      if (static_cast<double>(i) != old) order.push_back(static_cast<int>(i));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::fabs(a - old) < std::fabs(b - old);
    });
    for (int v : order)
      if (detail::admissible(out, idx, dim, v, old, map, lib, opt.region)) {
        m.delta = 1.0;
        return m;
      }
    throw MutationStuck("no compliant type for object " + std::to_string(idx));
  }

  const double step = dim == Dimension::Rotation ? opt.rotation_step : opt.position_step;
  for (int t = 0; t < opt.retries; ++t) {
    double v = old + uniform(rng, -step, step);
    if (detail::admissible(out, idx, dim, v, old, map, lib, opt.region)) {
      m.delta = get_cell(out.objects[idx], dim) - old;
      return m;
    }
  }
  // Projection: closest compliant value on either side, alternating.
  double h = opt.projection_resolution;
  double reach = dim == Dimension::Rotation ? 180.0
                 : dim == Dimension::Forward ? opt.region.forward_max - opt.region.forward_min
                                             : opt.region.right_max - opt.region.right_min;
  int steps = static_cast<int>(std::ceil(reach / h));
  for (int k = 1; k <= steps; ++k) {
    for (double sign : {1.0, -1.0}) {
      if (detail::admissible(out, idx, dim, old + sign * h * k, old, map, lib, opt.region)) {
        m.delta = get_cell(out.objects[idx], dim) - old;
        return m;
      }
    }
  }
  throw MutationStuck("no compliant " + std::string(to_string(dim)) + " value for object " +
                      std::to_string(idx));
}

}  // namespace trashfuzz
