#pragma once

// Planar geometry for placement rules: points, segments, polylines and
// simple polygons, with exact minimum-distance queries.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace trashfuzz::geo {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double k) { return {a.x * k, a.y * k}; }
  friend Vec2 operator*(double k, Vec2 a) { return {a.x * k, a.y * k}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Counter-clockwise rotation by `deg` degrees.
inline Vec2 rotate(Vec2 v, double deg) {
  double c = std::cos(deg2rad(deg)), s = std::sin(deg2rad(deg));
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline double normalize_deg(double d) {
  double r = std::fmod(d, 360.0);
  if (r < 0) r += 360.0;
  if (r >= 360.0) r = 0.0;
  return r;
}

/// Closest point to p on segment ab.
inline Vec2 closest_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  return dist(p, closest_on_segment(p, a, b));
}

inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
  double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

inline bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(c, a, b)) return true;
  if (o2 == 0 && on_segment(d, a, b)) return true;
  if (o3 == 0 && on_segment(a, c, d)) return true;
  if (o4 == 0 && on_segment(b, c, d)) return true;
  return false;
}

inline double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

/// A point (1 vertex), open polyline (closed = false) or simple polygon.
struct Shape {
  std::vector<Vec2> pts;
  bool closed = false;

  static Shape point(Vec2 p) { return Shape{{p}, false}; }
  static Shape segment(Vec2 a, Vec2 b) { return Shape{{a, b}, false}; }
  static Shape polyline(std::vector<Vec2> pts) { return Shape{std::move(pts), false}; }
  static Shape polygon(std::vector<Vec2> pts) { return Shape{std::move(pts), true}; }

  std::size_t edge_count() const {
    if (pts.size() < 2) return 0;
    return closed ? pts.size() : pts.size() - 1;
  }
  Vec2 edge_a(std::size_t i) const { return pts[i]; }
  Vec2 edge_b(std::size_t i) const { return pts[(i + 1) % pts.size()]; }
};

/// Even-odd containment; points on the boundary count as inside.
inline bool contains(const Shape& poly, Vec2 p) {
  if (!poly.closed || poly.pts.size() < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = poly.pts.size() - 1; i < poly.pts.size(); j = i++) {
    Vec2 a = poly.pts[i], b = poly.pts[j];
    if (orientation(a, b, p) == 0 && on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
      inside = !inside;
  }
  return inside;
}

inline double distance(const Shape& s, Vec2 p) {
  if (s.pts.empty()) return std::numeric_limits<double>::infinity();
  if (s.pts.size() == 1) return dist(s.pts[0], p);
  if (contains(s, p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.edge_count(); ++i)
    best = std::min(best, point_segment_distance(p, s.edge_a(i), s.edge_b(i)));
  return best;
}

/// Minimum Euclidean distance between two shapes; 0 when they touch,
/// overlap, or one contains the other.
inline double distance(const Shape& a, const Shape& b) {
  if (a.pts.empty() || b.pts.empty()) return std::numeric_limits<double>::infinity();
  if (a.pts.size() == 1) return distance(b, a.pts[0]);
  if (b.pts.size() == 1) return distance(a, b.pts[0]);
  if (contains(a, b.pts[0]) || contains(b, a.pts[0])) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.edge_count(); ++i)
    for (std::size_t j = 0; j < b.edge_count(); ++j) {
      best = std::min(best, segment_distance(a.edge_a(i), a.edge_b(i), b.edge_a(j), b.edge_b(j)));
      if (best == 0.0) return 0.0;
    }
  return best;
}

/// Closest point on a polyline (or polygon boundary) to p.
inline Vec2 closest_point(const Shape& s, Vec2 p) {
  if (s.pts.size() == 1) return s.pts[0];
  Vec2 best = s.pts.front();
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.edge_count(); ++i) {
    Vec2 c = closest_on_segment(p, s.edge_a(i), s.edge_b(i));
    double d = dist(c, p);
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  return best;
}

/// Rectangle of size width x depth centred at c; width runs along the local
/// x axis, which is rotated `deg` degrees counter-clockwise.
inline Shape oriented_rect(Vec2 c, double width, double depth, double deg) {
  Vec2 u = rotate({width / 2, 0}, deg);
  Vec2 v = rotate({0, depth / 2}, deg);
  return Shape::polygon({c - u - v, c + u - v, c + u + v, c - u + v});
}

inline Shape axis_rect(double x0, double y0, double x1, double y1) {
  return Shape::polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

/// Arc-length parametrization of an open polyline.
class Polyline {
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> pts) : pts_(std::move(pts)) {
    cum_.assign(pts_.size(), 0.0);
    for (std::size_t i = 1; i < pts_.size(); ++i) cum_[i] = cum_[i - 1] + dist(pts_[i - 1], pts_[i]);
  }

  const std::vector<Vec2>& points() const { return pts_; }
  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }

  /// Arc length of the point on the polyline nearest to p.
  double project(Vec2 p) const {
    double best_d = std::numeric_limits<double>::infinity(), best_s = 0.0;
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      Vec2 c = closest_on_segment(p, pts_[i], pts_[i + 1]);
      double d = dist(c, p);
      if (d < best_d) {
        best_d = d;
        best_s = cum_[i] + dist(pts_[i], c);
      }
    }
    return best_s;
  }

  Vec2 at(double s) const {
    if (pts_.size() == 1 || s <= 0.0) return pts_.front();
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      if (s <= cum_[i + 1]) {
        double seg = cum_[i + 1] - cum_[i];
        double t = seg > 0 ? (s - cum_[i]) / seg : 0.0;
        return pts_[i] + (pts_[i + 1] - pts_[i]) * t;
      }
    }
    return pts_.back();
  }

  /// Heading in degrees of the segment containing arc length s.
  double heading_deg(double s) const {
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      if (s <= cum_[i + 1] || i + 2 == pts_.size()) {
        Vec2 d = pts_[i + 1] - pts_[i];
        return rad2deg(std::atan2(d.y, d.x));
      }
    }
    return 0.0;
  }

  /// Signed lateral offset of p, positive to the left of travel direction.
  double lateral(Vec2 p) const {
    double s = project(p);
    Vec2 base = at(s);
    Vec2 dir = rotate({1, 0}, heading_deg(s));
    return cross(dir, p - base);
  }

private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

}  // namespace trashfuzz::geo
