#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace roadjudge {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double k) { return {a.x * k, a.y * k}; }
  friend Vec2 operator*(double k, Vec2 a) { return {a.x * k, a.y * k}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }
/// Left-hand normal of a heading (positive lateral direction).
inline Vec2 left_normal(double heading) { return {-std::sin(heading), std::cos(heading)}; }

/// Maps any angle into (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (!std::isfinite(a)) return 0.0;
  if (a > -kPi && a <= kPi) return a;
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  if (a > kPi) a -= kTwoPi;
  return a;
}

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

inline Pose2D make_pose(double x, double y, double heading) {
  return {x, y, normalize_angle(heading)};
}

/// Expresses a world point in the frame of `frame` (x forward, y left).
inline Vec2 to_local(const Pose2D& frame, Vec2 p) {
  const Vec2 d = p - frame.position();
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

inline Vec2 to_world(const Pose2D& frame, Vec2 p) {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {frame.x + c * p.x - s * p.y, frame.y + s * p.x + c * p.y};
}

using Polygon = std::vector<Vec2>;

/// Oriented rectangle: center pose plus half extents along heading/normal.
struct OrientedBox {
  Pose2D pose;
  double half_length = 0.0;
  double half_width = 0.0;

  std::array<Vec2, 4> corners() const {
    const Vec2 f = unit_from_heading(pose.heading) * half_length;
    const Vec2 l = left_normal(pose.heading) * half_width;
    const Vec2 c = pose.position();
    return {c + f + l, c - f + l, c - f - l, c + f - l};
  }
};

/// Even-odd ray casting; boundary points may land on either side.
inline bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline bool point_in_box(Vec2 p, const OrientedBox& box) {
  const Vec2 local = to_local(box.pose, p);
  return std::abs(local.x) <= box.half_length && std::abs(local.y) <= box.half_width;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b, double* t_out = nullptr) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (t_out) *t_out = t;
  return norm(p - (a + ab * t));
}

inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  const auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
           c.y <= std::max(a.y, b.y);
  };
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

/// Separating-axis test for two oriented rectangles. Touching counts as overlap.
inline bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {unit_from_heading(a.pose.heading), left_normal(a.pose.heading),
                                    unit_from_heading(b.pose.heading), left_normal(b.pose.heading)};
  for (const Vec2 axis : axes) {
    double min_a = std::numeric_limits<double>::infinity();
    double max_a = -min_a;
    double min_b = min_a;
    double max_b = -min_a;
    for (const Vec2 c : ca) {
      const double p = dot(c, axis);
      min_a = std::min(min_a, p);
      max_a = std::max(max_a, p);
    }
    for (const Vec2 c : cb) {
      const double p = dot(c, axis);
      min_b = std::min(min_b, p);
      max_b = std::max(max_b, p);
    }
    if (max_a < min_b || max_b < min_a) return false;
  }
  return true;
}

/// Intersection test between a simple polygon and an oriented box.
inline bool polygon_intersects_box(std::span<const Vec2> poly, const OrientedBox& box) {
  if (poly.size() < 3) return false;
  const auto corners = box.corners();
  for (const Vec2 c : corners) {
    if (point_in_polygon(c, poly)) return true;
  }
  for (const Vec2 v : poly) {
    if (point_in_box(v, box)) return true;
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p1 = poly[i];
    const Vec2 p2 = poly[(i + 1) % poly.size()];
    for (std::size_t k = 0; k < 4; ++k) {
      if (segments_intersect(p1, p2, corners[k], corners[(k + 1) % 4])) return true;
    }
  }
  return false;
}

inline double point_polygon_distance(Vec2 p, std::span<const Vec2> poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() >= 3 && point_in_polygon(p, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

/// True when no two non-adjacent edges cross.
inline bool polygon_is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

/// Arc-length parameterized polyline with projection helpers.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points) : points_(std::move(points)) { rebuild(); }

  const std::vector<Vec2>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  double station(std::size_t i) const { return cumulative_[i]; }

  struct Projection {
    double s = 0.0;        // arc length of the foot point
    double lateral = 0.0;  // signed, left of travel direction positive
    double distance = std::numeric_limits<double>::infinity();
    std::size_t segment = 0;
  };

  Projection project(Vec2 p) const {
    Projection best;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      double t = 0.0;
      const double d = point_segment_distance(p, points_[i], points_[i + 1], &t);
      if (d < best.distance) {
        const Vec2 seg = points_[i + 1] - points_[i];
        const double len = norm(seg);
        best.distance = d;
        best.segment = i;
        best.s = cumulative_[i] + t * len;
        const double side = len > 0.0 ? cross(seg, p - points_[i]) / len : 0.0;
        best.lateral = side >= 0.0 ? d : -d;
      }
    }
    return best;
  }

  /// Point and tangent heading at arc length s (clamped, linear extrapolation past ends).
  Pose2D at(double s) const {
    if (points_.size() < 2) {
      return points_.empty() ? Pose2D{} : Pose2D{points_[0].x, points_[0].y, 0.0};
    }
    std::size_t i = 0;
    if (s <= 0.0) {
      i = 0;
    } else if (s >= length()) {
      i = points_.size() - 2;
    } else {
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
      i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
      i = std::min(i, points_.size() - 2);
    }
    const Vec2 a = points_[i];
    const Vec2 b = points_[i + 1];
    const double len = cumulative_[i + 1] - cumulative_[i];
    const double t = len > 0.0 ? (s - cumulative_[i]) / len : 0.0;
    const Vec2 p = a + (b - a) * t;
    return {p.x, p.y, std::atan2(b.y - a.y, b.x - a.x)};
  }

  /// Point at arc length s shifted laterally by `lateral` (left positive).
  Pose2D offset_at(double s, double lateral) const {
    Pose2D p = at(s);
    const Vec2 n = left_normal(p.heading);
    p.x += n.x * lateral;
    p.y += n.y * lateral;
    return p;
  }

 private:
  void rebuild() {
    cumulative_.assign(points_.size(), 0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      cumulative_[i] = cumulative_[i - 1] + norm(points_[i] - points_[i - 1]);
    }
  }

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

}  // namespace roadjudge
