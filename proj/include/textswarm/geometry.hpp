#pragma once

#include <cmath>
#include <numbers>

namespace textswarm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

// Axis-aligned rectangle, closed on the boundary. "Interior" means the open set.
struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  constexpr bool valid() const { return min_x < max_x && min_y < max_y; }
  constexpr bool interior_contains(Vec2 p) const {
    return p.x > min_x && p.x < max_x && p.y > min_y && p.y < max_y;
  }
  constexpr bool inside(const Rect& outer) const {
    return min_x >= outer.min_x && max_x <= outer.max_x && min_y >= outer.min_y &&
           max_y <= outer.max_y;
  }
  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

// Wraps to [0, 2pi).
inline double normalize_heading(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

}  // namespace textswarm
