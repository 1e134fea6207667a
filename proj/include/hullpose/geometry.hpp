#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#ifndef HULLPOSE_DUPLICATE_TOLERANCE
#define HULLPOSE_DUPLICATE_TOLERANCE 1e-9
#endif
#ifndef HULLPOSE_TURN_TOLERANCE
#define HULLPOSE_TURN_TOLERANCE 1e-12
#endif

namespace hullpose {

/// Points closer than this (meters) are the same point.
inline constexpr double kDuplicateTolerance = HULLPOSE_DUPLICATE_TOLERANCE;
/// Cross products at or below this (square meters) are not a left turn.
inline constexpr double kTurnTolerance = HULLPOSE_TURN_TOLERANCE;
/// Determinant below which two unit-normal lines are treated as parallel.
inline constexpr double kParallelTolerance = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
/// Twice the signed area of triangle (o, a, b); positive for a left turn.
constexpr double orient(Vec2 o, Vec2 a, Vec2 b) { return cross(a - o, b - o); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Line {p : a*p.x + b*p.y = c} with unit normal (a, b).
struct LineNF {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;

  /// Unit direction along the line, (b, -a).
  Vec2 direction() const { return {b, -a}; }
  Vec2 normal() const { return {a, b}; }

  /// Line through two distinct points; the normal is the left-hand normal of q - p.
  static LineNF through(Vec2 p, Vec2 q);
};

/// Counter-clockwise, strictly convex polygon; a 2-vertex hull is a segment.
struct Hull {
  std::vector<Vec2> points;

  std::size_t size() const { return points.size(); }
  const Vec2& operator[](std::size_t i) const { return points[i]; }
  /// Cyclic index wrap, accepting any signed offset.
  std::size_t wrap(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(points.size());
    return static_cast<std::size_t>(((i % n) + n) % n);
  }
  /// True if p lies inside or on the hull boundary (within tol meters).
  bool contains(Vec2 p, double tol = 0.0) const;
};

Hull convex_hull(std::span<const Vec2> points);

std::optional<Vec2> line_intersection(const LineNF& l1, const LineNF& l2);

inline double signed_distance(Vec2 p, const LineNF& l) { return l.a * p.x + l.b * p.y - l.c; }

double polygon_area(std::span<const Vec2> vertices);

}  // namespace hullpose
