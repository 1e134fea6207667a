#include "hullpose/geometry.hpp"

#include <algorithm>
#include <string>

#include "hullpose/error.hpp"

namespace hullpose {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateCluster: return "DegenerateCluster";
    case ErrorKind::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorKind::OriginInsideHull: return "OriginInsideHull";
    case ErrorKind::NoVisibleEdge: return "NoVisibleEdge";
    case ErrorKind::EstimationFailed: return "EstimationFailed";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::EmptyScan: return "EmptyScan";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::IOError: return "IOError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

LineNF LineNF::through(Vec2 p, Vec2 q) {
  const Vec2 d = q - p;
  const double len = norm(d);
  if (!(len > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "line through coincident points");
  }
  const Vec2 n{-d.y / len, d.x / len};
  return {n.x, n.y, dot(n, p)};
}

bool Hull::contains(Vec2 p, double tol) const {
  const std::size_t n = points.size();
  if (n == 0) return false;
  if (n == 1) return distance(p, points[0]) <= tol;
  if (n == 2) {
    const Vec2 a = points[0];
    const Vec2 b = points[1];
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab) <= tol;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = points[i];
    const Vec2 b = points[(i + 1) % n];
    // signed distance of p to edge a->b, positive on the interior (left) side
    if (orient(a, b, p) / distance(a, b) < -tol) return false;
  }
  return true;
}

// Graham scan. Pivot is the lowest-y point (lowest x on ties); the rest are
// sorted by polar angle about the pivot, nearer points first on equal angle.
Hull convex_hull(std::span<const Vec2> input) {
  for (const Vec2& p : input) {
    if (!is_finite(p)) throw Error(ErrorKind::InvalidArgument, "non-finite point");
  }
  if (input.empty()) throw Error(ErrorKind::DegenerateCluster, "no points");

  const auto pivot_it = std::min_element(input.begin(), input.end(), [](Vec2 a, Vec2 b) {
    return a.y < b.y || (a.y == b.y && a.x < b.x);
  });
  const Vec2 pivot = *pivot_it;

  struct Keyed {
    double angle;
    double dist2;
    Vec2 p;
  };
  std::vector<Keyed> rest;
  rest.reserve(input.size());
  for (const Vec2& p : input) {
    const Vec2 d = p - pivot;
    if (norm(d) <= kDuplicateTolerance) continue;
    rest.push_back({std::atan2(d.y, d.x), dot(d, d), p});
  }
  if (rest.empty()) throw Error(ErrorKind::DegenerateCluster, "fewer than 2 distinct points");

  // Total order on the keys so the result does not depend on input order.
  std::sort(rest.begin(), rest.end(), [](const Keyed& a, const Keyed& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    if (a.p.x != b.p.x) return a.p.x < b.p.x;
    return a.p.y < b.p.y;
  });

  // Angle keys of nearly collinear points are only accurate to rounding, so
  // points on one ray may arrive in any order. A collinear triple (within the
  // turn tolerance) drops whichever point lies between the other two.
  std::vector<Vec2> stack;
  stack.reserve(rest.size() + 1);
  stack.push_back(pivot);
  for (const Keyed& k : rest) {
    const Vec2 p = k.p;
    if (distance(stack.back(), p) <= kDuplicateTolerance) continue;
    bool keep = true;
    while (stack.size() >= 2) {
      const Vec2 s2 = stack[stack.size() - 2];
      const Vec2 s1 = stack.back();
      const double turn = orient(s2, s1, p);
      if (turn > kTurnTolerance) break;
      if (turn >= -kTurnTolerance && dot(s2 - s1, p - s1) > 0.0) {
        if (dot(s1 - p, s2 - p) <= 0.0) {
          keep = false;
          break;
        }
        if (stack.size() > 2) {
          stack.erase(stack.end() - 2);
          continue;
        }
      }
      stack.pop_back();
    }
    if (keep) stack.push_back(p);
  }
  // Close the loop: drop vertices collinear with the edge back to the pivot.
  while (stack.size() >= 3) {
    const Vec2 s2 = stack[stack.size() - 2];
    const Vec2 s1 = stack.back();
    const double turn = orient(s2, s1, pivot);
    if (turn > kTurnTolerance) break;
    if (turn >= -kTurnTolerance && dot(s1 - s2, pivot - s2) <= 0.0) {
      stack.erase(stack.end() - 2);
    } else {
      stack.pop_back();
    }
  }

  return Hull{std::move(stack)};
}

std::optional<Vec2> line_intersection(const LineNF& l1, const LineNF& l2) {
  const double det = l1.a * l2.b - l2.a * l1.b;
  if (std::abs(det) < kParallelTolerance) return std::nullopt;
  return Vec2{(l1.c * l2.b - l2.c * l1.b) / det, (l1.a * l2.c - l2.a * l1.c) / det};
}

double polygon_area(std::span<const Vec2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw Error(ErrorKind::DegeneratePolygon, "polygon needs at least 3 vertices");
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(vertices[i], vertices[(i + 1) % n]);
  }
  return std::abs(twice) * 0.5;
}

}  // namespace hullpose
