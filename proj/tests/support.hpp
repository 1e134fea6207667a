#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hullpose/geometry.hpp"
#include "hullpose/pose.hpp"

namespace hullpose::testing {

inline std::vector<Vec2> random_disk(std::mt19937_64& rng, std::size_t n, Vec2 center,
                                     double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> pts;
  while (pts.size() < n) {
    const Vec2 d{u(rng), u(rng)};
    if (dot(d, d) <= 1.0) pts.push_back(center + radius * d);
  }
  return pts;
}

// Point p is a hull vertex iff no triangle of other points contains it.
inline std::vector<Vec2> brute_force_hull_vertices(const std::vector<Vec2>& pts) {
  const std::size_t n = pts.size();
  auto in_triangle = [](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    const double d1 = orient(a, b, p);
    const double d2 = orient(b, c, p);
    const double d3 = orient(c, a, p);
    const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(neg && pos);
  };
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < n; ++i) {
    bool inside = false;
    for (std::size_t a = 0; a < n && !inside; ++a) {
      if (a == i) continue;
      for (std::size_t b = a + 1; b < n && !inside; ++b) {
        if (b == i) continue;
        for (std::size_t c = b + 1; c < n && !inside; ++c) {
          if (c == i) continue;
          if (orient(pts[a], pts[b], pts[c]) == 0.0) continue;
          inside = in_triangle(pts[i], pts[a], pts[b], pts[c]);
        }
      }
    }
    if (!inside) out.push_back(pts[i]);
  }
  return out;
}

inline bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

inline std::vector<Vec2> sorted(std::vector<Vec2> v) {
  std::sort(v.begin(), v.end(), lex_less);
  return v;
}

inline Cluster3D lift(const std::vector<Vec2>& pts, double z0 = 0.0, double z1 = 1.5) {
  Cluster3D c;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    c.points.push_back({pts[i].x, pts[i].y, i % 2 ? z1 : z0});
  }
  return c;
}

}  // namespace hullpose::testing
