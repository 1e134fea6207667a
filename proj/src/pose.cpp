#include "hullpose/pose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hullpose/error.hpp"

namespace hullpose {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int wrap4(int i) { return ((i % 4) + 4) % 4; }

// Edge e is a min-side line (0, 1) or a max-side line (2, 3).
bool is_min_side(int edge) { return edge < 2; }

// The sensor (origin) lies strictly outside the rectangle across this edge.
bool faces_sensor(const OrientedRectFrame& rect, int edge) {
  const double c = rect.edges[static_cast<std::size_t>(edge)].c;
  return is_min_side(edge) ? c > 0.0 : c < 0.0;
}

// Among the two edges meeting at a corner crossed by the boundary ray, prefer
// the one running into the wedge, then the one facing the sensor.
int edge_at_corner(const OrientedRectFrame& rect, const VisibleWedge& wedge, Side side,
                   int corner) {
  const LineNF& ray = side == Side::left ? wedge.left_ray : wedge.right_ray;
  const Vec2 other = wedge.point(side == Side::left ? Side::right : Side::left);
  const double wedge_side = signed_distance(other, ray);

  const int candidates[2] = {corner, wrap4(corner + 1)};
  // far endpoint of edge `corner` is vertex corner-1; of edge corner+1 it is corner+1
  const Vec2 far_ends[2] = {rect.vertices[static_cast<std::size_t>(wrap4(corner - 1))],
                            rect.vertices[static_cast<std::size_t>(wrap4(corner + 1))]};
  int best = candidates[0];
  int best_rank = -1;
  for (int k = 0; k < 2; ++k) {
    const double s = signed_distance(far_ends[k], ray);
    const bool into_wedge = std::abs(s) > kDuplicateTolerance && (s > 0.0) == (wedge_side > 0.0);
    const int rank = 2 * static_cast<int>(into_wedge) + static_cast<int>(faces_sensor(rect, candidates[k]));
    if (rank > best_rank) {
      best_rank = rank;
      best = candidates[k];
    }
  }
  return best;
}

std::optional<EdgeSelection> try_select_edge(const OrientedRectFrame& rect,
                                             const VisibleWedge& wedge, Side side) {
  const Vec2 boundary = wedge.point(side);
  const double boundary_len = norm(boundary);
  const Vec2 dir{boundary.x / boundary_len, boundary.y / boundary_len};
  const LineNF& ray = side == Side::left ? wedge.left_ray : wedge.right_ray;

  int corner = -1;
  double corner_t = kInf;
  for (int k = 0; k < 4; ++k) {
    if (distance(boundary, rect.vertices[static_cast<std::size_t>(k)]) <= kVertexCoincidence) {
      corner = k;
      corner_t = dot(boundary, dir);
      break;
    }
  }
  const bool boundary_is_corner = corner >= 0;

  int edge = -1;
  double edge_t = kInf;
  std::array<double, 4> miss;
  miss.fill(kInf);
  for (int e = 0; e < 4; ++e) {
    if (boundary_is_corner && (e == corner || e == wrap4(corner + 1))) continue;
    const auto hit = line_intersection(rect.edges[static_cast<std::size_t>(e)], ray);
    if (!hit) continue;
    const Vec2 end = rect.vertices[static_cast<std::size_t>(e)];
    const Vec2 start = rect.vertices[static_cast<std::size_t>(wrap4(e - 1))];
    const double d_end = distance(*hit, end);
    const double d_start = distance(*hit, start);
    const double len = distance(start, end);
    miss[static_cast<std::size_t>(e)] = std::abs(std::max(d_end, d_start) - len);
    const double t = dot(*hit, dir);
    if (t <= 0.0) continue;
    if (std::min(d_end, d_start) <= kVertexCoincidence) {
      if (t < corner_t) {
        corner_t = t;
        corner = d_end <= d_start ? e : wrap4(e - 1);
      }
    } else if (std::max(d_end, d_start) < len && t < edge_t) {
      edge_t = t;
      edge = e;
    }
  }

  if (edge < 0 && corner < 0) {
    // Near-miss fallback: the ray grazes a corner that neither edge claimed.
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return miss[static_cast<std::size_t>(a)] < miss[static_cast<std::size_t>(b)];
    });
    const int a = order[0];
    const int b = order[1];
    if (!std::isfinite(miss[static_cast<std::size_t>(b)])) return std::nullopt;
    if (wrap4(a + 1) == b) {
      corner = a;
    } else if (wrap4(b + 1) == a) {
      corner = b;
    } else {
      return std::nullopt;
    }
    corner_t = 0.0;
  }

  if (corner >= 0 && corner_t <= edge_t) {
    return EdgeSelection{edge_at_corner(rect, wedge, side, corner), true, corner};
  }
  return EdgeSelection{edge, false, -1};
}

struct PassResult {
  double signed_area = 0.0;
  std::size_t gap = 0;
};

// Walks hull chords from `start` towards `stop`, accumulating trapezoids
// between each chord and the projection line. Stops when a chord's extent
// along the line reverses sign relative to the previous one, when `stop` is
// reached, or after max_chords chords. gap counts the chords left between the
// break vertex and `stop`.
PassResult trapezoid_pass(const Hull& hull, const LineNF& line, std::size_t start,
                          std::size_t stop, int step, std::size_t max_chords) {
  PassResult out;
  const Vec2 along = line.direction();
  std::size_t idx = start;
  double last_height = 0.0;
  for (std::size_t it = 0; it < max_chords; ++it) {
    if (idx == stop) break;
    const std::size_t next = hull.wrap(static_cast<std::ptrdiff_t>(idx) + step);
    const double height = dot(hull[next] - hull[idx], along);
    if (idx != start && height * last_height < 0.0) break;
    const double upper = std::abs(signed_distance(hull[idx], line));
    const double lower = std::abs(signed_distance(hull[next], line));
    out.signed_area += (upper + lower) * height * 0.5;
    if (height != 0.0) last_height = height;
    idx = next;
  }
  while (idx != stop) {
    idx = hull.wrap(static_cast<std::ptrdiff_t>(idx) + step);
    ++out.gap;
  }
  return out;
}

OrientedRectFrame rect_from_hull_soa(const HullSoA& soa, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return rect_from_extents(theta, kernels::project_extents(soa.xs, soa.ys, c, s));
}

}  // namespace

HullSoA::HullSoA(const Hull& hull) {
  xs.reserve(hull.size());
  ys.reserve(hull.size());
  for (const Vec2& p : hull.points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
}

double OrientedRectFrame::inward_distance(Vec2 p, int edge) const {
  const double d = signed_distance(p, edges[static_cast<std::size_t>(edge)]);
  return is_min_side(edge) ? d : -d;
}

double VisibleWedge::relative_azimuth(Vec2 p) const {
  return std::atan2(cross(center_direction, p), dot(center_direction, p));
}

Cluster2D project_to_plane(const Cluster3D& cluster) {
  if (cluster.points.size() < 2) {
    throw Error(ErrorKind::DegenerateCluster,
                "cluster has " + std::to_string(cluster.points.size()) + " point(s)");
  }
  Cluster2D out;
  out.points.reserve(cluster.points.size());
  out.z_min = cluster.points.front().z;
  out.z_max = cluster.points.front().z;
  for (const Point3& p : cluster.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorKind::InvalidArgument, "non-finite cluster point");
    }
    out.points.push_back({p.x, p.y});
    out.z_min = std::min(out.z_min, p.z);
    out.z_max = std::max(out.z_max, p.z);
  }
  return out;
}

std::size_t theta_grid_size(double delta) {
  if (!(delta > 0.0) || !(delta < kHalfPi) || !std::isfinite(delta)) {
    throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, pi/2)");
  }
  // The relative slack keeps 90 / 0.5 from rounding up to 181.
  return static_cast<std::size_t>(std::ceil(kHalfPi / delta - 1e-9));
}

OrientedRectFrame rect_from_extents(double theta, const kernels::Extents& ext) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  OrientedRectFrame r;
  r.theta = theta;
  r.edges[0] = {c, s, ext.min1};
  r.edges[1] = {-s, c, ext.min2};
  r.edges[2] = {c, s, ext.max1};
  r.edges[3] = {-s, c, ext.max2};
  const Vec2 e1{c, s};
  const Vec2 e2{-s, c};
  r.vertices[0] = ext.min1 * e1 + ext.min2 * e2;
  r.vertices[1] = ext.max1 * e1 + ext.min2 * e2;
  r.vertices[2] = ext.max1 * e1 + ext.max2 * e2;
  r.vertices[3] = ext.min1 * e1 + ext.max2 * e2;
  return r;
}

OrientedRectFrame rect_from_theta(const Hull& hull, double theta) {
  if (hull.size() < 2) throw Error(ErrorKind::DegenerateCluster, "hull needs 2 vertices");
  return rect_from_hull_soa(HullSoA(hull), theta);
}

VisibleWedge boundary_points(const Hull& hull) {
  if (hull.size() < 2) throw Error(ErrorKind::DegenerateCluster, "hull needs 2 vertices");
  if (hull.contains({0.0, 0.0}, kDuplicateTolerance)) {
    throw Error(ErrorKind::OriginInsideHull, "sensor origin lies inside or on the hull");
  }
  Vec2 centroid{};
  for (const Vec2& p : hull.points) centroid = centroid + p;
  const double len = norm(centroid);
  if (!(len > 0.0)) throw Error(ErrorKind::OriginInsideHull, "hull centroid at the origin");

  VisibleWedge w;
  w.center_direction = {centroid.x / len, centroid.y / len};
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 p = hull[i];
    const double az = w.relative_azimuth(p);
    // Equal azimuth: keep the vertex nearer the sensor.
    if (az < lo || (az == lo && norm(p) < norm(hull[w.left_index]))) {
      lo = az;
      w.left_index = i;
    }
    if (az > hi || (az == hi && norm(p) < norm(hull[w.right_index]))) {
      hi = az;
      w.right_index = i;
    }
  }
  w.left_point = hull[w.left_index];
  w.right_point = hull[w.right_index];
  w.left_azimuth = lo;
  w.right_azimuth = hi;
  w.left_ray = LineNF::through({0.0, 0.0}, w.left_point);
  w.right_ray = LineNF::through({0.0, 0.0}, w.right_point);
  return w;
}

bool is_visible(Vec2 p, const VisibleWedge& wedge) {
  const double az = wedge.relative_azimuth(p);
  return az >= wedge.left_azimuth && az <= wedge.right_azimuth;
}

EdgeSelection select_projection_edge_detail(const OrientedRectFrame& rect,
                                            const VisibleWedge& wedge, Side side) {
  if (auto sel = try_select_edge(rect, wedge, side)) return *sel;
  throw Error(ErrorKind::NoVisibleEdge, "no rectangle edge crosses the boundary ray");
}

int select_projection_edge(const OrientedRectFrame& rect, const VisibleWedge& wedge, Side side) {
  return select_projection_edge_detail(rect, wedge, side).edge;
}

double occlusion_area(const Hull& hull, const OrientedRectFrame& rect, const VisibleWedge& wedge,
                      int proj_left, int proj_right) {
  // The hull is CCW, so the sensor-facing chain runs forward from the
  // max-azimuth vertex to the min-azimuth vertex.
  const PassResult right =
      trapezoid_pass(hull, rect.edges[static_cast<std::size_t>(proj_right)], wedge.right_index,
                     wedge.left_index, +1, hull.size());
  const PassResult left =
      trapezoid_pass(hull, rect.edges[static_cast<std::size_t>(proj_left)], wedge.left_index,
                     wedge.right_index, -1, right.gap);
  return std::abs(right.signed_area) + std::abs(left.signed_area);
}

double occlusion_score(const Hull& hull, const OrientedRectFrame& rect, const VisibleWedge& wedge) {
  const auto left = try_select_edge(rect, wedge, Side::left);
  const auto right = try_select_edge(rect, wedge, Side::right);
  if (!left || !right) return kInf;
  return occlusion_area(hull, rect, wedge, left->edge, right->edge);
}

Box3D assemble_box3d(const OrientedRectFrame& rect, double z_min, double z_max) {
  Box3D box;
  Vec2 sum{};
  for (const Vec2& v : rect.vertices) sum = sum + v;
  box.center = {sum.x * 0.25, sum.y * 0.25, (z_max + z_min) * 0.5};
  box.extent_e1 = rect.extent_e1();
  box.extent_e2 = rect.extent_e2();
  box.height = z_max - z_min;
  box.yaw = rect.theta;
  return box;
}

FitResult estimate_pose(const Cluster3D& cluster, double delta) {
  const std::size_t steps = theta_grid_size(delta);
  const Cluster2D flat = project_to_plane(cluster);
  const Hull hull = convex_hull(flat.points);
  const VisibleWedge wedge = boundary_points(hull);
  const HullSoA soa(hull);

  FitResult result;
  result.score_curve.reserve(steps);
  double best = kInf;
  for (std::size_t k = 0; k < steps; ++k) {
    const double theta = static_cast<double>(k) * delta;
    const OrientedRectFrame rect = rect_from_hull_soa(soa, theta);
    const double score = occlusion_score(hull, rect, wedge);
    result.score_curve.push_back({theta, score});
    if (score < best) {
      best = score;
      result.best_index = k;
    }
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorKind::EstimationFailed, "no orientation produced a valid projection edge");
  }
  result.theta_star = result.score_curve[result.best_index].theta;
  result.box = assemble_box3d(rect_from_hull_soa(soa, result.theta_star), flat.z_min, flat.z_max);
  return result;
}

}  // namespace hullpose
