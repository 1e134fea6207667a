#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "hullpose/geometry.hpp"
#include "hullpose/kernels.hpp"

namespace hullpose {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
/// Default orientation grid resolution: 0.5 degrees.
inline constexpr double kDefaultDelta = 0.5 * kDegToRad;
/// A ray crossing within this distance (meters) of a rectangle corner is a
/// corner hit rather than an edge hit.
inline constexpr double kVertexCoincidence = 1e-6;

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Object points in the sensor frame; the sensor sits at the origin.
struct Cluster3D {
  std::vector<Point3> points;
};

struct Cluster2D {
  std::vector<Vec2> points;
  double z_min = 0.0;
  double z_max = 0.0;
};

/// Candidate rectangle for orientation theta.
///
/// Edges 0 and 2 have normal e1 = (cos t, sin t) with c = min / max of the
/// hull projections onto e1; edges 1 and 3 have normal e2 = (-sin t, cos t)
/// with c = min / max onto e2. Vertex i is the corner shared by edges i and
/// i + 1, so edge i runs from vertex i - 1 to vertex i. Vertices are CCW.
struct OrientedRectFrame {
  double theta = 0.0;
  std::array<LineNF, 4> edges{};
  std::array<Vec2, 4> vertices{};

  double extent_e1() const { return edges[2].c - edges[0].c; }
  double extent_e2() const { return edges[3].c - edges[1].c; }
  double area() const { return extent_e1() * extent_e2(); }
  /// Signed distance to the edge with the interior on the positive side.
  double inward_distance(Vec2 p, int edge) const;
};

enum class Side { left, right };

/// Sector seen from the sensor between the rays through the hull vertices of
/// minimum (left) and maximum (right) azimuth. Azimuths are measured relative
/// to the direction of the hull's vertex centroid, so the sector never
/// straddles the +-pi cut.
struct VisibleWedge {
  std::size_t left_index = 0;
  std::size_t right_index = 0;
  Vec2 left_point;
  Vec2 right_point;
  LineNF left_ray;
  LineNF right_ray;
  Vec2 center_direction{1.0, 0.0};
  double left_azimuth = 0.0;
  double right_azimuth = 0.0;

  double relative_azimuth(Vec2 p) const;
  std::size_t index(Side side) const { return side == Side::left ? left_index : right_index; }
  Vec2 point(Side side) const { return side == Side::left ? left_point : right_point; }
};

struct ScorePoint {
  double theta = 0.0;
  double score = 0.0;
};

struct Box3D {
  Point3 center;
  double extent_e1 = 0.0;
  double extent_e2 = 0.0;
  double height = 0.0;
  double yaw = 0.0;
};

struct FitResult {
  double theta_star = 0.0;
  std::size_t best_index = 0;
  std::vector<ScorePoint> score_curve;
  Box3D box;
};

/// Edge chosen for one boundary ray, with whether the choice went through the
/// corner rule (ray crossing at a rectangle vertex).
struct EdgeSelection {
  int edge = -1;
  bool corner_hit = false;
  int corner = -1;
};

Cluster2D project_to_plane(const Cluster3D& cluster);

/// Number of grid orientations k * delta in [0, pi/2).
std::size_t theta_grid_size(double delta);

OrientedRectFrame rect_from_extents(double theta, const kernels::Extents& extents);
OrientedRectFrame rect_from_theta(const Hull& hull, double theta);

VisibleWedge boundary_points(const Hull& hull);

bool is_visible(Vec2 p, const VisibleWedge& wedge);

EdgeSelection select_projection_edge_detail(const OrientedRectFrame& rect,
                                            const VisibleWedge& wedge, Side side);
int select_projection_edge(const OrientedRectFrame& rect, const VisibleWedge& wedge, Side side);

double occlusion_area(const Hull& hull, const OrientedRectFrame& rect, const VisibleWedge& wedge,
                      int proj_left, int proj_right);

/// Full score for one candidate rectangle; +infinity when no projection edge
/// can be selected.
double occlusion_score(const Hull& hull, const OrientedRectFrame& rect, const VisibleWedge& wedge);

Box3D assemble_box3d(const OrientedRectFrame& rect, double z_min, double z_max);

FitResult estimate_pose(const Cluster3D& cluster, double delta = kDefaultDelta);

/// Hull vertices split into coordinate arrays for the projection kernels.
struct HullSoA {
  std::vector<double> xs;
  std::vector<double> ys;
  explicit HullSoA(const Hull& hull);
};

}  // namespace hullpose
