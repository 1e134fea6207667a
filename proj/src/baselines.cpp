#include "hullpose/baselines.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "hullpose/error.hpp"

namespace hullpose {

namespace {

kernels::Extents extents_of(const OrientedRectFrame& rect) {
  return {rect.edges[0].c, rect.edges[2].c, rect.edges[1].c, rect.edges[3].c};
}

struct PointSoA {
  std::vector<double> xs;
  std::vector<double> ys;
  explicit PointSoA(const std::vector<Vec2>& pts) {
    xs.reserve(pts.size());
    ys.reserve(pts.size());
    for (const Vec2& p : pts) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
  }
};

double closeness_of(const PointSoA& soa, const OrientedRectFrame& rect) {
  const double c = std::cos(rect.theta);
  const double s = std::sin(rect.theta);
  return -kernels::closeness_sum(soa.xs, soa.ys, c, s, extents_of(rect), kClosenessFloor);
}

double variance_of(const PointSoA& soa, const OrientedRectFrame& rect) {
  const double c = std::cos(rect.theta);
  const double s = std::sin(rect.theta);
  const kernels::Extents ext = extents_of(rect);
  const kernels::GroupMoments first = kernels::variance_moments(soa.xs, soa.ys, c, s, ext, 0, 0);
  const double mean0 = first.count[0] > 0 ? first.sum[0] / first.count[0] : 0.0;
  const double mean1 = first.count[1] > 0 ? first.sum[1] / first.count[1] : 0.0;
  const kernels::GroupMoments second =
      kernels::variance_moments(soa.xs, soa.ys, c, s, ext, mean0, mean1);
  double total = 0.0;
  for (int g = 0; g < 2; ++g) {
    if (second.count[g] > 1.0) total += second.sq_dev[g] / (second.count[g] - 1.0);
  }
  return total;
}

}  // namespace

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::area_min: return "area_min";
    case Criterion::closeness_max: return "closeness_max";
    case Criterion::variance_min: return "variance_min";
    case Criterion::occlusion_min: return "occlusion_min";
  }
  return "unknown";
}

std::optional<Criterion> parse_criterion(std::string_view name) {
  for (Criterion c : {Criterion::area_min, Criterion::closeness_max, Criterion::variance_min,
                      Criterion::occlusion_min}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

double score_area(const Hull& /*hull*/, const OrientedRectFrame& rect) { return rect.area(); }

double score_closeness(const Cluster2D& points, const OrientedRectFrame& rect) {
  if (points.points.empty()) throw Error(ErrorKind::EmptyInput, "closeness needs points");
  return closeness_of(PointSoA(points.points), rect);
}

double score_variance(const Cluster2D& points, const OrientedRectFrame& rect) {
  if (points.points.size() < 2) throw Error(ErrorKind::EmptyInput, "variance needs 2 points");
  return variance_of(PointSoA(points.points), rect);
}

FitResult search_fit(const Cluster3D& cluster, Criterion criterion, double delta) {
  if (criterion == Criterion::occlusion_min) return estimate_pose(cluster, delta);

  const std::size_t steps = theta_grid_size(delta);
  const Cluster2D flat = project_to_plane(cluster);
  const Hull hull = convex_hull(flat.points);
  const HullSoA hull_soa(hull);
  const PointSoA all(flat.points);

  FitResult result;
  result.score_curve.reserve(steps);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < steps; ++k) {
    const double theta = static_cast<double>(k) * delta;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double score = 0.0;
    if (criterion == Criterion::area_min) {
      const auto rect = rect_from_extents(theta, kernels::project_extents(hull_soa.xs, hull_soa.ys, c, s));
      score = score_area(hull, rect);
    } else {
      const auto rect = rect_from_extents(theta, kernels::project_extents(all.xs, all.ys, c, s));
      score = criterion == Criterion::closeness_max ? closeness_of(all, rect) : variance_of(all, rect);
    }
    result.score_curve.push_back({theta, score});
    if (score < best) {
      best = score;
      result.best_index = k;
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorKind::EstimationFailed, "no finite score");
  result.theta_star = result.score_curve[result.best_index].theta;
  result.box = assemble_box3d(rect_from_theta(hull, result.theta_star), flat.z_min, flat.z_max);
  return result;
}

}  // namespace hullpose
