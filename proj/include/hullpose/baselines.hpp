#pragma once

#include <optional>
#include <string_view>

#include "hullpose/pose.hpp"

namespace hullpose {

enum class Criterion { area_min, closeness_max, variance_min, occlusion_min };

std::string_view to_string(Criterion criterion);
std::optional<Criterion> parse_criterion(std::string_view name);

/// Distance floor for the closeness criterion (meters).
inline constexpr double kClosenessFloor = 0.01;

/// Rectangle area. Smaller is better.
double score_area(const Hull& hull, const OrientedRectFrame& rect);
/// Negated closeness: -sum 1 / max(d, kClosenessFloor) over all points, with d
/// the distance to the nearest side. Smaller is better.
double score_closeness(const Cluster2D& points, const OrientedRectFrame& rect);
/// Sum of the sample variances of nearest-side distances within the e1-side
/// and e2-side groups. Smaller is better.
double score_variance(const Cluster2D& points, const OrientedRectFrame& rect);

/// Grid search over [0, pi/2) with the chosen criterion. occlusion_min
/// delegates to estimate_pose.
FitResult search_fit(const Cluster3D& cluster, Criterion criterion, double delta = kDefaultDelta);

}  // namespace hullpose
