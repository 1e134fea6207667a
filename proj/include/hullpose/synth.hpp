#pragma once

// Simulated single-sensor scans of rectangular vehicles, random test scenes,
// and independent reference computations (ray casting, Monte-Carlo occlusion
// area) used to check the estimator.

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "hullpose/kitti.hpp"
#include "hullpose/pose.hpp"

namespace hullpose::synth {

struct VehicleSpec {
  double length = 4.5;
  double width = 1.8;
  Vec2 center{15.0, 0.0};
  /// Heading of the length axis, any angle.
  double yaw = 0.0;

  std::array<Vec2, 4> corners() const;
};

struct ScanConfig {
  double angular_resolution = 0.1 * kDegToRad;
  double noise_sigma = 0.0;
  double dropout = 0.0;
  std::uint64_t seed = 42;
};

/// Height band of simulated returns (meters).
inline constexpr double kBandTop = 1.5;

kitti::ClusterSample simulate_scan(const VehicleSpec& spec, const ScanConfig& config);

/// Random vehicle placed so that exactly two of its faces are visible.
VehicleSpec random_two_side_scene(std::mt19937_64& rng);

/// A hull and an orientation for oracle comparisons. The sensor is outside
/// the hull and both boundary rays have a projection edge.
struct OracleTrial {
  Hull hull;
  double theta = 0.0;
};

OracleTrial random_oracle_trial(std::mt19937_64& rng);

struct RayCrossing {
  int edge = -1;
  bool corner_hit = false;
  int corner = -1;
  double t = 0.0;
};

/// First crossing of the ray from the origin through `through` with the
/// rectangle boundary, found by intersecting parametrized segments. A crossing
/// within kVertexCoincidence of a corner resolves to the adjacent edge that
/// runs into the wedge, then the one facing the sensor. Returns edge = -1 when
/// the ray misses.
RayCrossing first_ray_crossing(const OrientedRectFrame& rect, const VisibleWedge& wedge,
                               Side side);

enum class OracleRegion {
  /// Points between each projection edge and the sensor-facing hull chain,
  /// swept along the edge.
  projection_sweep,
  /// Points inside the wedge, outside the hull, and in front of the hull
  /// along their sensor ray.
  sensor_rays,
};

struct OracleEstimate {
  double area = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

OracleEstimate occlusion_area_oracle(const Hull& hull, const OrientedRectFrame& rect,
                                     const VisibleWedge& wedge, std::size_t samples,
                                     std::uint64_t seed,
                                     OracleRegion region = OracleRegion::projection_sweep);

/// Writes scenes in the KITTI layout under root (velodyne/, label_2/, calib/),
/// one vehicle per frame.
struct ExportedScene {
  VehicleSpec spec;
  kitti::ClusterSample sample;
};

/// Calibration used by exported datasets.
kitti::CalibMatrices synthetic_calib();
kitti::LabelRecord label_for(const VehicleSpec& spec);
void export_dataset(const std::filesystem::path& root, const std::vector<ExportedScene>& scenes);

}  // namespace hullpose::synth
