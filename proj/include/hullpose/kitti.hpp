#pragma once

// KITTI object-detection ingestion: velodyne scans, training labels, and
// calibration, plus extraction of per-object clusters from the labelled boxes.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hullpose/kernels.hpp"
#include "hullpose/pose.hpp"

namespace hullpose::kitti {

struct ScanPoint {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float reflectance = 0.0f;
  friend bool operator==(const ScanPoint&, const ScanPoint&) = default;
};

struct RawScan {
  std::vector<ScanPoint> points;
};

struct LabelRecord {
  std::string object_type;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox2d{};
  double height = 0.0;  // h
  double width = 0.0;   // w
  double length = 0.0;  // l
  std::array<double, 3> location{};  // bottom-face center, rectified camera frame
  double rotation_y = 0.0;

  bool dont_care() const { return object_type == "DontCare"; }
};

struct CalibMatrices {
  std::array<double, 12> velo_to_cam{};   // 3x4 row-major
  std::array<double, 9> rect_rotation{};  // 3x3 row-major

  /// Velodyne -> rectified camera, R0_rect * Tr_velo_to_cam.
  kernels::Affine3 velo_to_rect() const;
};

struct ClusterSample {
  std::string frame_id;
  int object_index = 0;
  Cluster3D cluster;
  double gt_yaw_canonical = 0.0;
};

struct ExtractionOptions {
  std::vector<std::string> classes{"Car", "Van", "Truck"};
  std::size_t min_points = 5;
  /// Boundary inclusion slack (meters).
  double tolerance = 1e-6;
};

struct ExtractionResult {
  std::vector<ClusterSample> samples;
  std::size_t considered = 0;  // labels of an included class
  std::size_t dropped_empty = 0;
  std::size_t skipped_sparse = 0;
};

RawScan read_scan(std::span<const std::byte> bytes);
RawScan read_scan_file(const std::filesystem::path& path);
std::vector<std::byte> write_scan(const RawScan& scan);
void write_scan_file(const RawScan& scan, const std::filesystem::path& path);

std::vector<LabelRecord> parse_labels(std::string_view text);
std::string format_label(const LabelRecord& label);

CalibMatrices parse_calib(std::string_view text);
std::string format_calib(const CalibMatrices& calib);

/// ry reduced modulo pi/2 into [0, pi/2).
double canonicalize_yaw(double ry);

/// Heading angle in the velodyne x-y plane of a label's rotation_y.
double sensor_yaw(double rotation_y, const CalibMatrices& calib);

ExtractionResult extract_clusters(const RawScan& scan, std::span<const LabelRecord> labels,
                                  const CalibMatrices& calib, const ExtractionOptions& options,
                                  std::string_view frame_id = {});

struct Frame {
  std::string id;
  RawScan scan;
  std::vector<LabelRecord> labels;
  CalibMatrices calib;
};

/// Frame ids (six-digit stems) present under root/label_2, sorted.
std::vector<std::string> list_frames(const std::filesystem::path& root);
std::string frame_id(int index);
Frame load_frame(const std::filesystem::path& root, const std::string& id);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace hullpose::kitti
