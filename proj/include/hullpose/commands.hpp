#pragma once

// Subcommand implementations behind the hullpose executable. Each returns a
// process exit code and writes only to the streams it is given.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hullpose/baselines.hpp"
#include "hullpose/eval.hpp"

namespace hullpose::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitEstimation = 4;

struct RunConfig {
  std::vector<Criterion> methods{Criterion::occlusion_min};
  double delta_deg = 0.5;
  std::filesystem::path dataset_root;
  std::vector<std::string> classes{"Car", "Van", "Truck"};
  std::size_t min_points = 5;
  /// Empty writes the report to the output stream.
  std::filesystem::path output;
  eval::Format format = eval::Format::csv;
  std::uint64_t seed = 42;
  /// Frame indices for bench-kitti; empty means every labelled frame.
  std::vector<int> frames;
  std::optional<std::size_t> trials;
  std::size_t mc_samples = 100000;

  // bench-synth scene model
  double sigma = 0.0;
  double dropout = 0.0;
  double resolution_deg = 0.1;

  bool timing = true;
  eval::StdConvention std_convention = eval::StdConvention::population;
  eval::WrapBoundary wrap = eval::WrapBoundary::upper;

  // oracle-check
  double tol_area_frac = 0.02;
  double tol_sigmas = 3.0;
  bool sensor_ray_region = false;

  /// fit input: CSV rows x,y,z or a velodyne .bin blob.
  std::filesystem::path input;
};

/// Throws Error(InvalidArgument) when a field is out of range.
void validate(const RunConfig& config);

/// Parses "0-9", "3,5,8" or mixtures such as "0-3,7".
std::vector<int> parse_frame_list(const std::string& text);

Cluster3D read_cluster_file(const std::filesystem::path& path);

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench_kitti(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench_synth(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_oracle_check(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace hullpose::cli
