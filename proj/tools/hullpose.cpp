// hullpose: vehicle pose from LiDAR clusters, benchmarks and oracle checks.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hullpose/commands.hpp"
#include "hullpose/error.hpp"

namespace {

using hullpose::cli::RunConfig;

struct Flags {
  std::vector<std::string> methods{"occlusion_min"};
  std::vector<std::string> classes{"Car", "Van", "Truck"};
  std::string format = "csv";
  std::string frames;
  std::size_t trials = 0;
  std::string std_convention = "population";
  std::string wrap = "upper";
};

void add_common(CLI::App* sub, RunConfig& cfg, Flags& flags) {
  sub->add_option("--method", flags.methods,
                  "Comma-separated criteria: occlusion_min, area_min, closeness_max, variance_min")
      ->delimiter(',');
  sub->add_option("--delta-deg", cfg.delta_deg, "Orientation grid step in degrees");
}

void add_report(CLI::App* sub, RunConfig& cfg, Flags& flags) {
  sub->add_option("--output", cfg.output, "Report path (stdout when omitted)");
  sub->add_option("--format", flags.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--no-timing{false}", cfg.timing, "Skip the runtime pass (byte-stable reports)");
  sub->add_option("--std", flags.std_convention, "Standard deviation convention")
      ->check(CLI::IsMember({"population", "sample"}));
  sub->add_option("--wrap", flags.wrap,
                  "Closed end of the error interval: upper (-45,45] or lower [-45,45)")
      ->check(CLI::IsMember({"upper", "lower"}));
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  Flags flags;

  CLI::App app{"Vehicle pose estimation from LiDAR clusters by minimum occlusion area", "hullpose"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Fit one cluster (CSV x,y,z rows or velodyne .bin) and print JSON");
  fit->add_option("input", cfg.input, "Cluster file")->required();
  add_common(fit, cfg, flags);

  auto* kitti = app.add_subcommand("bench-kitti", "Evaluate methods on a KITTI-layout dataset");
  add_common(kitti, cfg, flags);
  add_report(kitti, cfg, flags);
  kitti->add_option("--dataset-root", cfg.dataset_root,
                    "Directory holding velodyne/, label_2/ and calib/")
      ->required();
  kitti->add_option("--classes", flags.classes, "Comma-separated object classes")->delimiter(',');
  kitti->add_option("--min-points", cfg.min_points, "Minimum points per cluster");
  kitti->add_option("--frames", flags.frames, "Frame indices, e.g. 0-99 or 3,5,8 (all when omitted)");

  auto* bench = app.add_subcommand("bench-synth", "Evaluate methods on seeded synthetic scans");
  add_common(bench, cfg, flags);
  add_report(bench, cfg, flags);
  bench->add_option("--seed", cfg.seed, "Random seed");
  bench->add_option("--trials", flags.trials, "Number of scenes (0 means 1000)");
  bench->add_option("--sigma", cfg.sigma, "Radial range noise (meters)");
  bench->add_option("--dropout", cfg.dropout, "Per-ray dropout probability");
  bench->add_option("--resolution-deg", cfg.resolution_deg, "Angular resolution of the scan");
  bench->add_option("--min-points", cfg.min_points, "Minimum points per cluster");

  auto* oracle = app.add_subcommand(
      "oracle-check", "Compare analytic occlusion areas with Monte-Carlo estimates");
  oracle->add_option("--seed", cfg.seed, "Random seed");
  oracle->add_option("--trials", flags.trials, "Number of random (hull, theta) trials (0 means 500)");
  oracle->add_option("--mc-samples", cfg.mc_samples, "Monte-Carlo samples per trial")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--tol-area-frac", cfg.tol_area_frac,
                     "Allowed deviation as a fraction of the rectangle area");
  oracle->add_option("--tol-sigmas", cfg.tol_sigmas,
                     "Allowed deviation in estimator standard errors");
  oracle->add_flag("--sensor-ray-region", cfg.sensor_ray_region,
                   "Sample the region in front of the hull along sensor rays instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hullpose::cli::kExitUsage;
  }

  try {
    cfg.methods.clear();
    for (const std::string& m : flags.methods) {
      const auto c = hullpose::parse_criterion(m);
      if (!c) throw hullpose::Error(hullpose::ErrorKind::InvalidArgument, "unknown method '" + m + "'");
      cfg.methods.push_back(*c);
    }
    cfg.classes = flags.classes;
    cfg.format = *hullpose::eval::parse_format(flags.format);
    if (!flags.frames.empty()) cfg.frames = hullpose::cli::parse_frame_list(flags.frames);
    if (flags.trials > 0) cfg.trials = flags.trials;
    cfg.std_convention = flags.std_convention == "sample" ? hullpose::eval::StdConvention::sample
                                                          : hullpose::eval::StdConvention::population;
    cfg.wrap = flags.wrap == "lower" ? hullpose::eval::WrapBoundary::lower
                                     : hullpose::eval::WrapBoundary::upper;
  } catch (const hullpose::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hullpose::cli::kExitUsage;
  }

  if (fit->parsed()) return hullpose::cli::cmd_fit(cfg, std::cout, std::cerr);
  if (kitti->parsed()) return hullpose::cli::cmd_bench_kitti(cfg, std::cout, std::cerr);
  if (bench->parsed()) return hullpose::cli::cmd_bench_synth(cfg, std::cout, std::cerr);
  return hullpose::cli::cmd_oracle_check(cfg, std::cout, std::cerr);
}
