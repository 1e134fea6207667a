#include "hullpose/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hullpose/error.hpp"
#include "hullpose/kitti.hpp"
#include "hullpose/synth.hpp"

namespace hullpose::cli {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& items, char sep) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += sep;
    s += items[i];
  }
  return s;
}

std::string method_list(const RunConfig& config) {
  std::vector<std::string> names;
  for (Criterion c : config.methods) names.emplace_back(to_string(c));
  return join(names, ',');
}

void emit(const RunConfig& config, const eval::BenchmarkReport& report, std::ostream& out) {
  const std::string text = eval::emit_report(report, config.format);
  if (config.output.empty()) {
    out << text;
  } else {
    eval::write_report(config.output, text);
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateCluster:
    case ErrorKind::DegeneratePolygon:
      return kExitDegenerate;
    case ErrorKind::OriginInsideHull:
    case ErrorKind::NoVisibleEdge:
    case ErrorKind::EstimationFailed:
      return kExitEstimation;
    default:
      return kExitUsage;
  }
}

// Fits every method on every sample and fills the per-method report rows.
void evaluate(const RunConfig& config, const std::vector<kitti::ClusterSample>& samples,
              eval::BenchmarkReport& report, std::ostream& err) {
  const double delta = config.delta_deg * kDegToRad;
  for (Criterion method : config.methods) {
    std::vector<double> errors;
    std::vector<const Cluster3D*> fitted;
    errors.reserve(samples.size());
    std::size_t failed = 0;
    for (const kitti::ClusterSample& s : samples) {
      try {
        const FitResult fit = search_fit(s.cluster, method, delta);
        errors.push_back(
            eval::signed_orientation_error_deg(fit.theta_star, s.gt_yaw_canonical, config.wrap));
        fitted.push_back(&s.cluster);
      } catch (const Error&) {
        ++failed;
      }
    }
    eval::MethodReport row =
        eval::summarize(std::string(to_string(method)), errors, config.std_convention);
    if (config.timing && !fitted.empty()) {
      eval::FitTimer timer(delta);
      std::vector<double> ms;
      ms.reserve(fitted.size());
      for (const Cluster3D* c : fitted) ms.push_back(timer.time_fit(*c, method));
      row.runtime_ms = eval::aggregate(ms, config.std_convention);
    }
    report.config.emplace_back("failed." + row.method, std::to_string(failed));
    if (failed) err << row.method << ": " << failed << " cluster(s) could not be fitted\n";
    report.methods.push_back(std::move(row));
  }
}

void echo_common(const RunConfig& config, std::string command, eval::BenchmarkReport& report) {
  report.config.emplace_back("command", std::move(command));
  report.config.emplace_back("methods", method_list(config));
  report.config.emplace_back("delta_deg", eval::format_number(config.delta_deg));
  report.config.emplace_back("std", std::string(eval::to_string(config.std_convention)));
  report.config.emplace_back("error_wrap_deg", std::string(eval::to_string(config.wrap)));
  report.config.emplace_back("timing", config.timing ? "single-threaded" : "off");
}

}  // namespace

void validate(const RunConfig& config) {
  if (!(config.delta_deg > 0.0 && config.delta_deg < 90.0)) {
    throw Error(ErrorKind::InvalidArgument, "--delta-deg must lie in (0, 90)");
  }
  if (config.min_points < 2) throw Error(ErrorKind::InvalidArgument, "--min-points must be >= 2");
  if (config.methods.empty()) throw Error(ErrorKind::InvalidArgument, "no method given");
  if (!(config.sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "--sigma must be >= 0");
  if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "--dropout must lie in [0, 1)");
  }
  if (!(config.resolution_deg > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "--resolution-deg must be > 0");
  }
}

std::vector<int> parse_frame_list(const std::string& text) {
  std::vector<int> frames;
  auto to_int = [&](std::string_view tok) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || v < 0) {
      throw Error(ErrorKind::InvalidArgument, "bad frame token '" + std::string(tok) + "'");
    }
    return v;
  };
  std::string_view rest = text;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    std::string_view tok = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (tok.empty()) continue;
    const std::size_t dash = tok.find('-');
    if (dash == std::string_view::npos) {
      frames.push_back(to_int(tok));
    } else {
      const int lo = to_int(tok.substr(0, dash));
      const int hi = to_int(tok.substr(dash + 1));
      if (hi < lo) throw Error(ErrorKind::InvalidArgument, "empty frame range");
      for (int i = lo; i <= hi; ++i) frames.push_back(i);
    }
  }
  return frames;
}

Cluster3D read_cluster_file(const std::filesystem::path& path) {
  Cluster3D cluster;
  if (path.extension() == ".bin") {
    for (const auto& p : kitti::read_scan_file(path).points) cluster.points.push_back({p.x, p.y, p.z});
    return cluster;
  }
  const std::string text = kitti::read_text_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    double v[3];
    std::size_t count = 0;
    bool ok = true;
    std::string_view rest(line);
    while (ok && count < 4) {
      const std::size_t comma = rest.find(',');
      std::string_view tok = rest.substr(0, comma);
      while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
      while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.remove_suffix(1);
      double d = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
      ok = ec == std::errc{} && ptr == tok.data() + tok.size() && std::isfinite(d);
      if (ok && count < 3) v[count] = d;
      ++count;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (!ok || count != 3) {
      // A single leading header row is tolerated.
      if (cluster.points.empty() && n == 1 && line.find_first_of("xyzXYZ") != std::string::npos) {
        continue;
      }
      throw Error(ErrorKind::FormatError,
                  path.string() + ":" + std::to_string(n) + ": expected three numbers x,y,z");
    }
    cluster.points.push_back({v[0], v[1], v[2]});
  }
  return cluster;
}

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Cluster3D cluster;
  try {
    validate(config);
    cluster = read_cluster_file(config.input);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  json results = json::array();
  try {
    for (Criterion method : config.methods) {
      const FitResult fit = search_fit(cluster, method, config.delta_deg * kDegToRad);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      std::size_t finite = 0;
      for (const ScorePoint& p : fit.score_curve) {
        if (!std::isfinite(p.score)) continue;
        ++finite;
        lo = std::min(lo, p.score);
        hi = std::max(hi, p.score);
      }
      results.push_back(
          {{"method", to_string(method)},
           {"theta_deg", fit.theta_star * kRadToDeg},
           {"best_index", fit.best_index},
           {"box",
            {{"center", {fit.box.center.x, fit.box.center.y, fit.box.center.z}},
             {"extent_e1", fit.box.extent_e1},
             {"extent_e2", fit.box.extent_e2},
             {"height", fit.box.height},
             {"yaw_deg", fit.box.yaw * kRadToDeg}}},
           {"score_curve",
            {{"orientations", fit.score_curve.size()},
             {"finite", finite},
             {"min", lo},
             {"max", hi}}}});
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  out << (results.size() == 1 ? results[0] : results).dump(2) << '\n';
  return kExitOk;
}

int cmd_bench_kitti(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    std::vector<std::string> ids;
    if (config.frames.empty()) {
      ids = kitti::list_frames(config.dataset_root);
    } else {
      for (int f : config.frames) ids.push_back(kitti::frame_id(f));
    }
    if (ids.empty()) {
      err << "error: no frames to evaluate under " << config.dataset_root.string() << '\n';
      return kExitUsage;
    }
    kitti::ExtractionOptions opts;
    opts.classes = config.classes;
    opts.min_points = config.min_points;
    std::vector<kitti::ClusterSample> samples;
    std::size_t considered = 0;
    std::size_t dropped = 0;
    std::size_t sparse = 0;
    for (const std::string& id : ids) {
      const kitti::Frame frame = kitti::load_frame(config.dataset_root, id);
      auto res = kitti::extract_clusters(frame.scan, frame.labels, frame.calib, opts, id);
      considered += res.considered;
      dropped += res.dropped_empty;
      sparse += res.skipped_sparse;
      std::move(res.samples.begin(), res.samples.end(), std::back_inserter(samples));
    }
    err << "frames=" << ids.size() << " objects=" << considered << " empty=" << dropped
        << " sparse=" << sparse << " evaluated=" << samples.size() << '\n';

    eval::BenchmarkReport report;
    echo_common(config, "bench-kitti", report);
    report.config.emplace_back("classes", join(config.classes, ','));
    report.config.emplace_back("min_points", std::to_string(config.min_points));
    report.config.emplace_back("frames", std::to_string(ids.size()));
    report.config.emplace_back("objects", std::to_string(considered));
    report.config.emplace_back("skipped_empty", std::to_string(dropped));
    report.config.emplace_back("skipped_sparse", std::to_string(sparse));
    report.config.emplace_back("clusters", std::to_string(samples.size()));
    evaluate(config, samples, report, err);
    emit(config, report, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_bench_synth(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    const std::size_t scenes = config.trials.value_or(1000);
    std::mt19937_64 rng(config.seed);
    synth::ScanConfig scan;
    scan.angular_resolution = config.resolution_deg * kDegToRad;
    scan.noise_sigma = config.sigma;
    scan.dropout = config.dropout;
    std::vector<kitti::ClusterSample> samples;
    std::size_t empty = 0;
    std::size_t sparse = 0;
    for (std::size_t i = 0; i < scenes; ++i) {
      const synth::VehicleSpec spec = synth::random_two_side_scene(rng);
      scan.seed = rng();
      try {
        auto s = synth::simulate_scan(spec, scan);
        if (s.cluster.points.size() < config.min_points) {
          ++sparse;
          continue;
        }
        s.object_index = static_cast<int>(i);
        samples.push_back(std::move(s));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyScan) throw;
        ++empty;
      }
    }
    eval::BenchmarkReport report;
    echo_common(config, "bench-synth", report);
    report.config.emplace_back("seed", std::to_string(config.seed));
    report.config.emplace_back("scenes", std::to_string(scenes));
    report.config.emplace_back("sigma_m", eval::format_number(config.sigma));
    report.config.emplace_back("dropout", eval::format_number(config.dropout));
    report.config.emplace_back("resolution_deg", eval::format_number(config.resolution_deg));
    report.config.emplace_back("min_points", std::to_string(config.min_points));
    report.config.emplace_back("skipped_empty", std::to_string(empty));
    report.config.emplace_back("skipped_sparse", std::to_string(sparse));
    report.config.emplace_back("clusters", std::to_string(samples.size()));
    evaluate(config, samples, report, err);
    emit(config, report, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_oracle_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const std::size_t trials = config.trials.value_or(500);
  const auto region = config.sensor_ray_region ? synth::OracleRegion::sensor_rays
                                               : synth::OracleRegion::projection_sweep;
  std::mt19937_64 rng(config.seed);
  double max_dev = 0.0;
  double max_ratio = 0.0;
  std::size_t breaches = 0;
  std::size_t edge_mismatches = 0;
  std::size_t corner_trials = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const synth::OracleTrial trial = synth::random_oracle_trial(rng);
    const std::uint64_t mc_seed = rng();
    const VisibleWedge wedge = boundary_points(trial.hull);
    const OrientedRectFrame rect = rect_from_theta(trial.hull, trial.theta);
    for (Side side : {Side::left, Side::right}) {
      const auto ray = synth::first_ray_crossing(rect, wedge, side);
      if (ray.corner_hit) {
        ++corner_trials;
      } else if (ray.edge != select_projection_edge(rect, wedge, side)) {
        ++edge_mismatches;
      }
    }
    const double analytic = occlusion_score(trial.hull, rect, wedge);
    const auto mc =
        synth::occlusion_area_oracle(trial.hull, rect, wedge, config.mc_samples, mc_seed, region);
    const double dev = std::abs(analytic - mc.area);
    const double tol = std::max(config.tol_area_frac * rect.area(), config.tol_sigmas * mc.standard_error);
    max_dev = std::max(max_dev, dev);
    if (tol > 0.0) max_ratio = std::max(max_ratio, dev / tol);
    if (!(dev <= tol)) {
      ++breaches;
      if (breaches <= 5) {
        err << "trial " << i << ": analytic " << eval::format_number(analytic) << " oracle "
            << eval::format_number(mc.area) << " tolerance " << eval::format_number(tol) << '\n';
      }
    }
  }
  const bool pass = breaches == 0 && edge_mismatches == 0;
  out << "trials=" << trials << " samples=" << config.mc_samples
      << " region=" << (config.sensor_ray_region ? "sensor-rays" : "projection-sweep")
      << " max_deviation=" << eval::format_number(max_dev)
      << " max_deviation_over_tolerance=" << eval::format_number(max_ratio)
      << " failures=" << breaches << " edge_mismatches=" << edge_mismatches
      << " corner_rays=" << corner_trials << ' ' << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitFailure;
}

}  // namespace hullpose::cli
