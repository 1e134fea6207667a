#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hullpose/baselines.hpp"
#include "hullpose/pose.hpp"

namespace hullpose::eval {

enum class StdConvention { population, sample };
/// Which end of the +-45 degree wrap interval is closed.
enum class WrapBoundary { upper, lower };

std::string_view to_string(StdConvention c);
std::string_view to_string(WrapBoundary w);

struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
  friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

/// est - gt in degrees, wrapped by multiples of 90 into (-45, 45] (upper) or
/// [-45, 45) (lower). Inputs are canonical yaws in radians.
double signed_orientation_error_deg(double est, double gt,
                                    WrapBoundary wrap = WrapBoundary::upper);

ErrorStats aggregate(std::span<const double> values,
                     StdConvention convention = StdConvention::population);

inline constexpr std::size_t kHistogramBins = 45;

/// Counts of absolute errors in 1 degree bins over [0, 45]; 45 falls in the last bin.
std::vector<std::size_t> histogram_abs(std::span<const double> abs_errors_deg);

struct MethodReport {
  std::string method;
  std::optional<ErrorStats> error;
  std::optional<ErrorStats> abs_error;
  std::optional<ErrorStats> runtime_ms;
  std::vector<std::size_t> histogram = std::vector<std::size_t>(kHistogramBins, 0);
  friend bool operator==(const MethodReport&, const MethodReport&) = default;
};

struct BenchmarkReport {
  /// Echoed configuration and bookkeeping, in emission order.
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<MethodReport> methods;
  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

/// Fills error, abs_error and histogram from per-cluster signed errors.
MethodReport summarize(std::string method, std::span<const double> signed_errors_deg,
                       StdConvention convention = StdConvention::population);

enum class Format { csv, json };
std::optional<Format> parse_format(std::string_view name);

std::string emit_report(const BenchmarkReport& report, Format format);
BenchmarkReport report_from_json(std::string_view text);
void write_report(const std::filesystem::path& path, std::string_view serialized);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// Wall-clock timing of single fits. The first call runs `warmup` untimed fits
/// before measuring.
class FitTimer {
 public:
  explicit FitTimer(double delta = kDefaultDelta, std::size_t warmup = 10)
      : delta_(delta), warmup_(warmup) {}

  double time_fit(const Cluster3D& cluster, Criterion method);

 private:
  double delta_;
  std::size_t warmup_;
  bool warm_ = false;
};

}  // namespace hullpose::eval
