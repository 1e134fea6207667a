#include "hullpose/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hullpose/error.hpp"

namespace hullpose::eval {

namespace {

using nlohmann::json;

constexpr std::string_view kMetricNames[3] = {"error_deg", "abs_error_deg", "runtime_ms"};

const std::optional<ErrorStats>& metric(const MethodReport& m, int i) {
  return i == 0 ? m.error : i == 1 ? m.abs_error : m.runtime_ms;
}
std::optional<ErrorStats>& metric(MethodReport& m, int i) {
  return i == 0 ? m.error : i == 1 ? m.abs_error : m.runtime_ms;
}

json stats_json(const std::optional<ErrorStats>& s) {
  if (!s) return json{{"mean", nullptr}, {"std", nullptr}, {"count", 0}};
  return json{{"mean", s->mean}, {"std", s->std}, {"count", s->count}};
}

}  // namespace

std::string_view to_string(StdConvention c) {
  return c == StdConvention::population ? "population" : "sample";
}

std::string_view to_string(WrapBoundary w) {
  return w == WrapBoundary::upper ? "(-45,45]" : "[-45,45)";
}

double signed_orientation_error_deg(double est, double gt, WrapBoundary wrap) {
  double d = est - gt;
  if (wrap == WrapBoundary::upper) {
    while (d > kHalfPi / 2.0) d -= kHalfPi;
    while (d <= -kHalfPi / 2.0) d += kHalfPi;
  } else {
    while (d >= kHalfPi / 2.0) d -= kHalfPi;
    while (d < -kHalfPi / 2.0) d += kHalfPi;
  }
  return d * kRadToDeg;
}

ErrorStats aggregate(std::span<const double> values, StdConvention convention) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "no values to aggregate");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double denom = n;
  if (convention == StdConvention::sample) denom = n - 1.0;
  ErrorStats s;
  s.mean = mean;
  s.std = denom > 0.0 ? std::sqrt(ss / denom) : 0.0;
  s.count = values.size();
  return s;
}

std::vector<std::size_t> histogram_abs(std::span<const double> abs_errors_deg) {
  std::vector<std::size_t> bins(kHistogramBins, 0);
  for (double a : abs_errors_deg) {
    const double clamped = std::clamp(a, 0.0, static_cast<double>(kHistogramBins));
    const auto i = std::min(static_cast<std::size_t>(clamped), kHistogramBins - 1);
    ++bins[i];
  }
  return bins;
}

MethodReport summarize(std::string method, std::span<const double> signed_errors_deg,
                       StdConvention convention) {
  MethodReport m;
  m.method = std::move(method);
  if (signed_errors_deg.empty()) return m;
  std::vector<double> abs_err(signed_errors_deg.size());
  std::transform(signed_errors_deg.begin(), signed_errors_deg.end(), abs_err.begin(),
                 [](double e) { return std::abs(e); });
  m.error = aggregate(signed_errors_deg, convention);
  m.abs_error = aggregate(abs_err, convention);
  m.histogram = histogram_abs(abs_err);
  return m;
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  return std::nullopt;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string emit_report(const BenchmarkReport& report, Format format) {
  if (format == Format::json) {
    json config = json::array();
    for (const auto& [k, v] : report.config) config.push_back(json::array({k, v}));
    json methods = json::array();
    for (const MethodReport& m : report.methods) {
      json metrics = json::array();
      for (int i = 0; i < 3; ++i) {
        if (i == 2 && !m.runtime_ms) continue;
        json row = stats_json(metric(m, i));
        row["metric"] = kMetricNames[i];
        metrics.push_back(row);
      }
      json hist = json::array();
      for (std::size_t b = 0; b < m.histogram.size(); ++b) {
        hist.push_back({{"bin_lo_deg", b}, {"bin_hi_deg", b + 1}, {"count", m.histogram[b]}});
      }
      methods.push_back({{"method", m.method}, {"metrics", metrics}, {"histogram", hist}});
    }
    return json{{"config", config}, {"methods", methods}}.dump(2) + "\n";
  }

  std::ostringstream os;
  for (const auto& [k, v] : report.config) os << "# " << k << '=' << v << '\n';
  os << "method,metric,mean,std,count\n";
  for (const MethodReport& m : report.methods) {
    for (int i = 0; i < 3; ++i) {
      const auto& s = metric(m, i);
      if (i == 2 && !s) continue;
      os << m.method << ',' << kMetricNames[i] << ',';
      if (s) {
        os << format_number(s->mean) << ',' << format_number(s->std) << ',' << s->count << '\n';
      } else {
        os << ",,0\n";
      }
    }
  }
  os << "method,bin_lo_deg,bin_hi_deg,count\n";
  for (const MethodReport& m : report.methods) {
    for (std::size_t b = 0; b < m.histogram.size(); ++b) {
      os << m.method << ',' << b << ',' << b + 1 << ',' << m.histogram[b] << '\n';
    }
  }
  return os.str();
}

BenchmarkReport report_from_json(std::string_view text) {
  BenchmarkReport report;
  try {
    const json doc = json::parse(text);
    for (const json& kv : doc.at("config")) {
      report.config.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    }
    for (const json& jm : doc.at("methods")) {
      MethodReport m;
      m.method = jm.at("method").get<std::string>();
      for (const json& row : jm.at("metrics")) {
        const auto name = row.at("metric").get<std::string>();
        const auto it = std::find(std::begin(kMetricNames), std::end(kMetricNames), name);
        if (it == std::end(kMetricNames)) {
          throw Error(ErrorKind::FormatError, "unknown metric " + name);
        }
        if (row.at("mean").is_null()) continue;
        metric(m, static_cast<int>(it - std::begin(kMetricNames))) =
            ErrorStats{row.at("mean").get<double>(), row.at("std").get<double>(),
                       row.at("count").get<std::size_t>()};
      }
      m.histogram.clear();
      for (const json& bin : jm.at("histogram")) m.histogram.push_back(bin.at("count").get<std::size_t>());
      report.methods.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("report json: ") + e.what());
  }
  return report;
}

void write_report(const std::filesystem::path& path, std::string_view serialized) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
  out << serialized;
  out.flush();
  if (!out) throw Error(ErrorKind::IOError, "write failed: " + path.string());
}

double FitTimer::time_fit(const Cluster3D& cluster, Criterion method) {
  if (!warm_) {
    for (std::size_t i = 0; i < warmup_; ++i) static_cast<void>(search_fit(cluster, method, delta_));
    warm_ = true;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const FitResult r = search_fit(cluster, method, delta_);
  const auto t1 = std::chrono::steady_clock::now();
  static_cast<void>(r);
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace hullpose::eval
