#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "hullpose/error.hpp"
#include "hullpose/eval.hpp"
#include "hullpose/synth.hpp"

namespace hullpose::eval {
namespace {

double err(double est_deg, double gt_deg, WrapBoundary w = WrapBoundary::upper) {
  return signed_orientation_error_deg(est_deg * kDegToRad, gt_deg * kDegToRad, w);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

BenchmarkReport sample_report(std::uint64_t seed, std::size_t methods) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 2.0);
  BenchmarkReport r;
  r.config = {{"command", "bench-synth"}, {"delta_deg", "0.5"}, {"std", "population"}};
  for (std::size_t m = 0; m < methods; ++m) {
    std::vector<double> e;
    for (int i = 0; i < 100; ++i) e.push_back(std::clamp(g(rng), -45.0, 45.0));
    MethodReport mr = summarize(m == 0 ? "occlusion_min" : "area_min", e);
    mr.runtime_ms = aggregate(std::vector<double>{0.1, 0.2 + 1e-3 * static_cast<double>(m)});
    r.methods.push_back(mr);
  }
  return r;
}

TEST(SignedError, Examples) {
  EXPECT_NEAR(err(10, 12), -2.0, 1e-9);
  EXPECT_NEAR(err(89, 1), -2.0, 1e-9);
  EXPECT_NEAR(err(1, 89), 2.0, 1e-9);
  const double q = kHalfPi / 2.0;
  EXPECT_NEAR(signed_orientation_error_deg(0.0, q), 45.0, 1e-12);
  EXPECT_NEAR(signed_orientation_error_deg(q, 0.0), 45.0, 1e-12);
  EXPECT_NEAR(signed_orientation_error_deg(0.0, q, WrapBoundary::lower), -45.0, 1e-12);
  EXPECT_NEAR(signed_orientation_error_deg(q, 0.0, WrapBoundary::lower), -45.0, 1e-12);
}

TEST(SignedError, BoundedAndAntisymmetric) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, kHalfPi);
  for (int i = 0; i < 100000; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    const double e = signed_orientation_error_deg(a, b);
    ASSERT_GT(e, -45.0);
    ASSERT_LE(e, 45.0);
    const double l = signed_orientation_error_deg(a, b, WrapBoundary::lower);
    ASSERT_GE(l, -45.0);
    ASSERT_LT(l, 45.0);
    if (std::abs(std::abs(e) - 45.0) > 1e-9) {
      EXPECT_NEAR(e, -signed_orientation_error_deg(b, a), 1e-9);
      EXPECT_NEAR(e, l, 1e-9);
    }
    // the wrapped difference is congruent to est - gt modulo 90 degrees
    const double raw = (a - b) * kRadToDeg;
    const double k = (raw - e) / 90.0;
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
}

TEST(Aggregate, Examples) {
  const ErrorStats s = aggregate(std::vector<double>{1, 2, 3});
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_NEAR(s.std, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_EQ(s.count, 3u);
  const ErrorStats one = aggregate(std::vector<double>{5});
  EXPECT_EQ(one.mean, 5.0);
  EXPECT_EQ(one.std, 0.0);
  EXPECT_EQ(one.count, 1u);
  EXPECT_NEAR(aggregate(std::vector<double>{1, 2, 3}, StdConvention::sample).std, 1.0, 1e-15);
  try {
    aggregate(std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
  }
}

TEST(Aggregate, StandardNormalSample) {
  std::mt19937_64 rng(62);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(10000);
  for (double& x : v) x = g(rng);
  const ErrorStats s = aggregate(v);
  EXPECT_NEAR(s.mean, 0.0, 0.05);
  EXPECT_GE(s.std, 0.95);
  EXPECT_LE(s.std, 1.05);
}

TEST(Aggregate, PermutationInvariant) {
  std::mt19937_64 rng(63);
  std::normal_distribution<double> g(3.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + trial * 7);
    for (double& x : v) x = g(rng);
    const ErrorStats a = aggregate(v);
    std::shuffle(v.begin(), v.end(), rng);
    const ErrorStats b = aggregate(v);
    EXPECT_NEAR(a.mean, b.mean, 1e-12 * std::max(1.0, std::abs(a.mean)));
    EXPECT_NEAR(a.std, b.std, 1e-12 * std::max(1.0, a.std));
    EXPECT_EQ(a.count, b.count);
  }
}

TEST(Histogram, SumsToCountAndBinsCorrectly) {
  const auto h = histogram_abs(std::vector<double>{0.0, 0.5, 1.0, 44.2, 45.0});
  ASSERT_EQ(h.size(), kHistogramBins);
  EXPECT_EQ(h[0], 2u);
  EXPECT_EQ(h[1], 1u);
  EXPECT_EQ(h[44], 2u);
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> u(0.0, 45.0);
  std::vector<double> v(5000);
  for (double& x : v) x = u(rng);
  const auto hv = histogram_abs(v);
  EXPECT_EQ(std::accumulate(hv.begin(), hv.end(), std::size_t{0}), v.size());
}

TEST(Summarize, AbsoluteErrorIsMagnitude) {
  const MethodReport r = summarize("x", std::vector<double>{-2.0, 1.0, 3.0});
  ASSERT_TRUE(r.error && r.abs_error);
  EXPECT_DOUBLE_EQ(r.error->mean, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.abs_error->mean, 2.0);
  EXPECT_EQ(std::accumulate(r.histogram.begin(), r.histogram.end(), std::size_t{0}),
            r.abs_error->count);
}

TEST(EmitReport, CsvSchema) {
  const BenchmarkReport r = sample_report(1, 1);
  const auto lines = lines_of(emit_report(r, Format::csv));
  std::size_t metric_rows = 0, hist_rows = 0;
  bool header = false, hist_header = false;
  for (const std::string& l : lines) {
    if (l == "method,metric,mean,std,count") header = true;
    if (l == "method,bin_lo_deg,bin_hi_deg,count") hist_header = true;
    if (l.rfind("occlusion_min,", 0) == 0) {
      const auto commas = std::count(l.begin(), l.end(), ',');
      (commas == 4 ? metric_rows : hist_rows) += 1;
    }
  }
  EXPECT_TRUE(header);
  EXPECT_TRUE(hist_header);
  EXPECT_EQ(metric_rows, 3u);
  EXPECT_EQ(hist_rows, 45u);
  EXPECT_NE(std::find(lines.begin(), lines.end(), "occlusion_min,44,45," +
                                                      std::to_string(r.methods[0].histogram[44])),
            lines.end());
}

TEST(EmitReport, ByteStableAndJsonRoundTrip) {
  for (std::size_t methods : {1u, 2u}) {
    const BenchmarkReport a = sample_report(7, methods);
    const BenchmarkReport b = sample_report(7, methods);
    EXPECT_EQ(emit_report(a, Format::csv), emit_report(b, Format::csv));
    EXPECT_EQ(emit_report(a, Format::json), emit_report(b, Format::json));
    const BenchmarkReport back = report_from_json(emit_report(a, Format::json));
    EXPECT_EQ(back, a);
    EXPECT_EQ(emit_report(back, Format::csv), emit_report(a, Format::csv));
  }
  BenchmarkReport partial = sample_report(8, 1);
  partial.methods[0].runtime_ms.reset();
  EXPECT_EQ(report_from_json(emit_report(partial, Format::json)), partial);
}

TEST(EmitReport, FormatNames) {
  EXPECT_EQ(parse_format("csv"), Format::csv);
  EXPECT_EQ(parse_format("json"), Format::json);
  EXPECT_FALSE(parse_format("xml"));
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(WriteReport, UnwritablePathIsIoError) {
  try {
    write_report("/nonexistent-dir/sub/report.csv", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IOError);
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Cluster3D ring(std::size_t n, double radius) {
  Cluster3D c;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    c.points.push_back({20.0 + radius * std::cos(a), 5.0 + radius * std::sin(a), 0.5 * (i % 2)});
  }
  return c;
}

TEST(TimeFit, StableRepeatedTiming) {
  synth::VehicleSpec spec;
  spec.yaw = 0.5;
  const auto s = synth::simulate_scan(spec, {});
  FitTimer timer;
  std::vector<double> t;
  for (int i = 0; i < 200; ++i) t.push_back(timer.time_fit(s.cluster, Criterion::occlusion_min));
  // Trim scheduler outliers before the stability check.
  std::sort(t.begin(), t.end());
  t.resize(180);
  const ErrorStats st = aggregate(t);
  EXPECT_GT(st.mean, 0.0);
  EXPECT_LT(st.std / st.mean, 0.5);
}

TEST(TimeFit, LargerHullTakesLonger) {
  const Cluster3D small = ring(8, 2.0);
  const Cluster3D large = ring(100, 2.0);
  FitTimer timer;
  std::vector<double> ts, tl;
  for (int i = 0; i < 101; ++i) {
    ts.push_back(timer.time_fit(small, Criterion::occlusion_min));
    tl.push_back(timer.time_fit(large, Criterion::occlusion_min));
  }
  EXPECT_GT(median(tl), median(ts));
}

}  // namespace
}  // namespace hullpose::eval
