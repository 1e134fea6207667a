#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hullpose/error.hpp"
#include "hullpose/synth.hpp"

namespace hullpose::synth {
namespace {

double boundary_distance(const VehicleSpec& spec, Vec2 p) {
  const auto c = spec.corners();
  double best = INFINITY;
  for (int i = 0; i < 4; ++i) {
    const Vec2 a = c[i];
    const Vec2 b = c[(i + 1) % 4];
    const double t = std::clamp(dot(p - a, b - a) / dot(b - a, b - a), 0.0, 1.0);
    best = std::min(best, distance(p, a + t * (b - a)));
  }
  return best;
}

// Face index of a point on the boundary, by the nearest side.
int face_of(const VehicleSpec& spec, Vec2 p) {
  const auto c = spec.corners();
  int face = -1;
  double best = INFINITY;
  for (int i = 0; i < 4; ++i) {
    const Vec2 a = c[i];
    const Vec2 b = c[(i + 1) % 4];
    const double t = std::clamp(dot(p - a, b - a) / dot(b - a, b - a), 0.0, 1.0);
    const double d = distance(p, a + t * (b - a));
    if (d < best) {
      best = d;
      face = i;
    }
  }
  return face;
}

double subtended_angle(const VehicleSpec& spec) {
  const double ref = std::atan2(spec.center.y, spec.center.x);
  double lo = INFINITY, hi = -INFINITY;
  for (Vec2 c : spec.corners()) {
    const double a = std::remainder(std::atan2(c.y, c.x) - ref, 2 * std::numbers::pi);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return hi - lo;
}

std::vector<Vec2> flat(const kitti::ClusterSample& s) {
  std::vector<Vec2> out;
  for (const Point3& p : s.cluster.points) out.push_back({p.x, p.y});
  return out;
}

TEST(SimulateScan, CornersAreCounterClockwise) {
  VehicleSpec spec;
  spec.yaw = 0.7;
  const auto c = spec.corners();
  for (int i = 0; i < 4; ++i) EXPECT_GT(orient(c[i], c[(i + 1) % 4], c[(i + 2) % 4]), 0.0);
  EXPECT_NEAR(polygon_area(std::vector<Vec2>(c.begin(), c.end())), 4.5 * 1.8, 1e-9);
}

TEST(SimulateScan, BroadsideSeesOneFace) {
  VehicleSpec spec;
  const auto s = simulate_scan(spec, {});
  ASSERT_GT(s.cluster.points.size(), 10u);
  for (const Point3& p : s.cluster.points) {
    EXPECT_NEAR(p.x, 15.0 - 2.25, 1e-9);
    EXPECT_LE(std::abs(p.y), 0.9 + 1e-9);
    EXPECT_GE(p.z, 0.0);
    EXPECT_LE(p.z, kBandTop);
  }
  EXPECT_EQ(s.gt_yaw_canonical, 0.0);
}

TEST(SimulateScan, DiagonalSeesTwoFaces) {
  VehicleSpec spec;
  spec.yaw = std::numbers::pi / 4;
  ScanConfig cfg;
  const auto s = simulate_scan(spec, cfg);
  const double expected = std::floor(subtended_angle(spec) / cfg.angular_resolution);
  EXPECT_NEAR(static_cast<double>(s.cluster.points.size()), expected, 1.0);
  int counts[4] = {0, 0, 0, 0};
  for (Vec2 p : flat(s)) {
    EXPECT_LT(boundary_distance(spec, p), 1e-9);
    ++counts[face_of(spec, p)];
  }
  EXPECT_EQ(std::count_if(std::begin(counts), std::end(counts), [](int c) { return c > 5; }), 2);
  EXPECT_NEAR(s.gt_yaw_canonical, std::numbers::pi / 4, 1e-12);
}

TEST(SimulateScan, Deterministic) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = random_two_side_scene(rng);
    ScanConfig cfg;
    cfg.noise_sigma = 0.03;
    cfg.dropout = 0.2;
    cfg.seed = rng();
    const auto a = simulate_scan(spec, cfg);
    const auto b = simulate_scan(spec, cfg);
    EXPECT_EQ(a.cluster.points, b.cluster.points);
    cfg.seed += 1;
    const auto c = simulate_scan(spec, cfg);
    EXPECT_NE(a.cluster.points, c.cluster.points);
  }
}

TEST(SimulateScan, NoiseIsRadialAndBounded) {
  std::mt19937_64 rng(52);
  const double sigma = 0.03;
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = random_two_side_scene(rng);
    ScanConfig clean;
    clean.seed = rng();
    ScanConfig noisy = clean;
    noisy.noise_sigma = sigma;
    const auto a = flat(simulate_scan(spec, clean));
    const auto b = flat(simulate_scan(spec, noisy));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(std::atan2(a[i].y, a[i].x), std::atan2(b[i].y, b[i].x), 1e-12);
      EXPECT_LE(std::abs(norm(a[i]) - norm(b[i])), 5.0 * sigma);
    }
  }
}

TEST(SimulateScan, DropoutCanEmptyTheScan) {
  VehicleSpec spec;
  spec.length = 0.4;
  spec.width = 0.2;
  spec.center = {400.0, 0.0};
  ScanConfig cfg;
  cfg.dropout = 0.9;
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    cfg.seed = seed;
    try {
      simulate_scan(spec, cfg);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::EmptyScan);
      ++empty;
    }
  }
  EXPECT_GT(empty, 0);
  EXPECT_LT(empty, 50);
}

TEST(SimulateScan, RejectsSensorInsideAndBadConfig) {
  VehicleSpec spec;
  spec.center = {0.5, 0.2};
  try {
    simulate_scan(spec, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
  ScanConfig cfg;
  cfg.dropout = 1.0;
  EXPECT_THROW(simulate_scan(VehicleSpec{}, cfg), Error);
}

TEST(RandomScene, TwoFacesVisible) {
  std::mt19937_64 rng(53);
  int two = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const VehicleSpec spec = random_two_side_scene(rng);
    const Vec2 f{std::cos(spec.yaw), std::sin(spec.yaw)};
    const Vec2 l{-f.y, f.x};
    const Vec2 rel = Vec2{0.0, 0.0} - spec.center;
    EXPECT_GT(std::abs(dot(rel, f)), spec.length / 2);
    EXPECT_GT(std::abs(dot(rel, l)), spec.width / 2);
    const auto s = simulate_scan(spec, {});
    int counts[4] = {0, 0, 0, 0};
    for (Vec2 p : flat(s)) ++counts[face_of(spec, p)];
    // A strongly foreshortened face can fall between two rays.
    const auto faces = std::count_if(std::begin(counts), std::end(counts), [](int c) { return c > 0; });
    EXPECT_GE(faces, 1);
    EXPECT_LE(faces, 2);
    two += faces == 2;
  }
  EXPECT_GE(two, 285);
}

TEST(FirstRayCrossing, FirstHitOnBoundary) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 300; ++trial) {
    const OracleTrial t = random_oracle_trial(rng);
    const OrientedRectFrame r = rect_from_theta(t.hull, t.theta);
    const VisibleWedge w = boundary_points(t.hull);
    for (Side side : {Side::left, Side::right}) {
      const RayCrossing x = first_ray_crossing(r, w, side);
      ASSERT_GE(x.edge, 0);
      ASSERT_GT(x.t, 0.0);
      const Vec2 d = (1.0 / norm(w.point(side))) * w.point(side);
      const Vec2 p = x.t * d;
      EXPECT_LT(std::abs(signed_distance(p, r.edges[x.edge])), 1e-6 * std::max(1.0, norm(p)));
      for (int k = 1; k < 100; ++k) {
        const Vec2 q = (x.t * (1.0 - 1e-6) * k / 100.0) * d;
        bool inside = true;
        for (int e = 0; e < 4; ++e) inside = inside && r.inward_distance(q, e) >= 0.0;
        EXPECT_FALSE(inside) << trial;
      }
    }
  }
}

TEST(OcclusionOracle, RectangleHullIsZero) {
  const std::vector<Vec2> pts{{10, -1}, {12, -1}, {12, 1}, {10, 1}};
  const Hull h = convex_hull(pts);
  const OrientedRectFrame r = rect_from_theta(h, 0.0);
  const auto est = occlusion_area_oracle(h, r, boundary_points(h), 20000, 1);
  EXPECT_EQ(est.area, 0.0);
  EXPECT_EQ(est.samples, 20000u);
}

TEST(OcclusionOracle, TriangleWithinThreeSigma) {
  const std::vector<Vec2> pts{{10, -1}, {12, 1}, {12, -1}};
  const Hull h = convex_hull(pts);
  const OrientedRectFrame r = rect_from_theta(h, 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto est = occlusion_area_oracle(h, r, boundary_points(h), 100000, seed);
    EXPECT_LE(std::abs(est.area - 2.0), 3.0 * est.standard_error) << seed;
    EXPECT_GT(est.standard_error, 0.0);
  }
}

TEST(OcclusionOracle, DeterministicAndConverging) {
  std::mt19937_64 rng(55);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const OracleTrial t = random_oracle_trial(rng);
    const OrientedRectFrame r = rect_from_theta(t.hull, t.theta);
    const VisibleWedge w = boundary_points(t.hull);
    const auto a = occlusion_area_oracle(t.hull, r, w, 20000, 9);
    const auto b = occlusion_area_oracle(t.hull, r, w, 20000, 9);
    EXPECT_EQ(a.area, b.area);
    EXPECT_EQ(a.standard_error, b.standard_error);
    EXPECT_GE(a.area, 0.0);
    EXPECT_LE(a.area, 2.0 * r.area());
    if (a.standard_error < 1e-3 * r.area()) continue;
    const auto c = occlusion_area_oracle(t.hull, r, w, 80000, 10);
    const double ratio = c.standard_error / a.standard_error;
    EXPECT_GT(ratio, 0.4) << trial;
    EXPECT_LT(ratio, 0.6) << trial;
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Export, LabelMatchesSpec) {
  VehicleSpec spec;
  spec.center = {20.0, -5.0};
  spec.yaw = 0.4;
  const kitti::LabelRecord l = label_for(spec);
  EXPECT_EQ(l.object_type, "Car");
  EXPECT_GT(l.length, spec.length);
  EXPECT_GT(l.width, spec.width);
  EXPECT_GE(l.height, kBandTop);
  EXPECT_NEAR(kitti::sensor_yaw(l.rotation_y, synthetic_calib()), spec.yaw, 1e-12);
}

}  // namespace
}  // namespace hullpose::synth
