#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hullpose/baselines.hpp"
#include "hullpose/error.hpp"
#include "hullpose/synth.hpp"
#include "support.hpp"

namespace hullpose {
namespace {

// Direct re-evaluation of the criteria from the rectangle's four lines.
double nearest_side(const OrientedRectFrame& r, Vec2 p, int* group) {
  const double d0 = std::min(std::abs(signed_distance(p, r.edges[0])),
                             std::abs(signed_distance(p, r.edges[2])));
  const double d1 = std::min(std::abs(signed_distance(p, r.edges[1])),
                             std::abs(signed_distance(p, r.edges[3])));
  if (group) *group = d0 <= d1 ? 0 : 1;
  return std::min(d0, d1);
}

double closeness_oracle(const std::vector<Vec2>& pts, const OrientedRectFrame& r) {
  double s = 0.0;
  for (const Vec2& p : pts) s += 1.0 / std::max(nearest_side(r, p, nullptr), 0.01);
  return -s;
}

double variance_oracle(const std::vector<Vec2>& pts, const OrientedRectFrame& r) {
  std::vector<double> g[2];
  for (const Vec2& p : pts) {
    int k = 0;
    const double d = nearest_side(r, p, &k);
    g[k].push_back(d);
  }
  double total = 0.0;
  for (const auto& v : g) {
    if (v.size() < 2) continue;
    double m = 0.0;
    for (double d : v) m += d;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double d : v) ss += (d - m) * (d - m);
    total += ss / static_cast<double>(v.size() - 1);
  }
  return total;
}

std::vector<Vec2> l_shape(std::mt19937_64& rng, double yaw, Vec2 corner, std::size_t n) {
  const Vec2 f{std::cos(yaw), std::sin(yaw)};
  const Vec2 l{-f.y, f.x};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 0.02);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 3 == 0) {
      pts.push_back(corner + (1.8 * u(rng)) * l + g(rng) * f);
    } else {
      pts.push_back(corner + (4.5 * u(rng)) * f + g(rng) * l);
    }
  }
  return pts;
}

TEST(ScoreArea, Examples) {
  const Hull sq = convex_hull(std::vector<Vec2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_DOUBLE_EQ(score_area(sq, rect_from_theta(sq, 0.0)), 1.0);
  EXPECT_NEAR(score_area(sq, rect_from_theta(sq, kHalfPi / 2)), 2.0, 1e-12);
}

TEST(ScoreArea, MatchesShoelaceOfVertices) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> th(0.0, kHalfPi);
  for (int trial = 0; trial < 500; ++trial) {
    const Hull h = convex_hull(testing::random_disk(rng, 3 + trial % 20, {5, 5}, 2.0));
    const OrientedRectFrame r = rect_from_theta(h, th(rng));
    EXPECT_NEAR(score_area(h, r), polygon_area(r.vertices), 1e-9);
  }
}

TEST(ScoreCloseness, Examples) {
  const OrientedRectFrame r = rect_from_extents(0.0, {-1.0, 1.0, -1.0, 1.0});
  Cluster2D on_edge{{{-1.0, -0.5}, {-1.0, 0.0}, {-1.0, 0.7}}, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(score_closeness(on_edge, r), -3.0 / kClosenessFloor);
  Cluster2D center{{{0.0, 0.0}}, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(score_closeness(center, r), -1.0);
  EXPECT_THROW(score_closeness(Cluster2D{}, r), Error);
}

TEST(ScoreVariance, Examples) {
  const OrientedRectFrame r = rect_from_extents(0.0, {0.0, 4.0, 0.0, 2.0});
  Cluster2D l{{{0.5, 0.0}, {1.5, 0.0}, {3.0, 0.0}, {0.0, 0.8}, {0.0, 1.5}}, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(score_variance(l, r), 0.0);
  Cluster2D pair{{{0.3, 1.0}, {3.7, 1.0}}, 0.0, 0.0};
  EXPECT_NEAR(score_variance(pair, r), 0.0, 1e-24);
  EXPECT_THROW(score_variance(Cluster2D{{{1.0, 1.0}}, 0.0, 0.0}, r), Error);
}

TEST(ScoreCriteria, MatchDirectReevaluation) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> th(0.0, kHalfPi);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = l_shape(rng, th(rng), {12.0, -3.0}, 10 + trial % 60);
    const Cluster2D flat{pts, 0.0, 0.0};
    const OrientedRectFrame r = rect_from_theta(convex_hull(pts), th(rng));
    const double c = closeness_oracle(pts, r);
    EXPECT_NEAR(score_closeness(flat, r), c, 1e-9 * std::abs(c));
    const double v = variance_oracle(pts, r);
    EXPECT_NEAR(score_variance(flat, r), v, 1e-9 * std::max(1.0, v));
  }
}

TEST(SearchFit, CurvesMatchOracleAndArgmin) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> th(0.0, kHalfPi);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = l_shape(rng, th(rng), {-9.0, 14.0}, 40);
    const Cluster3D cluster = testing::lift(pts);
    const Hull hull = convex_hull(pts);
    for (Criterion c : {Criterion::area_min, Criterion::closeness_max, Criterion::variance_min}) {
      const FitResult fit = search_fit(cluster, c);
      ASSERT_EQ(fit.score_curve.size(), 180u);
      for (const ScorePoint& sp : fit.score_curve) {
        const OrientedRectFrame r = rect_from_theta(hull, sp.theta);
        const double o = c == Criterion::area_min        ? polygon_area(r.vertices)
                         : c == Criterion::closeness_max ? closeness_oracle(pts, r)
                                                         : variance_oracle(pts, r);
        EXPECT_NEAR(sp.score, o, 1e-9 * std::max(1.0, std::abs(o)));
        EXPECT_GE(sp.score, fit.score_curve[fit.best_index].score);
      }
    }
  }
}

TEST(SearchFit, AreaMinOnAxisAlignedRectangle) {
  std::vector<Vec2> pts;
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 20; ++j) pts.push_back({10.0 + 0.1 * i, 2.0 + 0.1 * j});
  }
  const FitResult fit = search_fit(testing::lift(pts), Criterion::area_min);
  const double deg = fit.theta_star * kRadToDeg;
  EXPECT_TRUE(deg <= 0.5 || deg >= 89.5) << deg;
}

TEST(SearchFit, ClosenessOnSyntheticLShape) {
  synth::VehicleSpec spec;
  spec.yaw = 30.0 * kDegToRad;
  spec.center = {12.0, 6.0};
  const auto sample = synth::simulate_scan(spec, {});
  const FitResult fit = search_fit(sample.cluster, Criterion::closeness_max);
  EXPECT_NEAR(fit.theta_star * kRadToDeg, 30.0, 0.5);
}

TEST(SearchFit, OcclusionDelegatesExactly) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = synth::random_oracle_trial(rng);
    const Cluster3D c = testing::lift(t.hull.points);
    const FitResult a = search_fit(c, Criterion::occlusion_min);
    const FitResult b = estimate_pose(c);
    EXPECT_EQ(a.best_index, b.best_index);
    EXPECT_EQ(a.theta_star, b.theta_star);
    ASSERT_EQ(a.score_curve.size(), b.score_curve.size());
    for (std::size_t k = 0; k < a.score_curve.size(); ++k) {
      EXPECT_EQ(a.score_curve[k].score, b.score_curve[k].score);
    }
    EXPECT_EQ(a.box.center, b.box.center);
  }
}

TEST(SearchFit, PointOrderInvariant) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts = l_shape(rng, 0.7, {20.0, 3.0}, 50);
    for (Criterion c : {Criterion::area_min, Criterion::closeness_max, Criterion::variance_min}) {
      const FitResult a = search_fit(testing::lift(pts, 0.0, 0.0), c);
      auto shuffled = pts;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const FitResult b = search_fit(testing::lift(shuffled, 0.0, 0.0), c);
      EXPECT_EQ(a.best_index, b.best_index) << to_string(c);
      for (std::size_t k = 0; k < a.score_curve.size(); ++k) {
        EXPECT_NEAR(a.score_curve[k].score, b.score_curve[k].score,
                    1e-12 * std::max(1.0, std::abs(a.score_curve[k].score)));
      }
    }
  }
}

TEST(Criterion, NamesRoundTrip) {
  for (Criterion c : {Criterion::area_min, Criterion::closeness_max, Criterion::variance_min,
                      Criterion::occlusion_min}) {
    EXPECT_EQ(parse_criterion(to_string(c)), c);
  }
  EXPECT_FALSE(parse_criterion("ransac"));
}

}  // namespace
}  // namespace hullpose
