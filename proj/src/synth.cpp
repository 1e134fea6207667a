#include "hullpose/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hullpose/error.hpp"

namespace hullpose::synth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SegmentHit {
  double t = kInf;  // distance along the unit ray
  double u = 0.0;   // segment parameter
};

// Ray from the origin with unit direction d against segment a -> b.
std::optional<SegmentHit> ray_segment(Vec2 d, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double den = cross(d, e);
  if (std::abs(den) < 1e-15 * std::max(1.0, norm(e))) return std::nullopt;
  return SegmentHit{cross(a, e) / den, cross(a, d) / den};
}

Vec2 unit(Vec2 v) {
  const double n = norm(v);
  return {v.x / n, v.y / n};
}

int wrap4(int i) { return ((i % 4) + 4) % 4; }

// CCW polygon test with the boundary counted as inside.
bool inside_convex(const Hull& hull, Vec2 q) {
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (orient(hull[i], hull[(i + 1) % n], q) < 0.0) return false;
  }
  return true;
}

// Nearest crossing of the ray origin -> q with the hull boundary.
double hull_entry_distance(const Hull& hull, Vec2 dir) {
  double best = kInf;
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto hit = ray_segment(dir, hull[i], hull[(i + 1) % n]);
    if (hit && hit->t > 0.0 && hit->u >= 0.0 && hit->u <= 1.0) best = std::min(best, hit->t);
  }
  return best;
}

// Polyline portion of the sensor-facing chain that one trapezoid pass covers,
// parametrized by position along its projection edge.
struct SweepPortion {
  Vec2 edge_origin;
  Vec2 edge_dir;  // unit, along the projection edge
  std::vector<double> s;
  std::vector<double> depth;  // distance from the projection edge
  double s_lo = 0.0;
  double s_hi = 0.0;

  bool covers(Vec2 q) const {
    if (s.size() < 2) return false;
    const Vec2 rel = q - edge_origin;
    const double sq = dot(rel, edge_dir);
    if (sq < s_lo || sq > s_hi) return false;
    const double dq = std::abs(cross(edge_dir, rel));
    for (std::size_t j = 0; j + 1 < s.size(); ++j) {
      const double a = s[j];
      const double b = s[j + 1];
      if (a == b) continue;
      if (sq < std::min(a, b) || sq > std::max(a, b)) continue;
      const double w = (sq - a) / (b - a);
      return dq <= depth[j] + w * (depth[j + 1] - depth[j]);
    }
    return false;
  }
};

// Walks `chain` while successive chords keep the same direction along the
// edge; returns the number of chords taken.
std::size_t build_portion(const OrientedRectFrame& rect, int edge, const std::vector<Vec2>& chain,
                          std::size_t max_chords, SweepPortion& out) {
  const Vec2 a = rect.vertices[static_cast<std::size_t>(wrap4(edge - 1))];
  const Vec2 b = rect.vertices[static_cast<std::size_t>(edge)];
  out.edge_origin = a;
  out.edge_dir = unit(b - a);
  auto push = [&](Vec2 p) {
    const Vec2 rel = p - a;
    out.s.push_back(dot(rel, out.edge_dir));
    out.depth.push_back(std::abs(cross(out.edge_dir, rel)));
  };
  out.s.clear();
  out.depth.clear();
  if (chain.empty()) return 0;
  push(chain[0]);
  double last = 0.0;
  std::size_t taken = 0;
  while (taken < max_chords && taken + 1 < chain.size()) {
    const double h = dot(chain[taken + 1] - chain[taken], out.edge_dir);
    if (taken > 0 && h * last < 0.0) break;
    if (h != 0.0) last = h;
    push(chain[taken + 1]);
    ++taken;
  }
  out.s_lo = *std::min_element(out.s.begin(), out.s.end());
  out.s_hi = *std::max_element(out.s.begin(), out.s.end());
  return taken;
}

kitti::ClusterSample make_sample(std::vector<Point3> pts, double yaw) {
  kitti::ClusterSample sample;
  sample.frame_id = "synth";
  sample.cluster.points = std::move(pts);
  sample.gt_yaw_canonical = kitti::canonicalize_yaw(yaw);
  return sample;
}

}  // namespace

std::array<Vec2, 4> VehicleSpec::corners() const {
  const Vec2 f{std::cos(yaw), std::sin(yaw)};
  const Vec2 l{-f.y, f.x};
  const Vec2 hf = 0.5 * length * f;
  const Vec2 hl = 0.5 * width * l;
  return {center - hf - hl, center + hf - hl, center + hf + hl, center - hf + hl};
}

kitti::ClusterSample simulate_scan(const VehicleSpec& spec, const ScanConfig& config) {
  if (!(spec.length >= spec.width) || !(spec.width > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "vehicle needs length >= width > 0");
  }
  if (!(config.angular_resolution > 0.0) || !(config.noise_sigma >= 0.0) ||
      !(config.dropout >= 0.0 && config.dropout < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "invalid scan configuration");
  }
  const auto corners = spec.corners();
  {
    // Strictly outside: the origin is beyond at least one face.
    bool outside = false;
    for (int i = 0; i < 4; ++i) {
      if (orient(corners[static_cast<std::size_t>(i)], corners[static_cast<std::size_t>((i + 1) % 4)],
                 {0.0, 0.0}) < 0.0) {
        outside = true;
      }
    }
    if (!outside) throw Error(ErrorKind::InvalidArgument, "sensor is inside the vehicle");
  }

  const double base = std::atan2(spec.center.y, spec.center.x);
  const Vec2 cdir{std::cos(base), std::sin(base)};
  double lo = kInf;
  double hi = -kInf;
  for (const Vec2& c : corners) {
    const double rel = std::atan2(cross(cdir, c), dot(cdir, c));
    lo = std::min(lo, rel);
    hi = std::max(hi, rel);
  }
  const double res = config.angular_resolution;
  const auto k_lo = static_cast<long long>(std::ceil((base + lo) / res));
  const auto k_hi = static_cast<long long>(std::floor((base + hi) / res));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<Point3> pts;
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double az = static_cast<double>(k) * res;
    const Vec2 d{std::cos(az), std::sin(az)};
    double range = kInf;
    for (int i = 0; i < 4; ++i) {
      const auto hit = ray_segment(d, corners[static_cast<std::size_t>(i)],
                                   corners[static_cast<std::size_t>((i + 1) % 4)]);
      if (hit && hit->t > 0.0 && hit->u >= 0.0 && hit->u <= 1.0) range = std::min(range, hit->t);
    }
    const double n = noise(rng);
    const double drop = coin(rng);
    if (!std::isfinite(range) || drop < config.dropout) continue;
    const double r = range + config.noise_sigma * n;
    const int band = static_cast<int>(((k % 4) + 4) % 4);
    pts.push_back({r * d.x, r * d.y, kBandTop * band / 3.0});
  }
  if (pts.empty()) throw Error(ErrorKind::EmptyScan, "no ray hit the vehicle");
  return make_sample(std::move(pts), spec.yaw);
}

VehicleSpec random_two_side_scene(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> length(3.5, 5.5);
  std::uniform_real_distribution<double> width(1.5, 2.2);
  std::uniform_real_distribution<double> range(8.0, 30.0);
  std::uniform_real_distribution<double> azimuth(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> heading(0.0, 2.0 * std::numbers::pi);
  for (;;) {
    VehicleSpec spec;
    spec.length = length(rng);
    spec.width = width(rng);
    const double r = range(rng);
    const double az = azimuth(rng);
    spec.center = {r * std::cos(az), r * std::sin(az)};
    spec.yaw = heading(rng);
    // Sensor position in the vehicle frame.
    const Vec2 f{std::cos(spec.yaw), std::sin(spec.yaw)};
    const Vec2 rel = Vec2{0.0, 0.0} - spec.center;
    const double lx = dot(rel, f);
    const double ly = cross(f, rel);
    if (std::abs(lx) > 0.5 * spec.length && std::abs(ly) > 0.5 * spec.width) return spec;
  }
}

OracleTrial random_oracle_trial(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> azimuth(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> theta(0.0, kHalfPi);
  for (;;) {
    std::vector<Vec2> pts;
    if (u01(rng) < 0.5) {
      const double r = 5.0 + 35.0 * u01(rng);
      const double az = azimuth(rng);
      const Vec2 c{r * std::cos(az), r * std::sin(az)};
      const double a = 0.3 + 2.2 * u01(rng);
      const double b = 0.3 + 1.2 * u01(rng);
      const double rot = azimuth(rng);
      const Vec2 f{std::cos(rot), std::sin(rot)};
      const Vec2 g{-f.y, f.x};
      const auto n = static_cast<std::size_t>(3 + static_cast<int>(u01(rng) * 23.0));
      for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(c + (a * (2.0 * u01(rng) - 1.0)) * f + (b * (2.0 * u01(rng) - 1.0)) * g);
      }
    } else {
      VehicleSpec spec;
      if (u01(rng) < 0.7) {
        spec = random_two_side_scene(rng);
      } else {
        spec.length = 3.5 + 2.0 * u01(rng);
        spec.width = 1.5 + 0.7 * u01(rng);
        const double r = 8.0 + 22.0 * u01(rng);
        const double az = azimuth(rng);
        spec.center = {r * std::cos(az), r * std::sin(az)};
        spec.yaw = 2.0 * std::numbers::pi * u01(rng);
      }
      ScanConfig cfg;
      cfg.angular_resolution = (0.2 + 0.8 * u01(rng)) * kDegToRad;
      cfg.noise_sigma = u01(rng) < 0.5 ? 0.0 : 0.03;
      cfg.seed = rng();
      try {
        for (const Point3& p : simulate_scan(spec, cfg).cluster.points) pts.push_back({p.x, p.y});
      } catch (const Error&) {
        continue;
      }
    }
    Hull hull = convex_hull(pts);
    if (hull.size() < 3) continue;
    OracleTrial trial{std::move(hull), theta(rng)};
    try {
      const VisibleWedge wedge = boundary_points(trial.hull);
      const OrientedRectFrame rect = rect_from_theta(trial.hull, trial.theta);
      select_projection_edge(rect, wedge, Side::left);
      select_projection_edge(rect, wedge, Side::right);
    } catch (const Error&) {
      continue;
    }
    return trial;
  }
}

RayCrossing first_ray_crossing(const OrientedRectFrame& rect, const VisibleWedge& wedge,
                               Side side) {
  const Vec2 through = wedge.point(side);
  const Vec2 other = wedge.point(side == Side::left ? Side::right : Side::left);
  const Vec2 d = unit(through);

  struct Candidate {
    int edge;
    double t;
    int corner;  // -1 unless the crossing sits on a vertex
  };
  std::vector<Candidate> cands;
  for (int e = 0; e < 4; ++e) {
    const Vec2 a = rect.vertices[static_cast<std::size_t>(wrap4(e - 1))];
    const Vec2 b = rect.vertices[static_cast<std::size_t>(e)];
    const auto hit = ray_segment(d, a, b);
    if (!hit || !(hit->t > 0.0)) continue;
    const double len = distance(a, b);
    const double from_a = hit->u * len;
    const double from_b = (1.0 - hit->u) * len;
    if (from_a < -kVertexCoincidence || from_b < -kVertexCoincidence) continue;
    int corner = -1;
    if (std::abs(from_b) <= kVertexCoincidence) {
      corner = e;
    } else if (std::abs(from_a) <= kVertexCoincidence) {
      corner = wrap4(e - 1);
    }
    cands.push_back({e, hit->t, corner});
  }
  RayCrossing out;
  if (cands.empty()) return out;
  const auto nearest = std::min_element(cands.begin(), cands.end(),
                                        [](const Candidate& x, const Candidate& y) { return x.t < y.t; });
  out.t = nearest->t;
  int corner = -1;
  for (const Candidate& c : cands) {
    if (c.corner >= 0 && c.t <= out.t + kVertexCoincidence) corner = c.corner;
  }
  if (corner < 0) {
    out.edge = nearest->edge;
    return out;
  }

  out.corner_hit = true;
  out.corner = corner;
  const double other_side = cross(d, other);
  int best = -1;
  int best_rank = -1;
  for (const int e : {corner, wrap4(corner + 1)}) {
    const Vec2 far = rect.vertices[static_cast<std::size_t>(e == corner ? wrap4(corner - 1)
                                                                         : wrap4(corner + 1))];
    const double s = cross(d, far - rect.vertices[static_cast<std::size_t>(corner)]);
    const bool into = std::abs(s) > kDuplicateTolerance && (s > 0.0) == (other_side > 0.0);
    const Vec2 a = rect.vertices[static_cast<std::size_t>(wrap4(e - 1))];
    const Vec2 b = rect.vertices[static_cast<std::size_t>(e)];
    const bool facing = orient(a, b, {0.0, 0.0}) < 0.0;
    const int rank = 2 * static_cast<int>(into) + static_cast<int>(facing);
    if (rank > best_rank) {
      best_rank = rank;
      best = e;
    }
  }
  out.edge = best;
  return out;
}

OracleEstimate occlusion_area_oracle(const Hull& hull, const OrientedRectFrame& rect,
                                     const VisibleWedge& wedge, std::size_t samples,
                                     std::uint64_t seed, OracleRegion region) {
  OracleEstimate est;
  est.samples = samples;
  if (samples == 0) return est;

  SweepPortion right;
  SweepPortion left;
  if (region == OracleRegion::projection_sweep) {
    const int edge_r = first_ray_crossing(rect, wedge, Side::right).edge;
    const int edge_l = first_ray_crossing(rect, wedge, Side::left).edge;
    if (edge_r < 0 || edge_l < 0) {
      throw Error(ErrorKind::NoVisibleEdge, "boundary ray misses the rectangle");
    }
    // Sensor-facing chain, right boundary to left boundary.
    std::vector<Vec2> chain;
    for (std::size_t i = wedge.right_index;; i = (i + 1) % hull.size()) {
      chain.push_back(hull[i]);
      if (i == wedge.left_index) break;
    }
    const std::size_t chords = chain.size() - 1;
    const std::size_t taken = build_portion(rect, edge_r, chain, chords, right);
    std::vector<Vec2> reversed(chain.rbegin(), chain.rend());
    build_portion(rect, edge_l, reversed, chords - taken, left);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Vec2 o = rect.vertices[0];
  const Vec2 ea = rect.vertices[1] - o;
  const Vec2 eb = rect.vertices[3] - o;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = u01(rng);
    const double b = u01(rng);
    const Vec2 q = o + a * ea + b * eb;
    double x = 0.0;
    if (!inside_convex(hull, q)) {
      if (region == OracleRegion::projection_sweep) {
        x = static_cast<double>(right.covers(q)) + static_cast<double>(left.covers(q));
      } else {
        const double az = wedge.relative_azimuth(q);
        if (az >= wedge.left_azimuth && az <= wedge.right_azimuth) {
          const double r = norm(q);
          if (hull_entry_distance(hull, unit(q)) > r) x = 1.0;
        }
      }
    }
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  const double area = rect.area();
  est.area = mean * area;
  est.standard_error = area * std::sqrt(var / n);
  return est;
}

kitti::CalibMatrices synthetic_calib() {
  kitti::CalibMatrices calib;
  calib.velo_to_cam = {0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0, -0.08, 1.0, 0.0, 0.0, -0.27};
  calib.rect_rotation = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  return calib;
}

kitti::LabelRecord label_for(const VehicleSpec& spec) {
  // Boxes are padded by 1 cm per face so float32 scan rounding stays inside.
  constexpr double pad = 0.01;
  kitti::LabelRecord r;
  r.object_type = "Car";
  r.height = kBandTop + 2.0 * pad;
  r.width = spec.width + 2.0 * pad;
  r.length = spec.length + 2.0 * pad;
  // velodyne (x, y, z) -> camera (-y, -z - 0.08, x - 0.27)
  r.location = {-spec.center.y, pad - 0.08, spec.center.x - 0.27};
  r.rotation_y = std::remainder(-spec.yaw - kHalfPi, 2.0 * std::numbers::pi);
  r.alpha = std::remainder(r.rotation_y - std::atan2(r.location[0], r.location[2]),
                           2.0 * std::numbers::pi);
  return r;
}

void export_dataset(const std::filesystem::path& root, const std::vector<ExportedScene>& scenes) {
  std::error_code ec;
  for (const char* sub : {"velodyne", "label_2", "calib"}) {
    std::filesystem::create_directories(root / sub, ec);
    if (ec) throw Error(ErrorKind::IOError, "cannot create " + (root / sub).string());
  }
  const std::string calib = kitti::format_calib(synthetic_calib());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const std::string id = kitti::frame_id(static_cast<int>(i));
    kitti::RawScan scan;
    for (const Point3& p : scenes[i].sample.cluster.points) {
      scan.points.push_back(
          {static_cast<float>(p.x), static_cast<float>(p.y), static_cast<float>(p.z), 0.5f});
    }
    kitti::write_scan_file(scan, root / "velodyne" / (id + ".bin"));
    kitti::write_text_file(root / "label_2" / (id + ".txt"),
                           kitti::format_label(label_for(scenes[i].spec)) + "\n");
    kitti::write_text_file(root / "calib" / (id + ".txt"), calib);
  }
}

}  // namespace hullpose::synth
