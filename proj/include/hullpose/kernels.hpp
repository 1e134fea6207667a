#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant; the public entry points dispatch on the CPU at first use.
//
// Projections use p1 = x*c + y*s and p2 = y*c - x*s with separate multiply and
// add (no FMA), so the AVX2 extents and masks are bit-identical to scalar.
// Reductions (sums) differ only by summation order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace hullpose::kernels {

struct Extents {
  double min1;
  double max1;
  double min2;
  double max2;
  friend bool operator==(const Extents&, const Extents&) = default;
};

/// Per-group accumulation for the variance criterion. Group 0 holds points
/// nearer an e1-side line, group 1 points nearer an e2-side line.
struct GroupMoments {
  double count[2] = {0.0, 0.0};
  double sum[2] = {0.0, 0.0};
  /// Sum of squared deviations from the means passed in.
  double sq_dev[2] = {0.0, 0.0};
};

/// Row-major 3x4 affine map.
struct Affine3 {
  double m[12];
};

/// Oriented box in a y-down frame (KITTI camera convention): bottom-face
/// center, yaw about +y, half extents along the rotated x (length) and z
/// (width) axes, height extending towards -y.
struct BoxTest {
  double cx, cy, cz;
  double cos_yaw, sin_yaw;
  double half_length, half_width, height;
  double tolerance;
};

using ProjectExtentsFn = Extents (*)(const double*, const double*, std::size_t, double, double);
using ClosenessSumFn = double (*)(const double*, const double*, std::size_t, double, double,
                                  const Extents&, double);
using VarianceMomentsFn = GroupMoments (*)(const double*, const double*, std::size_t, double,
                                           double, const Extents&, double, double);
using AffineTransformFn = void (*)(const double*, const double*, const double*, std::size_t,
                                   const Affine3&, double*, double*, double*);
using BoxMaskFn = void (*)(const double*, const double*, const double*, std::size_t,
                           const BoxTest&, std::uint8_t*);

struct KernelTable {
  std::string_view name;
  ProjectExtentsFn project_extents;
  ClosenessSumFn closeness_sum;
  VarianceMomentsFn variance_moments;
  AffineTransformFn affine_transform;
  BoxMaskFn box_mask;
};

enum class Isa { scalar, avx2 };

bool avx2_supported();
const KernelTable& scalar_table();
/// Only valid when avx2_supported().
const KernelTable& avx2_table();
const KernelTable& table_for(Isa isa);

Isa active_isa();
/// Overrides dispatch (tests and benchmarks). Throws if the ISA is unsupported.
void set_active_isa(Isa isa);

// Dispatched entry points. Spans of xs/ys (and zs) must have equal length.

/// Min/max of the projections onto e1 = (c, s) and e2 = (-s, c). Requires n >= 1.
Extents project_extents(std::span<const double> xs, std::span<const double> ys, double c,
                        double s);

/// Sum over points of 1 / max(d, floor), where d is the distance to the
/// nearest of the four rectangle sides.
double closeness_sum(std::span<const double> xs, std::span<const double> ys, double c, double s,
                     const Extents& rect, double floor);

/// Per-group counts, sums of nearest-side distance, and squared deviations
/// from (mean0, mean1).
GroupMoments variance_moments(std::span<const double> xs, std::span<const double> ys, double c,
                              double s, const Extents& rect, double mean0, double mean1);

void affine_transform(std::span<const double> xs, std::span<const double> ys,
                      std::span<const double> zs, const Affine3& map, std::span<double> out_x,
                      std::span<double> out_y, std::span<double> out_z);

/// mask[i] = 1 iff point i lies in the box (boundary inclusive within tolerance).
void box_mask(std::span<const double> xs, std::span<const double> ys,
              std::span<const double> zs, const BoxTest& box, std::span<std::uint8_t> mask);

}  // namespace hullpose::kernels
