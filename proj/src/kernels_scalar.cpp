#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace hullpose::kernels::scalar {

Extents project_extents(const double* xs, const double* ys, std::size_t n, double c, double s) {
  Extents e{xs[0] * c + ys[0] * s, 0.0, ys[0] * c - xs[0] * s, 0.0};
  e.max1 = e.min1;
  e.max2 = e.min2;
  for (std::size_t i = 1; i < n; ++i) {
    const double p1 = xs[i] * c + ys[i] * s;
    const double p2 = ys[i] * c - xs[i] * s;
    e.min1 = std::min(e.min1, p1);
    e.max1 = std::max(e.max1, p1);
    e.min2 = std::min(e.min2, p2);
    e.max2 = std::max(e.max2, p2);
  }
  return e;
}

double closeness_sum(const double* xs, const double* ys, std::size_t n, double c, double s,
                     const Extents& rect, double floor) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p1 = xs[i] * c + ys[i] * s;
    const double p2 = ys[i] * c - xs[i] * s;
    const double d1 = std::min(p1 - rect.min1, rect.max1 - p1);
    const double d2 = std::min(p2 - rect.min2, rect.max2 - p2);
    total += 1.0 / std::max(std::min(d1, d2), floor);
  }
  return total;
}

GroupMoments variance_moments(const double* xs, const double* ys, std::size_t n, double c,
                              double s, const Extents& rect, double mean0, double mean1) {
  GroupMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double p1 = xs[i] * c + ys[i] * s;
    const double p2 = ys[i] * c - xs[i] * s;
    const double d1 = std::min(p1 - rect.min1, rect.max1 - p1);
    const double d2 = std::min(p2 - rect.min2, rect.max2 - p2);
    if (d1 <= d2) {
      m.count[0] += 1.0;
      m.sum[0] += d1;
      m.sq_dev[0] += (d1 - mean0) * (d1 - mean0);
    } else {
      m.count[1] += 1.0;
      m.sum[1] += d2;
      m.sq_dev[1] += (d2 - mean1) * (d2 - mean1);
    }
  }
  return m;
}

void affine_transform(const double* xs, const double* ys, const double* zs, std::size_t n,
                      const Affine3& map, double* ox, double* oy, double* oz) {
  const double* m = map.m;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    const double y = ys[i];
    const double z = zs[i];
    ox[i] = ((m[0] * x + m[1] * y) + m[2] * z) + m[3];
    oy[i] = ((m[4] * x + m[5] * y) + m[6] * z) + m[7];
    oz[i] = ((m[8] * x + m[9] * y) + m[10] * z) + m[11];
  }
}

void box_mask(const double* xs, const double* ys, const double* zs, std::size_t n,
              const BoxTest& box, std::uint8_t* mask) {
  const double lim_l = box.half_length + box.tolerance;
  const double lim_w = box.half_width + box.tolerance;
  const double lim_top = -box.height - box.tolerance;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - box.cx;
    const double dy = ys[i] - box.cy;
    const double dz = zs[i] - box.cz;
    const double along = dx * box.cos_yaw - dz * box.sin_yaw;
    const double across = dx * box.sin_yaw + dz * box.cos_yaw;
    const bool inside = std::abs(along) <= lim_l && std::abs(across) <= lim_w &&
                        dy <= box.tolerance && dy >= lim_top;
    mask[i] = inside ? 1 : 0;
  }
}

}  // namespace hullpose::kernels::scalar
