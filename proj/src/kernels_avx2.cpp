// Compiled with -mavx2 only; callers reach these through the dispatch table
// after checking the CPU.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace hullpose::kernels::avx2 {

namespace {

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  return std::min(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  return std::max(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

struct Projected {
  __m256d p1;
  __m256d p2;
};

inline Projected project(const double* xs, const double* ys, std::size_t i, __m256d c,
                         __m256d s) {
  const __m256d x = _mm256_loadu_pd(xs + i);
  const __m256d y = _mm256_loadu_pd(ys + i);
  return {_mm256_add_pd(_mm256_mul_pd(x, c), _mm256_mul_pd(y, s)),
          _mm256_sub_pd(_mm256_mul_pd(y, c), _mm256_mul_pd(x, s))};
}

}  // namespace

Extents project_extents(const double* xs, const double* ys, std::size_t n, double c, double s) {
  if (n < 4) return scalar::project_extents(xs, ys, n, c, s);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  Projected first = project(xs, ys, 0, vc, vs);
  __m256d mn1 = first.p1, mx1 = first.p1, mn2 = first.p2, mx2 = first.p2;
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    const Projected p = project(xs, ys, i, vc, vs);
    mn1 = _mm256_min_pd(mn1, p.p1);
    mx1 = _mm256_max_pd(mx1, p.p1);
    mn2 = _mm256_min_pd(mn2, p.p2);
    mx2 = _mm256_max_pd(mx2, p.p2);
  }
  Extents e{hmin(mn1), hmax(mx1), hmin(mn2), hmax(mx2)};
  for (; i < n; ++i) {
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
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d mn1 = _mm256_set1_pd(rect.min1), mx1 = _mm256_set1_pd(rect.max1);
  const __m256d mn2 = _mm256_set1_pd(rect.min2), mx2 = _mm256_set1_pd(rect.max2);
  const __m256d vfloor = _mm256_set1_pd(floor);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Projected p = project(xs, ys, i, vc, vs);
    const __m256d d1 = _mm256_min_pd(_mm256_sub_pd(p.p1, mn1), _mm256_sub_pd(mx1, p.p1));
    const __m256d d2 = _mm256_min_pd(_mm256_sub_pd(p.p2, mn2), _mm256_sub_pd(mx2, p.p2));
    const __m256d d = _mm256_max_pd(_mm256_min_pd(d1, d2), vfloor);
    acc = _mm256_add_pd(acc, _mm256_div_pd(one, d));
  }
  return hsum(acc) + scalar::closeness_sum(xs + i, ys + i, n - i, c, s, rect, floor);
}

GroupMoments variance_moments(const double* xs, const double* ys, std::size_t n, double c,
                              double s, const Extents& rect, double mean0, double mean1) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d mn1 = _mm256_set1_pd(rect.min1), mx1 = _mm256_set1_pd(rect.max1);
  const __m256d mn2 = _mm256_set1_pd(rect.min2), mx2 = _mm256_set1_pd(rect.max2);
  const __m256d m0 = _mm256_set1_pd(mean0), m1 = _mm256_set1_pd(mean1);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d cnt0 = _mm256_setzero_pd(), cnt1 = _mm256_setzero_pd();
  __m256d sum0 = _mm256_setzero_pd(), sum1 = _mm256_setzero_pd();
  __m256d sq0 = _mm256_setzero_pd(), sq1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Projected p = project(xs, ys, i, vc, vs);
    const __m256d d1 = _mm256_min_pd(_mm256_sub_pd(p.p1, mn1), _mm256_sub_pd(mx1, p.p1));
    const __m256d d2 = _mm256_min_pd(_mm256_sub_pd(p.p2, mn2), _mm256_sub_pd(mx2, p.p2));
    const __m256d in0 = _mm256_cmp_pd(d1, d2, _CMP_LE_OQ);
    const __m256d dev0 = _mm256_sub_pd(d1, m0);
    const __m256d dev1 = _mm256_sub_pd(d2, m1);
    cnt0 = _mm256_add_pd(cnt0, _mm256_and_pd(in0, one));
    cnt1 = _mm256_add_pd(cnt1, _mm256_andnot_pd(in0, one));
    sum0 = _mm256_add_pd(sum0, _mm256_and_pd(in0, d1));
    sum1 = _mm256_add_pd(sum1, _mm256_andnot_pd(in0, d2));
    sq0 = _mm256_add_pd(sq0, _mm256_and_pd(in0, _mm256_mul_pd(dev0, dev0)));
    sq1 = _mm256_add_pd(sq1, _mm256_andnot_pd(in0, _mm256_mul_pd(dev1, dev1)));
  }
  GroupMoments tail = scalar::variance_moments(xs + i, ys + i, n - i, c, s, rect, mean0, mean1);
  tail.count[0] += hsum(cnt0);
  tail.count[1] += hsum(cnt1);
  tail.sum[0] += hsum(sum0);
  tail.sum[1] += hsum(sum1);
  tail.sq_dev[0] += hsum(sq0);
  tail.sq_dev[1] += hsum(sq1);
  return tail;
}

void affine_transform(const double* xs, const double* ys, const double* zs, std::size_t n,
                      const Affine3& map, double* ox, double* oy, double* oz) {
  const double* m = map.m;
  __m256d r[12];
  for (int k = 0; k < 12; ++k) r[k] = _mm256_set1_pd(m[k]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d y = _mm256_loadu_pd(ys + i);
    const __m256d z = _mm256_loadu_pd(zs + i);
    for (int row = 0; row < 3; ++row) {
      const __m256d* q = r + 4 * row;
      __m256d acc = _mm256_add_pd(_mm256_mul_pd(q[0], x), _mm256_mul_pd(q[1], y));
      acc = _mm256_add_pd(_mm256_add_pd(acc, _mm256_mul_pd(q[2], z)), q[3]);
      double* out = row == 0 ? ox : (row == 1 ? oy : oz);
      _mm256_storeu_pd(out + i, acc);
    }
  }
  scalar::affine_transform(xs + i, ys + i, zs + i, n - i, map, ox + i, oy + i, oz + i);
}

void box_mask(const double* xs, const double* ys, const double* zs, std::size_t n,
              const BoxTest& box, std::uint8_t* mask) {
  const __m256d cx = _mm256_set1_pd(box.cx), cy = _mm256_set1_pd(box.cy),
                cz = _mm256_set1_pd(box.cz);
  const __m256d cs = _mm256_set1_pd(box.cos_yaw), sn = _mm256_set1_pd(box.sin_yaw);
  const __m256d lim_l = _mm256_set1_pd(box.half_length + box.tolerance);
  const __m256d lim_w = _mm256_set1_pd(box.half_width + box.tolerance);
  const __m256d lim_bottom = _mm256_set1_pd(box.tolerance);
  const __m256d lim_top = _mm256_set1_pd(-box.height - box.tolerance);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), cx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), cy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), cz);
    const __m256d along = _mm256_sub_pd(_mm256_mul_pd(dx, cs), _mm256_mul_pd(dz, sn));
    const __m256d across = _mm256_add_pd(_mm256_mul_pd(dx, sn), _mm256_mul_pd(dz, cs));
    __m256d in = _mm256_cmp_pd(vabs(along), lim_l, _CMP_LE_OQ);
    in = _mm256_and_pd(in, _mm256_cmp_pd(vabs(across), lim_w, _CMP_LE_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(dy, lim_bottom, _CMP_LE_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(dy, lim_top, _CMP_GE_OQ));
    const int bits = _mm256_movemask_pd(in);
    mask[i] = bits & 1;
    mask[i + 1] = (bits >> 1) & 1;
    mask[i + 2] = (bits >> 2) & 1;
    mask[i + 3] = (bits >> 3) & 1;
  }
  scalar::box_mask(xs + i, ys + i, zs + i, n - i, box, mask + i);
}

}  // namespace hullpose::kernels::avx2
