#pragma once

#include "hullpose/kernels.hpp"

namespace hullpose::kernels {

namespace scalar {
Extents project_extents(const double* xs, const double* ys, std::size_t n, double c, double s);
double closeness_sum(const double* xs, const double* ys, std::size_t n, double c, double s,
                     const Extents& rect, double floor);
GroupMoments variance_moments(const double* xs, const double* ys, std::size_t n, double c,
                              double s, const Extents& rect, double mean0, double mean1);
void affine_transform(const double* xs, const double* ys, const double* zs, std::size_t n,
                      const Affine3& map, double* ox, double* oy, double* oz);
void box_mask(const double* xs, const double* ys, const double* zs, std::size_t n,
              const BoxTest& box, std::uint8_t* mask);
}  // namespace scalar

#if defined(HULLPOSE_HAVE_AVX2)
namespace avx2 {
Extents project_extents(const double* xs, const double* ys, std::size_t n, double c, double s);
double closeness_sum(const double* xs, const double* ys, std::size_t n, double c, double s,
                     const Extents& rect, double floor);
GroupMoments variance_moments(const double* xs, const double* ys, std::size_t n, double c,
                              double s, const Extents& rect, double mean0, double mean1);
void affine_transform(const double* xs, const double* ys, const double* zs, std::size_t n,
                      const Affine3& map, double* ox, double* oy, double* oz);
void box_mask(const double* xs, const double* ys, const double* zs, std::size_t n,
              const BoxTest& box, std::uint8_t* mask);
}  // namespace avx2
#endif

}  // namespace hullpose::kernels
