#include <atomic>
#include <cassert>

#include "hullpose/error.hpp"
#include "kernels_impl.hpp"

namespace hullpose::kernels {

namespace {

constexpr KernelTable kScalar{"scalar",
                              scalar::project_extents,
                              scalar::closeness_sum,
                              scalar::variance_moments,
                              scalar::affine_transform,
                              scalar::box_mask};

#if defined(HULLPOSE_HAVE_AVX2)
constexpr KernelTable kAvx2{"avx2",
                            avx2::project_extents,
                            avx2::closeness_sum,
                            avx2::variance_moments,
                            avx2::affine_transform,
                            avx2::box_mask};
#endif

Isa detect() { return avx2_supported() ? Isa::avx2 : Isa::scalar; }

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{&table_for(detect())};
  return table;
}

const KernelTable& current() { return *active().load(std::memory_order_relaxed); }

}  // namespace

bool avx2_supported() {
#if defined(HULLPOSE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported;
#else
  return false;
#endif
}

const KernelTable& scalar_table() { return kScalar; }

const KernelTable& avx2_table() {
#if defined(HULLPOSE_HAVE_AVX2)
  if (avx2_supported()) return kAvx2;
#endif
  throw Error(ErrorKind::InvalidArgument, "AVX2 kernels unavailable on this CPU/build");
}

const KernelTable& table_for(Isa isa) { return isa == Isa::avx2 ? avx2_table() : kScalar; }

Isa active_isa() { return &current() == &kScalar ? Isa::scalar : Isa::avx2; }

void set_active_isa(Isa isa) { active().store(&table_for(isa), std::memory_order_relaxed); }

Extents project_extents(std::span<const double> xs, std::span<const double> ys, double c,
                        double s) {
  assert(xs.size() == ys.size() && !xs.empty());
  return current().project_extents(xs.data(), ys.data(), xs.size(), c, s);
}

double closeness_sum(std::span<const double> xs, std::span<const double> ys, double c, double s,
                     const Extents& rect, double floor) {
  assert(xs.size() == ys.size());
  return current().closeness_sum(xs.data(), ys.data(), xs.size(), c, s, rect, floor);
}

GroupMoments variance_moments(std::span<const double> xs, std::span<const double> ys, double c,
                              double s, const Extents& rect, double mean0, double mean1) {
  assert(xs.size() == ys.size());
  return current().variance_moments(xs.data(), ys.data(), xs.size(), c, s, rect, mean0, mean1);
}

void affine_transform(std::span<const double> xs, std::span<const double> ys,
                      std::span<const double> zs, const Affine3& map, std::span<double> out_x,
                      std::span<double> out_y, std::span<double> out_z) {
  assert(xs.size() == ys.size() && ys.size() == zs.size());
  assert(out_x.size() >= xs.size() && out_y.size() >= xs.size() && out_z.size() >= xs.size());
  current().affine_transform(xs.data(), ys.data(), zs.data(), xs.size(), map, out_x.data(),
                             out_y.data(), out_z.data());
}

void box_mask(std::span<const double> xs, std::span<const double> ys,
              std::span<const double> zs, const BoxTest& box, std::span<std::uint8_t> mask) {
  assert(xs.size() == ys.size() && ys.size() == zs.size() && mask.size() >= xs.size());
  current().box_mask(xs.data(), ys.data(), zs.data(), xs.size(), box, mask.data());
}

}  // namespace hullpose::kernels
