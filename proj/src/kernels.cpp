#include "fishrepro/kernels.hpp"

#include <cstdlib>
#include <string_view>

#if defined(FISHREPRO_HAVE_AVX2)
#include "kernels_avx2.hpp"
#endif

namespace fishrepro::kernels {

bool avx2_available() {
#if defined(FISHREPRO_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool simd_enabled() {
  static const bool enabled = [] {
    if (!avx2_available()) return false;
    const char* env = std::getenv("FISHREPRO_SIMD");
    if (env != nullptr) {
      const std::string_view value(env);
      if (value == "off" || value == "0" || value == "scalar") return false;
    }
    return true;
  }();
  return enabled;
}

const char* active_backend() { return simd_enabled() ? "avx2" : "scalar"; }

namespace {

inline bool simd_kind(CameraKind kind) {
  return kind == CameraKind::PH || kind == CameraKind::DS;
}

}  // namespace

void project_batch(const CameraModel& cam, std::size_t n, const double* x,
                   const double* y, const double* z, double* u, double* v,
                   std::uint8_t* in_domain) {
#if defined(FISHREPRO_HAVE_AVX2)
  if (simd_enabled() && simd_kind(cam.kind)) {
    avx2::project_batch(cam, n, x, y, z, u, v, in_domain);
    return;
  }
#endif
  scalar::project_batch(cam, n, x, y, z, u, v, in_domain);
}

void unproject_batch(const CameraModel& cam, std::size_t n, const double* u,
                     const double* v, double* x, double* y, double* z,
                     std::uint8_t* valid) {
#if defined(FISHREPRO_HAVE_AVX2)
  if (simd_enabled() && simd_kind(cam.kind)) {
    avx2::unproject_batch(cam, n, u, v, x, y, z, valid);
    return;
  }
#endif
  scalar::unproject_batch(cam, n, u, v, x, y, z, valid);
}

void rotate_points(const Eigen::Matrix3d& R, std::size_t n, const double* x,
                   const double* y, const double* z, double* ox, double* oy,
                   double* oz) {
#if defined(FISHREPRO_HAVE_AVX2)
  if (simd_enabled()) {
    avx2::rotate_points(R, n, x, y, z, ox, oy, oz);
    return;
  }
#endif
  scalar::rotate_points(R, n, x, y, z, ox, oy, oz);
}

double max_pairwise_angle(std::size_t n, const double* x, const double* y,
                          const double* z) {
#if defined(FISHREPRO_HAVE_AVX2)
  if (simd_enabled()) return avx2::max_pairwise_angle(n, x, y, z);
#endif
  return scalar::max_pairwise_angle(n, x, y, z);
}

}  // namespace fishrepro::kernels
