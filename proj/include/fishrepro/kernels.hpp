#pragma once

// Batch geometry kernels in structure-of-arrays form. Each entry point has a
// scalar reference implementation; PH and DS projection/unprojection and the
// vector helpers additionally have AVX2 variants selected at runtime. The
// SIMD paths use only IEEE-exact operations (mul/add/div/sqrt) in the same
// order as the scalar reference, so both backends produce identical bits.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>

#include "fishrepro/camera.hpp"

namespace fishrepro::kernels {

/// Projects n camera-frame points; writes pixel coordinates and a 0/1
/// domain-validity flag per point. Out-of-domain entries may hold NaN/inf.
void project_batch(const CameraModel& cam, std::size_t n, const double* x,
                   const double* y, const double* z, double* u, double* v,
                   std::uint8_t* in_domain);

/// Unprojects n pixels to unit rays; invalid entries are set to (0,0,1).
void unproject_batch(const CameraModel& cam, std::size_t n, const double* u,
                     const double* v, double* x, double* y, double* z,
                     std::uint8_t* valid);

/// out = R * in, per point.
void rotate_points(const Eigen::Matrix3d& R, std::size_t n, const double* x,
                   const double* y, const double* z, double* ox, double* oy,
                   double* oz);

/// Maximum pairwise angle (radians) over n rays; n >= 2.
double max_pairwise_angle(std::size_t n, const double* x, const double* y,
                          const double* z);

/// AVX2 code was compiled in and this CPU supports it.
bool avx2_available();
/// avx2_available() and not disabled via FISHREPRO_SIMD=off.
bool simd_enabled();
/// "avx2" or "scalar".
const char* active_backend();

namespace scalar {
void project_batch(const CameraModel& cam, std::size_t n, const double* x,
                   const double* y, const double* z, double* u, double* v,
                   std::uint8_t* in_domain);
void unproject_batch(const CameraModel& cam, std::size_t n, const double* u,
                     const double* v, double* x, double* y, double* z,
                     std::uint8_t* valid);
void rotate_points(const Eigen::Matrix3d& R, std::size_t n, const double* x,
                   const double* y, const double* z, double* ox, double* oy,
                   double* oz);
double max_pairwise_angle(std::size_t n, const double* x, const double* y,
                          const double* z);
}  // namespace scalar

}  // namespace fishrepro::kernels
