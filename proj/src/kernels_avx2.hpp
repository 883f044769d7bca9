#pragma once

// Internal declarations for the AVX2 kernel variants. Only compiled and
// referenced when FISHREPRO_HAVE_AVX2 is defined by the build.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>

#include "fishrepro/camera.hpp"

namespace fishrepro::kernels::avx2 {

// PH and DS only; callers route other kinds to the scalar backend.
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

}  // namespace fishrepro::kernels::avx2
