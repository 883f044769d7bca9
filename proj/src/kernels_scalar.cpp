#include <algorithm>

#include "fishrepro/detail/camera_math.hpp"
#include "fishrepro/kernels.hpp"

namespace fishrepro::kernels::scalar {

void project_batch(const CameraModel& cam, std::size_t n, const double* x,
                   const double* y, const double* z, double* u, double* v,
                   std::uint8_t* in_domain) {
  const Intrinsics& in = cam.intr;
  switch (cam.kind) {
    case CameraKind::PH:
      for (std::size_t i = 0; i < n; ++i)
        in_domain[i] = detail::project_ph(in.fx, in.fy, in.cx, in.cy, x[i],
                                          y[i], z[i], u[i], v[i]);
      break;
    case CameraKind::EF:
      for (std::size_t i = 0; i < n; ++i)
        in_domain[i] = detail::project_ef(in.fx, in.fy, in.cx, in.cy, x[i],
                                          y[i], z[i], u[i], v[i]);
      break;
    case CameraKind::DS: {
      const auto dc = detail::ds_constants(cam.xi, cam.alpha);
      for (std::size_t i = 0; i < n; ++i)
        in_domain[i] =
            detail::project_ds(in.fx, in.fy, in.cx, in.cy, cam.xi, cam.alpha,
                               dc.w2, x[i], y[i], z[i], u[i], v[i]);
      break;
    }
    case CameraKind::CC:
      for (std::size_t i = 0; i < n; ++i)
        in_domain[i] = detail::project_cc(in.fx, in.fy, in.cx, in.cy, x[i],
                                          y[i], z[i], u[i], v[i]);
      break;
    case CameraKind::EC:
      for (std::size_t i = 0; i < n; ++i)
        in_domain[i] = detail::project_ec(in.fx, in.fy, in.cx, in.cy, x[i],
                                          y[i], z[i], u[i], v[i]);
      break;
  }
}

void unproject_batch(const CameraModel& cam, std::size_t n, const double* u,
                     const double* v, double* x, double* y, double* z,
                     std::uint8_t* valid) {
  const Intrinsics& in = cam.intr;
  switch (cam.kind) {
    case CameraKind::PH:
      for (std::size_t i = 0; i < n; ++i)
        valid[i] = detail::unproject_ph(in.fx, in.fy, in.cx, in.cy, u[i], v[i],
                                        x[i], y[i], z[i]);
      break;
    case CameraKind::EF:
      for (std::size_t i = 0; i < n; ++i)
        valid[i] = detail::unproject_ef(in.fx, in.fy, in.cx, in.cy, u[i], v[i],
                                        x[i], y[i], z[i]);
      break;
    case CameraKind::DS: {
      const auto dc = detail::ds_constants(cam.xi, cam.alpha);
      for (std::size_t i = 0; i < n; ++i)
        valid[i] =
            detail::unproject_ds(in.fx, in.fy, in.cx, in.cy, cam.xi, cam.alpha,
                                 dc.r2_max, u[i], v[i], x[i], y[i], z[i]);
      break;
    }
    case CameraKind::CC:
      for (std::size_t i = 0; i < n; ++i)
        valid[i] = detail::unproject_cc(in.fx, in.fy, in.cx, in.cy, u[i], v[i],
                                        x[i], y[i], z[i]);
      break;
    case CameraKind::EC:
      for (std::size_t i = 0; i < n; ++i)
        valid[i] = detail::unproject_ec(in.fx, in.fy, in.cx, in.cy, u[i], v[i],
                                        x[i], y[i], z[i]);
      break;
  }
}

void rotate_points(const Eigen::Matrix3d& R, std::size_t n, const double* x,
                   const double* y, const double* z, double* ox, double* oy,
                   double* oz) {
  const double r00 = R(0, 0), r01 = R(0, 1), r02 = R(0, 2);
  const double r10 = R(1, 0), r11 = R(1, 1), r12 = R(1, 2);
  const double r20 = R(2, 0), r21 = R(2, 1), r22 = R(2, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double px = x[i], py = y[i], pz = z[i];
    ox[i] = (r00 * px + r01 * py) + r02 * pz;
    oy[i] = (r10 * px + r11 * py) + r12 * pz;
    oz[i] = (r20 * px + r21 * py) + r22 * pz;
  }
}

double max_pairwise_angle(std::size_t n, const double* x, const double* y,
                          const double* z) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a =
          detail::pair_angle(x[i], y[i], z[i], x[j], y[j], z[j]);
      best = std::max(best, a);
    }
  }
  return best;
}

}  // namespace fishrepro::kernels::scalar
