// AVX2 variants of the batch kernels. Restricted to operations with exact
// IEEE semantics (mul/add/sub/div/sqrt) so results match the scalar
// reference bit for bit; transcendental models stay on the scalar path.
// Built with -mavx2 and without -mfma: no contraction can alter rounding.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "fishrepro/detail/camera_math.hpp"
#include "kernels_avx2.hpp"

namespace fishrepro::kernels::avx2 {

namespace {

inline void store_mask(std::uint8_t* dst, int movemask) {
  dst[0] = static_cast<std::uint8_t>(movemask & 1);
  dst[1] = static_cast<std::uint8_t>((movemask >> 1) & 1);
  dst[2] = static_cast<std::uint8_t>((movemask >> 2) & 1);
  dst[3] = static_cast<std::uint8_t>((movemask >> 3) & 1);
}

void project_ph_avx2(const Intrinsics& in, std::size_t n, const double* x,
                     const double* y, const double* z, double* u, double* v,
                     std::uint8_t* dom) {
  const __m256d vfx = _mm256_set1_pd(in.fx);
  const __m256d vfy = _mm256_set1_pd(in.fy);
  const __m256d vcx = _mm256_set1_pd(in.cx);
  const __m256d vcy = _mm256_set1_pd(in.cy);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d X = _mm256_loadu_pd(x + i);
    const __m256d Y = _mm256_loadu_pd(y + i);
    const __m256d Z = _mm256_loadu_pd(z + i);
    const __m256d U =
        _mm256_add_pd(_mm256_mul_pd(vfx, _mm256_div_pd(X, Z)), vcx);
    const __m256d V =
        _mm256_add_pd(_mm256_mul_pd(vfy, _mm256_div_pd(Y, Z)), vcy);
    _mm256_storeu_pd(u + i, U);
    _mm256_storeu_pd(v + i, V);
    store_mask(dom + i,
               _mm256_movemask_pd(_mm256_cmp_pd(Z, zero, _CMP_GT_OQ)));
  }
  for (; i < n; ++i)
    dom[i] = detail::project_ph(in.fx, in.fy, in.cx, in.cy, x[i], y[i], z[i],
                                u[i], v[i]);
}

void project_ds_avx2(const CameraModel& cam, std::size_t n, const double* x,
                     const double* y, const double* z, double* u, double* v,
                     std::uint8_t* dom) {
  const Intrinsics& in = cam.intr;
  const auto dc = detail::ds_constants(cam.xi, cam.alpha);
  const __m256d vfx = _mm256_set1_pd(in.fx);
  const __m256d vfy = _mm256_set1_pd(in.fy);
  const __m256d vcx = _mm256_set1_pd(in.cx);
  const __m256d vcy = _mm256_set1_pd(in.cy);
  const __m256d vxi = _mm256_set1_pd(cam.xi);
  const __m256d valpha = _mm256_set1_pd(cam.alpha);
  const __m256d v1ma = _mm256_set1_pd(1.0 - cam.alpha);
  const __m256d vnw2 = _mm256_set1_pd(-dc.w2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d X = _mm256_loadu_pd(x + i);
    const __m256d Y = _mm256_loadu_pd(y + i);
    const __m256d Z = _mm256_loadu_pd(z + i);
    const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(X, X), _mm256_mul_pd(Y, Y));
    const __m256d d1 = _mm256_sqrt_pd(_mm256_add_pd(r2, _mm256_mul_pd(Z, Z)));
    const __m256d k = _mm256_add_pd(_mm256_mul_pd(vxi, d1), Z);
    const __m256d d2 = _mm256_sqrt_pd(_mm256_add_pd(r2, _mm256_mul_pd(k, k)));
    const __m256d denom =
        _mm256_add_pd(_mm256_mul_pd(valpha, d2), _mm256_mul_pd(v1ma, k));
    const __m256d U =
        _mm256_add_pd(_mm256_mul_pd(vfx, _mm256_div_pd(X, denom)), vcx);
    const __m256d V =
        _mm256_add_pd(_mm256_mul_pd(vfy, _mm256_div_pd(Y, denom)), vcy);
    _mm256_storeu_pd(u + i, U);
    _mm256_storeu_pd(v + i, V);
    const __m256d lim = _mm256_mul_pd(vnw2, d1);
    store_mask(dom + i,
               _mm256_movemask_pd(_mm256_cmp_pd(Z, lim, _CMP_GT_OQ)));
  }
  for (; i < n; ++i)
    dom[i] = detail::project_ds(in.fx, in.fy, in.cx, in.cy, cam.xi, cam.alpha,
                                dc.w2, x[i], y[i], z[i], u[i], v[i]);
}

void unproject_ph_avx2(const Intrinsics& in, std::size_t n, const double* u,
                       const double* v, double* x, double* y, double* z,
                       std::uint8_t* valid) {
  const __m256d vfx = _mm256_set1_pd(in.fx);
  const __m256d vfy = _mm256_set1_pd(in.fy);
  const __m256d vcx = _mm256_set1_pd(in.cx);
  const __m256d vcy = _mm256_set1_pd(in.cy);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mx = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(u + i), vcx), vfx);
    const __m256d my = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), vcy), vfy);
    const __m256d nn = _mm256_sqrt_pd(_mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(mx, mx), _mm256_mul_pd(my, my)), one));
    _mm256_storeu_pd(x + i, _mm256_div_pd(mx, nn));
    _mm256_storeu_pd(y + i, _mm256_div_pd(my, nn));
    _mm256_storeu_pd(z + i, _mm256_div_pd(one, nn));
    valid[i] = valid[i + 1] = valid[i + 2] = valid[i + 3] = 1;
  }
  for (; i < n; ++i)
    valid[i] = detail::unproject_ph(in.fx, in.fy, in.cx, in.cy, u[i], v[i],
                                    x[i], y[i], z[i]);
}

void unproject_ds_avx2(const CameraModel& cam, std::size_t n, const double* u,
                       const double* v, double* x, double* y, double* z,
                       std::uint8_t* valid) {
  const Intrinsics& in = cam.intr;
  const auto dc = detail::ds_constants(cam.xi, cam.alpha);
  const __m256d vfx = _mm256_set1_pd(in.fx);
  const __m256d vfy = _mm256_set1_pd(in.fy);
  const __m256d vcx = _mm256_set1_pd(in.cx);
  const __m256d vcy = _mm256_set1_pd(in.cy);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vr2max = _mm256_set1_pd(dc.r2_max);
  const __m256d v2am1 = _mm256_set1_pd(2.0 * cam.alpha - 1.0);
  const __m256d va2 = _mm256_set1_pd(cam.alpha * cam.alpha);
  const __m256d valpha = _mm256_set1_pd(cam.alpha);
  const __m256d v1ma = _mm256_set1_pd(1.0 - cam.alpha);
  const __m256d v1mxi2 = _mm256_set1_pd(1.0 - cam.xi * cam.xi);
  const __m256d vxi = _mm256_set1_pd(cam.xi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mx = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(u + i), vcx), vfx);
    const __m256d my = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), vcy), vfy);
    const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(mx, mx), _mm256_mul_pd(my, my));
    const __m256d s =
        _mm256_sqrt_pd(_mm256_sub_pd(one, _mm256_mul_pd(v2am1, r2)));
    const __m256d mz = _mm256_div_pd(
        _mm256_sub_pd(one, _mm256_mul_pd(va2, r2)),
        _mm256_add_pd(_mm256_mul_pd(valpha, s), v1ma));
    const __m256d mz2 = _mm256_mul_pd(mz, mz);
    const __m256d t2 = _mm256_add_pd(mz2, _mm256_mul_pd(v1mxi2, r2));
    const int ok = _mm256_movemask_pd(
        _mm256_and_pd(_mm256_cmp_pd(r2, vr2max, _CMP_LE_OQ),
                      _mm256_cmp_pd(t2, _mm256_setzero_pd(), _CMP_GE_OQ)));
    const __m256d t = _mm256_sqrt_pd(t2);
    const __m256d k = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(mz, vxi), t),
                                    _mm256_add_pd(mz2, r2));
    const __m256d rx = _mm256_mul_pd(k, mx);
    const __m256d ry = _mm256_mul_pd(k, my);
    const __m256d rz = _mm256_sub_pd(_mm256_mul_pd(k, mz), vxi);
    const __m256d nn = _mm256_sqrt_pd(_mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(rx, rx), _mm256_mul_pd(ry, ry)),
        _mm256_mul_pd(rz, rz)));
    _mm256_storeu_pd(x + i, _mm256_div_pd(rx, nn));
    _mm256_storeu_pd(y + i, _mm256_div_pd(ry, nn));
    _mm256_storeu_pd(z + i, _mm256_div_pd(rz, nn));
    store_mask(valid + i, ok);
    if (ok != 0xf) {
      for (int lane = 0; lane < 4; ++lane) {
        if (!valid[i + lane]) {
          x[i + lane] = 0.0;
          y[i + lane] = 0.0;
          z[i + lane] = 1.0;
        }
      }
    }
  }
  for (; i < n; ++i)
    valid[i] =
        detail::unproject_ds(in.fx, in.fy, in.cx, in.cy, cam.xi, cam.alpha,
                             dc.r2_max, u[i], v[i], x[i], y[i], z[i]);
}

}  // namespace

void project_batch(const CameraModel& cam, std::size_t n, const double* x,
                   const double* y, const double* z, double* u, double* v,
                   std::uint8_t* in_domain) {
  if (cam.kind == CameraKind::PH)
    project_ph_avx2(cam.intr, n, x, y, z, u, v, in_domain);
  else
    project_ds_avx2(cam, n, x, y, z, u, v, in_domain);
}

void unproject_batch(const CameraModel& cam, std::size_t n, const double* u,
                     const double* v, double* x, double* y, double* z,
                     std::uint8_t* valid) {
  if (cam.kind == CameraKind::PH)
    unproject_ph_avx2(cam.intr, n, u, v, x, y, z, valid);
  else
    unproject_ds_avx2(cam, n, u, v, x, y, z, valid);
}

void rotate_points(const Eigen::Matrix3d& R, std::size_t n, const double* x,
                   const double* y, const double* z, double* ox, double* oy,
                   double* oz) {
  const __m256d r00 = _mm256_set1_pd(R(0, 0)), r01 = _mm256_set1_pd(R(0, 1)),
                r02 = _mm256_set1_pd(R(0, 2));
  const __m256d r10 = _mm256_set1_pd(R(1, 0)), r11 = _mm256_set1_pd(R(1, 1)),
                r12 = _mm256_set1_pd(R(1, 2));
  const __m256d r20 = _mm256_set1_pd(R(2, 0)), r21 = _mm256_set1_pd(R(2, 1)),
                r22 = _mm256_set1_pd(R(2, 2));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d X = _mm256_loadu_pd(x + i);
    const __m256d Y = _mm256_loadu_pd(y + i);
    const __m256d Z = _mm256_loadu_pd(z + i);
    _mm256_storeu_pd(
        ox + i, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r00, X),
                                            _mm256_mul_pd(r01, Y)),
                              _mm256_mul_pd(r02, Z)));
    _mm256_storeu_pd(
        oy + i, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r10, X),
                                            _mm256_mul_pd(r11, Y)),
                              _mm256_mul_pd(r12, Z)));
    _mm256_storeu_pd(
        oz + i, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r20, X),
                                            _mm256_mul_pd(r21, Y)),
                              _mm256_mul_pd(r22, Z)));
  }
  for (; i < n; ++i) {
    const double px = x[i], py = y[i], pz = z[i];
    ox[i] = (R(0, 0) * px + R(0, 1) * py) + R(0, 2) * pz;
    oy[i] = (R(1, 0) * px + R(1, 1) * py) + R(1, 2) * pz;
    oz[i] = (R(2, 0) * px + R(2, 1) * py) + R(2, 2) * pz;
  }
}

double max_pairwise_angle(std::size_t n, const double* x, const double* y,
                          const double* z) {
  double best = 0.0;
  alignas(32) double cross[4];
  alignas(32) double dot[4];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const __m256d ax = _mm256_set1_pd(x[i]);
    const __m256d ay = _mm256_set1_pd(y[i]);
    const __m256d az = _mm256_set1_pd(z[i]);
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      const __m256d bx = _mm256_loadu_pd(x + j);
      const __m256d by = _mm256_loadu_pd(y + j);
      const __m256d bz = _mm256_loadu_pd(z + j);
      const __m256d cx =
          _mm256_sub_pd(_mm256_mul_pd(ay, bz), _mm256_mul_pd(az, by));
      const __m256d cy =
          _mm256_sub_pd(_mm256_mul_pd(az, bx), _mm256_mul_pd(ax, bz));
      const __m256d cz =
          _mm256_sub_pd(_mm256_mul_pd(ax, by), _mm256_mul_pd(ay, bx));
      const __m256d cn = _mm256_sqrt_pd(_mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(cx, cx), _mm256_mul_pd(cy, cy)),
          _mm256_mul_pd(cz, cz)));
      const __m256d dt = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(ax, bx), _mm256_mul_pd(ay, by)),
          _mm256_mul_pd(az, bz));
      _mm256_store_pd(cross, cn);
      _mm256_store_pd(dot, dt);
      for (int lane = 0; lane < 4; ++lane)
        best = std::max(best, std::atan2(cross[lane], dot[lane]));
    }
    for (; j < n; ++j)
      best = std::max(best,
                      detail::pair_angle(x[i], y[i], z[i], x[j], y[j], z[j]));
  }
  return best;
}

}  // namespace fishrepro::kernels::avx2
