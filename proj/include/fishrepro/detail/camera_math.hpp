#pragma once

// Per-point projection primitives shared by the single-point API and the
// batch kernels. The SIMD batch variants mirror the operation order used
// here so every lane stays bit-identical with the scalar path.

#include <cmath>
#include <limits>
#include <numbers>

namespace fishrepro::detail {

inline constexpr double kPi = std::numbers::pi;

struct DsConstants {
  double w2;      // projection domain: z > -w2 * |p|
  double r2_max;  // unprojection domain: r^2 <= r2_max
};

inline DsConstants ds_constants(double xi, double alpha) {
  const double w1 =
      alpha <= 0.5 ? alpha / (1.0 - alpha) : (1.0 - alpha) / alpha;
  const double w2 = (w1 + xi) / std::sqrt(2.0 * w1 * xi + xi * xi + 1.0);
  const double r2_max = alpha > 0.5
                            ? 1.0 / (2.0 * alpha - 1.0)
                            : std::numeric_limits<double>::infinity();
  return {w2, r2_max};
}

inline bool project_ph(double fx, double fy, double cx, double cy, double x,
                       double y, double z, double& u, double& v) {
  u = fx * (x / z) + cx;
  v = fy * (y / z) + cy;
  return z > 0.0;
}

inline bool project_ef(double fx, double fy, double cx, double cy, double x,
                       double y, double z, double& u, double& v) {
  const double r = std::sqrt(x * x + y * y);
  const double theta = std::atan2(r, z);
  const double scale = r > 0.0 ? theta / r : 0.0;
  u = fx * (scale * x) + cx;
  v = fy * (scale * y) + cy;
  // The exact backward axis (r = 0, z < 0) has no unique image point.
  return r > 0.0 || z > 0.0;
}

inline bool project_ds(double fx, double fy, double cx, double cy, double xi,
                       double alpha, double w2, double x, double y, double z,
                       double& u, double& v) {
  const double r2 = x * x + y * y;
  const double d1 = std::sqrt(r2 + z * z);
  const double k = xi * d1 + z;
  const double d2 = std::sqrt(r2 + k * k);
  const double denom = alpha * d2 + (1.0 - alpha) * k;
  u = fx * (x / denom) + cx;
  v = fy * (y / denom) + cy;
  return z > -w2 * d1;
}

inline bool project_cc(double fx, double fy, double cx, double cy, double x,
                       double y, double z, double& u, double& v) {
  const double rxz = std::sqrt(x * x + z * z);
  u = fx * std::atan2(x, z) + cx;
  v = fy * (y / rxz) + cy;
  return rxz > 0.0;
}

inline bool project_ec(double fx, double fy, double cx, double cy, double x,
                       double y, double z, double& u, double& v) {
  const double rxz = std::sqrt(x * x + z * z);
  u = fx * std::atan2(x, z) + cx;
  v = fy * std::atan2(y, rxz) + cy;
  return true;
}

inline bool unproject_ph(double fx, double fy, double cx, double cy, double u,
                         double v, double& x, double& y, double& z) {
  const double mx = (u - cx) / fx;
  const double my = (v - cy) / fy;
  const double n = std::sqrt((mx * mx + my * my) + 1.0);
  x = mx / n;
  y = my / n;
  z = 1.0 / n;
  return true;
}

inline bool unproject_ef(double fx, double fy, double cx, double cy, double u,
                         double v, double& x, double& y, double& z) {
  const double mx = (u - cx) / fx;
  const double my = (v - cy) / fy;
  const double theta = std::sqrt(mx * mx + my * my);
  if (theta > 0.0) {
    const double s = std::sin(theta) / theta;
    x = s * mx;
    y = s * my;
    z = std::cos(theta);
  } else {
    x = 0.0;
    y = 0.0;
    z = 1.0;
  }
  return theta <= kPi;
}

inline bool unproject_ds(double fx, double fy, double cx, double cy, double xi,
                         double alpha, double r2_max, double u, double v,
                         double& x, double& y, double& z) {
  const double mx = (u - cx) / fx;
  const double my = (v - cy) / fy;
  const double r2 = mx * mx + my * my;
  if (!(r2 <= r2_max)) {
    x = 0.0;
    y = 0.0;
    z = 1.0;
    return false;
  }
  const double s = std::sqrt(1.0 - (2.0 * alpha - 1.0) * r2);
  const double mz = (1.0 - alpha * alpha * r2) / (alpha * s + (1.0 - alpha));
  // For xi > 1 the closed form carries a second domain restriction.
  const double t2 = mz * mz + (1.0 - xi * xi) * r2;
  if (t2 < 0.0) {
    x = 0.0;
    y = 0.0;
    z = 1.0;
    return false;
  }
  const double t = std::sqrt(t2);
  const double k = (mz * xi + t) / (mz * mz + r2);
  const double rx = k * mx;
  const double ry = k * my;
  const double rz = k * mz - xi;
  const double n = std::sqrt((rx * rx + ry * ry) + rz * rz);
  x = rx / n;
  y = ry / n;
  z = rz / n;
  return true;
}

inline bool unproject_cc(double fx, double fy, double cx, double cy, double u,
                         double v, double& x, double& y, double& z) {
  const double phi = (u - cx) / fx;
  const double h = (v - cy) / fy;
  const double n = std::sqrt(1.0 + h * h);
  x = std::sin(phi) / n;
  y = h / n;
  z = std::cos(phi) / n;
  return std::abs(phi) <= kPi;
}

inline bool unproject_ec(double fx, double fy, double cx, double cy, double u,
                         double v, double& x, double& y, double& z) {
  const double phi = (u - cx) / fx;
  const double psi = (v - cy) / fy;
  const double cpsi = std::cos(psi);
  x = cpsi * std::sin(phi);
  y = std::sin(psi);
  z = cpsi * std::cos(phi);
  return std::abs(phi) <= kPi && std::abs(psi) <= kPi / 2.0;
}

/// Angle between two camera-frame rays via atan2(|a x b|, a.b); stable near
/// 0 and pi. Result in radians, [0, pi].
inline double pair_angle(double ax, double ay, double az, double bx, double by,
                         double bz) {
  const double cx = ay * bz - az * by;
  const double cy = az * bx - ax * bz;
  const double cz = ax * by - ay * bx;
  const double cross = std::sqrt((cx * cx + cy * cy) + cz * cz);
  const double dot = (ax * bx + ay * by) + az * bz;
  return std::atan2(cross, dot);
}

}  // namespace fishrepro::detail
