#include "fishrepro/camera.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fishrepro/detail/camera_math.hpp"

namespace fishrepro {

std::string_view to_string(CameraKind kind) {
  switch (kind) {
    case CameraKind::PH: return "PH";
    case CameraKind::EF: return "EF";
    case CameraKind::DS: return "DS";
    case CameraKind::CC: return "CC";
    case CameraKind::EC: return "EC";
  }
  return "?";
}

CameraKind camera_kind_from_string(std::string_view name) {
  if (name == "PH") return CameraKind::PH;
  if (name == "EF") return CameraKind::EF;
  if (name == "DS") return CameraKind::DS;
  if (name == "CC") return CameraKind::CC;
  if (name == "EC") return CameraKind::EC;
  throw std::invalid_argument("unknown camera kind '" + std::string(name) +
                              "'");
}

CameraModel make_camera(CameraKind kind, const Intrinsics& intr, double xi,
                        double alpha) {
  if (intr.width <= 0 || intr.height <= 0)
    throw std::invalid_argument("image size must be positive");
  if (!(intr.fx > 0.0) || !(intr.fy > 0.0) || !std::isfinite(intr.fx) ||
      !std::isfinite(intr.fy))
    throw std::invalid_argument("focal lengths must be positive and finite");
  if (!(intr.cx >= 0.0 && intr.cx < intr.width) ||
      !(intr.cy >= 0.0 && intr.cy < intr.height))
    throw std::invalid_argument("principal point must lie inside the image");
  if (kind == CameraKind::DS) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::invalid_argument("DS alpha must be in [0, 1]");
    if (!(xi >= 0.0) || !std::isfinite(xi))
      throw std::invalid_argument("DS xi must be >= 0");
  } else if (xi != 0.0 || alpha != 0.0) {
    throw std::invalid_argument(std::string(to_string(kind)) +
                                " camera takes no xi/alpha parameters");
  }
  return CameraModel{kind, intr, xi, alpha};
}

ProjectResult project(const CameraModel& cam, const Eigen::Vector3d& point) {
  const double x = point.x(), y = point.y(), z = point.z();
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
    throw std::invalid_argument("project: point must be finite");
  if (x == 0.0 && y == 0.0 && z == 0.0)
    throw std::domain_error("project: zero vector has no direction");

  const Intrinsics& in = cam.intr;
  ProjectResult res;
  double u = 0.0, v = 0.0;
  bool dom = false;
  switch (cam.kind) {
    case CameraKind::PH:
      dom = detail::project_ph(in.fx, in.fy, in.cx, in.cy, x, y, z, u, v);
      break;
    case CameraKind::EF:
      dom = detail::project_ef(in.fx, in.fy, in.cx, in.cy, x, y, z, u, v);
      break;
    case CameraKind::DS: {
      const auto dc = detail::ds_constants(cam.xi, cam.alpha);
      dom = detail::project_ds(in.fx, in.fy, in.cx, in.cy, cam.xi, cam.alpha,
                               dc.w2, x, y, z, u, v);
      break;
    }
    case CameraKind::CC:
      dom = detail::project_cc(in.fx, in.fy, in.cx, in.cy, x, y, z, u, v);
      break;
    case CameraKind::EC:
      dom = detail::project_ec(in.fx, in.fy, in.cx, in.cy, x, y, z, u, v);
      break;
  }
  res.in_domain = dom;
  if (dom) {
    res.pixel = {u, v};
    res.in_image = u >= 0.0 && u < in.width && v >= 0.0 && v < in.height;
  }
  return res;
}

UnprojectResult unproject(const CameraModel& cam,
                          const Eigen::Vector2d& pixel) {
  UnprojectResult res;
  const double u = pixel.x(), v = pixel.y();
  if (!std::isfinite(u) || !std::isfinite(v)) return res;

  const Intrinsics& in = cam.intr;
  double x = 0.0, y = 0.0, z = 1.0;
  switch (cam.kind) {
    case CameraKind::PH:
      res.valid = detail::unproject_ph(in.fx, in.fy, in.cx, in.cy, u, v, x, y, z);
      break;
    case CameraKind::EF:
      res.valid = detail::unproject_ef(in.fx, in.fy, in.cx, in.cy, u, v, x, y, z);
      break;
    case CameraKind::DS: {
      const auto dc = detail::ds_constants(cam.xi, cam.alpha);
      res.valid = detail::unproject_ds(in.fx, in.fy, in.cx, in.cy, cam.xi,
                                       cam.alpha, dc.r2_max, u, v, x, y, z);
      break;
    }
    case CameraKind::CC:
      res.valid = detail::unproject_cc(in.fx, in.fy, in.cx, in.cy, u, v, x, y, z);
      break;
    case CameraKind::EC:
      res.valid = detail::unproject_ec(in.fx, in.fy, in.cx, in.cy, u, v, x, y, z);
      break;
  }
  if (res.valid) res.ray = {x, y, z};
  return res;
}

Eigen::Vector2d normalized_coords(const CameraModel& cam,
                                  const Eigen::Vector2d& pixel) {
  const UnprojectResult r = unproject(cam, pixel);
  if (!r.valid)
    throw std::domain_error("normalized_coords: pixel outside invertible domain");
  if (!(r.ray.z() > 0.0))
    throw std::domain_error("normalized_coords: unprojected ray has z <= 0");
  return {r.ray.x() / r.ray.z(), r.ray.y() / r.ray.z()};
}

}  // namespace fishrepro
