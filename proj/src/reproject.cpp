#include "fishrepro/reproject.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fishrepro/detail/camera_math.hpp"
#include "fishrepro/kernels.hpp"

namespace fishrepro {

namespace {

// Projection with unit focal and zero principal point: the focal scale
// multiplies these coordinates linearly for every model.
bool unit_projection(CameraKind kind, double xi, double alpha, double w2,
                     const Eigen::Vector3d& d, double& gx, double& gy) {
  switch (kind) {
    case CameraKind::PH:
      return detail::project_ph(1.0, 1.0, 0.0, 0.0, d.x(), d.y(), d.z(), gx, gy);
    case CameraKind::EF:
      return detail::project_ef(1.0, 1.0, 0.0, 0.0, d.x(), d.y(), d.z(), gx, gy);
    case CameraKind::DS:
      return detail::project_ds(1.0, 1.0, 0.0, 0.0, xi, alpha, w2, d.x(), d.y(),
                                d.z(), gx, gy);
    case CameraKind::CC:
      return detail::project_cc(1.0, 1.0, 0.0, 0.0, d.x(), d.y(), d.z(), gx, gy);
    case CameraKind::EC:
      return detail::project_ec(1.0, 1.0, 0.0, 0.0, d.x(), d.y(), d.z(), gx, gy);
  }
  return false;
}

}  // namespace

Eigen::Matrix3d look_at_rotation(const CameraModel& input_cam,
                                 const BoundingBox& bbox) {
  validate_bbox(bbox);
  const UnprojectResult center = unproject(input_cam, bbox.center());
  if (!center.valid)
    throw std::runtime_error(
        "look_at_rotation: bbox center outside invertible domain");

  const Eigen::Vector3d z_new = center.ray;
  // Gram-Schmidt of the input x-axis against the new optical axis keeps the
  // crop's roll aligned with the input camera.
  Eigen::Vector3d x_ref(1.0, 0.0, 0.0);
  Eigen::Vector3d t = x_ref - x_ref.dot(z_new) * z_new;
  if (t.norm() < 1e-12) {
    x_ref = Eigen::Vector3d(0.0, 1.0, 0.0);
    t = x_ref - x_ref.dot(z_new) * z_new;
  }
  const Eigen::Vector3d x_new = t.normalized();
  const Eigen::Vector3d y_new = z_new.cross(x_new);

  Eigen::Matrix3d R;
  R.row(0) = x_new;
  R.row(1) = y_new;
  R.row(2) = z_new;
  return R;
}

CameraModel output_zoom(const CameraModel& input_cam, const BoundingBox& bbox,
                        const Eigen::Matrix3d& rotation, CameraKind out_kind,
                        int out_size, double out_xi, double out_alpha) {
  validate_bbox(bbox);
  if (out_size <= 1) throw std::invalid_argument("output size must be > 1");

  const double w2 = out_kind == CameraKind::DS
                        ? detail::ds_constants(out_xi, out_alpha).w2
                        : 0.0;
  const double half = out_size / 2.0;

  double focal_limit = std::numeric_limits<double>::infinity();
  for (const Eigen::Vector2d& mid : bbox.side_midpoints()) {
    const UnprojectResult ray = unproject(input_cam, mid);
    if (!ray.valid)
      throw std::runtime_error(
          "output_zoom: bbox side midpoint outside invertible domain");
    const Eigen::Vector3d d = rotation * ray.ray;
    double gx = 0.0, gy = 0.0;
    if (!unit_projection(out_kind, out_xi, out_alpha, w2, d, gx, gy)) {
      if (out_kind == CameraKind::PH)
        throw std::runtime_error("bbox exceeds pinhole FOV");
      throw std::runtime_error("bbox exceeds " +
                               std::string(to_string(out_kind)) +
                               " output domain");
    }
    const double g = std::max(std::abs(gx), std::abs(gy));
    if (g > 0.0) focal_limit = std::min(focal_limit, half / g);
  }
  if (!std::isfinite(focal_limit))
    throw std::runtime_error("output_zoom: degenerate bbox midpoint rays");

  const double f = kZoomMargin * focal_limit;
  Intrinsics intr;
  intr.fx = f;
  intr.fy = f;
  intr.cx = half;
  intr.cy = half;
  intr.width = out_size;
  intr.height = out_size;
  return make_camera(out_kind, intr,
                     out_kind == CameraKind::DS ? out_xi : 0.0,
                     out_kind == CameraKind::DS ? out_alpha : 0.0);
}

CropGeometry plan_crop(const CameraModel& input_cam, const BoundingBox& bbox,
                       CameraKind out_kind, int out_size, double out_xi,
                       double out_alpha) {
  CropGeometry crop;
  crop.rotation = look_at_rotation(input_cam, bbox);
  crop.output_camera = output_zoom(input_cam, bbox, crop.rotation, out_kind,
                                   out_size, out_xi, out_alpha);
  return crop;
}

ImageBuffer warp_crop(const ImageBuffer& src, const CameraModel& input_cam,
                      const CropGeometry& crop) {
  if (src.width != input_cam.intr.width || src.height != input_cam.intr.height)
    throw std::invalid_argument("warp_crop: source size != input camera size");
  if (!is_rotation(crop.rotation))
    throw std::invalid_argument("warp_crop: rotation is not orthonormal");

  const int ow = crop.output_camera.intr.width;
  const int oh = crop.output_camera.intr.height;
  ImageBuffer out = ImageBuffer::create(ow, oh, src.channels);

  const Eigen::Matrix3d r_input_from_output = crop.rotation.transpose();
  const std::size_t n = static_cast<std::size_t>(ow);
  std::vector<double> up(n), vp(n), rx(n), ry(n), rz(n), ix(n), iy(n), iz(n),
      su(n), sv(n);
  std::vector<std::uint8_t> un_ok(n), pr_ok(n);

  for (int j = 0; j < oh; ++j) {
    for (int i = 0; i < ow; ++i) {
      up[i] = static_cast<double>(i);
      vp[i] = static_cast<double>(j);
    }
    kernels::unproject_batch(crop.output_camera, n, up.data(), vp.data(),
                             rx.data(), ry.data(), rz.data(), un_ok.data());
    kernels::rotate_points(r_input_from_output, n, rx.data(), ry.data(),
                           rz.data(), ix.data(), iy.data(), iz.data());
    kernels::project_batch(input_cam, n, ix.data(), iy.data(), iz.data(),
                           su.data(), sv.data(), pr_ok.data());
    std::uint8_t* row = out.data.data() +
                        static_cast<std::size_t>(j) * ow * out.channels;
    for (int i = 0; i < ow; ++i) {
      if (un_ok[i] && pr_ok[i])
        sample_bilinear(src, su[i], sv[i], row + i * out.channels);
    }
  }
  return out;
}

WarpSample warp_source_position(const CameraModel& input_cam,
                                const CropGeometry& crop,
                                const Eigen::Vector2d& out_pixel) {
  WarpSample sample;
  const UnprojectResult ray = unproject(crop.output_camera, out_pixel);
  if (!ray.valid) return sample;
  const Eigen::Vector3d in_dir = crop.rotation.transpose() * ray.ray;
  const ProjectResult proj = project(input_cam, in_dir);
  if (!proj.in_domain) return sample;
  sample.source = proj.pixel;
  sample.valid = true;
  return sample;
}

}  // namespace fishrepro
