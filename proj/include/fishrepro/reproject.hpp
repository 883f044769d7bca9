#pragma once

#include <Eigen/Core>

#include "fishrepro/camera.hpp"
#include "fishrepro/image.hpp"
#include "fishrepro/types.hpp"

namespace fishrepro {

/// Virtual output camera aimed at a bounding box: intrinsics plus the
/// output-frame-from-input-frame rotation.
struct CropGeometry {
  CameraModel output_camera;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

struct VirtualCrop {
  ImageBuffer image;
  CameraModel output_camera;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

/// Margin applied to the maximal focal scale so the bbox side midpoints do
/// not sit exactly on the output border.
inline constexpr double kZoomMargin = 0.95;

/// Rotation taking the unprojected bbox-center ray to (0,0,1), with roll
/// minimized against the input camera's x-axis. Throws std::runtime_error
/// when the bbox center does not unproject.
Eigen::Matrix3d look_at_rotation(const CameraModel& input_cam,
                                 const BoundingBox& bbox);

/// Output camera of `out_kind` with principal point at the image center and
/// the largest focal scale (times kZoomMargin) for which the four rotated
/// bbox side-midpoint rays project inside [0, out_size)^2. For PH outputs a
/// midpoint behind the optical axis throws "bbox exceeds pinhole FOV".
CameraModel output_zoom(const CameraModel& input_cam, const BoundingBox& bbox,
                        const Eigen::Matrix3d& rotation, CameraKind out_kind,
                        int out_size, double out_xi = 0.0,
                        double out_alpha = 0.0);

/// look_at_rotation + output_zoom.
CropGeometry plan_crop(const CameraModel& input_cam, const BoundingBox& bbox,
                       CameraKind out_kind, int out_size, double out_xi = 0.0,
                       double out_alpha = 0.0);

/// Backward warp: every output pixel is unprojected with the output camera,
/// rotated into the input frame, projected with the input camera and sampled
/// bilinearly. Out-of-domain or out-of-bounds samples are black.
ImageBuffer warp_crop(const ImageBuffer& src, const CameraModel& input_cam,
                      const CropGeometry& crop);

struct WarpSample {
  Eigen::Vector2d source{0.0, 0.0};
  bool valid = false;
};

/// Source-image position sampled for one output pixel (geometry only, no
/// interpolation); `valid` covers both unprojection and projection domains.
WarpSample warp_source_position(const CameraModel& input_cam,
                                const CropGeometry& crop,
                                const Eigen::Vector2d& out_pixel);

}  // namespace fishrepro
