#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string_view>

namespace fishrepro {

/// The five projection models: pinhole, equidistant fisheye, double sphere,
/// central cylindrical and equidistant cylindrical.
enum class CameraKind : std::uint8_t { PH, EF, DS, CC, EC };

std::string_view to_string(CameraKind kind);
CameraKind camera_kind_from_string(std::string_view name);

/// Pixel-space parameters shared by all models. For the angular image
/// coordinates of EF/CC/EC the focal lengths act as px per radian; the CC
/// vertical coordinate is px per unit of normalized height.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

struct CameraModel {
  CameraKind kind = CameraKind::PH;
  Intrinsics intr;
  double xi = 0.0;     // double sphere center shift, >= 0
  double alpha = 0.0;  // double sphere blend, in [0, 1]
};

/// Validates parameter ranges and returns the model. Throws
/// std::invalid_argument on violation: fx, fy > 0; principal point inside the
/// image; DS needs alpha in [0,1] and xi >= 0; other kinds take no extras.
CameraModel make_camera(CameraKind kind, const Intrinsics& intr,
                        double xi = 0.0, double alpha = 0.0);

struct ProjectResult {
  Eigen::Vector2d pixel{std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()};
  bool in_domain = false;  // point inside the model's projectable domain
  bool in_image = false;   // pixel inside [0,width) x [0,height)

  bool valid() const { return in_domain && in_image; }
};

struct UnprojectResult {
  Eigen::Vector3d ray{0.0, 0.0, 1.0};  // unit direction, camera frame
  bool valid = false;
};

/// Projects a camera-frame point (mm) to pixel coordinates. The pixel is NaN
/// when the point lies outside the projectable domain. Throws
/// std::domain_error for the zero vector.
ProjectResult project(const CameraModel& cam, const Eigen::Vector3d& point);

/// Inverts the projection to a unit ray. `valid` is false when the pixel lies
/// outside the model's invertible region (for DS with alpha > 0.5 the disk
/// r^2 <= 1/(2 alpha - 1)).
UnprojectResult unproject(const CameraModel& cam, const Eigen::Vector2d& pixel);

/// (x/z, y/z) of the unprojected ray. Throws std::domain_error when the pixel
/// does not unproject or the ray has z <= 0.
Eigen::Vector2d normalized_coords(const CameraModel& cam,
                                  const Eigen::Vector2d& pixel);

}  // namespace fishrepro
