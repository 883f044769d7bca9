#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace fishrepro {

enum class PoseFrame { camera, world };

/// Ordered joint positions in millimeters.
struct Pose3D {
  std::vector<Eigen::Vector3d> joints;
  PoseFrame frame = PoseFrame::camera;

  std::size_t size() const { return joints.size(); }
};

/// Axis-aligned pixel rectangle in input-image coordinates.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  static BoundingBox from_xywh(double x, double y, double w, double h);

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  Eigen::Vector2d center() const;
  /// Midpoints of the four sides: top, bottom, left, right.
  std::array<Eigen::Vector2d, 4> side_midpoints() const;
  std::array<Eigen::Vector2d, 4> corners() const;
  bool intersects_image(int width, int height) const;
};

/// Throws std::invalid_argument unless x_min < x_max and y_min < y_max.
void validate_bbox(const BoundingBox& bbox);

/// Camera pose: world-from-camera rotation plus camera center in world (mm).
struct Extrinsics {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d world_from_camera(const Eigen::Vector3d& p_cam) const {
    return rotation * p_cam + translation;
  }
  Eigen::Vector3d camera_from_world(const Eigen::Vector3d& p_world) const {
    return rotation.transpose() * (p_world - translation);
  }
};

/// True when R'R = I and det(R) = 1 within tol.
bool is_rotation(const Eigen::Matrix3d& R, double tol = 1e-9);

Pose3D to_camera_frame(const Pose3D& world_pose, const Extrinsics& extrinsics);
Pose3D to_world_frame(const Pose3D& camera_pose, const Extrinsics& extrinsics);

}  // namespace fishrepro
