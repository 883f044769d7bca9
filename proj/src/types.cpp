#include "fishrepro/types.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace fishrepro {

BoundingBox BoundingBox::from_xywh(double x, double y, double w, double h) {
  return BoundingBox{x, y, x + w, y + h};
}

Eigen::Vector2d BoundingBox::center() const {
  return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)};
}

std::array<Eigen::Vector2d, 4> BoundingBox::side_midpoints() const {
  const Eigen::Vector2d c = center();
  return {Eigen::Vector2d{c.x(), y_min}, Eigen::Vector2d{c.x(), y_max},
          Eigen::Vector2d{x_min, c.y()}, Eigen::Vector2d{x_max, c.y()}};
}

std::array<Eigen::Vector2d, 4> BoundingBox::corners() const {
  return {Eigen::Vector2d{x_min, y_min}, Eigen::Vector2d{x_max, y_min},
          Eigen::Vector2d{x_max, y_max}, Eigen::Vector2d{x_min, y_max}};
}

bool BoundingBox::intersects_image(int width, int height) const {
  return x_max > 0.0 && y_max > 0.0 && x_min < width && y_min < height;
}

void validate_bbox(const BoundingBox& bbox) {
  if (!(bbox.x_min < bbox.x_max) || !(bbox.y_min < bbox.y_max))
    throw std::invalid_argument("bounding box must have positive extent");
}

bool is_rotation(const Eigen::Matrix3d& R, double tol) {
  const double ortho =
      (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho < tol && std::abs(R.determinant() - 1.0) < tol;
}

Pose3D to_camera_frame(const Pose3D& world_pose, const Extrinsics& extrinsics) {
  Pose3D out;
  out.frame = PoseFrame::camera;
  out.joints.reserve(world_pose.joints.size());
  for (const auto& j : world_pose.joints)
    out.joints.push_back(extrinsics.camera_from_world(j));
  return out;
}

Pose3D to_world_frame(const Pose3D& camera_pose, const Extrinsics& extrinsics) {
  Pose3D out;
  out.frame = PoseFrame::world;
  out.joints.reserve(camera_pose.joints.size());
  for (const auto& j : camera_pose.joints)
    out.joints.push_back(extrinsics.world_from_camera(j));
  return out;
}

}  // namespace fishrepro
