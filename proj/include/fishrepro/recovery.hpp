#pragma once

#include <Eigen/Core>

#include <vector>

#include "fishrepro/camera.hpp"
#include "fishrepro/types.hpp"

namespace fishrepro {

/// Network-style output for one person: a root-relative 3D pose in the
/// output-camera frame plus 2D keypoints in the crop. Empty weights mean
/// all ones.
struct Prediction {
  Pose3D rel_pose;
  std::vector<Eigen::Vector2d> keypoints2d;
  std::vector<double> weights;
};

/// Translation t minimizing the weighted strong-perspective residual
///   sum_k w_k [ (a_k (Z_k+t_z) - (X_k+t_x))^2 + (b_k (Z_k+t_z) - (Y_k+t_y))^2 ]
/// with (a_k, b_k) the normalized coordinates of keypoint k. Keypoints that
/// do not unproject to a forward ray are dropped (weight 0). Throws
/// std::runtime_error with fewer than 3 usable joints or degenerate geometry.
Eigen::Vector3d recover_translation(const Prediction& pred,
                                    const CameraModel& output_cam);

/// World-frame absolute pose: extrinsics applied to R' (rel_joint + t),
/// where R is the crop rotation (output-from-input).
Pose3D absolute_pose(const Pose3D& rel_pose, const Eigen::Vector3d& t,
                     const Eigen::Matrix3d& crop_rotation,
                     const Extrinsics& extrinsics);

}  // namespace fishrepro
