#include "fishrepro/recovery.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <stdexcept>

namespace fishrepro {

Eigen::Vector3d recover_translation(const Prediction& pred,
                                    const CameraModel& output_cam) {
  const std::size_t j = pred.rel_pose.joints.size();
  if (pred.keypoints2d.size() != j)
    throw std::invalid_argument("recover_translation: rel_pose/keypoints2d size mismatch");
  if (!pred.weights.empty() && pred.weights.size() != j)
    throw std::invalid_argument("recover_translation: weights size mismatch");

  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  std::size_t usable = 0;
  for (std::size_t k = 0; k < j; ++k) {
    const double w = pred.weights.empty() ? 1.0 : pred.weights[k];
    if (!(w > 0.0)) continue;
    // Keypoints outside the invertible domain or behind the image plane are
    // dropped rather than failing the pose.
    const UnprojectResult ray = unproject(output_cam, pred.keypoints2d[k]);
    if (!ray.valid || !(ray.ray.z() > 0.0)) continue;
    const double a = ray.ray.x() / ray.ray.z();
    const double b = ray.ray.y() / ray.ray.z();
    const auto& p = pred.rel_pose.joints[k];

    // Residual rows: (-1, 0, a | X - a Z) and (0, -1, b | Y - b Z).
    const Eigen::Vector3d r1(-1.0, 0.0, a);
    const Eigen::Vector3d r2(0.0, -1.0, b);
    m.noalias() += w * (r1 * r1.transpose() + r2 * r2.transpose());
    rhs.noalias() += w * (r1 * (p.x() - a * p.z()) + r2 * (p.y() - b * p.z()));
    ++usable;
  }
  if (usable < 3)
    throw std::runtime_error("recover_translation: fewer than 3 usable joints");

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(2) < sv(0) * 1e-14)
    throw std::runtime_error(
        "recover_translation: degenerate geometry (rank-deficient system)");
  if (sv(0) / sv(2) > 1e12) return svd.solve(rhs);  // pseudo-inverse route
  return m.ldlt().solve(rhs);
}

Pose3D absolute_pose(const Pose3D& rel_pose, const Eigen::Vector3d& t,
                     const Eigen::Matrix3d& crop_rotation,
                     const Extrinsics& extrinsics) {
  Pose3D out;
  out.frame = PoseFrame::world;
  out.joints.reserve(rel_pose.joints.size());
  const Eigen::Matrix3d r_input_from_output = crop_rotation.transpose();
  for (const auto& joint : rel_pose.joints) {
    const Eigen::Vector3d cam_pt = r_input_from_output * (joint + t);
    out.joints.push_back(extrinsics.world_from_camera(cam_pt));
  }
  return out;
}

}  // namespace fishrepro
