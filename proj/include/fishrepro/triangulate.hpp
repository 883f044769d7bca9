#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

#include "fishrepro/camera.hpp"
#include "fishrepro/lm.hpp"
#include "fishrepro/types.hpp"

namespace fishrepro {

/// One camera's 2D observations of a full skeleton.
struct ViewObservation {
  CameraModel camera;
  Extrinsics extrinsics;
  std::vector<Eigen::Vector2d> keypoints2d;
  std::vector<double> confidence;  // per joint, in [0, 1]
};

struct SkeletonTopology {
  std::size_t num_joints = 0;
  std::size_t root_index = 0;
  std::vector<std::array<int, 2>> bones;
  std::vector<std::array<int, 2>> symmetric_pairs;     // indices into bones
  std::vector<std::array<double, 2>> bone_range_mm;    // per bone [min, max]
  std::vector<std::string> joint_names;
};

/// Ships the default 17-joint humanoid used by the synthetic harness.
const SkeletonTopology& default_skeleton17();

/// Huber scale for reprojection residuals, px.
inline constexpr double kHuberDeltaPx = 2.0;

struct PointObservation {
  CameraModel camera;
  Extrinsics extrinsics;
  Eigen::Vector2d keypoint;
  double confidence = 1.0;
};

/// d(pixel)/d(point) of the camera-frame projection: analytic for PH and DS,
/// central differences for the cylindrical/equidistant branches. Returns
/// false outside the projectable domain.
bool project_jacobian(const CameraModel& cam, const Eigen::Vector3d& p_cam,
                      Eigen::Vector2d& pixel,
                      Eigen::Matrix<double, 2, 3>& jacobian);

struct PointTriangulation {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();  // world, mm
  bool converged = false;
  int iterations = 0;
  double cost = 0.0;
  std::vector<double> cost_history;
};

/// Nonlinear least-squares point triangulation with Huber loss, initialized
/// at the midpoint of the two highest-confidence rays. Throws
/// std::runtime_error with fewer than 2 usable views or no parallax.
PointTriangulation triangulate_point(const std::vector<PointObservation>& obs,
                                     const LMOptions& options = {});

struct SkeletonTriangulation {
  Pose3D pose;                           // world; invalid joints are NaN
  std::vector<std::uint8_t> joint_valid;
  bool converged = false;
  double cost = 0.0;
  std::vector<double> cost_history;
};

/// Joint reprojection + bone-symmetry optimization:
///   sum_views rho(|conf (proj - kp)|^2) + lambda_sym sum_pairs (|b_l|-|b_r|)^2
/// Joints with fewer than 2 confident views are flagged invalid and left out;
/// bones outside the topology's plausible ranges flag their endpoints.
SkeletonTriangulation triangulate_skeleton(
    const std::vector<ViewObservation>& views, const SkeletonTopology& topology,
    double lambda_sym, const LMOptions& options = {});

}  // namespace fishrepro
