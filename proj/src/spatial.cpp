#include "fishrepro/spatial.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fishrepro/detail/camera_math.hpp"
#include "fishrepro/kernels.hpp"

namespace fishrepro {

namespace {
constexpr double kRadToDeg = 180.0 / detail::kPi;
}

double mpja_deg(const Pose3D& pose) {
  if (pose.frame != PoseFrame::camera)
    throw std::invalid_argument("mpja: pose must be in the camera frame");
  const std::size_t j = pose.joints.size();
  if (j < 2) throw std::invalid_argument("mpja: need at least 2 joints");

  std::vector<double> x(j), y(j), z(j);
  for (std::size_t i = 0; i < j; ++i) {
    const auto& p = pose.joints[i];
    if (p.x() == 0.0 && p.y() == 0.0 && p.z() == 0.0)
      throw std::domain_error("mpja: joint at the camera center");
    x[i] = p.x();
    y[i] = p.y();
    z[i] = p.z();
  }
  return kernels::max_pairwise_angle(j, x.data(), y.data(), z.data()) *
         kRadToDeg;
}

MbbaResult mbba_deg(const BoundingBox& bbox, const CameraModel& cam) {
  validate_bbox(bbox);
  std::vector<Eigen::Vector2d> samples;
  samples.reserve(8);
  for (const auto& c : bbox.corners()) samples.push_back(c);
  for (const auto& m : bbox.side_midpoints()) samples.push_back(m);

  std::vector<double> x, y, z;
  int skipped = 0;
  for (const auto& px : samples) {
    const UnprojectResult r = unproject(cam, px);
    if (!r.valid) {
      ++skipped;
      continue;
    }
    x.push_back(r.ray.x());
    y.push_back(r.ray.y());
    z.push_back(r.ray.z());
  }
  if (x.size() < 2)
    throw std::runtime_error("mbba: fewer than 2 boundary samples unproject");
  MbbaResult res;
  res.skipped = skipped;
  res.angle_deg =
      kernels::max_pairwise_angle(x.size(), x.data(), y.data(), z.data()) *
      kRadToDeg;
  return res;
}

double comd_mm(const Pose3D& pose) {
  if (pose.frame != PoseFrame::camera)
    throw std::invalid_argument("comd: pose must be in the camera frame");
  if (pose.joints.empty())
    throw std::invalid_argument("comd: need at least 1 joint");
  double sum = 0.0;
  for (const auto& j : pose.joints) sum += j.norm();
  return sum / static_cast<double>(pose.joints.size());
}

ProjectionChoice select_projection(double angle_deg, double alpha_t_deg) {
  if (!(alpha_t_deg >= 0.0 && alpha_t_deg <= 180.0))
    throw std::invalid_argument("alpha_t must be in [0, 180] degrees");
  ProjectionChoice choice;
  choice.alpha_t_deg = alpha_t_deg;
  choice.angle_deg = angle_deg;
  // Ties go to DS: it degrades gracefully at large FOV, PH does not.
  choice.kind = angle_deg < alpha_t_deg ? CameraKind::PH : CameraKind::DS;
  return choice;
}

}  // namespace fishrepro
