#pragma once

#include "fishrepro/camera.hpp"
#include "fishrepro/types.hpp"

namespace fishrepro {

/// Per-person projection choice from a spatial-expansion angle against the
/// threshold alpha_t: PH below, DS at or above.
struct ProjectionChoice {
  CameraKind kind = CameraKind::DS;
  double alpha_t_deg = 0.0;
  double angle_deg = 0.0;
};

/// Maximum pairwise joint angle in degrees: the largest angle between
/// camera-center rays to any two joints. Pose must be in the camera frame
/// with J >= 2; a joint at the camera center throws std::domain_error.
double mpja_deg(const Pose3D& pose);

struct MbbaResult {
  double angle_deg = 0.0;
  int skipped = 0;  // boundary samples that did not unproject
};

/// Maximum bounding box angle in degrees over 8 boundary samples (4 corners
/// + 4 side midpoints) unprojected under `cam`. Invalid samples are skipped;
/// fewer than 2 usable samples throws std::runtime_error.
MbbaResult mbba_deg(const BoundingBox& bbox, const CameraModel& cam);

/// Mean Euclidean distance from the joints to the camera center, mm.
double comd_mm(const Pose3D& pose);

ProjectionChoice select_projection(double angle_deg, double alpha_t_deg);

}  // namespace fishrepro
