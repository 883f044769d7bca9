#pragma once

// JSON / JSONL file schemas. Cameras:
//   {"kind":"DS","fx":...,"fy":...,"cx":...,"cy":...,"width":...,"height":...,
//    "xi":...,"alpha":...}            (xi/alpha for DS only)
// Pose records ("pose" is [[x,y,z] x J], mm):
//   {"id":..., "pose":[[...]], "mpja_deg":..., "mbba_deg":..., "bbox":[x,y,w,h],
//    "projection":"PH", ...}           (all but id/pose optional)
// Prediction records:
//   {"id":..., "rel_pose":[[x,y,z] x J], "kp2d":[[u,v] x J], "weights":[J]}

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "fishrepro/camera.hpp"
#include "fishrepro/recovery.hpp"
#include "fishrepro/synth.hpp"
#include "fishrepro/triangulate.hpp"
#include "fishrepro/types.hpp"

namespace fishrepro {

using json = nlohmann::json;

json camera_to_json(const CameraModel& cam);
CameraModel camera_from_json(const json& j);

json extrinsics_to_json(const Extrinsics& e);
Extrinsics extrinsics_from_json(const json& j);

struct CameraFile {
  CameraModel camera;
  std::optional<Extrinsics> extrinsics;
};
CameraFile load_camera_file(const std::string& path);
void save_camera_file(const std::string& path, const CameraModel& cam,
                      const std::optional<Extrinsics>& extrinsics = {});

struct PoseRecord {
  std::string id;
  Pose3D pose;
  std::optional<double> mpja_deg;
  std::optional<double> mbba_deg;
  std::optional<BoundingBox> bbox;
  std::optional<std::string> projection;
  json extra;  // provenance fields passed through untouched
};
std::vector<PoseRecord> read_pose_jsonl(const std::string& path);
void write_pose_jsonl(const std::string& path,
                      const std::vector<PoseRecord>& records);
json pose_record_to_json(const PoseRecord& rec);
PoseRecord pose_record_from_json(const json& j);

struct PredictionRecord {
  std::string id;
  Prediction prediction;
};
std::vector<PredictionRecord> read_prediction_jsonl(const std::string& path);
void write_prediction_jsonl(const std::string& path,
                            const std::vector<PredictionRecord>& records);

struct DetectionViews {
  std::string id;
  // camera id -> (keypoints, confidences)
  std::map<std::string, std::pair<std::vector<Eigen::Vector2d>,
                                  std::vector<double>>> views;
};
std::vector<DetectionViews> read_detection_jsonl(const std::string& path);
void write_detection_jsonl(const std::string& path,
                           const std::vector<DetectionViews>& records);

std::vector<RigCamera> read_rig(const std::string& path);
void write_rig(const std::string& path, const std::vector<RigCamera>& rig);

SkeletonTopology read_topology(const std::string& path);
void write_topology(const std::string& path, const SkeletonTopology& topo);

SyntheticScene read_scene(const std::string& path);
void write_scene(const std::string& path, const SyntheticScene& scene);

json pose_to_json(const Pose3D& pose);
Pose3D pose_from_json(const json& j, PoseFrame frame);

BoundingBox bbox_from_xywh_json(const json& j);

}  // namespace fishrepro
