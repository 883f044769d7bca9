#include "fishrepro/io.hpp"

#include <fstream>
#include <stdexcept>

namespace fishrepro {

namespace {

json vec3_to_json(const Eigen::Vector3d& v) {
  return json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json mat3_to_json(const Eigen::Matrix3d& m) {
  json arr = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) arr.push_back(m(r, c));
  return arr;
}

Eigen::Matrix3d mat3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 9)
    throw std::invalid_argument("expected a row-major 9-element rotation");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
  return m;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      lines.push_back(line);
  }
  return lines;
}

}  // namespace

json camera_to_json(const CameraModel& cam) {
  json j;
  j["kind"] = std::string(to_string(cam.kind));
  j["fx"] = cam.intr.fx;
  j["fy"] = cam.intr.fy;
  j["cx"] = cam.intr.cx;
  j["cy"] = cam.intr.cy;
  j["width"] = cam.intr.width;
  j["height"] = cam.intr.height;
  if (cam.kind == CameraKind::DS) {
    j["xi"] = cam.xi;
    j["alpha"] = cam.alpha;
  }
  return j;
}

CameraModel camera_from_json(const json& j) {
  const CameraKind kind =
      camera_kind_from_string(j.at("kind").get<std::string>());
  Intrinsics intr;
  intr.fx = j.at("fx").get<double>();
  intr.fy = j.at("fy").get<double>();
  intr.cx = j.at("cx").get<double>();
  intr.cy = j.at("cy").get<double>();
  intr.width = j.at("width").get<int>();
  intr.height = j.at("height").get<int>();
  const double xi = j.value("xi", 0.0);
  const double alpha = j.value("alpha", 0.0);
  return make_camera(kind, intr, xi, alpha);
}

json extrinsics_to_json(const Extrinsics& e) {
  json j;
  j["rotation"] = mat3_to_json(e.rotation);
  j["translation"] = vec3_to_json(e.translation);
  return j;
}

Extrinsics extrinsics_from_json(const json& j) {
  Extrinsics e;
  e.rotation = mat3_from_json(j.at("rotation"));
  e.translation = vec3_from_json(j.at("translation"));
  if (!is_rotation(e.rotation, 1e-6))
    throw std::invalid_argument("extrinsics rotation is not orthonormal");
  return e;
}

CameraFile load_camera_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  CameraFile file;
  file.camera = camera_from_json(j);
  if (j.contains("extrinsics"))
    file.extrinsics = extrinsics_from_json(j["extrinsics"]);
  return file;
}

void save_camera_file(const std::string& path, const CameraModel& cam,
                      const std::optional<Extrinsics>& extrinsics) {
  json j = camera_to_json(cam);
  if (extrinsics) j["extrinsics"] = extrinsics_to_json(*extrinsics);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

json pose_to_json(const Pose3D& pose) {
  json arr = json::array();
  for (const auto& joint : pose.joints) arr.push_back(vec3_to_json(joint));
  return arr;
}

Pose3D pose_from_json(const json& j, PoseFrame frame) {
  if (!j.is_array()) throw std::invalid_argument("pose must be [[x,y,z], ...]");
  Pose3D pose;
  pose.frame = frame;
  pose.joints.reserve(j.size());
  for (const auto& entry : j) pose.joints.push_back(vec3_from_json(entry));
  return pose;
}

BoundingBox bbox_from_xywh_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::invalid_argument("bbox must be [x, y, w, h]");
  return BoundingBox::from_xywh(j[0].get<double>(), j[1].get<double>(),
                                j[2].get<double>(), j[3].get<double>());
}

json pose_record_to_json(const PoseRecord& rec) {
  json j = rec.extra.is_object() ? rec.extra : json::object();
  j["id"] = rec.id;
  j["pose"] = pose_to_json(rec.pose);
  if (rec.mpja_deg) j["mpja_deg"] = *rec.mpja_deg;
  if (rec.mbba_deg) j["mbba_deg"] = *rec.mbba_deg;
  if (rec.projection) j["projection"] = *rec.projection;
  if (rec.bbox)
    j["bbox"] = json::array({rec.bbox->x_min, rec.bbox->y_min,
                             rec.bbox->width(), rec.bbox->height()});
  return j;
}

PoseRecord pose_record_from_json(const json& j) {
  PoseRecord rec;
  rec.id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                  : j.at("id").dump();
  rec.pose = pose_from_json(j.at("pose"), PoseFrame::world);
  if (j.contains("mpja_deg")) rec.mpja_deg = j["mpja_deg"].get<double>();
  if (j.contains("mbba_deg")) rec.mbba_deg = j["mbba_deg"].get<double>();
  if (j.contains("projection"))
    rec.projection = j["projection"].get<std::string>();
  if (j.contains("bbox")) rec.bbox = bbox_from_xywh_json(j["bbox"]);
  rec.extra = json::object();
  for (const auto& [key, value] : j.items()) {
    if (key != "id" && key != "pose" && key != "mpja_deg" &&
        key != "mbba_deg" && key != "projection" && key != "bbox")
      rec.extra[key] = value;
  }
  return rec;
}

std::vector<PoseRecord> read_pose_jsonl(const std::string& path) {
  std::vector<PoseRecord> records;
  for (const auto& line : read_lines(path))
    records.push_back(pose_record_from_json(json::parse(line)));
  return records;
}

void write_pose_jsonl(const std::string& path,
                      const std::vector<PoseRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& rec : records) out << pose_record_to_json(rec).dump() << '\n';
}

std::vector<PredictionRecord> read_prediction_jsonl(const std::string& path) {
  std::vector<PredictionRecord> records;
  for (const auto& line : read_lines(path)) {
    const json j = json::parse(line);
    PredictionRecord rec;
    rec.id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                    : j.at("id").dump();
    rec.prediction.rel_pose = pose_from_json(j.at("rel_pose"), PoseFrame::camera);
    const json& kp = j.at("kp2d");
    if (!kp.is_array()) throw std::invalid_argument("kp2d must be [[u,v], ...]");
    for (const auto& entry : kp) {
      if (!entry.is_array() || entry.size() != 2)
        throw std::invalid_argument("kp2d entries must be [u, v]");
      rec.prediction.keypoints2d.emplace_back(entry[0].get<double>(),
                                              entry[1].get<double>());
    }
    if (j.contains("weights"))
      rec.prediction.weights = j["weights"].get<std::vector<double>>();
    if (rec.prediction.keypoints2d.size() != rec.prediction.rel_pose.joints.size())
      throw std::invalid_argument("rel_pose and kp2d must have equal length");
    records.push_back(std::move(rec));
  }
  return records;
}

void write_prediction_jsonl(const std::string& path,
                            const std::vector<PredictionRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& rec : records) {
    json j;
    j["id"] = rec.id;
    j["rel_pose"] = pose_to_json(rec.prediction.rel_pose);
    json kp = json::array();
    for (const auto& p : rec.prediction.keypoints2d)
      kp.push_back(json::array({p.x(), p.y()}));
    j["kp2d"] = kp;
    if (!rec.prediction.weights.empty()) j["weights"] = rec.prediction.weights;
    out << j.dump() << '\n';
  }
}

std::vector<DetectionViews> read_detection_jsonl(const std::string& path) {
  std::vector<DetectionViews> records;
  for (const auto& line : read_lines(path)) {
    const json j = json::parse(line);
    DetectionViews rec;
    rec.id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                    : j.at("id").dump();
    for (const auto& [cam_id, view] : j.at("views").items()) {
      std::vector<Eigen::Vector2d> kps;
      for (const auto& entry : view.at("kp2d"))
        kps.emplace_back(entry[0].get<double>(), entry[1].get<double>());
      std::vector<double> conf;
      if (view.contains("conf"))
        conf = view["conf"].get<std::vector<double>>();
      else
        conf.assign(kps.size(), 1.0);
      if (conf.size() != kps.size())
        throw std::invalid_argument("conf must match kp2d length");
      rec.views[cam_id] = {std::move(kps), std::move(conf)};
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_detection_jsonl(const std::string& path,
                           const std::vector<DetectionViews>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& rec : records) {
    json views = json::object();
    for (const auto& [cam_id, view] : rec.views) {
      json kp = json::array();
      for (const auto& p : view.first) kp.push_back(json::array({p.x(), p.y()}));
      views[cam_id] = {{"kp2d", kp}, {"conf", view.second}};
    }
    json j;
    j["id"] = rec.id;
    j["views"] = views;
    out << j.dump() << '\n';
  }
}

std::vector<RigCamera> read_rig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  const json& cams = j.is_array() ? j : j.at("cameras");
  std::vector<RigCamera> rig;
  for (const auto& entry : cams) {
    RigCamera cam;
    cam.id = entry.at("id").get<std::string>();
    cam.camera = camera_from_json(entry.at("camera"));
    if (entry.contains("extrinsics"))
      cam.extrinsics = extrinsics_from_json(entry["extrinsics"]);
    rig.push_back(std::move(cam));
  }
  if (rig.empty()) throw std::runtime_error("rig has no cameras");
  return rig;
}

void write_rig(const std::string& path, const std::vector<RigCamera>& rig) {
  json cams = json::array();
  for (const auto& cam : rig) {
    json entry;
    entry["id"] = cam.id;
    entry["camera"] = camera_to_json(cam.camera);
    entry["extrinsics"] = extrinsics_to_json(cam.extrinsics);
    cams.push_back(entry);
  }
  json j;
  j["cameras"] = cams;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

SkeletonTopology read_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  SkeletonTopology topo;
  topo.num_joints = j.at("num_joints").get<std::size_t>();
  topo.root_index = j.value("root", 0);
  for (const auto& bone : j.at("bones"))
    topo.bones.push_back({bone[0].get<int>(), bone[1].get<int>()});
  if (j.contains("symmetric_pairs"))
    for (const auto& pair : j["symmetric_pairs"])
      topo.symmetric_pairs.push_back({pair[0].get<int>(), pair[1].get<int>()});
  if (j.contains("bone_range_mm"))
    for (const auto& range : j["bone_range_mm"])
      topo.bone_range_mm.push_back(
          {range[0].get<double>(), range[1].get<double>()});
  if (j.contains("joint_names"))
    topo.joint_names = j["joint_names"].get<std::vector<std::string>>();
  return topo;
}

void write_topology(const std::string& path, const SkeletonTopology& topo) {
  json j;
  j["num_joints"] = topo.num_joints;
  j["root"] = topo.root_index;
  json bones = json::array();
  for (const auto& b : topo.bones) bones.push_back(json::array({b[0], b[1]}));
  j["bones"] = bones;
  json pairs = json::array();
  for (const auto& p : topo.symmetric_pairs)
    pairs.push_back(json::array({p[0], p[1]}));
  j["symmetric_pairs"] = pairs;
  json ranges = json::array();
  for (const auto& r : topo.bone_range_mm)
    ranges.push_back(json::array({r[0], r[1]}));
  j["bone_range_mm"] = ranges;
  j["joint_names"] = topo.joint_names;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

SyntheticScene read_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  SyntheticScene scene;
  scene.seed = j.value("seed", 0ULL);
  for (const auto& entry : j.at("rig")) {
    RigCamera cam;
    cam.id = entry.at("id").get<std::string>();
    cam.camera = camera_from_json(entry.at("camera"));
    if (entry.contains("extrinsics"))
      cam.extrinsics = extrinsics_from_json(entry["extrinsics"]);
    scene.rig.push_back(std::move(cam));
  }
  for (const auto& entry : j.at("skeletons")) {
    SyntheticSkeleton sk;
    sk.id = entry.at("id").get<std::string>();
    sk.pose_world = pose_from_json(entry.at("pose"), PoseFrame::world);
    scene.skeletons.push_back(std::move(sk));
  }
  return scene;
}

void write_scene(const std::string& path, const SyntheticScene& scene) {
  json rig = json::array();
  for (const auto& cam : scene.rig) {
    json entry;
    entry["id"] = cam.id;
    entry["camera"] = camera_to_json(cam.camera);
    entry["extrinsics"] = extrinsics_to_json(cam.extrinsics);
    rig.push_back(entry);
  }
  json skeletons = json::array();
  for (const auto& sk : scene.skeletons) {
    json entry;
    entry["id"] = sk.id;
    entry["pose"] = pose_to_json(sk.pose_world);
    skeletons.push_back(entry);
  }
  json j;
  j["seed"] = scene.seed;
  j["rig"] = rig;
  j["skeletons"] = skeletons;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace fishrepro
