#include "fishrepro/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>

#include <cmath>
#include <stdexcept>

#include "fishrepro/detail/camera_math.hpp"
#include "fishrepro/parallel.hpp"
#include "fishrepro/spatial.hpp"
#include "fishrepro/triangulate.hpp"

namespace fishrepro {

namespace {

constexpr double kDegToRad = detail::kPi / 180.0;

// Canonical standing 17-joint skeleton, person frame (x right, y down, z
// forward), pelvis at the origin, mm. Matches default_skeleton17 ordering.
const std::vector<Eigen::Vector3d>& template_skeleton() {
  static const std::vector<Eigen::Vector3d> joints = {
      {0, 0, 0},        // pelvis
      {0, -250, 0},     // spine
      {0, -450, 0},     // neck
      {0, -600, 0},     // head
      {0, -750, 0},     // head_top
      {180, -430, 0},   // l_shoulder
      {320, -240, 10},  // l_elbow
      {420, -40, 20},   // l_wrist
      {-180, -430, 0},  // r_shoulder
      {-320, -240, 10}, // r_elbow
      {-420, -40, 20},  // r_wrist
      {110, 20, 0},     // l_hip
      {130, 440, 20},   // l_knee
      {140, 860, 0},    // l_ankle
      {-110, 20, 0},    // r_hip
      {-130, 440, 20},  // r_knee
      {-140, 860, 0},   // r_ankle
  };
  return joints;
}

CameraModel primary_fisheye() {
  Intrinsics intr;
  intr.fx = 160.0;
  intr.fy = 160.0;
  intr.cx = 320.0;
  intr.cy = 320.0;
  intr.width = 640;
  intr.height = 640;
  return make_camera(CameraKind::DS, intr, 0.5, 0.55);
}

CameraModel ring_pinhole() {
  Intrinsics intr;
  intr.fx = 500.0;
  intr.fy = 500.0;
  intr.cx = 320.0;
  intr.cy = 320.0;
  intr.width = 640;
  intr.height = 640;
  return make_camera(CameraKind::PH, intr);
}

// World-from-camera rotation for a camera at `center` looking at `target`,
// keeping +y roughly down.
Eigen::Matrix3d look_toward(const Eigen::Vector3d& center,
                            const Eigen::Vector3d& target) {
  const Eigen::Vector3d z = (target - center).normalized();
  Eigen::Vector3d y = Eigen::Vector3d(0, 1, 0) -
                      Eigen::Vector3d(0, 1, 0).dot(z) * z;
  if (y.norm() < 1e-9) y = Eigen::Vector3d(0, 0, 1) - z.z() * z;
  y.normalize();
  const Eigen::Vector3d x = y.cross(z);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return r;  // columns are the camera axes in world coordinates
}

}  // namespace

std::mt19937_64 record_rng(std::uint64_t seed, std::uint64_t record_index) {
  // splitmix64 of (seed, index) decorrelates neighboring streams.
  std::uint64_t h = seed + 0x9e3779b97f4a7c15ULL * (record_index + 1);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return std::mt19937_64(h);
}

SyntheticScene generate_scene(std::uint64_t seed, std::size_t n_skeletons,
                              double mpja_lo_deg, double mpja_hi_deg,
                              std::size_t n_cameras) {
  if (!(mpja_lo_deg >= 0.0 && mpja_hi_deg <= 180.0 &&
        mpja_lo_deg <= mpja_hi_deg))
    throw std::invalid_argument("mpja range must satisfy 0 <= lo <= hi <= 180");
  if (n_cameras < 1) throw std::invalid_argument("need at least one camera");

  SyntheticScene scene;
  scene.seed = seed;
  scene.rig.push_back({"cam0", primary_fisheye(), Extrinsics{}});

  const Eigen::Vector3d rig_target(0.0, 0.0, 2500.0);
  for (std::size_t c = 1; c < n_cameras; ++c) {
    const double ang = 2.0 * detail::kPi * static_cast<double>(c) /
                       static_cast<double>(n_cameras);
    const Eigen::Vector3d center =
        rig_target + 4000.0 * Eigen::Vector3d(std::sin(ang), -0.2,
                                              std::cos(ang)).normalized();
    Extrinsics ext;
    ext.rotation = look_toward(center, rig_target);
    ext.translation = center;
    scene.rig.push_back({"cam" + std::to_string(c),
                         c % 2 == 1 ? ring_pinhole() : primary_fisheye(),
                         ext});
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const CameraModel& primary = scene.rig[0].camera;
  const auto& tmpl = template_skeleton();

  for (std::size_t s = 0; s < n_skeletons; ++s) {
    bool placed = false;
    for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
      const double target =
          mpja_lo_deg + (mpja_hi_deg - mpja_lo_deg) * unit(rng);
      // Rough distance that makes a ~1.8 m skeleton subtend the target angle,
      // jittered; rejection fixes up the rest.
      const double half = std::max(target, 1.0) / 2.0 * kDegToRad;
      double dist = 900.0 / std::tan(std::min(half, 1.45));
      dist *= std::exp(0.15 * gauss(rng));
      dist = std::min(std::max(dist, 120.0), 15000.0);

      // Keep the placement direction closer to the axis for wide targets.
      const double max_off =
          std::max(5.0, 55.0 - target / 3.0) * kDegToRad;
      const double off = max_off * unit(rng);
      const double az = 2.0 * detail::kPi * unit(rng);
      const Eigen::Vector3d dir(std::sin(off) * std::cos(az),
                                std::sin(off) * std::sin(az), std::cos(off));
      const double yaw = 2.0 * detail::kPi * unit(rng);
      const Eigen::Matrix3d spin =
          Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();

      Pose3D pose;
      pose.frame = PoseFrame::camera;  // world == primary camera frame
      pose.joints.reserve(tmpl.size());
      const Eigen::Vector3d center = dist * dir;
      for (const auto& p : tmpl) pose.joints.push_back(spin * p + center);

      bool visible = true;
      for (const auto& p : pose.joints) {
        const ProjectResult pr = project(primary, p);
        if (!pr.valid()) {
          visible = false;
          break;
        }
      }
      if (!visible) continue;
      const double mpja = mpja_deg(pose);
      if (mpja < mpja_lo_deg || mpja > mpja_hi_deg) continue;

      SyntheticSkeleton sk;
      sk.id = "s" + std::to_string(s);
      sk.pose_world = pose;
      sk.pose_world.frame = PoseFrame::world;
      scene.skeletons.push_back(std::move(sk));
      placed = true;
    }
    if (!placed)
      throw std::runtime_error(
          "generate_scene: MPJA target range unreachable after 1e5 attempts");
  }
  return scene;
}

Prediction oracle_predict(const Pose3D& gt_camera_frame,
                          const CropGeometry& crop, const OracleNoise& noise,
                          std::mt19937_64& rng) {
  if (gt_camera_frame.frame != PoseFrame::camera)
    throw std::invalid_argument("oracle_predict: pose must be camera-frame");
  const std::size_t j = gt_camera_frame.joints.size();

  Prediction pred;
  pred.rel_pose.frame = PoseFrame::camera;
  pred.rel_pose.joints.resize(j);
  pred.keypoints2d.resize(j);
  pred.weights.assign(j, 1.0);

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> out_frame(j);
  for (std::size_t k = 0; k < j; ++k) {
    out_frame[k] = crop.rotation * gt_camera_frame.joints[k];
    centroid += out_frame[k];
  }
  if (j > 0) centroid /= static_cast<double>(j);

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t k = 0; k < j; ++k) {
    const ProjectResult pr = project(crop.output_camera, out_frame[k]);
    // Fixed number of draws per joint keeps noise streams aligned across
    // projection choices.
    const double nx = gauss(rng), ny = gauss(rng);
    const double mx = gauss(rng), my = gauss(rng), mz = gauss(rng);
    if (pr.in_domain) {
      pred.keypoints2d[k] =
          pr.pixel + noise.sigma_px * Eigen::Vector2d(nx, ny);
    } else {
      pred.keypoints2d[k] = Eigen::Vector2d::Zero();
      pred.weights[k] = 0.0;
    }
    pred.rel_pose.joints[k] = out_frame[k] - centroid +
                              noise.sigma_mm * Eigen::Vector3d(mx, my, mz);
  }
  return pred;
}

RunResult run_pipeline(const RunConfig& config, const SyntheticScene& scene) {
  if (scene.rig.empty())
    throw std::invalid_argument("run_pipeline: scene has no cameras");
  const RigCamera& input = scene.rig[0];
  const bool hybrid = config.projection == "H";
  const CameraKind fixed_kind =
      hybrid ? CameraKind::DS : camera_kind_from_string(config.projection);

  const std::size_t n = scene.skeletons.size();
  std::vector<std::optional<PipelineRecord>> slots(n);
  std::vector<std::string> failures_by_index(n);

  parallel_for(n, [&](std::size_t i) {
    const SyntheticSkeleton& sk = scene.skeletons[i];
    try {
      Pose3D gt_cam = to_camera_frame(sk.pose_world, input.extrinsics);

      // Tight hull of the projected joints, dilated.
      double lo_x = 1e30, lo_y = 1e30, hi_x = -1e30, hi_y = -1e30;
      for (const auto& p : gt_cam.joints) {
        const ProjectResult pr = project(input.camera, p);
        if (!pr.valid())
          throw std::runtime_error("joint not visible in primary camera");
        lo_x = std::min(lo_x, pr.pixel.x());
        hi_x = std::max(hi_x, pr.pixel.x());
        lo_y = std::min(lo_y, pr.pixel.y());
        hi_y = std::max(hi_y, pr.pixel.y());
      }
      const double dx = 0.5 * config.bbox_dilation * (hi_x - lo_x);
      const double dy = 0.5 * config.bbox_dilation * (hi_y - lo_y);
      BoundingBox bbox{lo_x - dx, lo_y - dy, hi_x + dx, hi_y + dy};
      bbox.x_min = std::max(bbox.x_min, 0.0);
      bbox.y_min = std::max(bbox.y_min, 0.0);
      bbox.x_max = std::min(bbox.x_max, double(input.camera.intr.width) - 1e-3);
      bbox.y_max = std::min(bbox.y_max, double(input.camera.intr.height) - 1e-3);

      PipelineRecord rec;
      rec.id = sk.id;
      rec.camera_id = input.id;
      rec.alpha_t_deg = config.alpha_t_deg;
      rec.mpja_deg = mpja_deg(gt_cam);
      rec.mbba_deg = mbba_deg(bbox, input.camera).angle_deg;
      rec.bbox = bbox;

      const CameraKind kind =
          hybrid ? select_projection(rec.mbba_deg, config.alpha_t_deg).kind
                 : fixed_kind;
      rec.projection = std::string(to_string(kind));

      const CropGeometry crop =
          plan_crop(input.camera, bbox, kind, config.crop_size, config.out_xi,
                    config.out_alpha);

      std::mt19937_64 rng = record_rng(config.seed, i);
      rec.prediction = oracle_predict(gt_cam, crop, config.noise, rng);

      const Eigen::Vector3d t =
          recover_translation(rec.prediction, crop.output_camera);
      rec.pred_world = absolute_pose(rec.prediction.rel_pose, t, crop.rotation,
                                     input.extrinsics);
      rec.gt_world = sk.pose_world;
      rec.gt_world.frame = PoseFrame::world;
      slots[i] = std::move(rec);
    } catch (const std::exception& e) {
      failures_by_index[i] = sk.id + ": " + e.what();
    }
  });

  RunResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i])
      result.records.push_back(std::move(*slots[i]));
    else
      result.failures.push_back(std::move(failures_by_index[i]));
  }

  std::vector<EvaluationRecord> eval_records;
  eval_records.reserve(result.records.size());
  for (const auto& rec : result.records) {
    EvaluationRecord er;
    er.id = rec.id;
    er.gt_pose = rec.gt_world;
    er.pred_pose = rec.pred_world;
    er.mpja_deg = rec.mpja_deg;
    er.mbba_deg = rec.mbba_deg;
    er.projection = rec.projection;
    eval_records.push_back(std::move(er));
  }
  EvalOptions opt;
  opt.alpha_ts = config.alpha_ts_report;
  if (hybrid && std::find(opt.alpha_ts.begin(), opt.alpha_ts.end(),
                          config.alpha_t_deg) == opt.alpha_ts.end())
    opt.alpha_ts.push_back(config.alpha_t_deg);
  opt.root_index = config.root_index;
  result.report = evaluate_records(eval_records, opt);
  return result;
}

}  // namespace fishrepro
