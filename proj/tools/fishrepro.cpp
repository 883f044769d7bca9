// fishrepro: fisheye reprojection, spatial-expansion metrics, absolute pose
// recovery, multi-view triangulation and a synthetic evaluation pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fishrepro/io.hpp"
#include "fishrepro/metrics.hpp"
#include "fishrepro/parallel.hpp"
#include "fishrepro/recovery.hpp"
#include "fishrepro/reproject.hpp"
#include "fishrepro/spatial.hpp"
#include "fishrepro/synth.hpp"
#include "fishrepro/triangulate.hpp"

namespace fs = std::filesystem;
using namespace fishrepro;

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

BoundingBox parse_bbox(const std::string& csv) {
  const std::vector<double> v = parse_double_list(csv);
  if (v.size() != 4)
    throw CLI::ValidationError("--bbox", "expected x,y,w,h");
  return BoundingBox::from_xywh(v[0], v[1], v[2], v[3]);
}

std::string csv_cell(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

json crop_sidecar(const CropGeometry& crop) {
  json j;
  j["output_camera"] = camera_to_json(crop.output_camera);
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(crop.rotation(r, c));
  j["rotation"] = rot;
  return j;
}

int cmd_reproject(const std::string& camera_path, const std::string& bbox_csv,
                  const std::string& out_kind, int out_size, double out_xi,
                  double out_alpha, const std::string& sidecar_path,
                  const std::string& input_path,
                  const std::string& output_path) {
  const CameraFile cam = load_camera_file(camera_path);
  const BoundingBox bbox = parse_bbox(bbox_csv);
  const ImageBuffer src = read_png(input_path);
  const CropGeometry crop =
      plan_crop(cam.camera, bbox, camera_kind_from_string(out_kind), out_size,
                out_xi, out_alpha);
  const ImageBuffer out = warp_crop(src, cam.camera, crop);
  write_png(out, output_path);

  const json sidecar = crop_sidecar(crop);
  if (sidecar_path.empty()) {
    std::cout << sidecar.dump(2) << '\n';
  } else {
    std::ofstream f(sidecar_path);
    if (!f) throw std::runtime_error("cannot write " + sidecar_path);
    f << sidecar.dump(2) << '\n';
  }
  return 0;
}

int cmd_angles(const std::string& camera_path, const std::string& poses_path,
               const std::string& bboxes_path, double alpha_t,
               const std::string& out_path) {
  const CameraFile cam = load_camera_file(camera_path);
  const std::vector<PoseRecord> poses = read_pose_jsonl(poses_path);

  std::map<std::string, BoundingBox> bbox_by_id;
  if (!bboxes_path.empty()) {
    std::ifstream in(bboxes_path);
    if (!in) throw std::runtime_error("cannot open " + bboxes_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const json j = json::parse(line);
      bbox_by_id.insert_or_assign(j.at("id").get<std::string>(),
                                  bbox_from_xywh_json(j.at("bbox")));
    }
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  *out << "id,mpja_deg,mbba_deg,comd_mm,h_choice\n";
  for (const auto& rec : poses) {
    Pose3D pose = rec.pose;
    pose.frame = PoseFrame::camera;
    const double mpja = mpja_deg(pose);
    const double comd = comd_mm(pose);
    double mbba = std::numeric_limits<double>::quiet_NaN();
    const auto it = bbox_by_id.find(rec.id);
    if (it != bbox_by_id.end())
      mbba = mbba_deg(it->second, cam.camera).angle_deg;
    const double basis = std::isnan(mbba) ? mpja : mbba;
    const ProjectionChoice choice = select_projection(basis, alpha_t);
    *out << rec.id << ',' << csv_cell(mpja) << ',' << csv_cell(mbba) << ','
         << csv_cell(comd) << ',' << to_string(choice.kind) << '\n';
  }
  return 0;
}

int cmd_evaluate(const std::string& gt_path, const std::string& pred_path,
                 const std::string& camera_path, const std::string& alpha_ts,
                 const std::string& report_path, const std::string& curves_path,
                 std::size_t root_index) {
  EvalOptions opt;
  opt.alpha_ts = parse_double_list(alpha_ts);
  opt.root_index = root_index;
  const EvalReport report = evaluate_run(gt_path, pred_path, camera_path, opt);

  if (!report_path.empty()) write_report_json(report_path, report);
  if (!curves_path.empty()) {
    write_curves_csv(curves_path, report.overall.curve);
    const fs::path base(curves_path);
    for (const auto& [label, res] : report.labels) {
      const fs::path per = base.parent_path() /
                           (base.stem().string() + "_" + label +
                            base.extension().string());
      write_curves_csv(per.string(), res.curve);
    }
  }
  std::cout << "records: " << report.total_records
            << " skipped: " << report.skipped << '\n';
  for (const auto& [label, res] : report.labels)
    std::cout << label << ": mpjpe " << res.overall.mpjpe_mm << " a-mpjpe "
              << res.overall.a_mpjpe_mm << " pck150 " << res.overall.pck150_pct
              << " a-pck150 " << res.overall.a_pck150_pct << '\n';
  for (const auto& h : report.hybrid)
    std::cout << "H w/" << h.basis << " at " << h.alpha_t_deg << ": mpjpe "
              << h.result.overall.mpjpe_mm << " a-mpjpe "
              << h.result.overall.a_mpjpe_mm << '\n';
  return 0;
}

int cmd_triangulate(const std::string& rig_path, const std::string& det_path,
                    const std::string& topology_path, double lambda_sym,
                    const std::string& out_path) {
  const std::vector<RigCamera> rig = read_rig(rig_path);
  const SkeletonTopology topo = topology_path.empty()
                                    ? default_skeleton17()
                                    : read_topology(topology_path);
  const std::vector<DetectionViews> detections = read_detection_jsonl(det_path);

  std::vector<PoseRecord> out_records(detections.size());
  parallel_for(detections.size(), [&](std::size_t i) {
    const DetectionViews& det = detections[i];
    std::vector<ViewObservation> views;
    for (const RigCamera& cam : rig) {
      const auto it = det.views.find(cam.id);
      if (it == det.views.end()) continue;
      ViewObservation view;
      view.camera = cam.camera;
      view.extrinsics = cam.extrinsics;
      view.keypoints2d = it->second.first;
      view.confidence = it->second.second;
      views.push_back(std::move(view));
    }
    const SkeletonTriangulation s =
        triangulate_skeleton(views, topo, lambda_sym);
    PoseRecord rec;
    rec.id = det.id;
    rec.pose = s.pose;
    rec.extra["joint_valid"] = s.joint_valid;
    rec.extra["converged"] = s.converged;
    rec.extra["cost"] = s.cost;
    out_records[i] = std::move(rec);
  });
  write_pose_jsonl(out_path, out_records);
  std::cout << "triangulated " << out_records.size() << " skeletons -> "
            << out_path << '\n';
  return 0;
}

int cmd_synth(std::uint64_t seed, std::size_t num, const std::string& range,
              std::size_t cameras, const std::string& scene_path,
              const std::string& gt_path, const std::string& det_path,
              const std::string& rig_path, double noise_px) {
  const std::vector<double> r = parse_double_list(range);
  if (r.size() != 2)
    throw CLI::ValidationError("--mpja-range", "expected lo,hi");
  const SyntheticScene scene = generate_scene(seed, num, r[0], r[1], cameras);
  write_scene(scene_path, scene);
  std::cout << "scene with " << scene.skeletons.size() << " skeletons, "
            << scene.rig.size() << " cameras -> " << scene_path << '\n';

  if (!rig_path.empty()) write_rig(rig_path, scene.rig);

  if (!gt_path.empty()) {
    std::vector<PoseRecord> records;
    for (const auto& sk : scene.skeletons) {
      PoseRecord rec;
      rec.id = sk.id;
      rec.pose = sk.pose_world;
      Pose3D cam_pose = to_camera_frame(sk.pose_world, scene.rig[0].extrinsics);
      rec.mpja_deg = mpja_deg(cam_pose);
      records.push_back(std::move(rec));
    }
    write_pose_jsonl(gt_path, records);
  }

  if (!det_path.empty()) {
    std::mt19937_64 rng(seed ^ 0x5deece66dULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<DetectionViews> detections;
    for (const auto& sk : scene.skeletons) {
      DetectionViews det;
      det.id = sk.id;
      for (const RigCamera& cam : scene.rig) {
        std::vector<Eigen::Vector2d> kps;
        std::vector<double> conf;
        for (const auto& w : sk.pose_world.joints) {
          const ProjectResult pr =
              project(cam.camera, cam.extrinsics.camera_from_world(w));
          if (pr.valid()) {
            kps.push_back(pr.pixel +
                          noise_px * Eigen::Vector2d(gauss(rng), gauss(rng)));
            conf.push_back(1.0);
          } else {
            kps.push_back(Eigen::Vector2d::Zero());
            conf.push_back(0.0);
          }
        }
        det.views[cam.id] = {std::move(kps), std::move(conf)};
      }
      detections.push_back(std::move(det));
    }
    write_detection_jsonl(det_path, detections);
  }
  return 0;
}

int cmd_recover(const std::string& camera_path, const std::string& pred_path,
                const std::string& rotation_csv,
                const std::string& extrinsics_path,
                const std::string& out_path) {
  const CameraFile cam = load_camera_file(camera_path);
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  if (!rotation_csv.empty()) {
    const std::vector<double> v = parse_double_list(rotation_csv);
    if (v.size() != 9)
      throw CLI::ValidationError("--rotation", "expected 9 row-major floats");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rotation(r, c) = v[3 * r + c];
    if (!is_rotation(rotation, 1e-6))
      throw CLI::ValidationError("--rotation", "matrix is not a rotation");
  }
  Extrinsics ext;
  if (!extrinsics_path.empty()) {
    std::ifstream in(extrinsics_path);
    if (!in) throw std::runtime_error("cannot open " + extrinsics_path);
    json j;
    in >> j;
    ext = extrinsics_from_json(j);
  } else if (cam.extrinsics) {
    ext = *cam.extrinsics;
  }

  const std::vector<PredictionRecord> preds = read_prediction_jsonl(pred_path);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  std::size_t failed = 0;
  for (const auto& rec : preds) {
    json j;
    j["id"] = rec.id;
    try {
      const Eigen::Vector3d t = recover_translation(rec.prediction, cam.camera);
      const Pose3D world =
          absolute_pose(rec.prediction.rel_pose, t, rotation, ext);
      j["abs_pose_world"] = pose_to_json(world);
      j["translation"] = json::array({t.x(), t.y(), t.z()});
    } catch (const std::exception& e) {
      j["error"] = e.what();
      ++failed;
    }
    out << j.dump() << '\n';
  }
  std::cout << "recovered " << (preds.size() - failed) << "/" << preds.size()
            << " poses -> " << out_path << '\n';
  return failed * 10 > preds.size() ? 1 : 0;
}

void write_run_outputs(const fs::path& dir, const std::string& label,
                       const RunResult& result) {
  std::vector<PoseRecord> gt_records, pred_records;
  std::vector<PredictionRecord> predictions;
  for (const auto& rec : result.records) {
    PoseRecord g;
    g.id = rec.id;
    g.pose = rec.gt_world;
    g.mpja_deg = rec.mpja_deg;
    g.mbba_deg = rec.mbba_deg;
    g.bbox = rec.bbox;
    gt_records.push_back(std::move(g));

    PoseRecord p;
    p.id = rec.id;
    p.pose = rec.pred_world;
    p.projection = rec.projection;
    p.mpja_deg = rec.mpja_deg;
    p.mbba_deg = rec.mbba_deg;
    p.extra["camera_id"] = rec.camera_id;
    p.extra["alpha_t_deg"] = rec.alpha_t_deg;
    pred_records.push_back(std::move(p));

    predictions.push_back(PredictionRecord{rec.id, rec.prediction});
  }
  const std::string suffix = label.empty() ? "" : "_" + label;
  write_pose_jsonl((dir / ("gt" + suffix + ".jsonl")).string(), gt_records);
  write_pose_jsonl((dir / ("pred" + suffix + ".jsonl")).string(), pred_records);
  write_prediction_jsonl((dir / ("predictions" + suffix + ".jsonl")).string(),
                         predictions);
  write_report_json((dir / ("report" + suffix + ".json")).string(),
                    result.report);
  write_curves_csv((dir / ("curves" + suffix + ".csv")).string(),
                   result.report.overall.curve);
}

int cmd_run(const std::string& config_path, const std::string& scene_path,
            std::uint64_t seed, std::size_t num, const std::string& range,
            const std::string& projection, double alpha_t,
            const std::string& sweep_csv, int crop_size, double noise_px,
            double noise_mm, double out_xi, double out_alpha,
            const std::string& out_dir) {
  RunConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open " + config_path);
    json j;
    in >> j;
    config.projection = j.value("projection", config.projection);
    config.alpha_t_deg = j.value("alpha_t", config.alpha_t_deg);
    config.crop_size = j.value("crop_size", config.crop_size);
    config.noise.sigma_px = j.value("noise_px", config.noise.sigma_px);
    config.noise.sigma_mm = j.value("noise_mm", config.noise.sigma_mm);
    config.seed = j.value("seed", config.seed);
    config.out_xi = j.value("out_xi", config.out_xi);
    config.out_alpha = j.value("out_alpha", config.out_alpha);
    if (j.contains("alpha_t_sweep"))
      config.alpha_ts_report = j["alpha_t_sweep"].get<std::vector<double>>();
  }
  if (!projection.empty()) config.projection = projection;
  if (alpha_t >= 0.0) config.alpha_t_deg = alpha_t;
  if (crop_size > 0) config.crop_size = crop_size;
  if (noise_px >= 0.0) config.noise.sigma_px = noise_px;
  if (noise_mm >= 0.0) config.noise.sigma_mm = noise_mm;
  if (out_xi >= 0.0) config.out_xi = out_xi;
  if (out_alpha >= 0.0) config.out_alpha = out_alpha;
  if (seed > 0) config.seed = seed;

  SyntheticScene scene;
  if (!scene_path.empty()) {
    scene = read_scene(scene_path);
  } else {
    const std::vector<double> r = parse_double_list(range);
    if (r.size() != 2)
      throw CLI::ValidationError("--mpja-range", "expected lo,hi");
    scene = generate_scene(config.seed, num, r[0], r[1]);
  }

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  std::vector<double> sweep;
  if (!sweep_csv.empty()) sweep = parse_double_list(sweep_csv);

  std::size_t total = 0, failed = 0;
  const auto run_one = [&](const RunConfig& cfg, const std::string& label) {
    const RunResult result = run_pipeline(cfg, scene);
    write_run_outputs(dir, label, result);
    total += scene.skeletons.size();
    failed += result.failures.size();
    for (const auto& f : result.failures)
      std::cerr << "record failed: " << f << '\n';
    std::cout << (label.empty() ? cfg.projection : label) << ": "
              << result.records.size() << " records, a-mpjpe "
              << result.report.overall.overall.a_mpjpe_mm << " mm\n";
  };

  if (config.projection == "H" && !sweep.empty()) {
    for (const double at : sweep) {
      RunConfig cfg = config;
      cfg.alpha_t_deg = at;
      std::ostringstream label;
      label << "H" << at;
      run_one(cfg, label.str());
    }
  } else {
    run_one(config, "");
  }

  if (failed * 10 > total) {
    std::cerr << "more than 10% of records failed (" << failed << "/" << total
              << ")\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fisheye reprojection and pose-recovery toolkit"};
  app.require_subcommand(1);

  std::string rp_camera, rp_bbox, rp_kind = "DS", rp_sidecar, rp_in, rp_out;
  int rp_size = 256;
  double rp_xi = 0.5, rp_alpha = 0.55;
  auto* reproject = app.add_subcommand(
      "reproject", "warp a person crop into a virtual output camera");
  reproject->add_option("--camera", rp_camera, "input camera JSON")->required();
  reproject->add_option("--bbox", rp_bbox, "person bbox as x,y,w,h")->required();
  reproject->add_option("--out-kind", rp_kind, "output model: PH|EF|DS|CC|EC");
  reproject->add_option("--out-size", rp_size, "output image size, px");
  reproject->add_option("--out-xi", rp_xi, "DS output xi");
  reproject->add_option("--out-alpha", rp_alpha, "DS output alpha");
  reproject->add_option("--sidecar", rp_sidecar,
                        "write camera/rotation JSON here instead of stdout");
  reproject->add_option("input", rp_in, "input PNG")->required();
  reproject->add_option("output", rp_out, "output PNG")->required();

  std::string an_camera, an_poses, an_bboxes, an_out;
  double an_alpha_t = 110.0;
  auto* angles =
      app.add_subcommand("angles", "per-record MPJA/MBBA/CoMD and H choice");
  angles->add_option("--camera", an_camera, "camera JSON")->required();
  angles->add_option("--poses", an_poses, "camera-frame poses JSONL")->required();
  angles->add_option("--bboxes", an_bboxes,
                     "bboxes JSONL ({id, bbox:[x,y,w,h]})");
  angles->add_option("--alpha-t", an_alpha_t, "H threshold, degrees");
  angles->add_option("--out", an_out, "CSV path (default stdout)");

  std::string ev_gt, ev_pred, ev_camera, ev_alpha = "110,135", ev_report,
              ev_curves;
  std::size_t ev_root = 0;
  auto* evaluate =
      app.add_subcommand("evaluate", "HPE metrics and MPJA-binned curves");
  evaluate->add_option("--gt", ev_gt, "ground-truth poses JSONL")->required();
  evaluate->add_option("--pred", ev_pred, "predicted poses JSONL")->required();
  evaluate->add_option("--camera", ev_camera,
                       "camera JSON (for MBBA from bboxes)");
  evaluate->add_option("--alpha-t", ev_alpha, "hybrid thresholds, comma list");
  evaluate->add_option("--out", ev_report, "report JSON path");
  evaluate->add_option("--curves", ev_curves, "curves CSV path");
  evaluate->add_option("--root-index", ev_root, "root joint index");

  std::string tr_rig, tr_det, tr_topo, tr_out;
  double tr_lambda = 1.0;
  auto* triangulate = app.add_subcommand(
      "triangulate", "multi-view skeleton triangulation with bone symmetry");
  triangulate->add_option("--rig", tr_rig, "rig JSON")->required();
  triangulate->add_option("--detections", tr_det, "detections JSONL")
      ->required();
  triangulate->add_option("--topology", tr_topo,
                          "topology JSON (default: built-in 17-joint)");
  triangulate->add_option("--lambda-sym", tr_lambda, "bone symmetry weight");
  triangulate->add_option("--out", tr_out, "output poses JSONL")->required();

  std::uint64_t sy_seed = 1;
  std::size_t sy_num = 100, sy_cameras = 1;
  std::string sy_range = "20,170", sy_scene = "scene.json", sy_gt, sy_det,
              sy_rig;
  double sy_noise = 0.0;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene");
  synth->add_option("--seed", sy_seed, "RNG seed");
  synth->add_option("--num", sy_num, "number of skeletons");
  synth->add_option("--mpja-range", sy_range, "target MPJA range lo,hi deg");
  synth->add_option("--cameras", sy_cameras, "rig size (1 = primary only)");
  synth->add_option("--out", sy_scene, "scene JSON path");
  synth->add_option("--gt", sy_gt, "also write GT poses JSONL");
  synth->add_option("--detections", sy_det,
                    "also write per-camera detections JSONL");
  synth->add_option("--rig", sy_rig, "also write the rig JSON");
  synth->add_option("--noise-px", sy_noise, "detection pixel noise sigma");

  std::string rn_config, rn_scene, rn_range = "20,170", rn_proj, rn_sweep,
              rn_outdir = "out";
  std::uint64_t rn_seed = 0;
  std::size_t rn_num = 100;
  double rn_alpha_t = -1.0, rn_noise_px = -1.0, rn_noise_mm = -1.0,
         rn_xi = -1.0, rn_alpha = -1.0;
  int rn_crop = 0;
  auto* run = app.add_subcommand("run", "full synthetic pipeline + evaluation");
  run->add_option("--config", rn_config, "run config JSON (flags override)");
  run->add_option("--scene", rn_scene, "existing scene JSON (else generated)");
  run->add_option("--seed", rn_seed, "RNG seed");
  run->add_option("--num", rn_num, "skeleton count when generating");
  run->add_option("--mpja-range", rn_range, "MPJA range when generating");
  run->add_option("--projection", rn_proj, "PH|EF|DS|CC|EC|H");
  run->add_option("--alpha-t", rn_alpha_t, "H threshold, degrees");
  run->add_option("--alpha-t-sweep", rn_sweep,
                  "comma list; one H pass per value");
  run->add_option("--crop-size", rn_crop, "crop resolution, px");
  run->add_option("--noise-px", rn_noise_px, "keypoint noise sigma, px");
  run->add_option("--noise-mm", rn_noise_mm, "relative-pose noise sigma, mm");
  run->add_option("--out-xi", rn_xi, "DS output camera xi");
  run->add_option("--out-alpha", rn_alpha, "DS output camera alpha");
  run->add_option("--out-dir", rn_outdir, "output directory");

  std::string rc_camera, rc_pred, rc_rotation, rc_ext, rc_out;
  auto* recover = app.add_subcommand(
      "recover", "absolute pose recovery from prediction files");
  recover->add_option("--camera", rc_camera, "output camera JSON")->required();
  recover->add_option("--predictions", rc_pred,
                      "predictions JSONL (rel_pose/kp2d/weights)")
      ->required();
  recover->add_option("--rotation", rc_rotation,
                      "crop rotation, 9 row-major floats");
  recover->add_option("--extrinsics", rc_ext, "extrinsics JSON file");
  recover->add_option("--out", rc_out, "output JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*reproject)
      return cmd_reproject(rp_camera, rp_bbox, rp_kind, rp_size, rp_xi,
                           rp_alpha, rp_sidecar, rp_in, rp_out);
    if (*angles)
      return cmd_angles(an_camera, an_poses, an_bboxes, an_alpha_t, an_out);
    if (*evaluate)
      return cmd_evaluate(ev_gt, ev_pred, ev_camera, ev_alpha, ev_report,
                          ev_curves, ev_root);
    if (*triangulate)
      return cmd_triangulate(tr_rig, tr_det, tr_topo, tr_lambda, tr_out);
    if (*synth)
      return cmd_synth(sy_seed, sy_num, sy_range, sy_cameras, sy_scene, sy_gt,
                       sy_det, sy_rig, sy_noise);
    if (*run)
      return cmd_run(rn_config, rn_scene, rn_seed, rn_num, rn_range, rn_proj,
                     rn_alpha_t, rn_sweep, rn_crop, rn_noise_px, rn_noise_mm,
                     rn_xi, rn_alpha, rn_outdir);
    if (*recover)
      return cmd_recover(rc_camera, rc_pred, rc_rotation, rc_ext, rc_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
