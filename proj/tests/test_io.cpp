#include <doctest.h>

#include <cstdio>

#include "fishrepro/io.hpp"
#include "test_util.hpp"

using namespace fishrepro;

TEST_CASE("camera json round-trips and validates") {
  const CameraModel ds = test::ds_camera(0.5, 0.55);
  const CameraModel back = camera_from_json(camera_to_json(ds));
  CHECK(back.kind == CameraKind::DS);
  CHECK(back.intr.fx == ds.intr.fx);
  CHECK(back.xi == ds.xi);
  CHECK(back.alpha == ds.alpha);

  const CameraModel ph = camera_from_json(camera_to_json(test::ph_camera()));
  CHECK(ph.kind == CameraKind::PH);
  CHECK(ph.xi == 0.0);

  CHECK_THROWS_AS(
      (void)camera_from_json(json::parse(
          R"({"kind":"XY","fx":100,"fy":100,"cx":50,"cy":50,"width":100,"height":100})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)camera_from_json(json::parse(
          R"({"kind":"DS","fx":100,"fy":100,"cx":50,"cy":50,"width":100,"height":100,"xi":0.5,"alpha":1.5})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)camera_from_json(json::parse(
          R"({"kind":"DS","fx":100,"fy":100,"cx":50,"cy":50,"width":100,"height":100,"xi":-0.2,"alpha":0.5})")),
      std::invalid_argument);
  CHECK_THROWS(
      (void)camera_from_json(json::parse(R"({"kind":"PH","fx":100})")));
}

TEST_CASE("prediction jsonl round-trips the rel_pose/kp2d/weights schema") {
  PredictionRecord rec;
  rec.id = "p0";
  rec.prediction.rel_pose.frame = PoseFrame::camera;
  rec.prediction.rel_pose.joints = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  rec.prediction.keypoints2d = {{10, 20}, {30, 40}, {50, 60}};
  rec.prediction.weights = {1.0, 0.5, 0.0};
  write_prediction_jsonl("pred_rt.jsonl", {rec});

  const std::vector<PredictionRecord> back =
      read_prediction_jsonl("pred_rt.jsonl");
  REQUIRE(back.size() == 1);
  CHECK(back[0].id == "p0");
  REQUIRE(back[0].prediction.rel_pose.joints.size() == 3);
  CHECK(back[0].prediction.rel_pose.joints[1] == Eigen::Vector3d(4, 5, 6));
  CHECK(back[0].prediction.keypoints2d[2] == Eigen::Vector2d(50, 60));
  CHECK(back[0].prediction.weights[1] == 0.5);
  std::remove("pred_rt.jsonl");
}

TEST_CASE("pose records preserve provenance fields") {
  PoseRecord rec;
  rec.id = "r7";
  rec.pose.frame = PoseFrame::world;
  rec.pose.joints = {{0, 0, 1000}, {10, 20, 1100}};
  rec.mpja_deg = 42.5;
  rec.projection = "PH";
  rec.bbox = BoundingBox::from_xywh(10, 20, 30, 40);
  rec.extra = json{{"camera_id", "cam0"}};
  const PoseRecord back = pose_record_from_json(pose_record_to_json(rec));
  CHECK(back.id == "r7");
  CHECK(back.mpja_deg == 42.5);
  CHECK(back.projection.value() == "PH");
  CHECK(back.bbox->x_max == 40.0);
  CHECK(back.extra.at("camera_id") == "cam0");
}

TEST_CASE("rig and topology files round-trip") {
  RigCamera cam;
  cam.id = "cam1";
  cam.camera = test::ds_camera();
  cam.extrinsics.translation = {1.0, 2.0, 3.0};
  write_rig("rig_rt.json", {cam});
  const std::vector<RigCamera> rig = read_rig("rig_rt.json");
  REQUIRE(rig.size() == 1);
  CHECK(rig[0].id == "cam1");
  CHECK(rig[0].camera.kind == CameraKind::DS);
  CHECK(rig[0].extrinsics.translation == Eigen::Vector3d(1, 2, 3));
  std::remove("rig_rt.json");

  write_topology("topo_rt.json", default_skeleton17());
  const SkeletonTopology topo = read_topology("topo_rt.json");
  CHECK(topo.num_joints == 17);
  CHECK(topo.bones.size() == 16);
  CHECK(topo.symmetric_pairs.size() == 6);
  CHECK(topo.bone_range_mm.size() == topo.bones.size());
  std::remove("topo_rt.json");
}

TEST_CASE("extrinsics parsing rejects non-orthonormal rotations") {
  json j;
  j["rotation"] = {1, 0, 0, 0, 2, 0, 0, 0, 1};
  j["translation"] = {0, 0, 0};
  CHECK_THROWS_AS((void)extrinsics_from_json(j), std::invalid_argument);
}
