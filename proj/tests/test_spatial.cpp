#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fishrepro/spatial.hpp"
#include "test_util.hpp"

using namespace fishrepro;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

Pose3D camera_pose(std::vector<Eigen::Vector3d> joints) {
  Pose3D p;
  p.frame = PoseFrame::camera;
  p.joints = std::move(joints);
  return p;
}

// The definition, spelled out: exhaustive pairwise maximum.
double brute_force_mpja(const Pose3D& pose) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < pose.joints.size(); ++i) {
    for (std::size_t k = i + 1; k < pose.joints.size(); ++k) {
      const auto& a = pose.joints[i];
      const auto& b = pose.joints[k];
      const double cx = a.y() * b.z() - a.z() * b.y();
      const double cy = a.z() * b.x() - a.x() * b.z();
      const double cz = a.x() * b.y() - a.y() * b.x();
      const double cross = std::sqrt((cx * cx + cy * cy) + cz * cz);
      const double dot = (a.x() * b.x() + a.y() * b.y()) + a.z() * b.z();
      best = std::max(best, std::atan2(cross, dot));
    }
  }
  return best * kRadToDeg;
}

Pose3D random_pose(std::mt19937_64& rng, std::size_t joints = 17) {
  std::uniform_real_distribution<double> coord(-900.0, 900.0);
  std::uniform_real_distribution<double> depth(500.0, 4000.0);
  std::vector<Eigen::Vector3d> out;
  for (std::size_t i = 0; i < joints; ++i)
    out.emplace_back(coord(rng), coord(rng), depth(rng));
  return camera_pose(std::move(out));
}

}  // namespace

TEST_CASE("mpja of collinear rays is zero, opposing 45-degree rays give 90") {
  CHECK(mpja_deg(camera_pose({{0, 0, 1000}, {0, 0, 2000}})) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mpja_deg(camera_pose({{1000, 0, 1000}, {-1000, 0, 1000}})) ==
        doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("mpja equals the exhaustive pairwise definition exactly") {
  std::mt19937_64 rng(211);
  for (int trial = 0; trial < 200; ++trial) {
    const Pose3D pose = random_pose(rng);
    REQUIRE(mpja_deg(pose) == brute_force_mpja(pose));
  }
}

TEST_CASE("mpja is scale invariant and order invariant") {
  std::mt19937_64 rng(223);
  for (int trial = 0; trial < 100; ++trial) {
    Pose3D pose = random_pose(rng);
    const double base = mpja_deg(pose);
    for (const double s : {0.5, 2.0, 10.0}) {
      Pose3D scaled = pose;
      for (auto& j : scaled.joints) j *= s;
      REQUIRE(std::abs(mpja_deg(scaled) - base) < 1e-9);
    }
    std::shuffle(pose.joints.begin(), pose.joints.end(), rng);
    REQUIRE(mpja_deg(pose) == base);
  }
}

TEST_CASE("mpja rejects bad inputs") {
  CHECK_THROWS_AS((void)mpja_deg(camera_pose({{0, 0, 1000}})),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)mpja_deg(camera_pose({{0, 0, 0}, {0, 0, 1000}})),
                  std::domain_error);
  Pose3D world = camera_pose({{0, 0, 1000}, {1, 0, 1000}});
  world.frame = PoseFrame::world;
  CHECK_THROWS_AS((void)mpja_deg(world), std::invalid_argument);
}

TEST_CASE("mbba of a degenerate 1px bbox is zero") {
  const CameraModel cam = test::ph_camera();
  const BoundingBox bbox{320.0, 320.0, 321.0, 321.0};
  CHECK(mbba_deg(bbox, cam).angle_deg < 0.2);
  CHECK(mbba_deg(bbox, cam).skipped == 0);
}

TEST_CASE("mbba of the full image under a pinhole camera") {
  // Opposite corners unproject to (+-0.64, +-0.64, 1); the closed-form
  // angle between them is 2 atan(0.64 sqrt(2)) ~ 84.3 degrees.
  const CameraModel cam = test::ph_camera(500.0, 320.0, 640);
  const double expected = 2.0 * std::atan(0.64 * std::sqrt(2.0)) * kRadToDeg;
  const MbbaResult r = mbba_deg(BoundingBox{0.0, 0.0, 640.0, 640.0}, cam);
  CHECK(r.angle_deg == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("mbba shrinks monotonically with the bbox") {
  const CameraModel cams[] = {test::ph_camera(), test::ds_camera(),
                              test::ef_camera()};
  std::mt19937_64 rng(227);
  std::uniform_real_distribution<double> cx(120.0, 520.0);
  std::uniform_real_distribution<double> half(40.0, 110.0);
  for (const CameraModel& cam : cams) {
    for (int trial = 0; trial < 100; ++trial) {
      const double x = cx(rng), y = cx(rng), hx = half(rng), hy = half(rng);
      double prev = 1e9;
      for (int step = 0; step < 8; ++step) {
        const double s = 1.0 - 0.12 * step;
        const BoundingBox bbox{x - s * hx, y - s * hy, x + s * hx, y + s * hy};
        const double angle = mbba_deg(bbox, cam).angle_deg;
        REQUIRE(angle <= prev + 1e-12);
        prev = angle;
      }
    }
  }
}

TEST_CASE("mbba skips boundary samples outside the invertible domain") {
  // alpha = 0.6: pixels beyond r = sqrt(5) * fx ~ 335 px from the center
  // cannot be unprojected; stretch the bbox so some corners fall outside.
  const CameraModel cam = test::ds_camera(0.5, 0.6, 150.0, 320.0, 640);
  const MbbaResult r = mbba_deg(BoundingBox{100.0, 100.0, 639.0, 639.0}, cam);
  CHECK(r.skipped > 0);
  CHECK(r.angle_deg > 0.0);

  // A bbox whose samples all sit outside the disk cannot be measured:
  // alpha = 0.9 limits pixels to r < sqrt(1.25) * fx ~ 559 px around the
  // principal point, here placed at the image corner.
  const CameraModel tight = test::ds_camera(0.5, 0.9, 500.0, 0.0, 640);
  CHECK_THROWS_AS((void)mbba_deg(BoundingBox{600.0, 600.0, 639.0, 639.0}, tight),
                  std::runtime_error);
}

TEST_CASE("comd averages joint distances") {
  CHECK(comd_mm(camera_pose({{0, 0, 1000}})) ==
        doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(comd_mm(camera_pose({{0, 0, 1000}, {0, 0, 3000}})) ==
        doctest::Approx(2000.0).epsilon(1e-12));

  std::mt19937_64 rng(229);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose3D pose = random_pose(rng);
    double sum = 0.0;
    for (const auto& j : pose.joints)
      sum += std::sqrt(j.x() * j.x() + j.y() * j.y() + j.z() * j.z());
    const double expected = sum / double(pose.joints.size());
    REQUIRE(std::abs(comd_mm(pose) - expected) < 1e-9);
  }
  CHECK_THROWS_AS((void)comd_mm(camera_pose({})), std::invalid_argument);
}

TEST_CASE("projection selection applies the threshold with ties to DS") {
  CHECK(select_projection(100.0, 110.0).kind == CameraKind::PH);
  CHECK(select_projection(120.0, 110.0).kind == CameraKind::DS);
  CHECK(select_projection(110.0, 110.0).kind == CameraKind::DS);
  CHECK(select_projection(134.0, 135.0).kind == CameraKind::PH);
  CHECK(select_projection(0.0, 0.0).kind == CameraKind::DS);
  CHECK(select_projection(179.0, 180.0).kind == CameraKind::PH);
  CHECK_THROWS_AS((void)select_projection(90.0, 181.0), std::invalid_argument);
  CHECK_THROWS_AS((void)select_projection(90.0, -1.0), std::invalid_argument);
}
