#include <doctest.h>

#include <random>
#include <vector>

#include "fishrepro/kernels.hpp"
#include "test_util.hpp"

using namespace fishrepro;

namespace {

struct Batch {
  std::vector<double> x, y, z;
  std::size_t size() const { return x.size(); }
};

Batch random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2000.0, 2000.0);
  Batch b;
  b.x.resize(n);
  b.y.resize(n);
  b.z.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.x[i] = coord(rng);
    b.y[i] = coord(rng);
    b.z[i] = coord(rng);
  }
  return b;
}

}  // namespace

TEST_CASE("batch projection matches the single-point API bit for bit") {
  const CameraModel cams[] = {test::ph_camera(), test::ef_camera(),
                              test::ds_camera(), test::cc_camera(),
                              test::ec_camera()};
  const Batch b = random_points(257, 31);
  for (const CameraModel& cam : cams) {
    CAPTURE(to_string(cam.kind));
    std::vector<double> u(b.size()), v(b.size());
    std::vector<std::uint8_t> dom(b.size());
    kernels::scalar::project_batch(cam, b.size(), b.x.data(), b.y.data(),
                                   b.z.data(), u.data(), v.data(), dom.data());
    for (std::size_t i = 0; i < b.size(); ++i) {
      const ProjectResult r = project(cam, {b.x[i], b.y[i], b.z[i]});
      REQUIRE(static_cast<bool>(dom[i]) == r.in_domain);
      if (r.in_domain) {
        REQUIRE(u[i] == r.pixel.x());
        REQUIRE(v[i] == r.pixel.y());
      }
    }
  }
}

TEST_CASE("dispatched kernels agree with the scalar reference exactly") {
  INFO("active backend: ", std::string(kernels::active_backend()));
  const CameraModel cams[] = {test::ph_camera(), test::ds_camera(),
                              test::ds_camera(1.2, 0.3), test::ef_camera(),
                              test::cc_camera(), test::ec_camera()};
  const Batch b = random_points(1003, 37);

  for (const CameraModel& cam : cams) {
    CAPTURE(to_string(cam.kind));
    std::vector<double> u0(b.size()), v0(b.size()), u1(b.size()), v1(b.size());
    std::vector<std::uint8_t> d0(b.size()), d1(b.size());
    kernels::scalar::project_batch(cam, b.size(), b.x.data(), b.y.data(),
                                   b.z.data(), u0.data(), v0.data(), d0.data());
    kernels::project_batch(cam, b.size(), b.x.data(), b.y.data(), b.z.data(),
                           u1.data(), v1.data(), d1.data());
    for (std::size_t i = 0; i < b.size(); ++i) {
      REQUIRE(d0[i] == d1[i]);
      if (d0[i]) {
        REQUIRE(u0[i] == u1[i]);
        REQUIRE(v0[i] == v1[i]);
      }
    }

    // Unprojection over the image plus out-of-disk pixels.
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> px(-200.0, 840.0);
    std::vector<double> pu(b.size()), pv(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      pu[i] = px(rng);
      pv[i] = px(rng);
    }
    std::vector<double> x0(b.size()), y0(b.size()), z0(b.size());
    std::vector<double> x1(b.size()), y1(b.size()), z1(b.size());
    std::vector<std::uint8_t> k0(b.size()), k1(b.size());
    kernels::scalar::unproject_batch(cam, b.size(), pu.data(), pv.data(),
                                     x0.data(), y0.data(), z0.data(), k0.data());
    kernels::unproject_batch(cam, b.size(), pu.data(), pv.data(), x1.data(),
                             y1.data(), z1.data(), k1.data());
    for (std::size_t i = 0; i < b.size(); ++i) {
      REQUIRE(k0[i] == k1[i]);
      REQUIRE(x0[i] == x1[i]);
      REQUIRE(y0[i] == y1[i]);
      REQUIRE(z0[i] == z1[i]);
    }
  }
}

TEST_CASE("rotation kernel agrees across backends") {
  const Eigen::Matrix3d R =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized())
          .toRotationMatrix();
  const Batch b = random_points(515, 43);
  std::vector<double> ax(b.size()), ay(b.size()), az(b.size());
  std::vector<double> bx(b.size()), by(b.size()), bz(b.size());
  kernels::scalar::rotate_points(R, b.size(), b.x.data(), b.y.data(),
                                 b.z.data(), ax.data(), ay.data(), az.data());
  kernels::rotate_points(R, b.size(), b.x.data(), b.y.data(), b.z.data(),
                         bx.data(), by.data(), bz.data());
  for (std::size_t i = 0; i < b.size(); ++i) {
    REQUIRE(ax[i] == bx[i]);
    REQUIRE(ay[i] == by[i]);
    REQUIRE(az[i] == bz[i]);
  }
}

TEST_CASE("max pairwise angle equals the brute-force definition") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 23;
    std::vector<double> x(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = coord(rng);
      y[i] = coord(rng);
      z[i] = coord(rng) + 6.0;
    }
    // Definition: exhaustive O(n^2) loop.
    double expected = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double cx = y[i] * z[j] - z[i] * y[j];
        const double cy = z[i] * x[j] - x[i] * z[j];
        const double cz = x[i] * y[j] - y[i] * x[j];
        const double cross = std::sqrt((cx * cx + cy * cy) + cz * cz);
        const double dot = (x[i] * x[j] + y[i] * y[j]) + z[i] * z[j];
        expected = std::max(expected, std::atan2(cross, dot));
      }
    }
    REQUIRE(kernels::scalar::max_pairwise_angle(n, x.data(), y.data(),
                                                z.data()) == expected);
    REQUIRE(kernels::max_pairwise_angle(n, x.data(), y.data(), z.data()) ==
            expected);
  }
}

TEST_CASE("simd availability is reported consistently") {
  if (kernels::avx2_available()) {
    CHECK(std::string(kernels::active_backend()) != "");
  } else {
    CHECK(std::string(kernels::active_backend()) == "scalar");
  }
}
