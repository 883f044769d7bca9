#include <doctest.h>

#include <cstdio>
#include <random>
#include <stdexcept>

#include "fishrepro/image.hpp"

using namespace fishrepro;

TEST_CASE("bilinear sampling: exact at integer positions, blends between") {
  ImageBuffer img = ImageBuffer::create(4, 3, 1);
  img.at(1, 1, 0) = 100;
  img.at(2, 1, 0) = 200;

  std::uint8_t out = 0;
  CHECK(sample_bilinear(img, 1.0, 1.0, &out));
  CHECK(out == 100);
  CHECK(sample_bilinear(img, 2.0, 1.0, &out));
  CHECK(out == 200);
  CHECK(sample_bilinear(img, 1.5, 1.0, &out));
  CHECK(out == 150);
  CHECK(sample_bilinear(img, 1.25, 1.0, &out));
  CHECK(out == 125);

  // Edge positions still sample; outside returns false and zeros.
  CHECK(sample_bilinear(img, 3.0, 2.0, &out));
  out = 77;
  CHECK_FALSE(sample_bilinear(img, 3.2, 1.0, &out));
  CHECK(out == 0);
  CHECK_FALSE(sample_bilinear(img, -0.5, 1.0, &out));
  CHECK_FALSE(sample_bilinear(img, 1.0, 2.5, &out));
}

TEST_CASE("bilinear sampling blends vertically and per channel") {
  ImageBuffer img = ImageBuffer::create(2, 2, 3);
  for (int c = 0; c < 3; ++c) {
    img.at(0, 0, c) = 0;
    img.at(1, 0, c) = 0;
    img.at(0, 1, c) = static_cast<std::uint8_t>(40 * (c + 1));
    img.at(1, 1, c) = static_cast<std::uint8_t>(40 * (c + 1));
  }
  std::uint8_t out[3];
  CHECK(sample_bilinear(img, 0.5, 0.5, out));
  CHECK(out[0] == 20);
  CHECK(out[1] == 40);
  CHECK(out[2] == 60);
}

TEST_CASE("png io round-trips gray and rgb images") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> byte(0, 255);
  for (const int channels : {1, 3}) {
    ImageBuffer img = ImageBuffer::create(37, 23, channels);
    for (auto& b : img.data) b = static_cast<std::uint8_t>(byte(rng));
    const std::string path =
        "roundtrip_" + std::to_string(channels) + ".png";
    write_png(img, path);
    const ImageBuffer back = read_png(path);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.channels == img.channels);
    CHECK(back.data == img.data);
    std::remove(path.c_str());
  }
}

TEST_CASE("image creation validates arguments") {
  CHECK_THROWS_AS((void)ImageBuffer::create(0, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)ImageBuffer::create(4, 4, 2), std::invalid_argument);
  const ImageBuffer img = ImageBuffer::create(5, 4, 3, 9);
  CHECK(img.data.size() == 5u * 4u * 3u);
  CHECK(img.at(4, 3, 2) == 9);
}
