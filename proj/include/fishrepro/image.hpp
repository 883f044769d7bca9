#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fishrepro {

/// 8-bit row-major image with interleaved channels (1 = gray, 3 = RGB).
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  static ImageBuffer create(int width, int height, int channels,
                            std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y, int c) {
    return data[static_cast<std::size_t>(y * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[static_cast<std::size_t>(y * width + x) * channels + c];
  }
};

/// Bilinear sample at continuous position (u, v); out gets `channels` values.
/// Positions without full bilinear support (outside [0,w-1]x[0,h-1] beyond a
/// 1e-9 guard) return false and write zeros.
bool sample_bilinear(const ImageBuffer& img, double u, double v,
                     std::uint8_t* out);

ImageBuffer read_png(const std::string& path);
void write_png(const ImageBuffer& img, const std::string& path);

}  // namespace fishrepro
