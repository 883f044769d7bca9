#include "fishrepro/image.hpp"

#include <cmath>
#include <stdexcept>

namespace fishrepro {

ImageBuffer ImageBuffer::create(int width, int height, int channels,
                                std::uint8_t fill) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3))
    throw std::invalid_argument("image must be positive-sized with 1 or 3 channels");
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.data.assign(static_cast<std::size_t>(width) * height * channels, fill);
  return img;
}

bool sample_bilinear(const ImageBuffer& img, double u, double v,
                     std::uint8_t* out) {
  // Tiny guard so geometrically-exact edge positions survive rounding.
  constexpr double kEdge = 1e-9;
  const double umax = img.width - 1.0;
  const double vmax = img.height - 1.0;
  if (!(u >= -kEdge && u <= umax + kEdge && v >= -kEdge && v <= vmax + kEdge)) {
    for (int c = 0; c < img.channels; ++c) out[c] = 0;
    return false;
  }
  const double uc = std::min(std::max(u, 0.0), umax);
  const double vc = std::min(std::max(v, 0.0), vmax);
  int x0 = static_cast<int>(uc);
  int y0 = static_cast<int>(vc);
  if (x0 > img.width - 2) x0 = img.width - 2;
  if (y0 > img.height - 2) y0 = img.height - 2;
  if (x0 < 0) x0 = 0;  // width == 1
  if (y0 < 0) y0 = 0;
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = uc - x0;
  const double fy = vc - y0;
  for (int c = 0; c < img.channels; ++c) {
    const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
    const double bot = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
    const double val = (1.0 - fy) * top + fy * bot;
    out[c] = static_cast<std::uint8_t>(std::lround(val));
  }
  return true;
}

}  // namespace fishrepro
