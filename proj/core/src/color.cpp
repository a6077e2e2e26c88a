#include "hran/color.hpp"

namespace hran {

GrayImageD rgb_to_ycbcr_y(const ImageRGB8& img) {
  GrayImageD out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double r = img.at(y, x, 0);
      const double g = img.at(y, x, 1);
      const double b = img.at(y, x, 2);
      out.at(y, x) = 16.0 + (65.481 * r + 128.553 * g + 24.966 * b) / 255.0;
    }
  }
  return out;
}

}  // namespace hran
