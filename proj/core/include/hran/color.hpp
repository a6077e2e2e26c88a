#pragma once
#include <vector>

#include "hran/image.hpp"

namespace hran {

// Single-channel double image; the luma plane metrics operate on.
struct GrayImageD {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  GrayImageD() = default;
  GrayImageD(int w, int h) : width(w), height(h), v(static_cast<size_t>(w) * h) {}

  double& at(int y, int x) { return v[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return v[static_cast<size_t>(y) * width + x]; }
};

// Studio-swing BT.601 luma: Y = 16 + (65.481 R + 128.553 G + 24.966 B)/255
// for 8-bit channels. Output stays float (no re-quantization), in [16, 235].
GrayImageD rgb_to_ycbcr_y(const ImageRGB8& img);

}  // namespace hran
