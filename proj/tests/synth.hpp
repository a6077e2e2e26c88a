#pragma once
// Deterministic synthetic test images: smooth gradient background with
// rectangles, stripes, and disks. Sharp edges give a super-resolver
// something bicubic interpolation cannot reproduce.
#include <algorithm>
#include <cmath>

#include "hran/image.hpp"
#include "hran/rng.hpp"

namespace test_helpers {

inline hran::ImageRGB8 synth_image(int w, int h, uint64_t seed) {
  using hran::Rng;
  Rng rng(seed * 1000003 + 17);
  hran::ImageRGB8 img(w, h);

  double c0[3], c1[3];
  for (int c = 0; c < 3; ++c) {
    c0[c] = rng.uniform_real(0.0, 255.0);
    c1[c] = rng.uniform_real(0.0, 255.0);
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = (double(x) / w + double(y) / h) / 2.0;
      for (int c = 0; c < 3; ++c) {
        img.at(y, x, c) = static_cast<uint8_t>(std::clamp(c0[c] + t * (c1[c] - c0[c]), 0.0, 255.0));
      }
    }
  }

  const int rects = 6 + static_cast<int>(rng.uniform_u32(5));
  for (int r = 0; r < rects; ++r) {
    const int rw = 4 + static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(w / 2)));
    const int rh = 4 + static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(h / 2)));
    const int x0 = static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(std::max(1, w - rw))));
    const int y0 = static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(std::max(1, h - rh))));
    uint8_t col[3];
    for (auto& c : col) c = static_cast<uint8_t>(rng.uniform_u32(256));
    const bool striped = rng.uniform_u32(3) == 0;
    const int period = 2 + static_cast<int>(rng.uniform_u32(4));
    for (int y = y0; y < std::min(h, y0 + rh); ++y) {
      for (int x = x0; x < std::min(w, x0 + rw); ++x) {
        if (striped && (x / period) % 2 == 0) continue;
        for (int c = 0; c < 3; ++c) img.at(y, x, c) = col[c];
      }
    }
  }

  const int disks = 2 + static_cast<int>(rng.uniform_u32(3));
  for (int d = 0; d < disks; ++d) {
    const int cx = static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(w)));
    const int cy = static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(h)));
    const int rad = 3 + static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(w / 6 + 1)));
    uint8_t col[3];
    for (auto& c : col) c = static_cast<uint8_t>(rng.uniform_u32(256));
    for (int y = std::max(0, cy - rad); y < std::min(h, cy + rad + 1); ++y) {
      for (int x = std::max(0, cx - rad); x < std::min(w, cx + rad + 1); ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= rad * rad) {
          for (int c = 0; c < 3; ++c) img.at(y, x, c) = col[c];
        }
      }
    }
  }
  return img;
}

}  // namespace test_helpers
