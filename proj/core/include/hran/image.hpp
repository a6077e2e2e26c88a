#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "hran/errors.hpp"

namespace hran {

// 8-bit interleaved RGB raster, the boundary type between files and tensors.
struct ImageRGB8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // 3 * width * height, row-major R,G,B

  ImageRGB8() = default;
  ImageRGB8(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(3) * w * h) {}

  uint8_t& at(int y, int x, int c) { return pixels[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  uint8_t at(int y, int x, int c) const {
    return pixels[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  bool operator==(const ImageRGB8&) const = default;
};

struct ImageGray8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  ImageGray8() = default;
  ImageGray8(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h) {}
};

// Planar float image in [0,1] (channel-major), the working type of the
// resize and blur kernels.
struct ImageF {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;  // (c * height + y) * width + x

  ImageF() = default;
  ImageF(int w, int h, int c)
      : width(w), height(h), channels(c), data(static_cast<size_t>(w) * h * c) {}

  float& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
};

ImageF to_float(const ImageRGB8& img);
// Quantization rounds half away from zero and clamps to [0, 255].
ImageRGB8 to_rgb8(const ImageF& img);
uint8_t quantize_u8(float v);

// PNG I/O (8-bit). Reads gray/palette/alpha variants and converts to RGB;
// alpha is dropped. Writers always use the same settings, so identical
// pixels produce byte-identical files.
ImageRGB8 read_png(const std::string& path);
void write_png(const std::string& path, const ImageRGB8& img);
void write_png_gray(const std::string& path, const ImageGray8& img);

}  // namespace hran
