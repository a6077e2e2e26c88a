#pragma once
#include <vector>

#include "hran/image.hpp"

namespace hran {

// Cubic convolution kernel with a = -0.5.
double cubic_weight(double x);

// Precomputed taps for one output coordinate along one axis.
struct ResampleTap {
  std::vector<int> index;      // clamped source indices
  std::vector<double> weight;  // normalized to sum 1
};

// Taps for every output coordinate of a 1-d resample from in_size to
// out_size. When antialias is set and the axis shrinks, the kernel support
// is stretched by the inverse scale. Source coordinates are clamped.
std::vector<ResampleTap> resample_taps(int in_size, int out_size, bool antialias);

// Separable cubic-convolution resampling of a [0,1] float image; output is
// clamped back to [0,1].
ImageF bicubic_resize(const ImageF& src, int out_w, int out_h, bool antialias);

}  // namespace hran
