#include "hran/resize.hpp"

#include <algorithm>
#include <cmath>

namespace hran {

double cubic_weight(double x) {
  const double a = -0.5;
  const double ax = std::abs(x);
  if (ax <= 1.0) return ((a + 2.0) * ax - (a + 3.0)) * ax * ax + 1.0;
  if (ax < 2.0) return ((a * ax - 5.0 * a) * ax + 8.0 * a) * ax - 4.0 * a;
  return 0.0;
}

std::vector<ResampleTap> resample_taps(int in_size, int out_size, bool antialias) {
  if (in_size < 1 || out_size < 1) {
    throw ShapeError("resample_taps: invalid sizes " + std::to_string(in_size) + " -> " +
                     std::to_string(out_size));
  }
  const double scale = static_cast<double>(out_size) / in_size;
  const bool shrink = antialias && scale < 1.0;
  const double kscale = shrink ? scale : 1.0;
  const double support = 2.0 / kscale;

  std::vector<ResampleTap> taps(static_cast<size_t>(out_size));
  for (int o = 0; o < out_size; ++o) {
    const double u = (o + 0.5) / scale - 0.5;
    const int lo = static_cast<int>(std::floor(u - support)) + 1;
    const int hi = static_cast<int>(std::floor(u + support));
    ResampleTap tap;
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double w = kscale * cubic_weight(kscale * (u - i));
      if (w == 0.0) continue;
      tap.index.push_back(std::clamp(i, 0, in_size - 1));
      tap.weight.push_back(w);
      sum += w;
    }
    if (tap.weight.empty()) {  // degenerate support, fall back to nearest
      tap.index.push_back(std::clamp(static_cast<int>(std::lround(u)), 0, in_size - 1));
      tap.weight.push_back(1.0);
      sum = 1.0;
    }
    for (double& w : tap.weight) w /= sum;
    taps[static_cast<size_t>(o)] = std::move(tap);
  }
  return taps;
}

ImageF bicubic_resize(const ImageF& src, int out_w, int out_h, bool antialias) {
  const auto htaps = resample_taps(src.width, out_w, antialias);
  const auto vtaps = resample_taps(src.height, out_h, antialias);

  // horizontal pass, accumulated in double
  ImageF mid(out_w, src.height, src.channels);
  for (int c = 0; c < src.channels; ++c) {
    for (int y = 0; y < src.height; ++y) {
      for (int x = 0; x < out_w; ++x) {
        const ResampleTap& t = htaps[static_cast<size_t>(x)];
        double acc = 0.0;
        for (size_t i = 0; i < t.index.size(); ++i) {
          acc += t.weight[i] * src.at(c, y, t.index[i]);
        }
        mid.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }

  ImageF out(out_w, out_h, src.channels);
  for (int c = 0; c < src.channels; ++c) {
    for (int y = 0; y < out_h; ++y) {
      const ResampleTap& t = vtaps[static_cast<size_t>(y)];
      for (int x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (size_t i = 0; i < t.index.size(); ++i) {
          acc += t.weight[i] * mid.at(c, t.index[i], x);
        }
        out.at(c, y, x) = std::clamp(static_cast<float>(acc), 0.0f, 1.0f);
      }
    }
  }
  return out;
}

}  // namespace hran
