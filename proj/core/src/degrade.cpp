#include "hran/degrade.hpp"

#include <cmath>

#include "hran/resize.hpp"

namespace hran {

ImageRGB8 crop_to_multiple(const ImageRGB8& img, int s) {
  const int w = img.width / s * s;
  const int h = img.height / s * s;
  if (w < 1 || h < 1) {
    throw ShapeError("crop_to_multiple: image " + std::to_string(img.width) + "x" +
                     std::to_string(img.height) + " smaller than scale " + std::to_string(s));
  }
  if (w == img.width && h == img.height) return img;
  ImageRGB8 out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, x, c);
    }
  }
  return out;
}

std::vector<double> gaussian_kernel_1d(int ksize, double sigma) {
  std::vector<double> k(static_cast<size_t>(ksize));
  const int half = ksize / 2;
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - half;
    k[static_cast<size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[static_cast<size_t>(i)];
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace {

// symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1, n+1 -> n-2
int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

}  // namespace

ImageF gaussian_blur(const ImageF& img, int ksize, double sigma) {
  const auto k = gaussian_kernel_1d(ksize, sigma);
  const int half = ksize / 2;

  ImageF mid(img.width, img.height, img.channels);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        double acc = 0.0;
        for (int t = 0; t < ksize; ++t) {
          acc += k[static_cast<size_t>(t)] * img.at(c, y, reflect(x + t - half, img.width));
        }
        mid.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }
  ImageF out(img.width, img.height, img.channels);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        double acc = 0.0;
        for (int t = 0; t < ksize; ++t) {
          acc += k[static_cast<size_t>(t)] * mid.at(c, reflect(y + t - half, img.height), x);
        }
        out.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

ImageRGB8 degrade(const ImageRGB8& hr, const DegradationSpec& spec) {
  spec.validate();
  const ImageRGB8 cropped = crop_to_multiple(hr, spec.scale);
  ImageF f = to_float(cropped);
  if (spec.kind == DegradationKind::BD) {
    f = gaussian_blur(f, spec.bd_kernel, spec.bd_sigma);
  }
  const ImageF lr = bicubic_resize(f, cropped.width / spec.scale, cropped.height / spec.scale,
                                   /*antialias=*/true);
  return to_rgb8(lr);
}

}  // namespace hran
