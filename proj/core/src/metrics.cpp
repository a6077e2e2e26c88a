#include "hran/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hran {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

void require_same_dims(const GrayImageD& a, const GrayImageD& b, const char* op) {
  if (a.width != b.width || a.height != b.height) {
    throw ShapeError(std::string(op) + ": dimension mismatch " + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                     std::to_string(b.height));
  }
}

std::vector<double> gaussian_window_1d() {
  std::vector<double> w(kWindow);
  const int half = kWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - half;
    w[static_cast<size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += w[static_cast<size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-window separable Gaussian filter; output is (w-10) x (h-10).
GrayImageD gauss_filter_valid(const GrayImageD& img, const std::vector<double>& k) {
  GrayImageD mid(img.width - kWindow + 1, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < mid.width; ++x) {
      double acc = 0.0;
      for (int t = 0; t < kWindow; ++t) acc += k[static_cast<size_t>(t)] * img.at(y, x + t);
      mid.at(y, x) = acc;
    }
  }
  GrayImageD out(mid.width, img.height - kWindow + 1);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double acc = 0.0;
      for (int t = 0; t < kWindow; ++t) acc += k[static_cast<size_t>(t)] * mid.at(y + t, x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

GrayImageD mul_images(const GrayImageD& a, const GrayImageD& b) {
  GrayImageD out(a.width, a.height);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

}  // namespace

GrayImageD shave_border(const GrayImageD& img, int shave) {
  if (shave == 0) return img;
  GrayImageD out(img.width - 2 * shave, img.height - 2 * shave);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) out.at(y, x) = img.at(y + shave, x + shave);
  }
  return out;
}

double psnr_gray(const GrayImageD& a, const GrayImageD& b, int shave) {
  require_same_dims(a, b, "psnr");
  EvalProtocol{shave}.validate(a.width, a.height);
  const GrayImageD sa = shave_border(a, shave);
  const GrayImageD sb = shave_border(b, shave);
  double mse = 0.0;
  for (size_t i = 0; i < sa.v.size(); ++i) {
    const double d = sa.v[i] - sb.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(sa.v.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim_gray(const GrayImageD& a, const GrayImageD& b, int shave) {
  require_same_dims(a, b, "ssim");
  EvalProtocol{shave}.validate(a.width, a.height);
  const GrayImageD x = shave_border(a, shave);
  const GrayImageD y = shave_border(b, shave);
  if (x.width < kWindow || x.height < kWindow) {
    throw ShapeError("ssim: shaved image " + std::to_string(x.width) + "x" +
                     std::to_string(x.height) + " smaller than the " + std::to_string(kWindow) +
                     "x" + std::to_string(kWindow) + " window");
  }
  const auto k = gaussian_window_1d();
  const GrayImageD mu1 = gauss_filter_valid(x, k);
  const GrayImageD mu2 = gauss_filter_valid(y, k);
  const GrayImageD xx = gauss_filter_valid(mul_images(x, x), k);
  const GrayImageD yy = gauss_filter_valid(mul_images(y, y), k);
  const GrayImageD xy = gauss_filter_valid(mul_images(x, y), k);

  double total = 0.0;
  for (size_t i = 0; i < mu1.v.size(); ++i) {
    const double m1 = mu1.v[i], m2 = mu2.v[i];
    const double s1 = xx.v[i] - m1 * m1;
    const double s2 = yy.v[i] - m2 * m2;
    const double s12 = xy.v[i] - m1 * m2;
    total += ((2.0 * m1 * m2 + kC1) * (2.0 * s12 + kC2)) /
             ((m1 * m1 + m2 * m2 + kC1) * (s1 + s2 + kC2));
  }
  return total / static_cast<double>(mu1.v.size());
}

double psnr_y(const ImageRGB8& sr, const ImageRGB8& hr, const EvalProtocol& protocol) {
  return psnr_gray(rgb_to_ycbcr_y(sr), rgb_to_ycbcr_y(hr), protocol.shave);
}

double ssim_y(const ImageRGB8& sr, const ImageRGB8& hr, const EvalProtocol& protocol) {
  return ssim_gray(rgb_to_ycbcr_y(sr), rgb_to_ycbcr_y(hr), protocol.shave);
}

}  // namespace hran
