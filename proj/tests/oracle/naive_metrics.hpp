#pragma once
// Brute-force PSNR/SSIM references: direct double loops, no separability
// tricks, window weights recomputed per position.
#include <cmath>
#include <limits>

#include "hran/image.hpp"

namespace oracle {

inline double luma(const hran::ImageRGB8& img, int y, int x) {
  return 16.0 + (65.481 * img.at(y, x, 0) + 128.553 * img.at(y, x, 1) +
                 24.966 * img.at(y, x, 2)) /
                    255.0;
}

inline double brute_psnr_y(const hran::ImageRGB8& sr, const hran::ImageRGB8& hr, int shave) {
  double mse = 0.0;
  int64_t count = 0;
  for (int y = shave; y < sr.height - shave; ++y) {
    for (int x = shave; x < sr.width - shave; ++x) {
      const double d = luma(sr, y, x) - luma(hr, y, x);
      mse += d * d;
      ++count;
    }
  }
  mse /= static_cast<double>(count);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

inline double brute_ssim_y(const hran::ImageRGB8& sr, const hran::ImageRGB8& hr, int shave) {
  const int win = 11;
  const double sigma = 1.5;
  const double c1 = 6.5025, c2 = 58.5225;  // (K L)^2 for K1=0.01, K2=0.03, L=255
  const int w = sr.width - 2 * shave, h = sr.height - 2 * shave;

  double total = 0.0;
  int64_t windows = 0;
  for (int wy = 0; wy + win <= h; ++wy) {
    for (int wx = 0; wx + win <= w; ++wx) {
      double wsum = 0.0, m1 = 0.0, m2 = 0.0;
      for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) {
          const double di = i - win / 2, dj = j - win / 2;
          wsum += std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
        }
      }
      for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) {
          const double di = i - win / 2, dj = j - win / 2;
          const double g = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma)) / wsum;
          m1 += g * luma(sr, shave + wy + i, shave + wx + j);
          m2 += g * luma(hr, shave + wy + i, shave + wx + j);
        }
      }
      double v1 = 0.0, v2 = 0.0, cov = 0.0;
      for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) {
          const double di = i - win / 2, dj = j - win / 2;
          const double g = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma)) / wsum;
          const double a = luma(sr, shave + wy + i, shave + wx + j);
          const double b = luma(hr, shave + wy + i, shave + wx + j);
          v1 += g * (a - m1) * (a - m1);
          v2 += g * (b - m2) * (b - m2);
          cov += g * (a - m1) * (b - m2);
        }
      }
      total += ((2.0 * m1 * m2 + c1) * (2.0 * cov + c2)) /
               ((m1 * m1 + m2 * m2 + c1) * (v1 + v2 + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

}  // namespace oracle
