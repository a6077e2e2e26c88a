#pragma once
#include "hran/color.hpp"
#include "hran/image.hpp"

namespace hran {

// Evaluation protocol: metrics on the Y channel (kept in float), data range
// 255, with a shaved border. Shave defaults to the scale factor at call
// sites.
struct EvalProtocol {
  int shave = 0;

  void validate(int width, int height) const {
    if (shave < 0) throw ConfigError("shave must be >= 0");
    if (2 * shave >= width || 2 * shave >= height) {
      throw ConfigError("shave " + std::to_string(shave) + " too large for image " +
                        std::to_string(width) + "x" + std::to_string(height));
    }
  }
};

GrayImageD shave_border(const GrayImageD& img, int shave);

// 10*log10(255^2/MSE) over the shaved Y plane; +inf for identical images.
double psnr_y(const ImageRGB8& sr, const ImageRGB8& hr, const EvalProtocol& protocol);

// Mean local SSIM with an 11x11 Gaussian window (sigma 1.5, renormalized),
// K1=0.01, K2=0.03, L=255, valid windows only.
double ssim_y(const ImageRGB8& sr, const ImageRGB8& hr, const EvalProtocol& protocol);

// Same metrics on precomputed Y planes (used by validation, which skips the
// 8-bit roundtrip of the reference).
double psnr_gray(const GrayImageD& a, const GrayImageD& b, int shave);
double ssim_gray(const GrayImageD& a, const GrayImageD& b, int shave);

}  // namespace hran
