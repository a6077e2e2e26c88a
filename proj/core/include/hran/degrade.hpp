#pragma once
#include <string>

#include "hran/image.hpp"

namespace hran {

enum class DegradationKind { BI, BD };

struct DegradationSpec {
  DegradationKind kind = DegradationKind::BI;
  int scale = 2;
  int bd_kernel = 7;
  double bd_sigma = 1.6;
  bool bd_any_scale = false;  // BD is a x3 protocol unless explicitly unlocked

  void validate() const {
    if (scale != 2 && scale != 3 && scale != 4) {
      throw ConfigError("degradation scale must be one of {2, 3, 4}, got " +
                        std::to_string(scale));
    }
    if (kind == DegradationKind::BD) {
      if (scale != 3 && !bd_any_scale) {
        throw ConfigError("BD degradation is defined for scale 3; pass bd_any_scale to override");
      }
      if (bd_kernel < 1 || bd_kernel % 2 != 1) {
        throw ConfigError("BD kernel size must be odd and positive");
      }
      if (!(bd_sigma > 0.0)) throw ConfigError("BD sigma must be positive");
    }
  }

  std::string tag() const {  // "BI_x2", "BD_x3", used for sibling LR directories
    return (kind == DegradationKind::BI ? std::string("BI") : std::string("BD")) + "_x" +
           std::to_string(scale);
  }
};

// Largest top-left crop whose dimensions are divisible by s.
ImageRGB8 crop_to_multiple(const ImageRGB8& img, int s);

// Gaussian blur with a normalized ksize x ksize kernel and reflect padding
// (edge pixel included in the reflection).
ImageF gaussian_blur(const ImageF& img, int ksize, double sigma);
std::vector<double> gaussian_kernel_1d(int ksize, double sigma);

// HR -> LR. BI: antialiased bicubic downscale. BD: Gaussian blur, then the
// same bicubic downscale. Deterministic, no RNG.
ImageRGB8 degrade(const ImageRGB8& hr, const DegradationSpec& spec);

}  // namespace hran
