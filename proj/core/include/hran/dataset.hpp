#pragma once
#include <string>
#include <utility>
#include <vector>

#include "hran/degrade.hpp"
#include "hran/image.hpp"
#include "hran/rng.hpp"
#include "hran/tensor.hpp"

namespace hran {

struct PatchPair {
  ImageRGB8 lr;
  ImageRGB8 hr;
};

// Uniformly random aligned patch pair. The LR corner is drawn on the LR
// grid; the HR corner is scale times it. Draw order: x then y.
PatchPair sample_patch_pair(const ImageRGB8& hr, const ImageRGB8& lr, int lr_patch, int scale,
                            Rng& rng);

ImageRGB8 crop(const ImageRGB8& img, int x0, int y0, int w, int h);
ImageRGB8 flip_horizontal(const ImageRGB8& img);
// Pixel (i,j) moves to (j, H-1-i). Square images only.
ImageRGB8 rot90(const ImageRGB8& img);

// Random horizontal flip (p=1/2) and k*90 degree rotation (k uniform in
// 0..3), the same transform applied to both patches. Draw order: flip, k.
void augment(ImageRGB8& lr_patch, ImageRGB8& hr_patch, Rng& rng);

// An HR directory with its degraded counterparts, sorted by filename.
// LR images come from a sibling "LR_<TAG>" directory when it exists
// (matching filenames required), otherwise they are generated.
struct Dataset {
  std::vector<std::string> names;
  std::vector<ImageRGB8> hr;
  std::vector<ImageRGB8> lr;

  size_t size() const { return names.size(); }
};

Dataset load_dataset(const std::string& hr_dir, const DegradationSpec& spec);

// Interleaved 8-bit patches to a (n,3,h,w) float tensor in [0,1].
Tensor4<float> batch_to_tensor(const std::vector<ImageRGB8>& batch);
// (n,3,h,w) float tensor back to images, quantized.
std::vector<ImageRGB8> tensor_to_images(const Tensor4<float>& t);

}  // namespace hran
