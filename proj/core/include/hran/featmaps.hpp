#pragma once
#include <string>
#include <vector>

#include "hran/image.hpp"
#include "hran/model.hpp"

namespace hran {

// Channel-averaged activation maps, min-max normalized to [0,255]; a
// constant map normalizes to mid-gray 128. One PNG per residual block plus
// one per RAFG output: rafg{i}_rb{j}.png, rafg{i}_out.png.
ImageGray8 feature_map_to_gray(const Tensor4<float>& t);
std::vector<std::string> dump_feature_maps(const HranModel<float>& model,
                                           const Tensor4<float>& input,
                                           const std::string& out_dir);

}  // namespace hran
