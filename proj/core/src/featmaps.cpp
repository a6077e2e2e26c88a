#include "hran/featmaps.hpp"

#include <cmath>
#include <filesystem>

namespace fs = std::filesystem;

namespace hran {

ImageGray8 feature_map_to_gray(const Tensor4<float>& t) {
  const auto& s = t.shape();
  const int h = static_cast<int>(s.h), w = static_cast<int>(s.w);
  std::vector<double> mean(static_cast<size_t>(h) * w, 0.0);
  for (int64_t c = 0; c < s.c; ++c) {
    for (int64_t y = 0; y < s.h; ++y) {
      for (int64_t x = 0; x < s.w; ++x) {
        mean[static_cast<size_t>(y * s.w + x)] += t.at(0, c, y, x);
      }
    }
  }
  for (double& v : mean) v /= static_cast<double>(s.c);

  double lo = mean[0], hi = mean[0];
  for (double v : mean) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  ImageGray8 img(w, h);
  if (hi == lo) {
    std::fill(img.pixels.begin(), img.pixels.end(), uint8_t(128));
    return img;
  }
  for (size_t i = 0; i < mean.size(); ++i) {
    const double v = (mean[i] - lo) / (hi - lo) * 255.0;
    img.pixels[i] = static_cast<uint8_t>(std::floor(v + 0.5));
  }
  return img;
}

std::vector<std::string> dump_feature_maps(const HranModel<float>& model,
                                           const Tensor4<float>& input,
                                           const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) {
    throw IoError("cannot create feature map directory " + out_dir);
  }
  ForwardTrace<EagerOps<float>::V> trace;
  model.infer(input, /*clamp01=*/false, &trace);

  std::vector<std::string> written;
  for (size_t i = 0; i < trace.rafgs.size(); ++i) {
    const auto& rafg = trace.rafgs[i];
    for (size_t j = 0; j < rafg.rb_outs.size(); ++j) {
      const std::string path =
          (fs::path(out_dir) / ("rafg" + std::to_string(i) + "_rb" + std::to_string(j) + ".png"))
              .string();
      write_png_gray(path, feature_map_to_gray(*rafg.rb_outs[j]));
      written.push_back(path);
    }
    const std::string path =
        (fs::path(out_dir) / ("rafg" + std::to_string(i) + "_out.png")).string();
    write_png_gray(path, feature_map_to_gray(*rafg.out));
    written.push_back(path);
  }
  return written;
}

}  // namespace hran
