#include "hran/dataset.hpp"

#include <algorithm>
#include <filesystem>

namespace fs = std::filesystem;

namespace hran {

ImageRGB8 crop(const ImageRGB8& img, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || x0 + w > img.width || y0 + h > img.height) {
    throw ShapeError("crop: window " + std::to_string(w) + "x" + std::to_string(h) + "+" +
                     std::to_string(x0) + "+" + std::to_string(y0) + " outside image " +
                     std::to_string(img.width) + "x" + std::to_string(img.height));
  }
  ImageRGB8 out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y0 + y, x0 + x, c);
    }
  }
  return out;
}

PatchPair sample_patch_pair(const ImageRGB8& hr, const ImageRGB8& lr, int lr_patch, int scale,
                            Rng& rng) {
  if (lr.width < lr_patch || lr.height < lr_patch) {
    throw ShapeError("sample_patch_pair: LR image " + std::to_string(lr.width) + "x" +
                     std::to_string(lr.height) + " smaller than patch size " +
                     std::to_string(lr_patch) + "; images must be at least " +
                     std::to_string(lr_patch * scale) + "x" + std::to_string(lr_patch * scale) +
                     " in HR");
  }
  const int x = static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(lr.width - lr_patch + 1)));
  const int y = static_cast<int>(rng.uniform_u32(static_cast<uint32_t>(lr.height - lr_patch + 1)));
  PatchPair p;
  p.lr = crop(lr, x, y, lr_patch, lr_patch);
  p.hr = crop(hr, x * scale, y * scale, lr_patch * scale, lr_patch * scale);
  return p;
}

ImageRGB8 flip_horizontal(const ImageRGB8& img) {
  ImageRGB8 out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) out.at(y, img.width - 1 - x, c) = img.at(y, x, c);
    }
  }
  return out;
}

ImageRGB8 rot90(const ImageRGB8& img) {
  if (img.width != img.height) {
    throw ShapeError("rot90: patch must be square, got " + std::to_string(img.width) + "x" +
                     std::to_string(img.height));
  }
  const int n = img.height;
  ImageRGB8 out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int c = 0; c < 3; ++c) out.at(j, n - 1 - i, c) = img.at(i, j, c);
    }
  }
  return out;
}

void augment(ImageRGB8& lr_patch, ImageRGB8& hr_patch, Rng& rng) {
  const bool flip = rng.uniform_u32(2) == 1;
  const uint32_t k = rng.uniform_u32(4);
  if (flip) {
    lr_patch = flip_horizontal(lr_patch);
    hr_patch = flip_horizontal(hr_patch);
  }
  for (uint32_t i = 0; i < k; ++i) {
    lr_patch = rot90(lr_patch);
    hr_patch = rot90(hr_patch);
  }
}

Dataset load_dataset(const std::string& hr_dir, const DegradationSpec& spec) {
  spec.validate();
  if (!fs::is_directory(hr_dir)) {
    throw IoError("dataset directory does not exist: " + hr_dir);
  }
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(hr_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") {
      names.push_back(e.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw IoError("no PNG files in dataset directory " + hr_dir);

  const fs::path lr_dir = fs::path(hr_dir).parent_path() / ("LR_" + spec.tag());
  const bool have_lr_dir = fs::is_directory(lr_dir);

  Dataset ds;
  ds.names = names;
  for (const auto& name : names) {
    ImageRGB8 hr = crop_to_multiple(read_png((fs::path(hr_dir) / name).string()), spec.scale);
    ImageRGB8 lr;
    if (have_lr_dir) {
      const fs::path lp = lr_dir / name;
      if (!fs::is_regular_file(lp)) {
        throw IoError("LR directory " + lr_dir.string() + " is missing " + name);
      }
      lr = read_png(lp.string());
      if (lr.width != hr.width / spec.scale || lr.height != hr.height / spec.scale) {
        throw ShapeError("LR image " + lp.string() + " is " + std::to_string(lr.width) + "x" +
                         std::to_string(lr.height) + ", expected " +
                         std::to_string(hr.width / spec.scale) + "x" +
                         std::to_string(hr.height / spec.scale));
      }
    } else {
      lr = degrade(hr, spec);
    }
    ds.hr.push_back(std::move(hr));
    ds.lr.push_back(std::move(lr));
  }
  return ds;
}

Tensor4<float> batch_to_tensor(const std::vector<ImageRGB8>& batch) {
  if (batch.empty()) throw ShapeError("batch_to_tensor: empty batch");
  const int w = batch[0].width, h = batch[0].height;
  Tensor4<float> t({static_cast<int64_t>(batch.size()), 3, h, w});
  for (size_t n = 0; n < batch.size(); ++n) {
    const ImageRGB8& img = batch[n];
    if (img.width != w || img.height != h) {
      throw ShapeError("batch_to_tensor: mixed patch sizes in batch");
    }
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          t.at(static_cast<int64_t>(n), c, y, x) = static_cast<float>(img.at(y, x, c)) / 255.0f;
        }
      }
    }
  }
  return t;
}

std::vector<ImageRGB8> tensor_to_images(const Tensor4<float>& t) {
  const auto& s = t.shape();
  if (s.c != 3) throw ShapeError("tensor_to_images: expected 3 channels, got " + s.str());
  std::vector<ImageRGB8> out;
  for (int64_t n = 0; n < s.n; ++n) {
    ImageRGB8 img(static_cast<int>(s.w), static_cast<int>(s.h));
    for (int64_t c = 0; c < 3; ++c) {
      for (int64_t y = 0; y < s.h; ++y) {
        for (int64_t x = 0; x < s.w; ++x) {
          img.at(static_cast<int>(y), static_cast<int>(x), static_cast<int>(c)) =
              quantize_u8(t.at(n, c, y, x));
        }
      }
    }
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace hran
