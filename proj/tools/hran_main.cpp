// hran: train, run, and evaluate the super-resolution network from the
// command line. Subcommands: train, sr, eval, params, gradcheck, featmaps,
// degrade. No environment variables are consulted; every knob is a flag or
// a config-file key, and fixed seeds give bit-identical runs.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "hran/checkpoint.hpp"
#include "hran/config.hpp"
#include "hran/dataset.hpp"
#include "hran/featmaps.hpp"
#include "hran/metrics.hpp"
#include "hran/model.hpp"
#include "hran/model_gradcheck.hpp"
#include "hran/resize.hpp"
#include "hran/trainer.hpp"

namespace fs = std::filesystem;
using namespace hran;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNan = 3;

struct Override {
  std::string key, value;
};

// file values first, flags second: flags win
RunConfig resolve_config(const std::string& config_path, const std::vector<Override>& overrides) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::parse_file(config_path);
  for (const auto& o : overrides) cfg.set(o.key, o.value);
  cfg.degradation.scale = cfg.model.scale;
  cfg.model.validate();
  cfg.degradation.validate();
  return cfg;
}

std::vector<Override> parse_set_flags(const std::vector<std::string>& sets) {
  std::vector<Override> out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + s + "'");
    }
    out.push_back({s.substr(0, eq), s.substr(eq + 1)});
  }
  return out;
}

HranModel<float> model_from_checkpoint(const std::string& path, RunConfig* cfg_out = nullptr,
                                       LoadedCheckpoint* ck_out = nullptr) {
  LoadedCheckpoint ck = load_checkpoint(path);
  if (cfg_out) *cfg_out = ck.config;
  auto model = HranModel<float>::from_params(ck.config.model, std::move(ck.params));
  if (ck_out) {
    ck.params = ParamTable<float>{};
    *ck_out = std::move(ck);
  }
  return model;
}

// Tiled inference with overlap; interior seams are center-cropped away.
Tensor4<float> sr_tiled(const HranModel<float>& model, const Tensor4<float>& lr, int tile,
                        int overlap) {
  const int s = model.config().scale;
  const auto& sh = lr.shape();
  Tensor4<float> out({sh.n, 3, sh.h * s, sh.w * s});
  for (int64_t y0 = 0; y0 < sh.h; y0 += tile) {
    for (int64_t x0 = 0; x0 < sh.w; x0 += tile) {
      const int64_t y1 = std::min<int64_t>(y0 + tile, sh.h);
      const int64_t x1 = std::min<int64_t>(x0 + tile, sh.w);
      const int64_t wy0 = std::max<int64_t>(0, y0 - overlap);
      const int64_t wx0 = std::max<int64_t>(0, x0 - overlap);
      const int64_t wy1 = std::min<int64_t>(sh.h, y1 + overlap);
      const int64_t wx1 = std::min<int64_t>(sh.w, x1 + overlap);
      Tensor4<float> window({sh.n, 3, wy1 - wy0, wx1 - wx0});
      for (int64_t n = 0; n < sh.n; ++n) {
        for (int64_t c = 0; c < 3; ++c) {
          for (int64_t y = wy0; y < wy1; ++y) {
            for (int64_t x = wx0; x < wx1; ++x) {
              window.at(n, c, y - wy0, x - wx0) = lr.at(n, c, y, x);
            }
          }
        }
      }
      const Tensor4<float> sr = model.infer(window, /*clamp01=*/true);
      for (int64_t n = 0; n < sh.n; ++n) {
        for (int64_t c = 0; c < 3; ++c) {
          for (int64_t y = y0 * s; y < y1 * s; ++y) {
            for (int64_t x = x0 * s; x < x1 * s; ++x) {
              out.at(n, c, y, x) = sr.at(n, c, y - wy0 * s, x - wx0 * s);
            }
          }
        }
      }
    }
  }
  return out;
}

ImageRGB8 bicubic_upscale(const ImageRGB8& lr, int s) {
  return to_rgb8(bicubic_resize(to_float(lr), lr.width * s, lr.height * s, /*antialias=*/false));
}

std::string fmt_metric(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, const std::string& val_dir,
              const std::string& resume_path, const std::vector<Override>& overrides) {
  RunConfig cfg = resolve_config(config_path, overrides);
  if (!cfg.has("train.seed")) {
    throw ConfigError("train.seed is required (config key or --seed); no wall-clock seeding");
  }
  if (!cfg.has("train.total_iters")) {
    throw ConfigError("train.total_iters is required (config key or --total-iters)");
  }
  cfg.train.validate();

  const Dataset data = load_dataset(data_dir, cfg.degradation);
  std::optional<Dataset> val;
  if (!val_dir.empty()) val = load_dataset(val_dir, cfg.degradation);

  LoadedCheckpoint resume_ck;
  std::optional<HranModel<float>> model;
  const OptimSnapshot* resume = nullptr;
  if (!resume_path.empty()) {
    model = model_from_checkpoint(resume_path, nullptr, &resume_ck);
    if (!(model->config() == cfg.model)) {
      throw ConfigError("resume checkpoint was trained with a different model config");
    }
    if (resume_ck.has_optim) resume = &resume_ck.optim;
  } else {
    model.emplace(cfg.model, cfg.train.seed);
  }

  fs::create_directories(out_dir);
  {
    std::ofstream frozen((fs::path(out_dir) / "config.txt").string());
    frozen << cfg.serialize();
  }
  std::ofstream log_file((fs::path(out_dir) / "train.log").string(),
                         resume ? std::ios::app : std::ios::trunc);

  struct Tee : std::ostream, std::streambuf {
    std::ostream &a, &b;
    Tee(std::ostream& a, std::ostream& b) : std::ostream(this), a(a), b(b) {}
    int overflow(int c) override {
      a.put(static_cast<char>(c));
      b.put(static_cast<char>(c));
      return c;
    }
  } tee(log_file, std::cout);

  const TrainResult res = train(*model, data, cfg, out_dir, tee, val ? &*val : nullptr, resume);
  std::cout << "final checkpoint: " << res.final_checkpoint << "\n";
  return 0;
}

int cmd_sr(const std::string& ckpt, const std::string& in_path, const std::string& out_path,
           int tile) {
  const HranModel<float> model = model_from_checkpoint(ckpt);
  const ImageRGB8 lr = read_png(in_path);
  const Tensor4<float> lr_t = batch_to_tensor({lr});
  Tensor4<float> sr;
  if (tile > 0 && (lr.width > tile || lr.height > tile)) {
    sr = sr_tiled(model, lr_t, tile, /*overlap=*/8);
  } else {
    sr = model.infer(lr_t, /*clamp01=*/true);
  }
  write_png(out_path, tensor_to_images(sr)[0]);
  std::cout << out_path << " " << sr.shape().w << "x" << sr.shape().h << "\n";
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& baseline, const std::string& hr_dir,
             const std::string& deg, int scale, int shave, int tile, bool json_out,
             bool bd_any_scale) {
  DegradationSpec spec;
  spec.kind = degradation_kind_from(deg);
  spec.scale = scale;
  spec.bd_any_scale = bd_any_scale;
  spec.validate();
  if (ckpt.empty() && baseline.empty()) {
    throw ConfigError("eval needs --ckpt or --baseline bicubic");
  }

  std::optional<HranModel<float>> model;
  if (!ckpt.empty()) {
    RunConfig cfg;
    model.emplace(model_from_checkpoint(ckpt, &cfg));
    if (cfg.model.scale != scale) {
      throw ConfigError("checkpoint was trained for scale " + std::to_string(cfg.model.scale) +
                        ", eval requested " + std::to_string(scale));
    }
  }

  const Dataset data = load_dataset(hr_dir, spec);
  const EvalProtocol protocol{shave < 0 ? scale : shave};

  nlohmann::json jout;
  double psnr_sum = 0.0, ssim_sum = 0.0;
  int64_t finite_count = 0, inf_count = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    ImageRGB8 sr;
    if (model) {
      const Tensor4<float> lr_t = batch_to_tensor({data.lr[i]});
      const Tensor4<float> sr_t = (tile > 0 && (data.lr[i].width > tile ||
                                                data.lr[i].height > tile))
                                      ? sr_tiled(*model, lr_t, tile, 8)
                                      : model->infer(lr_t, true);
      sr = tensor_to_images(sr_t)[0];
    } else {
      sr = bicubic_upscale(data.lr[i], scale);
    }
    const double p = psnr_y(sr, data.hr[i], protocol);
    const double s = ssim_y(sr, data.hr[i], protocol);
    std::cout << data.names[i] << "\t" << fmt_metric(p) << "\t" << fmt_metric(s) << "\n";
    jout["images"][data.names[i]] = {{"psnr", p}, {"ssim", s}};
    if (std::isfinite(p)) {
      psnr_sum += p;
      ssim_sum += s;
      ++finite_count;
    } else {
      ++inf_count;
    }
  }
  const double mean_psnr = finite_count ? psnr_sum / finite_count : 0.0;
  const double mean_ssim = finite_count ? ssim_sum / finite_count : 0.0;
  std::cout << "MEAN\t" << fmt_metric(mean_psnr) << "\t" << fmt_metric(mean_ssim) << "\n";
  if (inf_count > 0) {
    std::cout << "# " << inf_count << " image(s) with infinite PSNR excluded from MEAN\n";
  }
  if (json_out) {
    jout["mean"] = {{"psnr", mean_psnr}, {"ssim", mean_ssim}, {"inf_excluded", inf_count}};
    std::cout << jout.dump(2) << "\n";
  }
  return 0;
}

int cmd_params(const std::string& config_path, const std::vector<Override>& overrides, bool kv) {
  const RunConfig cfg = resolve_config(config_path, overrides);
  const HranModel<float> model(cfg.model, 0);
  const ParamCount pc = count_params(model);
  if (kv) {
    for (const auto& [name, n] : pc.per_tensor) std::cout << name << "=" << n << "\n";
    std::cout << "total=" << pc.total << "\n";
    return 0;
  }
  size_t width = 5;
  for (const auto& [name, n] : pc.per_tensor) width = std::max(width, name.size());
  for (const auto& [name, n] : pc.per_tensor) {
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << name << n << "\n";
  }
  std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "total" << pc.total << "\n";
  return 0;
}

int cmd_gradcheck(const std::string& config_path, const std::vector<Override>& overrides,
                  double tolerance) {
  RunConfig cfg = resolve_config(config_path, overrides);
  // shrink to a tiny instantiation of the same wiring
  ModelConfig tiny = cfg.model;
  tiny.num_rafgs = 1;
  tiny.blocks_per_rafg = 1;
  tiny.channels = std::min(tiny.channels, 4);
  tiny.ca_reduction = std::min(tiny.ca_reduction, tiny.channels);
  tiny.validate();
  const auto rep = gradcheck_model(tiny, 12345, {1, 3, 4, 4}, 1e-5, tolerance);
  if (rep.pass) {
    std::cout << "PASS max_rel_err<" << tolerance << " (observed " << rep.max_rel_error << ")\n";
    return 0;
  }
  std::cout << "FAIL max_rel_err=" << rep.max_rel_error << " at " << rep.worst_param << "["
            << rep.worst_index << "]\n";
  return kExitConfig;
}

int cmd_featmaps(const std::string& ckpt, const std::string& in_path, const std::string& out_dir) {
  const HranModel<float> model = model_from_checkpoint(ckpt);
  const ImageRGB8 lr = read_png(in_path);
  const auto files = dump_feature_maps(model, batch_to_tensor({lr}), out_dir);
  for (const auto& f : files) std::cout << f << "\n";
  return 0;
}

int cmd_degrade(const std::string& hr_dir, const std::string& deg, int scale,
                const std::string& out_dir, int bd_kernel, double bd_sigma, bool bd_any_scale) {
  DegradationSpec spec;
  spec.kind = degradation_kind_from(deg);
  spec.scale = scale;
  spec.bd_kernel = bd_kernel;
  spec.bd_sigma = bd_sigma;
  spec.bd_any_scale = bd_any_scale;
  spec.validate();
  if (!fs::is_directory(hr_dir)) throw IoError("HR directory does not exist: " + hr_dir);
  fs::create_directories(out_dir);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(hr_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") {
      names.push_back(e.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw IoError("no PNG files in " + hr_dir);
  for (const auto& name : names) {
    const ImageRGB8 hr = read_png((fs::path(hr_dir) / name).string());
    write_png((fs::path(out_dir) / name).string(), degrade(hr, spec));
    std::cout << name << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical residual attention super-resolution"};
  app.require_subcommand(1);

  std::string config_path, data_dir, out_dir, val_dir, resume_path;
  std::string ckpt, in_path, out_path, hr_dir, deg = "bi", baseline;
  std::vector<std::string> set_flags;
  int tile = 0, scale = 2, shave = -1, bd_kernel = 7;
  double tolerance = 1e-4, bd_sigma = 1.6;
  bool kv = false, json_out = false, bd_any_scale = false;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--set", set_flags, "override a config key, e.g. --set model.channels=8");
    cmd->add_option("--channels", [&](const CLI::results_t& r) {
      set_flags.push_back("model.channels=" + r[0]);
      return true;
    }, "override model.channels");
    cmd->add_option("--scale", [&](const CLI::results_t& r) {
      set_flags.push_back("model.scale=" + r[0]);
      return true;
    }, "override model.scale");
    cmd->add_option("--seed", [&](const CLI::results_t& r) {
      set_flags.push_back("train.seed=" + r[0]);
      return true;
    }, "override train.seed");
    cmd->add_option("--total-iters", [&](const CLI::results_t& r) {
      set_flags.push_back("train.total_iters=" + r[0]);
      return true;
    }, "override train.total_iters");
  };

  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--config", config_path, "run config file");
  train_cmd->add_option("--data", data_dir, "directory of HR training PNGs")->required();
  train_cmd->add_option("--out", out_dir, "output directory")->required();
  train_cmd->add_option("--val", val_dir, "directory of HR validation PNGs");
  train_cmd->add_option("--resume", resume_path, "checkpoint to resume from");
  add_overrides(train_cmd);

  auto* sr_cmd = app.add_subcommand("sr", "super-resolve one image");
  sr_cmd->add_option("--ckpt", ckpt, "model checkpoint")->required();
  sr_cmd->add_option("--in", in_path, "input PNG")->required();
  sr_cmd->add_option("--out", out_path, "output PNG")->required();
  sr_cmd->add_option("--tile", tile, "tile size for large inputs (8px overlap)");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate over an HR corpus");
  eval_cmd->add_option("--ckpt", ckpt, "model checkpoint");
  eval_cmd->add_option("--baseline", baseline, "use a baseline instead of a model (bicubic)");
  eval_cmd->add_option("--hr", hr_dir, "directory of HR PNGs")->required();
  eval_cmd->add_option("--deg", deg, "degradation: bi|bd");
  eval_cmd->add_option("--scale", scale, "scale factor")->required();
  eval_cmd->add_option("--shave", shave, "border shave in pixels (default: scale)");
  eval_cmd->add_option("--tile", tile, "tile size for large inputs");
  eval_cmd->add_flag("--json", json_out, "machine-readable output");
  eval_cmd->add_flag("--bd-any-scale", bd_any_scale, "allow BD at scales other than 3");

  auto* params_cmd = app.add_subcommand("params", "parameter count and breakdown");
  params_cmd->add_option("--config", config_path, "run config file");
  params_cmd->add_flag("--kv", kv, "key=value lines instead of the aligned table");
  add_overrides(params_cmd);

  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of the model wiring");
  grad_cmd->add_option("--config", config_path, "run config file");
  grad_cmd->add_option("--tolerance", tolerance, "max relative error allowed");
  add_overrides(grad_cmd);

  auto* feat_cmd = app.add_subcommand("featmaps", "export average feature maps");
  feat_cmd->add_option("--ckpt", ckpt, "model checkpoint")->required();
  feat_cmd->add_option("--in", in_path, "input PNG")->required();
  feat_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* deg_cmd = app.add_subcommand("degrade", "batch-degrade an HR directory");
  deg_cmd->add_option("--hr", hr_dir, "directory of HR PNGs")->required();
  deg_cmd->add_option("--deg", deg, "degradation: bi|bd");
  deg_cmd->add_option("--scale", scale, "scale factor")->required();
  deg_cmd->add_option("--out", out_dir, "output directory")->required();
  deg_cmd->add_option("--bd-kernel", bd_kernel, "BD Gaussian kernel size");
  deg_cmd->add_option("--bd-sigma", bd_sigma, "BD Gaussian sigma");
  deg_cmd->add_flag("--bd-any-scale", bd_any_scale, "allow BD at scales other than 3");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto overrides = parse_set_flags(set_flags);
    if (train_cmd->parsed()) {
      return cmd_train(config_path, data_dir, out_dir, val_dir, resume_path, overrides);
    }
    if (sr_cmd->parsed()) return cmd_sr(ckpt, in_path, out_path, tile);
    if (eval_cmd->parsed()) {
      return cmd_eval(ckpt, baseline, hr_dir, deg, scale, shave, tile, json_out, bd_any_scale);
    }
    if (params_cmd->parsed()) return cmd_params(config_path, overrides, kv);
    if (grad_cmd->parsed()) return cmd_gradcheck(config_path, overrides, tolerance);
    if (feat_cmd->parsed()) return cmd_featmaps(ckpt, in_path, out_dir);
    if (deg_cmd->parsed()) {
      return cmd_degrade(hr_dir, deg, scale, out_dir, bd_kernel, bd_sigma, bd_any_scale);
    }
  } catch (const TrainAborted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNan;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
