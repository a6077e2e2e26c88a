#include "hran/trainer.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>

#include "hran/metrics.hpp"

namespace fs = std::filesystem;

namespace hran {

float l1_loss_value(const Tensor4<float>& sr, const Tensor4<float>& hr) {
  return kernels::l1_loss_forward(sr, hr);
}

double validation_psnr(const HranModel<float>& model, const Dataset& data) {
  double total = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const Tensor4<float> lr = batch_to_tensor({data.lr[i]});
    const Tensor4<float> sr = model.infer(lr, /*clamp01=*/true);
    const ImageRGB8 sr_img = tensor_to_images(sr)[0];
    const double p = psnr_y(sr_img, data.hr[i], EvalProtocol{model.config().scale});
    if (std::isfinite(p)) {
      total += p;
      ++count;
    }
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

namespace {

std::string format_log_line(int64_t iter, double lr, float loss, const double* val_psnr) {
  char buf[160];
  int n = std::snprintf(buf, sizeof(buf), "%" PRId64 "\t%.9g\t%.9g", iter, lr,
                        static_cast<double>(loss));
  if (val_psnr) {
    n += std::snprintf(buf + n, sizeof(buf) - static_cast<size_t>(n), "\t%.6f", *val_psnr);
  }
  return std::string(buf, static_cast<size_t>(n));
}

void write_state(const std::string& path, const RunConfig& cfg, const HranModel<float>& model,
                 const AdamState<float>& adam, int64_t next_iter) {
  OptimSnapshot snap;
  snap.adam_t = adam.t;
  snap.iteration = next_iter;
  snap.m = adam.m;
  snap.v = adam.v;
  save_checkpoint(path, cfg.serialize(), model.params(), &snap);
}

}  // namespace

TrainResult train(HranModel<float>& model, const Dataset& data, const RunConfig& cfg,
                  const std::string& out_dir, std::ostream& log, const Dataset* val_data,
                  const OptimSnapshot* resume) {
  const TrainConfig& tc = cfg.train;
  tc.validate();
  if (data.size() == 0) throw IoError("training dataset is empty");
  fs::create_directories(out_dir);

  AdamState<float> adam(model.params());
  int64_t start_iter = 0;
  if (resume) {
    adam.t = resume->adam_t;
    adam.m = resume->m;
    adam.v = resume->v;
    start_iter = resume->iteration;
  }

  const std::string final_path = (fs::path(out_dir) / "ckpt_final.hrn").string();
  TrainResult result;
  result.final_checkpoint = final_path;

  for (int64_t iter = start_iter; iter < tc.total_iters; ++iter) {
    try {
      Rng rng = Rng::derive(tc.seed, static_cast<uint64_t>(iter));
      std::vector<ImageRGB8> lr_batch, hr_batch;
      lr_batch.reserve(static_cast<size_t>(tc.batch_size));
      hr_batch.reserve(static_cast<size_t>(tc.batch_size));
      for (int b = 0; b < tc.batch_size; ++b) {
        const uint32_t idx = rng.uniform_u32(static_cast<uint32_t>(data.size()));
        PatchPair p = sample_patch_pair(data.hr[idx], data.lr[idx], tc.patch_size,
                                        cfg.model.scale, rng);
        augment(p.lr, p.hr, rng);
        lr_batch.push_back(std::move(p.lr));
        hr_batch.push_back(std::move(p.hr));
      }

      Tape<float> tape;
      TapeOps<float> ops{&tape, &model.params(), {}};
      const int out_id = model.forward(ops, ops.input(batch_to_tensor(lr_batch)));
      const int loss_id = tape.l1_loss(out_id, batch_to_tensor(hr_batch));
      const float loss = tape.value(loss_id)[0];
      tape.backward(loss_id);

      const double lr = lr_at(iter, tc.base_lr, tc.halve_every);
      adam.step(model.params(),
                [&](const std::string& name) -> const Tensor4<float>& {
                  return tape.grad(ops.leaf_ids.at(name));
                },
                static_cast<float>(lr));

      result.final_loss = loss;
      result.iterations_run = iter + 1;

      const bool last = iter + 1 == tc.total_iters;
      if (iter % tc.log_every == 0 || last) {
        std::optional<double> val;
        if (val_data && tc.val_every > 0 && (iter % tc.val_every == 0 || last)) {
          val = validation_psnr(model, *val_data);
        }
        log << format_log_line(iter, lr, loss, val ? &*val : nullptr) << "\n";
        log.flush();
      }
      if (tc.ckpt_every > 0 && (iter + 1) % tc.ckpt_every == 0 && !last) {
        const std::string path =
            (fs::path(out_dir) / ("ckpt_" + std::to_string(iter + 1) + ".hrn")).string();
        write_state(path, cfg, model, adam, iter + 1);
      }
    } catch (const NonFiniteError& e) {
      const std::string nan_path = final_path + ".nan";
      write_state(nan_path, cfg, model, adam, iter);
      throw TrainAborted(std::string("training aborted at iteration ") + std::to_string(iter) +
                             ": " + e.what() + " (state dumped to " + nan_path + ")",
                         nan_path);
    }
  }

  write_state(final_path, cfg, model, adam, tc.total_iters);
  return result;
}

}  // namespace hran
