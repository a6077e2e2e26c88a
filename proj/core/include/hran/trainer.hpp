#pragma once
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "hran/checkpoint.hpp"
#include "hran/config.hpp"
#include "hran/dataset.hpp"
#include "hran/model.hpp"
#include "hran/optim.hpp"

namespace hran {

struct TrainResult {
  int64_t iterations_run = 0;
  float final_loss = 0.0f;
  std::string final_checkpoint;
};

// Thrown after the post-mortem checkpoint has been written.
struct TrainAborted : Error {
  std::string checkpoint_path;
  TrainAborted(const std::string& msg, std::string path)
      : Error(msg), checkpoint_path(std::move(path)) {}
};

// The full recipe: sample an augmented aligned patch batch, forward, L1,
// backward, Adam with the halving schedule. Every draw depends only on
// (seed, iteration), so a resumed run continues the uninterrupted stream.
// Log lines are tab-separated: iter, lr, loss, and val_psnr when due.
//
// `resume` restores optimizer state and the iteration counter from a loaded
// checkpoint. On a non-finite loss or gradient the trainer dumps the current
// state with a .nan suffix and throws TrainAborted.
TrainResult train(HranModel<float>& model, const Dataset& data, const RunConfig& cfg,
                  const std::string& out_dir, std::ostream& log,
                  const Dataset* val_data = nullptr, const OptimSnapshot* resume = nullptr);

// Mean validation PSNR (Y channel, shave = scale) of the model over a
// dataset, super-resolving each LR image in full.
double validation_psnr(const HranModel<float>& model, const Dataset& data);

// L1 training objective on tensors; exposed for tests and tooling.
float l1_loss_value(const Tensor4<float>& sr, const Tensor4<float>& hr);

}  // namespace hran
