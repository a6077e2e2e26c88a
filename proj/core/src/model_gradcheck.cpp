#include "hran/model_gradcheck.hpp"

namespace hran {

GradCheckReport gradcheck_model(const ModelConfig& cfg, uint64_t seed, Shape4 input_shape,
                                double epsilon, double tolerance) {
  HranModel<double> model(cfg, seed);
  Rng data_rng(seed ^ UINT64_C(0xa5a5a5a5a5a5a5a5));
  // attention weights start at the neutral zero gate; move them off it so
  // the check covers non-trivial gating
  for (const auto& name : model.params().names()) {
    if (name.ends_with(".v") || name.ends_with(".g") || name.ends_with(".bias")) continue;
    Tensor4<double>& w = model.params().at(name);
    for (int64_t i = 0; i < w.numel(); ++i) w[i] = data_rng.uniform_real(-0.5, 0.5);
  }
  Tensor4<double> input(input_shape);
  for (int64_t i = 0; i < input.numel(); ++i) input[i] = data_rng.uniform_real01();
  // smooth objective: a fixed random contraction of the SR output. The L1
  // subgradient is finite-difference-verified separately; its kinks would
  // only add noise to this wiring check.
  Tensor4<double> contraction(
      {input_shape.n, 3, input_shape.h * cfg.scale, input_shape.w * cfg.scale});
  for (int64_t i = 0; i < contraction.numel(); ++i) {
    contraction[i] = data_rng.uniform_real(-1.0, 1.0);
  }

  auto f = [&]() {
    const Tensor4<double> out = model.infer(input, /*clamp01=*/false);
    double acc = 0.0;
    for (int64_t i = 0; i < out.numel(); ++i) acc += out[i] * contraction[i];
    return acc;
  };
  std::vector<NamedParam> params;
  for (const auto& name : model.params().names()) {
    params.push_back({name, &model.params().at(name)});
  }
  auto analytic = [&]() {
    Tape<double> tape;
    TapeOps<double> ops{&tape, &model.params(), {}};
    const int out_id = model.forward(ops, ops.input(input));
    const int loss_id = tape.sum(tape.mul(out_id, tape.leaf(contraction)));
    tape.backward(loss_id);
    std::vector<Tensor4<double>> grads;
    grads.reserve(params.size());
    for (const auto& p : params) grads.push_back(tape.grad(ops.leaf_ids.at(p.name)));
    return grads;
  };
  return finite_diff_check(f, params, analytic, epsilon, tolerance);
}

}  // namespace hran
