#include <benchmark/benchmark.h>

#include "hran/metrics.hpp"
#include "hran/model.hpp"
#include "hran/resize.hpp"

using namespace hran;

namespace {

Tensor4<float> random_input(Shape4 s, uint64_t seed) {
  Rng rng(seed);
  Tensor4<float> t(s);
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = static_cast<float>(rng.uniform_real01());
  return t;
}

ImageRGB8 random_image(int w, int h, uint64_t seed) {
  Rng rng(seed);
  ImageRGB8 img(w, h);
  for (auto& px : img.pixels) px = static_cast<uint8_t>(rng.uniform_u32(256));
  return img;
}

}  // namespace

static void BM_InferDesk(benchmark::State& state) {
  ModelConfig cfg;
  cfg.num_rafgs = 1;
  cfg.blocks_per_rafg = 2;
  cfg.channels = 16;
  cfg.scale = 2;
  const HranModel<float> model(cfg, 1);
  const auto x = random_input({1, 3, 48, 48}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.infer(x, true));
}
BENCHMARK(BM_InferDesk)->Unit(benchmark::kMillisecond);

static void BM_InferDefault(benchmark::State& state) {
  const HranModel<float> model(ModelConfig{}, 1);
  const auto x = random_input({1, 3, 32, 32}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.infer(x, true));
}
BENCHMARK(BM_InferDefault)->Unit(benchmark::kMillisecond);

static void BM_TrainStepTape(benchmark::State& state) {
  ModelConfig cfg;
  cfg.num_rafgs = 1;
  cfg.blocks_per_rafg = 2;
  cfg.channels = 16;
  cfg.scale = 2;
  HranModel<float> model(cfg, 1);
  const auto x = random_input({4, 3, 24, 24}, 2);
  const auto target = random_input({4, 3, 48, 48}, 3);
  for (auto _ : state) {
    Tape<float> tape;
    TapeOps<float> ops{&tape, &model.params(), {}};
    const int out = model.forward(ops, ops.input(x));
    const int loss = tape.l1_loss(out, target);
    tape.backward(loss);
    benchmark::DoNotOptimize(tape.grad(out));
  }
}
BENCHMARK(BM_TrainStepTape)->Unit(benchmark::kMillisecond);

static void BM_SsimY(benchmark::State& state) {
  const auto a = random_image(256, 256, 1);
  const auto b = random_image(256, 256, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ssim_y(a, b, {2}));
}
BENCHMARK(BM_SsimY)->Unit(benchmark::kMillisecond);

static void BM_BicubicDownscale(benchmark::State& state) {
  Rng rng(3);
  ImageF img(512, 512, 3);
  for (auto& v : img.data) v = static_cast<float>(rng.uniform_real01());
  for (auto _ : state) benchmark::DoNotOptimize(bicubic_resize(img, 256, 256, true));
}
BENCHMARK(BM_BicubicDownscale)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
