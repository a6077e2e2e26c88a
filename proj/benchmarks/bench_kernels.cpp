#include <benchmark/benchmark.h>

#include "hran/kernels.hpp"
#include "hran/rng.hpp"

using namespace hran;

namespace {

template <typename T>
Tensor4<T> random_tensor(Shape4 s, uint64_t seed) {
  Rng rng(seed);
  Tensor4<T> t(s);
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = static_cast<T>(rng.uniform_real(-1.0, 1.0));
  return t;
}

}  // namespace

static void BM_Conv3x3Forward(benchmark::State& state) {
  const int64_t c = state.range(0), hw = state.range(1);
  const auto x = random_tensor<float>({1, c, hw, hw}, 1);
  const auto w = random_tensor<float>({c, c, 3, 3}, 2);
  const auto b = random_tensor<float>({1, c, 1, 1}, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::conv2d_forward(x, w, &b, 1));
  }
  state.SetItemsProcessed(state.iterations() * 2 * c * c * 9 * hw * hw);
}
BENCHMARK(BM_Conv3x3Forward)->Args({16, 24})->Args({48, 48})->Args({64, 64});

static void BM_Conv3x3Backward(benchmark::State& state) {
  const int64_t c = state.range(0), hw = state.range(1);
  const auto x = random_tensor<float>({1, c, hw, hw}, 1);
  const auto w = random_tensor<float>({c, c, 3, 3}, 2);
  const auto g = random_tensor<float>({1, c, hw, hw}, 3);
  Tensor4<float> dx, dw, db;
  for (auto _ : state) {
    kernels::conv2d_backward(x, w, true, g, 1, dx, dw, db);
    benchmark::DoNotOptimize(dx);
  }
  state.SetItemsProcessed(state.iterations() * 3 * 2 * c * c * 9 * hw * hw);
}
BENCHMARK(BM_Conv3x3Backward)->Args({16, 24})->Args({48, 48});

static void BM_PixelShuffle(benchmark::State& state) {
  const auto x = random_tensor<float>({1, 64, 64, 64}, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::pixel_shuffle_forward(x, 2));
  }
}
BENCHMARK(BM_PixelShuffle);

BENCHMARK_MAIN();
