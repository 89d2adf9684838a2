#include <benchmark/benchmark.h>

#include "normprop/kernels.hpp"

using namespace normprop;

static void BM_ReluRow(benchmark::State& state) {
  const Grid grid(128.0, static_cast<std::size_t>(state.range(0)));
  const LayerSpec layer{200, 0.1, 0.0, Activation::relu()};
  for (auto _ : state) benchmark::DoNotOptimize(relu_kernel_row(layer, 87.8, grid));
}
BENCHMARK(BM_ReluRow)->Arg(1024)->Arg(4096);

static void BM_GenericRow(benchmark::State& state) {
  const Grid grid(128.0, static_cast<std::size_t>(state.range(0)));
  const LayerSpec layer{32, 0.5, 0.0, Activation::tanh()};
  for (auto _ : state) benchmark::DoNotOptimize(generic_kernel_row(layer, 4.0, grid));
}
BENCHMARK(BM_GenericRow)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_ReluKernelMatrix(benchmark::State& state) {
  const Grid grid(128.0, static_cast<std::size_t>(state.range(0)));
  const LayerSpec layer{200, 0.1, 0.0, Activation::relu()};
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(layer, grid));
}
BENCHMARK(BM_ReluKernelMatrix)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
