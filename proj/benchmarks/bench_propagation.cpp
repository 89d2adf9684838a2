#include <benchmark/benchmark.h>

#include "normprop/montecarlo.hpp"
#include "normprop/operator.hpp"
#include "normprop/spectral.hpp"

using namespace normprop;

static void BM_Apply(benchmark::State& state) {
  const Grid grid(128.0, static_cast<std::size_t>(state.range(0)));
  const auto kernel = kernel_matrix(LayerSpec{200, 0.1, 0.0, Activation::relu()}, grid);
  const auto p = discretize(PointMass(87.82), grid);
  for (auto _ : state) benchmark::DoNotOptimize(apply(kernel, p));
}
BENCHMARK(BM_Apply)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

// One sample through a 784-200-200 ReLU network.
static void BM_MonteCarloSample(benchmark::State& state) {
  McConfig config;
  config.net = NetworkSpec::uniform(784, LayerSpec{200, 0.1, 0.0, Activation::relu()}, 2);
  config.n_samples = 100;
  const auto source = InputSource::fixed_squared_norm(87.82, 784);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_ensemble(config, source));
    config.seed++;
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_MonteCarloSample)->Unit(benchmark::kMillisecond);

static void BM_ReluEigenvalue(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  double m = -1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(relu_eigenvalue(width, 0.1, m));
    m = m < -30.0 ? -1.5 : m - 0.01;
  }
}
BENCHMARK(BM_ReluEigenvalue)->Arg(10)->Arg(200);

static void BM_MCrit(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(m_crit(static_cast<int>(state.range(0)), 0.1));
}
BENCHMARK(BM_MCrit)->Arg(10)->Arg(200);

static void BM_DiscretizedSpectrum(benchmark::State& state) {
  const Grid grid(2.0, static_cast<std::size_t>(state.range(0)));
  const auto kernel = kernel_matrix(LayerSpec{20, 0.3, 0.0, Activation::relu()}, grid);
  for (auto _ : state) benchmark::DoNotOptimize(discretized_spectrum(kernel, 4));
}
BENCHMARK(BM_DiscretizedSpectrum)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
