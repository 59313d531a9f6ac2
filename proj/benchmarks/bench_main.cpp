#include <benchmark/benchmark.h>

#include <vector>

#include "krigesense/classifier.hpp"
#include "krigesense/kernel.hpp"
#include "krigesense/kriging.hpp"
#include "krigesense/sensitivity.hpp"
#include "krigesense/specfun.hpp"

using namespace krigesense;

namespace {

void bm_bessel_k(benchmark::State& state) {
  const double nu = static_cast<double>(state.range(0)) / 10.0;
  double x = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::bessel_k(nu, x));
    x = x < 50.0 ? x * 1.1 : 0.05;
  }
}
BENCHMARK(bm_bessel_k)->Arg(3)->Arg(13)->Arg(24);

void bm_kernel_matrix(benchmark::State& state) {
  const auto grid = kernel::make_grid(2, static_cast<std::size_t>(state.range(0)));
  const kernel::MaternParams p(1.0, 0.7, 1.3, 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel::kernel_matrix(grid, grid, p));
  }
}
BENCHMARK(bm_kernel_matrix)->Arg(5)->Arg(10)->Arg(20);

void bm_kriging_weights(benchmark::State& state) {
  const auto design = sensitivity::StudyDesign::grid(1);
  const kernel::ReducedParams p(1.0, 1.3, 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kriging::kriging_weights(design.train, design.pred, p));
  }
}
BENCHMARK(bm_kriging_weights);

void bm_loo_plan(benchmark::State& state) {
  const auto data = classifier::synth_dataset(static_cast<std::size_t>(state.range(0)), 2, 1);
  const classifier::LooPlan plan(data, 50);
  const std::vector<double> nuggets = {0.001, 0.012, 0.023, 0.034, 0.045, 0.056, 0.067, 0.078, 0.089, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan.correct(2.5, 1.3, nuggets));
  }
}
BENCHMARK(bm_loo_plan)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
