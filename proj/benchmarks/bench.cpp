#include <benchmark/benchmark.h>

#include "covfield/cluster.hpp"
#include "covfield/field.hpp"
#include "covfield/measure.hpp"
#include "covfield/rng.hpp"
#include "covfield/transport.hpp"

using namespace covfield;

namespace {

WeightedMeasure uniform_cloud(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd atoms(2, n);
  for (int j = 0; j < n; ++j) atoms.col(j) << rng.uniform(-1, 1), rng.uniform(-1, 1);
  return make_empirical(atoms);
}

void BM_CtfGrid(benchmark::State& state, Acceleration acc) {
  const auto m = sample_circle_uniform(1.0, static_cast<int>(state.range(0)), 7);
  const auto grid = square_grid(-1.5, 1.5, 24);
  for (auto _ : state) benchmark::DoNotOptimize(ctf_grid(m, RadialKernel::truncation(), grid, 0.2, acc));
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(grid.size()));
}

void BM_CtfGridExact(benchmark::State& state) { BM_CtfGrid(state, Acceleration::exact); }
void BM_CtfGridIndexed(benchmark::State& state) { BM_CtfGrid(state, Acceleration::indexed); }

void BM_W1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = uniform_cloud(n, 1), b = uniform_cloud(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(w1_exact(a, b).first);
}

void BM_Winf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = uniform_cloud(n, 3), b = uniform_cloud(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(winf_exact(a, b).first);
}

void BM_SingleLinkage(benchmark::State& state) {
  const auto m = uniform_cloud(static_cast<int>(state.range(0)), 5);
  TensorizedMetricParams p;
  p.sigma = 0.2;
  p.gamma = 1.0;
  const Eigen::MatrixXd D = tensorized_distances(m.atoms, p);
  for (auto _ : state) benchmark::DoNotOptimize(single_linkage(D));
}

}  // namespace

BENCHMARK(BM_CtfGridExact)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CtfGridIndexed)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_W1)->Arg(16)->Arg(64)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Winf)->Arg(16)->Arg(64)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingleLinkage)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
