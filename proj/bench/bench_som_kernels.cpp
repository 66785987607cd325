// Serial reference vs OpenMP kernels on a 10x10 map.

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <vector>

#include "unemap/som.hpp"
#include "unemap/som_kernels.hpp"

using namespace unemap;

namespace {

struct Fixture {
  Matrix data;
  Matrix codebook;
  Matrix kernel;
  std::vector<std::size_t> bmu;

  explicit Fixture(std::size_t n) : data(n, 10), codebook(100, 10), bmu(n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (auto& v : data.values()) v = g(rng);
    for (auto& v : codebook.values()) v = g(rng);
    kernel = training_kernel(GridTopology{10, 10}, 2.0);
    kernels::bmu_serial(codebook, data, bmu);
  }
};

const Fixture& fixture(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  return cache.try_emplace(n, n).first->second;
}

template <auto Kernel>
void bmu_bench(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<std::size_t> out(f.data.rows());
  for (auto _ : state) {
    Kernel(f.codebook, f.data, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void local_winner_bench(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<std::size_t> winner(f.data.rows());
  std::vector<double> local(f.data.rows());
  for (auto _ : state) {
    Kernel(f.codebook, f.data, f.kernel, winner, local);
    benchmark::DoNotOptimize(local.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void batch_update_bench(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto m = Kernel(f.codebook, f.data, f.bmu, f.kernel);
    benchmark::DoNotOptimize(m.values().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(bmu_bench<kernels::bmu_serial>)->Name("bmu/serial")->Arg(2000)->Arg(20000);
BENCHMARK(bmu_bench<kernels::bmu_parallel>)->Name("bmu/openmp")->Arg(2000)->Arg(20000)->UseRealTime();
BENCHMARK(local_winner_bench<kernels::local_winner_serial>)->Name("local_winner/serial")->Arg(2000)->Arg(20000);
BENCHMARK(local_winner_bench<kernels::local_winner_parallel>)
    ->Name("local_winner/openmp")
    ->Arg(2000)
    ->Arg(20000)
    ->UseRealTime();
BENCHMARK(batch_update_bench<kernels::batch_update_serial>)->Name("batch_update/serial")->Arg(2000)->Arg(20000);
BENCHMARK(batch_update_bench<kernels::batch_update_parallel>)
    ->Name("batch_update/openmp")
    ->Arg(2000)
    ->Arg(20000)
    ->UseRealTime();

BENCHMARK_MAIN();
