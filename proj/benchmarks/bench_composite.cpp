#include <algorithm>
#include <random>

#include <benchmark/benchmark.h>

#include "wxdiag/composite.hpp"

namespace {

using namespace wxdiag;

void BM_ParetoFront(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> points(static_cast<std::size_t>(state.range(0)), std::vector<double>(6));
  for (auto& p : points) {
    for (auto& x : p) x = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(pareto_front(points));
}
BENCHMARK(BM_ParetoFront)->Arg(10)->Arg(100)->Arg(1000);

void BM_KendallW(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::vector<std::vector<double>> ranks(5);
  for (auto& r : ranks) {
    for (int i = 1; i <= state.range(0); ++i) r.push_back(i);
    std::shuffle(r.begin(), r.end(), rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kendall_w(ranks));
}
BENCHMARK(BM_KendallW)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
