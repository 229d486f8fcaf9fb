#include <benchmark/benchmark.h>

#include "wxdiag/consensus.hpp"
#include "wxdiag/skill.hpp"
#include "wxdiag/synth.hpp"

namespace {

using namespace wxdiag;

GridPtr make_grid(std::int64_t nlat) {
  const auto n = static_cast<std::size_t>(nlat);
  return std::make_shared<const LatLonGrid>(LatLonGrid::regular(n, 2 * n));
}

void BM_Rmse(benchmark::State& state) {
  const auto g = make_grid(state.range(0));
  const auto f = white_noise(g, 1.0, 1);
  const auto v = white_noise(g, 1.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rmse(f, v));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g->size()));
}
BENCHMARK(BM_Rmse)->Arg(96)->Arg(360)->Arg(721);

void BM_Ecr(benchmark::State& state) {
  const auto g = make_grid(180);
  const auto errors = shared_plus_noise_errors(g, static_cast<std::size_t>(state.range(0)), 1.0, 1.0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(ecr(errors));
}
BENCHMARK(BM_Ecr)->Arg(4)->Arg(10);

}  // namespace
