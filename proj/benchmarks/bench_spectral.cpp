#include <benchmark/benchmark.h>

#include "wxdiag/spectral.hpp"
#include "wxdiag/synth.hpp"

namespace {

using namespace wxdiag;

void BM_IsotropicSpectrum(benchmark::State& state) {
  const auto nlat = static_cast<std::size_t>(state.range(0));
  const auto g = std::make_shared<const LatLonGrid>(LatLonGrid::regular(nlat, 2 * nlat));
  const auto f = white_noise(g, 1.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(isotropic_spectrum(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g->size()));
}
BENCHMARK(BM_IsotropicSpectrum)->Arg(32)->Arg(96)->Arg(180)->Arg(360);

void BM_Sfi(benchmark::State& state) {
  const Spectrum truth(power_law_recipe(-3.0, 360).energy);
  const Spectrum fc(power_law_recipe(-3.2, 360).energy);
  for (auto _ : state) benchmark::DoNotOptimize(sfi(fc, truth));
}
BENCHMARK(BM_Sfi);

}  // namespace
