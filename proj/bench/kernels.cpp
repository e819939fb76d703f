// Serial reference vs OpenMP for the two batch kernels.

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "alphaloop/analysis/multitaper.hpp"
#include "alphaloop/dsp/echt.hpp"
#include "alphaloop/sim/synth.hpp"

namespace {

using namespace alphaloop;

const std::vector<double>& signal() {
  static const std::vector<double> x = [] {
    sim::SynthConfig sc;
    sc.duration_s = 600.0;
    sc.noise.alpha_snr_db = 0.0;
    return sim::synth_recording(sc).recording.channels[1];
  }();
  return x;
}

std::vector<std::size_t> endpoints(std::size_t window, std::size_t n) {
  std::vector<std::size_t> e(n - window + 1);
  std::iota(e.begin(), e.end(), window - 1);
  return e;
}

template <auto Kernel>
void bm_echt(benchmark::State& state) {
  const dsp::EchtEstimator est(dsp::EchtConfig{});
  const auto& x = signal();
  const auto ends = endpoints(est.window_size(), x.size());
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(est, x, ends));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ends.size()));
}

template <auto Kernel>
void bm_multitaper(benchmark::State& state) {
  const analysis::SpectrogramConfig cfg;
  const auto& x = signal();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, 250.0, cfg));
}

}  // namespace

BENCHMARK(bm_echt<dsp::echt_endpoints_serial>)->Name("echt_endpoints/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(bm_echt<dsp::echt_endpoints>)->Name("echt_endpoints/openmp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(bm_multitaper<analysis::multitaper_spectrogram_serial>)
    ->Name("multitaper/serial")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_multitaper<analysis::multitaper_spectrogram>)
    ->Name("multitaper/openmp")
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
