#include "ptmap/ptmap.hpp"

#include <benchmark/benchmark.h>

namespace {

const ptmap::FeatureBank& bank(std::size_t d) {
  static const ptmap::FeatureBank b64 = ptmap::synth_bank({5, 200, 64, 0.55, 1.0, ptmap::SkewMode::exponential, 3});
  static const ptmap::FeatureBank b640 = ptmap::synth_bank({5, 200, 640, 0.2, 1.0, ptmap::SkewMode::exponential, 3});
  return d == 64 ? b64 : b640;
}

void BM_Episode(benchmark::State& state, ptmap::Method method) {
  const auto& b = bank(static_cast<std::size_t>(state.range(0)));
  const auto shots = static_cast<std::size_t>(state.range(1));
  const ptmap::MapConfig cfg = ptmap::MapConfig::defaults_for_shots(shots);
  ptmap::EvalOptions opts;
  opts.episodes = 1;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ptmap::evaluate(b, ptmap::EpisodeSpec::balanced(5, shots, 15, seed++), method, cfg, opts));
  }
}
BENCHMARK_CAPTURE(BM_Episode, map, ptmap::Method::map)->Args({64, 1})->Args({640, 1})->Args({640, 5})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, kmeans, ptmap::Method::kmeans)->Args({640, 1})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, ncm, ptmap::Method::ncm)->Args({640, 1})->Unit(benchmark::kMillisecond);

void BM_PowerTransform(benchmark::State& state) {
  const ptmap::Matrix x = bank(640).features().cast<double>();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ptmap::power_transform_rows(x, {0.5, 1e-6}));
  }
}
BENCHMARK(BM_PowerTransform)->Unit(benchmark::kMillisecond);

}  // namespace
