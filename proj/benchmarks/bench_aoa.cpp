#include <benchmark/benchmark.h>

#include "aoaloc/aoa.hpp"
#include "aoaloc/sim.hpp"

namespace {

struct Fixture {
  aoaloc::Scene scene;
  aoaloc::MultichannelRecording rec;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    out.scene.arrays = {aoaloc::build_hex_array("A", {0.0, 0.0}, 0.3)};
    out.scene.source = {1.2, 1.6};
    out.scene.snr_db = 20.0;
    out.scene.seed = 5;
    out.rec = aoaloc::synthesize(out.scene).recordings.front();
    return out;
  }();
  return f;
}

void BM_Synthesize(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(aoaloc::synthesize(f.scene));
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);

void BM_ExpandDelayFeatures(benchmark::State& state) {
  const auto& f = fixture();
  const auto clean = aoaloc::preprocess(f.rec, aoaloc::kSpeechBand);
  aoaloc::GccOptions o;
  o.phat_band = aoaloc::kSpeechBand;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        aoaloc::expand_delay_features(clean, f.scene.arrays[0], f.scene.model, 2, o));
  }
}
BENCHMARK(BM_ExpandDelayFeatures)->Unit(benchmark::kMillisecond);

void BM_GccPlus(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(aoaloc::estimate_aoa_gcc_plus(f.rec, f.scene.arrays[0], f.scene.model));
  }
}
BENCHMARK(BM_GccPlus)->Unit(benchmark::kMillisecond);

void BM_GccPhatBaseline(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(aoaloc::baseline_aoa_gcc_phat(f.rec, f.scene.arrays[0], f.scene.model));
  }
}
BENCHMARK(BM_GccPhatBaseline)->Unit(benchmark::kMillisecond);

void BM_Music(benchmark::State& state) {
  const auto& f = fixture();
  aoaloc::MusicOptions o;
  o.num_bins = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aoaloc::estimate_aoa_music(f.rec, f.scene.arrays[0], f.scene.model, o));
  }
}
BENCHMARK(BM_Music)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
