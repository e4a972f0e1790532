#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "aoaloc/dsp.hpp"
#include "aoaloc/fft.hpp"
#include "aoaloc/tdoa.hpp"

namespace {

std::vector<double> noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

void BM_Rfft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(aoaloc::rfft(x, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Rfft)->RangeMultiplier(4)->Range(1024, 65536)->Complexity();

void BM_Bandpass(benchmark::State& state) {
  const aoaloc::RealSignal s{noise(46746, 2), 44100.0};
  for (auto _ : state) benchmark::DoNotOptimize(aoaloc::bandpass(s, 300.0, 3500.0));
}
BENCHMARK(BM_Bandpass)->Unit(benchmark::kMillisecond);

void BM_Correlate(benchmark::State& state) {
  const auto x = noise(4096, 3);
  const std::size_t nfft = aoaloc::correlation_fft_length(x.size());
  const auto spec = aoaloc::forward(x, 44100.0, nfft);
  const auto phi = aoaloc::phat_weight(aoaloc::cross_power(spec, spec));
  const int u = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(aoaloc::correlate(phi, u));
}
BENCHMARK(BM_Correlate)->Arg(1)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_EstimatePairDelay(benchmark::State& state) {
  const aoaloc::RealSignal a{noise(23373, 4), 44100.0};
  aoaloc::RealSignal b = a;
  std::rotate(b.samples.begin(), b.samples.begin() + 7, b.samples.end());
  aoaloc::GccOptions o;
  o.phat_band = aoaloc::kSpeechBand;
  for (auto _ : state) benchmark::DoNotOptimize(aoaloc::estimate_pair_delay(a, b, 13.0 / 44100.0, o));
}
BENCHMARK(BM_EstimatePairDelay)->Unit(benchmark::kMillisecond);

}  // namespace
