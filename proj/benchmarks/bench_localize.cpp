#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "aoaloc/localize.hpp"

namespace {

std::vector<aoaloc::BearingLine> lines(int n) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(0.0, 6.0);
  std::normal_distribution<double> jitter(0.0, 0.02);
  const aoaloc::Point2 truth(2.5, 2.0);
  std::vector<aoaloc::BearingLine> out;
  for (int k = 0; k < n; ++k) {
    aoaloc::Point2 a(coord(rng), coord(rng));
    if ((a - truth).norm() < 0.5) a.x() += 1.0;
    double az = aoaloc::azimuth_between(a, truth) + jitter(rng);
    if (k == 0) az += std::numbers::pi / 2.0;
    out.push_back(aoaloc::BearingLine::from_azimuth(a, az));
  }
  return out;
}

void BM_SolveMle(benchmark::State& state) {
  const auto l = lines(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aoaloc::solve_mle(l));
}
BENCHMARK(BM_SolveMle)->Arg(3)->Arg(16);

void BM_SolveRansac(benchmark::State& state) {
  const auto l = lines(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aoaloc::solve_ransac(l));
}
BENCHMARK(BM_SolveRansac)->Arg(3)->Arg(16);

void BM_SolveIrls(benchmark::State& state) {
  const auto l = lines(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aoaloc::solve_irls(l));
}
BENCHMARK(BM_SolveIrls)->Arg(3)->Arg(16);

}  // namespace
