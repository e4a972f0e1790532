#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "aoaloc/error.hpp"
#include "aoaloc/fft.hpp"
#include "aoaloc/sim.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace aoaloc {
namespace {

// Lag (seconds) by which channel j trails channel i, from the exact
// periodic cross-spectrum: maximizes sum_k Re(conj(X_i) X_j e^{i w_k tau}).
double measured_delay(const std::vector<double>& xi, const std::vector<double>& xj, double fs,
                      double reach_samples) {
  const std::size_t n = xi.size();
  const auto a = rfft(xi, n);
  const auto b = rfft(xj, n);
  std::vector<std::complex<double>> c(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) c[k] = std::conj(a[k]) * b[k];
  auto f = [&](double tau) {
    double s = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      s += (c[k] * std::polar(1.0, w * tau)).real();
    }
    return s;
  };
  double best = oracle::dense_argmax(f, -reach_samples, reach_samples, 20);
  double lo = best - 0.05;
  double hi = best + 0.05;
  for (int it = 0; it < 80; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    (f(m1) < f(m2) ? lo : hi) = f(m1) < f(m2) ? m1 : m2;
  }
  return 0.5 * (lo + hi) / fs;
}

TEST(Synthesize, NoiselessDelaysMatchGeometry) {
  Scene scene = fixture::single_array(40.0, 3.0);
  scene.duration_s = 0.1;
  const Simulation sim = synthesize(scene);
  const MicArray& a = scene.arrays.front();
  const auto& rec = sim.recordings.front();
  const double fs = scene.model.sample_rate;
  const double az = azimuth_between(a.center(), scene.source);
  for (const MicPair& p : all_pairs()) {
    const double got = measured_delay(rec.channels[static_cast<std::size_t>(p.first)],
                                      rec.channels[static_cast<std::size_t>(p.second)], fs, 14.0);
    const double expect = oracle::plane_wave_tdoa(a.element(p.first), a.element(p.second), az,
                                                  scene.model.speed_of_sound);
    EXPECT_NEAR(got * fs, expect * fs, 1e-4) << p.first << "," << p.second;
  }
}

TEST(Synthesize, ZeroGainEchoesChangeNothing) {
  Scene plain = fixture::single_array(120.0, 2.0, 15.0, 9);
  Scene echoed = plain;
  echoed.echoes = {{0.003, 0.0, 60.0}, {0.011, 0.0, -45.0}};
  EXPECT_EQ(synthesize(plain).recordings.front().channels,
            synthesize(echoed).recordings.front().channels);
}

TEST(Synthesize, SameSeedIsBitIdentical) {
  Scene scene;
  scene.arrays = fixture::room_arrays();
  scene.source = {2.0, 2.5};
  scene.snr_db = 10.0;
  scene.echoes = {{0.004, 0.4, 50.0}};
  scene.seed = 31;
  const Simulation a = synthesize(scene);
  const Simulation b = synthesize(scene);
  ASSERT_EQ(a.recordings.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(a.recordings[k].channels, b.recordings[k].channels);
  scene.seed = 32;
  EXPECT_NE(synthesize(scene).recordings[0].channels, a.recordings[0].channels);
}

TEST(Synthesize, ArraysGetIndependentNoiseAndOffsets) {
  Scene scene;
  scene.arrays = fixture::room_arrays();
  scene.source = {3.0, 2.5};
  scene.snr_db = 20.0;
  scene.seed = 4;
  const Simulation sim = synthesize(scene);
  std::set<double> offsets;
  for (const auto& t : sim.truth.arrays) {
    EXPECT_GE(t.start_offset_s, 0.0);
    EXPECT_LE(t.start_offset_s, scene.max_start_offset_s);
    offsets.insert(t.start_offset_s);
  }
  EXPECT_EQ(offsets.size(), 3u);
  for (const auto& rec : sim.recordings) {
    EXPECT_EQ(rec.num_channels(), 6u);
    EXPECT_EQ(rec.length(), static_cast<std::size_t>(std::llround(scene.duration_s * 44100.0)));
  }
}

TEST(Synthesize, ToneAtNyquistIsRejected) {
  Scene scene = fixture::single_array(10.0);
  scene.signal = Tone{scene.model.sample_rate / 2.0};
  EXPECT_THROW(synthesize(scene), InvalidArgument);
  scene.signal = Tone{25000.0};
  EXPECT_THROW(synthesize(scene), InvalidArgument);
}

TEST(Synthesize, RejectsInvalidScenes) {
  const Scene good = fixture::single_array(10.0);
  Scene s = good;
  s.arrays.clear();
  EXPECT_THROW(synthesize(s), InvalidArgument);
  s = good;
  s.duration_s = 0.0;
  EXPECT_THROW(synthesize(s), InvalidArgument);
  s = good;
  s.echoes = {{0.001, 1.0, 0.0}};
  EXPECT_THROW(synthesize(s), InvalidArgument);
  s = good;
  s.echoes = {{-0.001, 0.5, 0.0}};
  EXPECT_THROW(synthesize(s), InvalidArgument);
  s = good;
  s.source = s.arrays.front().center();
  EXPECT_THROW(synthesize(s), InvalidArgument);
  s = good;
  s.signal = FileSource{{}, 44100.0, "empty.wav"};
  EXPECT_THROW(synthesize(s), InvalidArgument);
  s = good;
  s.signal = FileSource{{1.0, -1.0}, 16000.0, "x.wav"};
  EXPECT_THROW(synthesize(s), InvalidArgument);
}

TEST(GroundTruth, RecomputedAzimuthsAgree) {
  Scene scene;
  scene.arrays = fixture::room_arrays();
  scene.source = {1.7, 3.2};
  const GroundTruth t = ground_truth(scene, {0.0, 0.01, 0.02});
  ASSERT_EQ(t.arrays.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const Point2 c = scene.arrays[k].center();
    double az = std::atan2(scene.source.y() - c.y(), scene.source.x() - c.x()) * 180.0 / std::numbers::pi;
    if (az < 0.0) az += 360.0;
    EXPECT_NEAR(t.arrays[k].azimuth_deg, az, 1e-12);
    EXPECT_NEAR(t.arrays[k].range_m, std::hypot(scene.source.x() - c.x(), scene.source.y() - c.y()), 1e-12);
    EXPECT_EQ(t.arrays[k].start_offset_s, 0.01 * static_cast<double>(k));
    ASSERT_EQ(t.arrays[k].pairs.size(), 15u);
  }
}

TEST(RenderSource, UnitRmsAndSeeded) {
  for (const SignalKind& kind : {SignalKind{SpeechLikeNoise{}}, SignalKind{Chirp{}},
                                 SignalKind{Tone{440.0}}}) {
    const auto x = render_source(kind, 22050, 44100.0, 3);
    double ss = 0.0;
    for (double v : x) ss += v * v;
    EXPECT_NEAR(std::sqrt(ss / static_cast<double>(x.size())), 1.0, 1e-9);
    EXPECT_EQ(x, render_source(kind, 22050, 44100.0, 3));
  }
}

TEST(FractionalDelay, IntegerDelayIsCircularShift) {
  const auto x = oracle::white_noise(64, 8);
  const auto y = fractional_delay(x, 5.0);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(y[(i + 5) % 64], x[i], 1e-12);
  const auto z = fractional_delay(x, 0.0);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(z[i], x[i], 1e-12);
}

TEST(FractionalDelay, DelaysCompose) {
  // Odd length: there is no Nyquist bin, whose phase a real signal cannot hold.
  const auto x = oracle::white_noise(127, 9);
  const auto a = fractional_delay(fractional_delay(x, 0.3), 0.45);
  const auto b = fractional_delay(x, 0.75);
  for (std::size_t i = 0; i < 127; ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(AddNoise, InfiniteSnrIsIdentity) {
  const auto x = oracle::white_noise(100, 1);
  EXPECT_EQ(add_noise(x, kNoNoise, 5), x);
}

TEST(SampleScenarios, FiftyDistinctAndReproducible) {
  Scene base;
  base.arrays = fixture::room_arrays();
  const auto a = sample_scenarios(base, 50, fixture::room_bounds(), 11);
  const auto b = sample_scenarios(base, 50, fixture::room_bounds(), 11);
  ASSERT_EQ(a.size(), 50u);
  std::set<std::pair<double, double>> seen;
  std::set<std::uint64_t> seeds;
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].source, b[k].source);
    EXPECT_EQ(a[k].seed, b[k].seed);
    seen.insert({a[k].source.x(), a[k].source.y()});
    seeds.insert(a[k].seed);
  }
  EXPECT_EQ(seen.size(), 50u);
  EXPECT_EQ(seeds.size(), 50u);
}

TEST(SampleScenarios, PositionsAreFeasible) {
  Scene base;
  base.arrays = fixture::room_arrays();
  const Rect r = fixture::room_bounds();
  for (const Scene& s : sample_scenarios(base, 200, r, 12)) {
    EXPECT_GE(s.source.x(), r.min.x());
    EXPECT_LE(s.source.x(), r.max.x());
    EXPECT_GE(s.source.y(), r.min.y());
    EXPECT_LE(s.source.y(), r.max.y());
    double nearest = 1e9;
    for (const auto& a : s.arrays) nearest = std::min(nearest, (a.center() - s.source).norm());
    EXPECT_GE(nearest, kMinSourceRange);
    EXPECT_LE(nearest, kMaxSourceRange);
  }
}

TEST(SampleScenarios, SinglePointBounds) {
  Scene base;
  base.arrays = fixture::room_arrays();
  const Rect point{{2.0, 1.5}, {2.0, 1.5}};
  const auto s = sample_scenarios(base, 1, point, 3);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.front().source, Point2(2.0, 1.5));
}

TEST(SampleScenarios, EchoesAreRandomizedWithinLimits) {
  Scene base;
  base.arrays = fixture::room_arrays();
  EchoSampling e;
  e.count = 2;
  for (const Scene& s : sample_scenarios(base, 20, fixture::room_bounds(), 5, e)) {
    ASSERT_EQ(s.echoes.size(), 2u);
    for (const Echo& echo : s.echoes) {
      EXPECT_EQ(echo.gain, e.gain);
      EXPECT_GE(echo.delay_s, e.min_delay_s);
      EXPECT_LE(echo.delay_s, e.max_delay_s);
      EXPECT_GE(std::abs(echo.azimuth_offset_deg), e.min_offset_deg);
      EXPECT_LE(std::abs(echo.azimuth_offset_deg), e.max_offset_deg);
    }
  }
}

TEST(SampleScenarios, InfeasibleRegionThrows) {
  Scene base;
  base.arrays = fixture::room_arrays();
  EXPECT_THROW(sample_scenarios(base, 5, {{100.0, 100.0}, {101.0, 101.0}}, 1), InvalidArgument);
  // Inside the keep-out disc around array A.
  EXPECT_THROW(sample_scenarios(base, 1, {{0.1, 0.1}, {0.1, 0.1}}, 1), InvalidArgument);
  EXPECT_THROW(sample_scenarios(base, 0, fixture::room_bounds(), 1), InvalidArgument);
  EXPECT_THROW(sample_scenarios(base, 3, {{1.0, 1.0}, {0.0, 0.0}}, 1), InvalidArgument);
}

}  // namespace
}  // namespace aoaloc
