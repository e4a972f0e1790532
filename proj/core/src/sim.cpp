#include "aoaloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "aoaloc/error.hpp"

namespace aoaloc {
namespace {

// Stream tags keep the source, clock offsets, noise and scenario draws
// independent of each other.
enum class Stream : std::uint32_t { Source = 1, Offset = 2, Noise = 3, Scenario = 4, Echo = 5 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), index};
  return std::mt19937_64(seq);
}

double rms(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(x.size()));
}

void normalize_rms(std::vector<double>& x) {
  const double r = rms(x);
  if (r > 0.0) {
    for (double& v : x) v /= r;
  }
}

// Phase factor for delaying bin k of an n-point real transform by d samples.
// The even-length Nyquist bin keeps only its real part so the output stays real.
Complex delay_factor(std::size_t k, std::size_t n, double d) {
  const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * d / static_cast<double>(n);
  if (n % 2 == 0 && k == n / 2) return {std::cos(phase), 0.0};
  return std::polar(1.0, phase);
}

double arrival_offset(const MicArray& array, int element, double azimuth, double c) {
  return -unit_vector(azimuth).dot(array.element(element) - array.center()) / c;
}

}  // namespace

void Scene::validate() const {
  model.validate();
  if (arrays.empty()) throw InvalidArgument("scene has no arrays");
  if (!source.allFinite()) throw InvalidArgument("scene source is not finite");
  for (const auto& a : arrays) {
    if ((a.center() - source).norm() <= a.side_length()) {
      throw InvalidArgument("source coincides with array '" + a.id() + "'");
    }
  }
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw InvalidArgument("duration_s must be positive");
  }
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw InvalidArgument("snr_db must be a number or +inf");
  }
  if (!(max_start_offset_s >= 0.0)) throw InvalidArgument("max_start_offset_s must be >= 0");
  for (const auto& e : echoes) {
    if (!(e.gain >= 0.0 && e.gain < 1.0)) throw InvalidArgument("echo gain must lie in [0, 1)");
    if (!(e.delay_s >= 0.0) || !std::isfinite(e.delay_s)) {
      throw InvalidArgument("echo delay_s must be finite and >= 0");
    }
    if (!std::isfinite(e.azimuth_offset_deg)) throw InvalidArgument("echo azimuth offset not finite");
  }
  if (const auto* tone = std::get_if<Tone>(&signal)) {
    if (!(tone->frequency_hz > 0.0) || tone->frequency_hz >= model.sample_rate / 2.0) {
      throw InvalidArgument("tone frequency must lie in (0, sample_rate/2)");
    }
  }
  if (const auto* chirp = std::get_if<Chirp>(&signal)) {
    const double nyq = model.sample_rate / 2.0;
    if (!(chirp->start_hz >= 0.0 && chirp->start_hz < nyq && chirp->end_hz >= 0.0 &&
          chirp->end_hz < nyq)) {
      throw InvalidArgument("chirp frequencies must lie in [0, sample_rate/2)");
    }
  }
  if (const auto* file = std::get_if<FileSource>(&signal)) {
    if (file->samples.empty()) throw InvalidArgument("file source is empty");
    if (file->sample_rate != model.sample_rate) {
      throw InvalidArgument("file source sample rate differs from the scene sample rate");
    }
  }
}

std::vector<double> render_source(const SignalKind& kind, std::size_t length, double fs,
                                  std::uint64_t seed) {
  auto rng = make_rng(seed, Stream::Source);
  std::vector<double> x(length);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  if (std::holds_alternative<SpeechLikeNoise>(kind)) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : x) v = gauss(rng);
    // Brick-wall band limit in the frequency domain.
    auto spec = rfft(x, length);
    const double spacing = fs / static_cast<double>(length);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double f = static_cast<double>(k) * spacing;
      if (f < kSpeechBand.low_hz || f > kSpeechBand.high_hz) spec[k] = Complex{};
    }
    x = irfft(spec, length);
    const double syllable_phase = phase(rng);
    for (std::size_t i = 0; i < length; ++i) {
      const double t = static_cast<double>(i) / fs;
      const double env = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * 4.0 * t + syllable_phase));
      x[i] *= 0.2 + 0.8 * env;
    }
  } else if (const auto* chirp = std::get_if<Chirp>(&kind)) {
    const double duration = static_cast<double>(length) / fs;
    const double rate = (chirp->end_hz - chirp->start_hz) / duration;
    const double phi0 = phase(rng);
    for (std::size_t i = 0; i < length; ++i) {
      const double t = static_cast<double>(i) / fs;
      x[i] = std::sin(2.0 * std::numbers::pi * (chirp->start_hz * t + 0.5 * rate * t * t) + phi0);
    }
  } else if (const auto* tone = std::get_if<Tone>(&kind)) {
    const double phi0 = phase(rng);
    for (std::size_t i = 0; i < length; ++i) {
      x[i] = std::sin(2.0 * std::numbers::pi * tone->frequency_hz * static_cast<double>(i) / fs + phi0);
    }
  } else if (const auto* file = std::get_if<FileSource>(&kind)) {
    for (std::size_t i = 0; i < length; ++i) x[i] = file->samples[i % file->samples.size()];
  }
  normalize_rms(x);
  return x;
}

std::vector<double> fractional_delay(std::span<const double> x, double delay_samples) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  auto spec = rfft(x, n);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= delay_factor(k, n, delay_samples);
  return irfft(spec, n);
}

std::vector<double> add_noise(std::span<const double> x, double snr_db, std::uint64_t seed) {
  std::vector<double> out(x.begin(), x.end());
  if (std::isinf(snr_db) && snr_db > 0.0) return out;
  const double power = rms(x) * rms(x);
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  auto rng = make_rng(seed, Stream::Noise);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& v : out) v += gauss(rng);
  return out;
}

GroundTruth ground_truth(const Scene& scene, const std::vector<double>& start_offsets) {
  GroundTruth truth;
  truth.source = scene.source;
  const auto pairs = all_pairs();
  for (std::size_t a = 0; a < scene.arrays.size(); ++a) {
    const MicArray& array = scene.arrays[a];
    ArrayTruth t;
    t.array_id = array.id();
    const double az = azimuth_between(array.center(), scene.source);
    t.azimuth_deg = rad2deg(az);
    t.range_m = (scene.source - array.center()).norm();
    t.start_offset_s = a < start_offsets.size() ? start_offsets[a] : 0.0;
    t.pairs = pairs;
    for (const auto& p : pairs) t.pair_delays_s.push_back(predicted_pair_delay(array, p, az, scene.model));
    truth.arrays.push_back(std::move(t));
  }
  return truth;
}

Simulation synthesize(const Scene& scene) {
  scene.validate();
  const double fs = scene.model.sample_rate;
  const double c = scene.model.speed_of_sound;
  const auto n = static_cast<std::size_t>(std::llround(scene.duration_s * fs));
  if (n < 2) throw InvalidArgument("scene duration is shorter than two samples");

  const std::vector<double> source = render_source(scene.signal, n, fs, scene.seed);
  const auto source_spec = rfft(source, n);

  auto offset_rng = make_rng(scene.seed, Stream::Offset);
  std::uniform_real_distribution<double> offset_dist(0.0, scene.max_start_offset_s);
  std::vector<double> offsets;
  for (std::size_t a = 0; a < scene.arrays.size(); ++a) offsets.push_back(offset_dist(offset_rng));

  Simulation sim;
  for (std::size_t a = 0; a < scene.arrays.size(); ++a) {
    const MicArray& array = scene.arrays[a];
    const double az = azimuth_between(array.center(), scene.source);

    struct Path {
      double delay_s;
      double gain;
      double azimuth;
    };
    std::vector<Path> paths{{0.0, 1.0, az}};
    for (const auto& e : scene.echoes) {
      if (e.gain == 0.0) continue;
      paths.push_back({e.delay_s, e.gain, az + deg2rad(e.azimuth_offset_deg)});
    }

    MultichannelRecording rec;
    rec.sample_rate = fs;
    for (int m = 0; m < array.num_elements(); ++m) {
      std::vector<Complex> spec(source_spec.size(), Complex{});
      for (const auto& path : paths) {
        const double d = (offsets[a] + path.delay_s + arrival_offset(array, m, path.azimuth, c)) * fs;
        for (std::size_t k = 0; k < spec.size(); ++k) {
          spec[k] += path.gain * source_spec[k] * delay_factor(k, n, d);
        }
      }
      rec.channels.push_back(irfft(spec, n));
    }

    if (!(std::isinf(scene.snr_db) && scene.snr_db > 0.0)) {
      double power = 0.0;
      for (const auto& ch : rec.channels) power += rms(ch) * rms(ch);
      power /= static_cast<double>(rec.channels.size());
      const double sigma = std::sqrt(power / std::pow(10.0, scene.snr_db / 10.0));
      auto rng = make_rng(scene.seed, Stream::Noise, static_cast<std::uint32_t>(a));
      std::normal_distribution<double> gauss(0.0, sigma);
      for (auto& ch : rec.channels) {
        for (double& v : ch) v += gauss(rng);
      }
    }
    sim.recordings.push_back(std::move(rec));
  }
  sim.truth = ground_truth(scene, offsets);
  return sim;
}

std::vector<Scene> sample_scenarios(const Scene& base, int n, const Rect& bounds,
                                    std::uint64_t seed, const EchoSampling& echoes) {
  if (n < 1) throw InvalidArgument("scenario count must be >= 1");
  if (base.arrays.empty()) throw InvalidArgument("scenario template has no arrays");
  if (!bounds.min.allFinite() || !bounds.max.allFinite() || bounds.max.x() < bounds.min.x() ||
      bounds.max.y() < bounds.min.y()) {
    throw InvalidArgument("scenario bounds are malformed");
  }
  if (echoes.count < 0) throw InvalidArgument("echo count must be >= 0");

  auto feasible = [&](const Point2& p) {
    bool near_one = false;
    for (const auto& a : base.arrays) {
      const double r = (p - a.center()).norm();
      if (r < kMinSourceRange) return false;
      if (r <= kMaxSourceRange) near_one = true;
    }
    return near_one;
  };

  auto rng = make_rng(seed, Stream::Scenario);
  std::uniform_real_distribution<double> ux(bounds.min.x(), std::nextafter(bounds.max.x(), INFINITY));
  std::uniform_real_distribution<double> uy(bounds.min.y(), std::nextafter(bounds.max.y(), INFINITY));
  auto echo_rng = make_rng(seed, Stream::Echo);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const bool degenerate = bounds.min == bounds.max;
  const int max_attempts = 10000 * n;
  std::vector<Scene> scenes;
  int attempts = 0;
  while (static_cast<int>(scenes.size()) < n) {
    if (attempts++ >= max_attempts) {
      throw InvalidArgument("no feasible source positions inside the scenario bounds");
    }
    const Point2 p = degenerate ? bounds.min : Point2(ux(rng), uy(rng));
    if (!feasible(p)) {
      if (degenerate) throw InvalidArgument("the single-point scenario bounds are infeasible");
      continue;
    }
    Scene s = base;
    s.source = p;
    s.seed = rng();
    s.echoes.clear();
    for (int e = 0; e < echoes.count; ++e) {
      Echo echo;
      echo.gain = echoes.gain;
      echo.delay_s = echoes.min_delay_s + (echoes.max_delay_s - echoes.min_delay_s) * unit(echo_rng);
      const double mag =
          echoes.min_offset_deg + (echoes.max_offset_deg - echoes.min_offset_deg) * unit(echo_rng);
      echo.azimuth_offset_deg = unit(echo_rng) < 0.5 ? -mag : mag;
      s.echoes.push_back(echo);
    }
    scenes.push_back(std::move(s));
  }
  return scenes;
}

}  // namespace aoaloc
