#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aoaloc/dsp.hpp"
#include "aoaloc/geometry.hpp"

namespace aoaloc {

/// Gaussian noise band-limited to 300-3500 Hz with a 4 Hz syllabic envelope.
struct SpeechLikeNoise {};
/// Linear sweep from start_hz to end_hz over the scene duration.
struct Chirp {
  double start_hz = 300.0;
  double end_hz = 3500.0;
};
struct Tone {
  double frequency_hz = 1000.0;
};
/// Externally supplied mono waveform, looped or truncated to the duration.
struct FileSource {
  std::vector<double> samples;
  double sample_rate = 44100.0;
  std::string path;  // informational
};

using SignalKind = std::variant<SpeechLikeNoise, Chirp, Tone, FileSource>;

/// A discrete reflection: an attenuated, delayed copy of the source arriving
/// from the true azimuth rotated by azimuth_offset_deg.
struct Echo {
  double delay_s = 0.0;
  double gain = 0.0;  // [0, 1)
  double azimuth_offset_deg = 0.0;
};

inline constexpr double kMinSourceRange = 0.47;  // meters
inline constexpr double kMaxSourceRange = 5.2;   // meters
inline constexpr double kDefaultDuration = 1.06;  // seconds
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct Scene {
  std::vector<MicArray> arrays;
  Point2 source = Point2::Zero();
  SignalKind signal = SpeechLikeNoise{};
  double duration_s = kDefaultDuration;
  double snr_db = kNoNoise;  // +inf disables noise
  std::vector<Echo> echoes;
  std::uint64_t seed = 0;
  PropagationModel model;
  /// Each array's recording starts at an independent uniform offset in
  /// [0, max_start_offset_s]: arrays share no clock.
  double max_start_offset_s = 0.05;

  void validate() const;
};

struct ArrayTruth {
  std::string array_id;
  double azimuth_deg = 0.0;  // from the array center toward the source
  double range_m = 0.0;
  double start_offset_s = 0.0;
  std::vector<MicPair> pairs;
  std::vector<double> pair_delays_s;  // plane-wave delay per pair
};

struct GroundTruth {
  Point2 source = Point2::Zero();
  std::vector<ArrayTruth> arrays;
};

struct Simulation {
  std::vector<MultichannelRecording> recordings;  // one per scene array
  GroundTruth truth;
};

/// Renders the scene. Propagation is plane-wave from each array's center;
/// every delay is applied as an exact phase shift, so the recordings are
/// band-limited periodic interpolants of the source and the ground truth
/// holds to round-off. Deterministic for a given seed.
Simulation synthesize(const Scene& scene);

/// Source waveform of `length` samples for the given kind (unit RMS).
std::vector<double> render_source(const SignalKind& kind, std::size_t length, double sample_rate,
                                  std::uint64_t seed);

/// Circular band-limited delay by a (possibly fractional) number of samples.
std::vector<double> fractional_delay(std::span<const double> x, double delay_samples);

/// Adds white Gaussian noise so that signal power / noise power = snr_db.
std::vector<double> add_noise(std::span<const double> x, double snr_db, std::uint64_t seed);

GroundTruth ground_truth(const Scene& scene, const std::vector<double>& start_offsets);

struct Rect {
  Point2 min = Point2::Zero();
  Point2 max = Point2::Zero();
};

/// Echo randomization applied to every sampled scene.
struct EchoSampling {
  int count = 0;
  double gain = 0.5;
  double min_delay_s = 0.002;
  double max_delay_s = 0.015;
  double min_offset_deg = 30.0;
  double max_offset_deg = 150.0;  // offset sign is random
};

/// `n` copies of `base` with sources drawn uniformly from `bounds`, keeping
/// only positions at least kMinSourceRange from every array and at most
/// kMaxSourceRange from at least one. Each scene gets its own derived seed.
std::vector<Scene> sample_scenarios(const Scene& base, int n, const Rect& bounds,
                                    std::uint64_t seed, const EchoSampling& echoes = {});

}  // namespace aoaloc
