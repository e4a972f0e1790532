#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aoaloc/fft.hpp"

namespace aoaloc {

/// A real, finite, uniformly sampled signal.
struct RealSignal {
  std::vector<double> samples;
  double sample_rate = 44100.0;

  /// Throws InvalidArgument unless length >= 2, all samples are finite and
  /// the sample rate is positive.
  void validate() const;
};

/// Synchronized channels from one array (one clock), channel k = element k.
struct MultichannelRecording {
  std::vector<std::vector<double>> channels;
  double sample_rate = 44100.0;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
  RealSignal channel(std::size_t k) const;
  void validate() const;
};

/// One-sided spectrum of a real sequence of `origin_length` samples.
struct Spectrum {
  std::vector<Complex> bins;  // origin_length / 2 + 1 entries
  double bin_spacing = 0.0;   // Hz
  std::size_t origin_length = 0;

  double sample_rate() const { return bin_spacing * static_cast<double>(origin_length); }
};

/// Correlation sampled on a centered lag axis.
///
/// values[i] is the correlation at lag (i - center_index) * lag_spacing. A
/// positive lag means the second channel is a delayed copy of the first,
/// i.e. the wavefront reached channel 1 first.
struct CorrelationFunction {
  std::vector<double> values;
  double lag_spacing = 0.0;  // seconds per index
  int upsample_factor = 1;
  std::size_t center_index = 0;

  double lag_at(std::size_t index) const {
    return (static_cast<double>(index) - static_cast<double>(center_index)) * lag_spacing;
  }
};

struct Band {
  double low_hz = 300.0;
  double high_hz = 3500.0;
};

inline constexpr Band kSpeechBand{300.0, 3500.0};
inline constexpr int kDefaultUpsampleFactor = 8;
inline constexpr double kDefaultPhatEpsilon = 1e-12;

/// FFT length used for pairwise correlation of two length-n signals: the
/// next power of two >= 2n - 1, so the circular correlation never wraps.
std::size_t correlation_fft_length(std::size_t n);

Spectrum forward(std::span<const double> samples, double sample_rate, std::size_t fft_length);
Spectrum forward(const RealSignal& signal, std::size_t fft_length);

/// Time-domain sequence of `origin_length` samples.
std::vector<double> inverse(const Spectrum& spectrum);

/// Zero-phase, linear-phase FIR band-pass (Kaiser-windowed sinc, cutoffs at
/// the band edges, >= 60 dB stopband once clear of the transition band).
/// The result is peak-normalized to max |x| = 1 unless it is all zero.
RealSignal bandpass(const RealSignal& signal, double low_hz, double high_hz);

/// Filter taps used by bandpass(); odd length, symmetric.
std::vector<double> design_bandpass(double low_hz, double high_hz, double sample_rate);

/// Bin-wise a * conj(b).
Spectrum cross_power(const Spectrum& a, const Spectrum& b);

/// Bin-wise g / |g|. Bins whose magnitude is at or below
/// `epsilon * max|g|` are set to zero rather than amplified.
Spectrum phat_weight(const Spectrum& g, double epsilon = kDefaultPhatEpsilon);

/// Zeroes every bin whose center frequency lies outside `band`.
Spectrum band_limit(Spectrum spectrum, Band band);

/// Inverse transform of `phi` after zero-extending it to
/// upsample_factor * origin_length points, reordered so lag 0 sits in the
/// middle. Values are scaled so the lag-0 sample equals the mean of phi's
/// two-sided bins for every upsample factor.
CorrelationFunction correlate(const Spectrum& phi, int upsample_factor = kDefaultUpsampleFactor);

/// The samples of correlate(phi, upsample_factor) with |lag| <= half_width
/// fine steps, evaluated by direct summation over phi's nonzero bins. Much
/// cheaper than the full transform when phi is band-limited.
CorrelationFunction correlate_window(const Spectrum& phi, int upsample_factor,
                                     std::size_t half_width);

}  // namespace aoaloc
