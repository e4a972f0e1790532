#include "aoaloc/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aoaloc/error.hpp"

namespace aoaloc {
namespace {

constexpr double kStopbandDb = 60.0;
constexpr double kMaxTransitionHz = 200.0;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double kaiser_beta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db >= 21.0) {
    return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) + 0.07886 * (attenuation_db - 21.0);
  }
  return 0.0;
}

}  // namespace

void RealSignal::validate() const {
  if (!std::isfinite(sample_rate) || sample_rate <= 0.0) {
    throw InvalidArgument("signal sample_rate must be finite and positive");
  }
  if (samples.size() < 2) throw InvalidArgument("signal needs at least 2 samples");
  for (double s : samples) {
    if (!std::isfinite(s)) throw InvalidArgument("signal contains non-finite samples");
  }
}

RealSignal MultichannelRecording::channel(std::size_t k) const {
  if (k >= channels.size()) throw InvalidArgument("channel index out of range");
  return RealSignal{channels[k], sample_rate};
}

void MultichannelRecording::validate() const {
  if (channels.empty()) throw InvalidArgument("recording has no channels");
  if (!std::isfinite(sample_rate) || sample_rate <= 0.0) {
    throw InvalidArgument("recording sample_rate must be finite and positive");
  }
  const std::size_t n = channels.front().size();
  for (const auto& ch : channels) {
    if (ch.size() != n) throw InvalidArgument("recording channels differ in length");
    for (double s : ch) {
      if (!std::isfinite(s)) throw InvalidArgument("recording contains non-finite samples");
    }
  }
}

std::size_t correlation_fft_length(std::size_t n) {
  return next_pow2(std::max<std::size_t>(2 * n, 2) - 1);
}

Spectrum forward(std::span<const double> samples, double sample_rate, std::size_t fft_length) {
  if (fft_length < samples.size()) throw InvalidArgument("fft_length shorter than signal");
  Spectrum s;
  s.bins = rfft(samples, fft_length);
  s.origin_length = fft_length;
  s.bin_spacing = sample_rate / static_cast<double>(fft_length);
  return s;
}

Spectrum forward(const RealSignal& signal, std::size_t fft_length) {
  return forward(signal.samples, signal.sample_rate, fft_length);
}

std::vector<double> inverse(const Spectrum& spectrum) {
  return irfft(spectrum.bins, spectrum.origin_length);
}

std::vector<double> design_bandpass(double low_hz, double high_hz, double sample_rate) {
  if (!(low_hz >= 0.0) || !(high_hz > low_hz) || !(high_hz <= sample_rate / 2.0)) {
    throw InvalidArgument("band edges must satisfy 0 <= low < high <= sample_rate/2 (got " +
                          std::to_string(low_hz) + ", " + std::to_string(high_hz) + ")");
  }
  double transition = kMaxTransitionHz;
  if (low_hz > 0.0) transition = std::min(transition, low_hz);
  transition = std::min(transition, 0.5 * (high_hz - low_hz));
  if (high_hz < sample_rate / 2.0) transition = std::min(transition, sample_rate / 2.0 - high_hz);
  transition = std::max(transition, sample_rate * 1e-4);

  const double omega = 2.0 * std::numbers::pi * transition / sample_rate;
  auto taps = static_cast<std::size_t>(std::ceil((kStopbandDb - 7.95) / (2.285 * omega))) + 1;
  if (taps % 2 == 0) ++taps;
  const double half = static_cast<double>(taps - 1) / 2.0;
  const double beta = kaiser_beta(kStopbandDb);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);

  const double fh = high_hz / sample_rate;
  const double fl = low_hz / sample_rate;
  std::vector<double> h(taps);
  for (std::size_t n = 0; n < taps; ++n) {
    const double m = static_cast<double>(n) - half;
    const double ideal = 2.0 * fh * sinc(2.0 * fh * m) - 2.0 * fl * sinc(2.0 * fl * m);
    const double r = m / half;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) /
                          i0_beta;
    h[n] = ideal * window;
  }
  return h;
}

RealSignal bandpass(const RealSignal& signal, double low_hz, double high_hz) {
  signal.validate();
  const std::vector<double> h = design_bandpass(low_hz, high_hz, signal.sample_rate);
  const std::size_t n = signal.samples.size();
  const std::size_t delay = (h.size() - 1) / 2;

  const std::size_t nfft = next_pow2(n + h.size() - 1);
  auto xs = rfft(signal.samples, nfft);
  const auto hs = rfft(h, nfft);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k];
  const auto full = irfft(xs, nfft);

  RealSignal out{std::vector<double>(n), signal.sample_rate};
  std::copy_n(full.begin() + static_cast<std::ptrdiff_t>(delay), n, out.samples.begin());

  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  // Pure round-off from an all-zero input stays zero.
  double in_peak = 0.0;
  for (double v : signal.samples) in_peak = std::max(in_peak, std::abs(v));
  if (in_peak == 0.0 || peak == 0.0) {
    std::fill(out.samples.begin(), out.samples.end(), 0.0);
    return out;
  }
  for (double& v : out.samples) v /= peak;
  return out;
}

Spectrum cross_power(const Spectrum& a, const Spectrum& b) {
  if (a.bins.size() != b.bins.size() || a.origin_length != b.origin_length ||
      a.bin_spacing != b.bin_spacing) {
    throw InvalidArgument("cross_power: spectra differ in shape or bin spacing");
  }
  Spectrum g{std::vector<Complex>(a.bins.size()), a.bin_spacing, a.origin_length};
  for (std::size_t k = 0; k < a.bins.size(); ++k) g.bins[k] = a.bins[k] * std::conj(b.bins[k]);
  return g;
}

Spectrum phat_weight(const Spectrum& g, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("phat_weight: epsilon must be positive");
  double peak = 0.0;
  for (const auto& v : g.bins) peak = std::max(peak, std::abs(v));
  const double floor = epsilon * peak;

  Spectrum out{std::vector<Complex>(g.bins.size()), g.bin_spacing, g.origin_length};
  for (std::size_t k = 0; k < g.bins.size(); ++k) {
    const double mag = std::abs(g.bins[k]);
    out.bins[k] = (mag > floor && mag > 0.0) ? g.bins[k] / mag : Complex{};
  }
  return out;
}

Spectrum band_limit(Spectrum spectrum, Band band) {
  for (std::size_t k = 0; k < spectrum.bins.size(); ++k) {
    const double f = static_cast<double>(k) * spectrum.bin_spacing;
    if (f < band.low_hz || f > band.high_hz) spectrum.bins[k] = Complex{};
  }
  return spectrum;
}

CorrelationFunction correlate(const Spectrum& phi, int upsample_factor) {
  if (upsample_factor < 1) throw InvalidArgument("upsample_factor must be >= 1");
  const std::size_t n = phi.origin_length;
  if (n < 2 || phi.bins.size() != n / 2 + 1) {
    throw InvalidArgument("correlate: malformed spectrum");
  }
  const auto factor = static_cast<std::size_t>(upsample_factor);
  const std::size_t m = factor * n;

  std::vector<Complex> extended(m / 2 + 1, Complex{});
  std::copy(phi.bins.begin(), phi.bins.end(), extended.begin());
  // The even-length Nyquist bin stands for both +fs/2 and -fs/2; once the
  // axis is longer it must be split between them.
  if (factor > 1 && n % 2 == 0) extended[n / 2] *= 0.5;

  const std::vector<double> circular = irfft(extended, m);

  // Drop the unpaired Nyquist lag of an even-length result so the axis is
  // symmetric about zero.
  const std::size_t half = (m % 2 == 0) ? m / 2 - 1 : (m - 1) / 2;
  CorrelationFunction corr;
  corr.values.resize(2 * half + 1);
  corr.center_index = half;
  corr.upsample_factor = upsample_factor;
  corr.lag_spacing = 1.0 / (phi.sample_rate() * static_cast<double>(factor));
  const double scale = static_cast<double>(factor);
  for (std::size_t i = 0; i < corr.values.size(); ++i) {
    // Lag l of conj(G)'s inverse equals lag -l of G's, for a real result.
    const auto lag = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(half);
    const auto src = static_cast<std::size_t>((-lag % static_cast<std::ptrdiff_t>(m) +
                                               static_cast<std::ptrdiff_t>(m)) %
                                              static_cast<std::ptrdiff_t>(m));
    corr.values[i] = scale * circular[src];
  }
  return corr;
}

CorrelationFunction correlate_window(const Spectrum& phi, int upsample_factor,
                                     std::size_t half_width) {
  if (upsample_factor < 1) throw InvalidArgument("upsample_factor must be >= 1");
  const std::size_t n = phi.origin_length;
  if (n < 2 || phi.bins.size() != n / 2 + 1) {
    throw InvalidArgument("correlate_window: malformed spectrum");
  }
  const auto factor = static_cast<std::size_t>(upsample_factor);
  const std::size_t m = factor * n;
  const std::size_t full_half = (m % 2 == 0) ? m / 2 - 1 : (m - 1) / 2;
  if (half_width > full_half) throw InvalidArgument("correlate_window: window exceeds support");

  CorrelationFunction corr;
  corr.values.assign(2 * half_width + 1, 0.0);
  corr.center_index = half_width;
  corr.upsample_factor = upsample_factor;
  corr.lag_spacing = 1.0 / (phi.sample_rate() * static_cast<double>(factor));

  // value(l) = (1/n) [Re phi_0 + 2 sum_k c_k Re(phi_k exp(-2 pi i k l / m))],
  // with c_k = 1/2 on an even-length Nyquist bin.
  const std::size_t last = n / 2;
  const auto first_lag = -static_cast<double>(half_width);
  for (std::size_t k = 0; k <= last; ++k) {
    const Complex bin = phi.bins[k];
    if (bin == Complex{}) continue;
    double weight = (k == 0) ? 1.0 : 2.0;
    if (k == 0) {
      for (double& v : corr.values) v += bin.real();
      continue;
    }
    if (n % 2 == 0 && k == last) weight = 1.0;
    const double step = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    Complex z = bin * std::polar(1.0, step * first_lag);
    const Complex rot = std::polar(1.0, step);
    for (double& v : corr.values) {
      v += weight * z.real();
      z *= rot;
    }
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : corr.values) v *= scale;
  return corr;
}

}  // namespace aoaloc
