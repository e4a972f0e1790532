#include "aoaloc/tdoa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aoaloc/error.hpp"

namespace aoaloc {
namespace {

struct Parabola {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Least-squares parabola over samples at t = i - (n-1)/2. The abscissae are
// symmetric, so the odd moments vanish and b decouples from (a, c).
Parabola fit_parabola(std::span<const double> y) {
  const auto n = static_cast<double>(y.size());
  const double mid = (n - 1.0) / 2.0;
  double s2 = 0.0, s4 = 0.0, sy = 0.0, sty = 0.0, st2y = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i) - mid;
    const double t2 = t * t;
    s2 += t2;
    s4 += t2 * t2;
    sy += y[i];
    sty += t * y[i];
    st2y += t2 * y[i];
  }
  Parabola p;
  p.b = sty / s2;
  const double det = s4 * n - s2 * s2;
  p.a = (st2y * n - s2 * sy) / det;
  p.c = (s4 * sy - s2 * st2y) / det;
  return p;
}

struct WindowVertex {
  double offset;
  double value;
};

std::optional<WindowVertex> fit_window(std::span<const double> samples, std::size_t start,
                                       std::size_t count, std::size_t peak) {
  const Parabola p = fit_parabola(samples.subspan(start, count));
  if (!(p.a < 0.0)) return std::nullopt;
  const double t = -p.b / (2.0 * p.a);
  const double mid = (static_cast<double>(count) - 1.0) / 2.0;
  return WindowVertex{static_cast<double>(start) + mid + t - static_cast<double>(peak),
                      p.c - p.b * p.b / (4.0 * p.a)};
}

Spectrum whiten(const Spectrum& x1, const Spectrum& x2, const GccOptions& options) {
  Spectrum phi = phat_weight(cross_power(x1, x2), options.epsilon);
  if (options.phat_band) phi = band_limit(std::move(phi), *options.phat_band);
  return phi;
}

bool all_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

}  // namespace

VertexEstimate quadratic_vertex(std::span<const double> samples, std::size_t peak) {
  if (peak >= samples.size()) throw InvalidArgument("quadratic_vertex: peak out of range");
  const std::size_t left = peak;
  const std::size_t right = samples.size() - 1 - peak;
  const std::size_t half = std::min({left, right, std::size_t{3}});
  if (half == 0) throw InvalidArgument("quadratic_vertex: peak lies on the boundary");

  std::vector<WindowVertex> fits;
  if (half == 3) {
    if (auto v = fit_window(samples, peak - 2, 6, peak)) fits.push_back(*v);
    if (auto v = fit_window(samples, peak - 3, 6, peak)) fits.push_back(*v);
  } else if (auto v = fit_window(samples, peak - half, 2 * half + 1, peak)) {
    fits.push_back(*v);
  }

  if (fits.empty()) return {0.0, samples[peak], false};
  VertexEstimate out;
  for (const auto& f : fits) {
    out.offset += f.offset;
    out.value += f.value;
  }
  out.offset /= static_cast<double>(fits.size());
  out.value /= static_cast<double>(fits.size());
  out.offset = std::clamp(out.offset, -1.0, 1.0);
  return out;
}

PeakRefinement refine_peak(const CorrelationFunction& corr, std::size_t peak_index) {
  const VertexEstimate v = quadratic_vertex(corr.values, peak_index);
  return {corr.lag_at(peak_index) + v.offset * corr.lag_spacing, v.offset, v.value, !v.concave};
}

double default_max_lag(const MicArray& array, MicPair pair, const PropagationModel& model) {
  return 1.2 * array.baseline(pair) / model.speed_of_sound;
}

PairDelay estimate_pair_delay(const Spectrum& x1, const Spectrum& x2, double max_lag,
                              const GccOptions& options) {
  if (!std::isfinite(max_lag) || max_lag <= 0.0) throw InvalidArgument("max_lag must be positive");
  const Spectrum phi = whiten(x1, x2, options);
  if (std::all_of(phi.bins.begin(), phi.bins.end(), [](const Complex& c) { return c == Complex{}; })) {
    throw NoSignalError("cross-power spectrum is empty");
  }
  const auto factor = static_cast<std::size_t>(options.upsample_factor < 1 ? 1 : options.upsample_factor);
  const double spacing = 1.0 / (phi.sample_rate() * static_cast<double>(factor));
  const auto reach = static_cast<std::size_t>(std::floor(max_lag / spacing + 1e-9));
  const std::size_t m = factor * phi.origin_length;
  const std::size_t support = (m % 2 == 0) ? m / 2 - 1 : (m - 1) / 2;
  if (reach + 1 > support) throw InvalidArgument("max_lag exceeds the correlation support");

  // Both routes produce the same samples; pick the cheaper one. The window
  // keeps room for the refinement fit on either side of the gate.
  const std::size_t half_width = std::min(support, reach + 4);
  const auto nonzero = static_cast<double>(std::count_if(
      phi.bins.begin(), phi.bins.end(), [](const Complex& c) { return c != Complex{}; }));
  const double direct_cost = 2.0 * nonzero * static_cast<double>(2 * half_width + 1);
  const double fft_cost = static_cast<double>(m) * std::log2(static_cast<double>(m));
  const CorrelationFunction corr = direct_cost < fft_cost
                                       ? correlate_window(phi, options.upsample_factor, half_width)
                                       : correlate(phi, options.upsample_factor);

  const std::size_t lo = corr.center_index - reach;
  const std::size_t hi = corr.center_index + reach;
  std::size_t best = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (corr.values[i] > corr.values[best]) best = i;
  }

  PairDelay out;
  if (options.refine) {
    const PeakRefinement r = refine_peak(corr, best);
    out.delay = r.delay;
    out.peak_score = r.value;
    out.low_confidence = r.low_confidence;
  } else {
    out.delay = corr.lag_at(best);
    out.peak_score = corr.values[best];
  }
  return out;
}

PairDelay estimate_pair_delay(const RealSignal& x1, const RealSignal& x2, double max_lag,
                              const GccOptions& options) {
  x1.validate();
  x2.validate();
  if (x1.samples.size() != x2.samples.size() || x1.sample_rate != x2.sample_rate) {
    throw InvalidArgument("estimate_pair_delay: signals differ in length or sample rate");
  }
  if (all_zero(x1.samples) || all_zero(x2.samples)) {
    throw NoSignalError("estimate_pair_delay: all-zero input");
  }
  const std::size_t nfft = correlation_fft_length(x1.samples.size());
  return estimate_pair_delay(forward(x1, nfft), forward(x2, nfft), max_lag, options);
}

DelayVector expand_delay_features(const MultichannelRecording& rec, const MicArray& array,
                                  const PropagationModel& model, int num_windows,
                                  const GccOptions& options) {
  rec.validate();
  model.validate();
  if (static_cast<int>(rec.num_channels()) != array.num_elements()) {
    throw InvalidArgument("recording has " + std::to_string(rec.num_channels()) +
                          " channels, array '" + array.id() + "' has " +
                          std::to_string(array.num_elements()) + " elements");
  }
  if (num_windows < 1) throw InvalidArgument("num_windows must be >= 1");
  const std::size_t window = rec.length() / static_cast<std::size_t>(num_windows);
  if (window < kMinWindowLength) {
    throw InvalidArgument("recording of " + std::to_string(rec.length()) +
                          " samples is too short for " + std::to_string(num_windows) +
                          " windows of >= " + std::to_string(kMinWindowLength) + " samples");
  }

  const auto pairs = all_pairs(array.num_elements());
  const std::size_t nfft = correlation_fft_length(window);
  DelayVector out;
  out.source_array = array.id();
  out.num_windows = num_windows;
  out.entries.reserve(pairs.size() * static_cast<std::size_t>(num_windows));

  for (int w = 0; w < num_windows; ++w) {
    const std::size_t start = static_cast<std::size_t>(w) * window;
    std::vector<Spectrum> spectra;
    spectra.reserve(rec.num_channels());
    for (const auto& ch : rec.channels) {
      std::span<const double> slice(ch.data() + start, window);
      if (all_zero(slice)) {
        throw NoSignalError("window " + std::to_string(w) + " of array '" + array.id() +
                            "' has an all-zero channel");
      }
      spectra.push_back(forward(slice, rec.sample_rate, nfft));
    }
    for (const MicPair& pair : pairs) {
      PairDelay d = estimate_pair_delay(spectra[static_cast<std::size_t>(pair.first)],
                                        spectra[static_cast<std::size_t>(pair.second)],
                                        default_max_lag(array, pair, model), options);
      d.pair = pair;
      d.window_index = w;
      out.entries.push_back(d);
    }
  }
  return out;
}

}  // namespace aoaloc
