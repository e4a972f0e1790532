#include "aoaloc/aoa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace aoaloc {
namespace {

void check_grid_step(double step) {
  if (!(step > 0.0) || step > 5.0) throw InvalidArgument("grid_step_deg must lie in (0, 5]");
}

double prominence(const std::vector<double>& scores) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) /
                      static_cast<double>(scores.size());
  const double denom = std::abs(peak) + std::abs(mean);
  if (denom == 0.0) return 0.0;
  return std::clamp((peak - mean) / denom, 0.0, 1.0);
}

struct Measurement {
  double observed;  // samples
  Eigen::Vector2d baseline;  // (p_i - p_j) in samples of travel
  double weight;
};

AoaSpectrum match_spectrum(const std::vector<Measurement>& ms, double step_deg) {
  AoaSpectrum spectrum;
  spectrum.angles_deg = azimuth_grid(step_deg);
  spectrum.scores.resize(spectrum.angles_deg.size());
  for (std::size_t k = 0; k < spectrum.angles_deg.size(); ++k) {
    const Eigen::Vector2d u = unit_vector(deg2rad(spectrum.angles_deg[k]));
    double sse = 0.0;
    for (const auto& m : ms) {
      const double r = m.observed - u.dot(m.baseline);
      sse += m.weight * r * r;
    }
    spectrum.scores[k] = -sse;
  }
  const auto [lo, hi] = std::minmax_element(spectrum.scores.begin(), spectrum.scores.end());
  const double scale = std::max({std::abs(*lo), std::abs(*hi), 1e-300});
  spectrum.ambiguous = (*hi - *lo) <= 1e-9 * scale;
  return spectrum;
}

}  // namespace

std::string_view to_string(AoaMethod method) {
  switch (method) {
    case AoaMethod::GccPlus: return "gcc+";
    case AoaMethod::GccPhat: return "gcc-phat";
    case AoaMethod::Music: return "music";
  }
  return "unknown";
}

AoaMethod parse_aoa_method(std::string_view name) {
  if (name == "gcc+" || name == "gccplus" || name == "gcc-plus") return AoaMethod::GccPlus;
  if (name == "gcc-phat" || name == "gccphat" || name == "gcc_phat") return AoaMethod::GccPhat;
  if (name == "music") return AoaMethod::Music;
  throw InvalidArgument("unknown AoA method '" + std::string(name) + "'");
}

std::vector<double> azimuth_grid(double step_deg) {
  check_grid_step(step_deg);
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(360.0 / step_deg)));
  const double step = 360.0 / static_cast<double>(n);
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = static_cast<double>(k) * step;
  return grid;
}

AoaEstimate summarize_spectrum(const AoaSpectrum& spectrum, const std::string& array_id,
                               bool refine) {
  const auto& s = spectrum.scores;
  const std::size_t n = s.size();
  const auto best = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  const double step = n > 1 ? spectrum.angles_deg[1] - spectrum.angles_deg[0] : 360.0;

  double angle = spectrum.angles_deg[best];
  if (refine && n >= 7) {
    std::vector<double> window(7);
    for (std::size_t k = 0; k < 7; ++k) window[k] = s[(best + n + k - 3) % n];
    angle += quadratic_vertex(window, 3).offset * step;
  }

  AoaEstimate est;
  est.azimuth = wrap_two_pi(deg2rad(angle));
  est.confidence = spectrum.ambiguous ? 0.0 : prominence(s);
  est.method = spectrum.method;
  est.array_id = array_id;
  return est;
}

AoaResult estimate_aoa_gcc(const DelayVector& delays, const MicArray& array,
                           const PropagationModel& model, const MatcherOptions& options) {
  model.validate();
  check_grid_step(options.grid_step_deg);
  if (delays.entries.empty()) throw InvalidArgument("delay vector is empty");

  const double samples_per_meter = model.sample_rate / model.speed_of_sound;
  auto to_measurement = [&](const PairDelay& d, double weight) {
    const Eigen::Vector2d diff = array.element(d.pair.first) - array.element(d.pair.second);
    return Measurement{d.delay * model.sample_rate, diff * samples_per_meter, weight};
  };

  std::vector<Measurement> ms;
  for (const auto& d : delays.entries) {
    if (d.low_confidence) continue;
    const double w = options.confidence_weights ? std::max(d.peak_score, 0.0) : 1.0;
    ms.push_back(to_measurement(d, w));
  }

  const AoaMethod method = AoaMethod::GccPlus;
  if (ms.empty()) {
    std::vector<Measurement> all;
    for (const auto& d : delays.entries) all.push_back(to_measurement(d, 1.0));
    AoaSpectrum spectrum = match_spectrum(all, options.grid_step_deg);
    spectrum.method = method;
    throw AmbiguousEstimateError(
        "every delay measurement for array '" + array.id() + "' was flagged low-confidence",
        std::move(spectrum));
  }

  double total = 0.0;
  for (const auto& m : ms) total += m.weight;
  for (auto& m : ms) m.weight = total > 0.0 ? m.weight / total : 1.0 / static_cast<double>(ms.size());

  AoaResult result;
  result.spectrum = match_spectrum(ms, options.grid_step_deg);
  result.spectrum.method = method;
  result.estimate = summarize_spectrum(result.spectrum, array.id(), options.refine);
  if (result.spectrum.ambiguous) result.warnings.emplace_back("flat spectrum: azimuth is ambiguous");
  return result;
}

MultichannelRecording preprocess(const MultichannelRecording& rec, Band band) {
  rec.validate();
  MultichannelRecording out;
  out.sample_rate = rec.sample_rate;
  out.channels.reserve(rec.num_channels());
  for (std::size_t k = 0; k < rec.num_channels(); ++k) {
    out.channels.push_back(bandpass(rec.channel(k), band.low_hz, band.high_hz).samples);
  }
  return out;
}

GccPipelineOptions gcc_phat_baseline_options(double grid_step_deg, Band band) {
  GccPipelineOptions o;
  o.band = band;
  o.upsample_factor = 1;
  o.num_windows = 1;
  o.refine_delays = false;
  o.matcher.grid_step_deg = grid_step_deg;
  o.matcher.confidence_weights = false;
  o.matcher.refine = false;
  o.label = AoaMethod::GccPhat;
  return o;
}

AoaResult estimate_aoa_gcc_plus(const MultichannelRecording& rec, const MicArray& array,
                                const PropagationModel& model,
                                const GccPipelineOptions& options) {
  const MultichannelRecording clean = preprocess(rec, options.band);
  GccOptions gcc;
  gcc.upsample_factor = options.upsample_factor;
  gcc.refine = options.refine_delays;
  if (options.band_limit_phat) gcc.phat_band = options.band;
  const DelayVector delays = expand_delay_features(clean, array, model, options.num_windows, gcc);
  AoaResult result = estimate_aoa_gcc(delays, array, model, options.matcher);
  result.spectrum.method = options.label;
  result.estimate.method = options.label;
  return result;
}

AoaResult baseline_aoa_gcc_phat(const MultichannelRecording& rec, const MicArray& array,
                                const PropagationModel& model, double grid_step_deg, Band band) {
  return estimate_aoa_gcc_plus(rec, array, model, gcc_phat_baseline_options(grid_step_deg, band));
}

}  // namespace aoaloc
