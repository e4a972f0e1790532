#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aoaloc/aoa.hpp"
#include "aoaloc/fft.hpp"

namespace aoaloc {
namespace {

constexpr double kDiagonalLoading = 1e-9;
constexpr double kFlatSpectrumDb = 3.0;

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

// STFT bins nearest to num_bins frequencies at the centers of equal
// sub-bands of `band`; duplicates collapse.
std::vector<std::size_t> select_bins(const MusicOptions& o, double sample_rate) {
  const double spacing = sample_rate / static_cast<double>(o.frame_length);
  const std::size_t nyquist = o.frame_length / 2;
  std::vector<std::size_t> bins;
  for (int k = 0; k < o.num_bins; ++k) {
    const double f = o.band.low_hz + (o.band.high_hz - o.band.low_hz) * (k + 0.5) / o.num_bins;
    const auto bin = static_cast<std::size_t>(std::lround(f / spacing));
    bins.push_back(std::clamp<std::size_t>(bin, 1, nyquist));
  }
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
  return bins;
}

}  // namespace

CovarianceStack estimate_covariances(const MultichannelRecording& rec, const MusicOptions& o) {
  rec.validate();
  if (o.num_bins < 1) throw InvalidArgument("num_bins must be >= 1");
  if (o.frame_length < 2 || o.hop < 1) throw InvalidArgument("invalid STFT frame/hop");
  if (!(o.band.low_hz >= 0.0) || !(o.band.high_hz > o.band.low_hz) ||
      o.band.high_hz > rec.sample_rate / 2.0) {
    throw InvalidArgument("MUSIC band must lie within [0, sample_rate/2]");
  }

  const std::size_t m = rec.num_channels();
  const std::size_t n = rec.length();
  const std::size_t frames = n >= o.frame_length ? 1 + (n - o.frame_length) / o.hop : 1;
  const auto bins = select_bins(o, rec.sample_rate);
  const auto window = hann(o.frame_length);

  CovarianceStack stack;
  stack.snapshot_count = static_cast<int>(frames);
  stack.matrices.assign(bins.size(), Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m),
                                                            static_cast<Eigen::Index>(m)));
  for (std::size_t b : bins) {
    stack.frequencies.push_back(static_cast<double>(b) * rec.sample_rate /
                                static_cast<double>(o.frame_length));
  }

  std::vector<double> frame(o.frame_length);
  Eigen::MatrixXcd snapshot(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(bins.size()));
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * o.hop;
    for (std::size_t ch = 0; ch < m; ++ch) {
      std::fill(frame.begin(), frame.end(), 0.0);
      const std::size_t len = std::min(o.frame_length, n - start);
      for (std::size_t i = 0; i < len; ++i) frame[i] = rec.channels[ch][start + i] * window[i];
      const auto spec = rfft(frame, o.frame_length);
      for (std::size_t k = 0; k < bins.size(); ++k) {
        snapshot(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(k)) = spec[bins[k]];
      }
    }
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const auto x = snapshot.col(static_cast<Eigen::Index>(k));
      stack.matrices[k].noalias() += x * x.adjoint();
    }
  }

  const auto md = static_cast<double>(m);
  for (auto& r : stack.matrices) {
    r /= static_cast<double>(frames);
    r = 0.5 * (r + r.adjoint()).eval();
    const double load = kDiagonalLoading * r.trace().real() / md;
    r.diagonal().array() += load;
  }
  return stack;
}

std::vector<double> music_pseudospectrum(const Eigen::MatrixXcd& covariance, double frequency_hz,
                                         const MicArray& array, const PropagationModel& model,
                                         const std::vector<double>& angles_deg) {
  const Eigen::Index m = covariance.rows();
  if (m != array.num_elements()) throw InvalidArgument("covariance size does not match array");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(covariance);
  if (eig.info() != Eigen::Success) throw EstimationError("eigendecomposition failed");
  // Eigenvalues ascend; a single source leaves the first m-1 as noise.
  const Eigen::MatrixXcd noise = eig.eigenvectors().leftCols(m - 1);

  std::vector<double> p(angles_deg.size());
  Eigen::VectorXcd steering(m);
  const double omega = 2.0 * std::numbers::pi * frequency_hz;
  for (std::size_t k = 0; k < angles_deg.size(); ++k) {
    const Point2 u = unit_vector(deg2rad(angles_deg[k]));
    for (Eigen::Index e = 0; e < m; ++e) {
      // Arrival time relative to the center: elements nearer the source lead.
      const double tau = -u.dot(array.element(static_cast<int>(e)) - array.center()) /
                         model.speed_of_sound;
      steering(e) = std::polar(1.0, -omega * tau);
    }
    const double denom = (noise.adjoint() * steering).squaredNorm();
    p[k] = 1.0 / std::max(denom, 1e-300);
  }
  return p;
}

AoaResult estimate_aoa_music(const MultichannelRecording& rec, const MicArray& array,
                             const PropagationModel& model, const MusicOptions& options) {
  model.validate();
  rec.validate();
  if (static_cast<int>(rec.num_channels()) != array.num_elements()) {
    throw InvalidArgument("recording has " + std::to_string(rec.num_channels()) +
                          " channels, array '" + array.id() + "' has " +
                          std::to_string(array.num_elements()) + " elements");
  }
  const MultichannelRecording input =
      options.preprocess ? preprocess(rec, options.band) : rec;
  const CovarianceStack stack = estimate_covariances(input, options);

  AoaResult result;
  result.spectrum.method = AoaMethod::Music;
  result.spectrum.angles_deg = azimuth_grid(options.grid_step_deg);
  result.spectrum.scores.assign(result.spectrum.angles_deg.size(), 0.0);

  std::size_t used = 0;
  for (std::size_t k = 0; k < stack.matrices.size(); ++k) {
    if (!(stack.matrices[k].trace().real() > 0.0)) continue;
    const auto p = music_pseudospectrum(stack.matrices[k], stack.frequencies[k], array, model,
                                        result.spectrum.angles_deg);
    for (std::size_t i = 0; i < p.size(); ++i) result.spectrum.scores[i] += p[i];
    ++used;
  }
  if (used == 0) throw EstimationError("degenerate covariance: no signal energy in band");
  for (double& s : result.spectrum.scores) s /= static_cast<double>(used);

  const auto [lo, hi] =
      std::minmax_element(result.spectrum.scores.begin(), result.spectrum.scores.end());
  result.spectrum.ambiguous = 10.0 * std::log10(*hi / *lo) < kFlatSpectrumDb;
  result.estimate = summarize_spectrum(result.spectrum, array.id(), true);

  if (stack.snapshot_count < array.num_elements()) {
    result.warnings.push_back("only " + std::to_string(stack.snapshot_count) +
                              " snapshots for " + std::to_string(array.num_elements()) +
                              " elements: covariance is rank deficient");
  }
  if (result.spectrum.ambiguous) result.warnings.emplace_back("flat spectrum: azimuth is ambiguous");
  return result;
}

}  // namespace aoaloc
