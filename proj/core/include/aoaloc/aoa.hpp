#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

#include "aoaloc/dsp.hpp"
#include "aoaloc/error.hpp"
#include "aoaloc/geometry.hpp"
#include "aoaloc/tdoa.hpp"

namespace aoaloc {

enum class AoaMethod { GccPlus, GccPhat, Music };

std::string_view to_string(AoaMethod method);
/// Accepts "gcc+", "gccplus", "gcc-phat", "gccphat", "music".
AoaMethod parse_aoa_method(std::string_view name);

/// Score over a uniform azimuth grid covering [0, 360) degrees.
struct AoaSpectrum {
  std::vector<double> angles_deg;
  std::vector<double> scores;
  AoaMethod method = AoaMethod::GccPlus;
  bool ambiguous = false;  // no strict maximum worth reporting
};

struct AoaEstimate {
  double azimuth = 0.0;     // radians, global frame, [0, 2pi)
  double confidence = 0.0;  // peak prominence in [0, 1]
  AoaMethod method = AoaMethod::GccPlus;
  std::string array_id;
};

struct AoaResult {
  AoaSpectrum spectrum;
  AoaEstimate estimate;
  std::vector<std::string> warnings;
};

/// Raised when every delay measurement was flagged unreliable. Carries the
/// spectrum computed from the unfiltered measurements for inspection.
class AmbiguousEstimateError : public EstimationError {
 public:
  AmbiguousEstimateError(const std::string& what, AoaSpectrum spectrum)
      : EstimationError(what), spectrum_(std::move(spectrum)) {}
  const AoaSpectrum& spectrum() const { return spectrum_; }

 private:
  AoaSpectrum spectrum_;
};

inline constexpr double kDefaultGridStepDeg = 1.0;

struct MatcherOptions {
  double grid_step_deg = kDefaultGridStepDeg;
  /// Weight each measurement by its normalized correlation peak; uniform
  /// weights otherwise.
  bool confidence_weights = true;
  /// Quadratic vertex refinement of the grid argmax.
  bool refine = true;
};

/// Grid search for the azimuth whose predicted delays best match the
/// observations in the weighted least-squares sense.
AoaResult estimate_aoa_gcc(const DelayVector& delays, const MicArray& array,
                           const PropagationModel& model, const MatcherOptions& options = {});

/// Band-pass (and peak-normalize) every channel.
MultichannelRecording preprocess(const MultichannelRecording& rec, Band band);

/// End-to-end settings for the correlation-based estimators.
struct GccPipelineOptions {
  Band band = kSpeechBand;
  bool band_limit_phat = true;
  int upsample_factor = kDefaultUpsampleFactor;
  int num_windows = 2;
  bool refine_delays = true;
  MatcherOptions matcher;
  AoaMethod label = AoaMethod::GccPlus;  // reported in the result
};

/// Settings for the plain GCC-PHAT ablation: no upsampling, no refinement
/// of either delays or angle, one window, uniform weights.
GccPipelineOptions gcc_phat_baseline_options(double grid_step_deg = kDefaultGridStepDeg,
                                             Band band = kSpeechBand);

/// preprocess -> expand_delay_features -> estimate_aoa_gcc.
AoaResult estimate_aoa_gcc_plus(const MultichannelRecording& rec, const MicArray& array,
                                const PropagationModel& model,
                                const GccPipelineOptions& options = {});

AoaResult baseline_aoa_gcc_phat(const MultichannelRecording& rec, const MicArray& array,
                                const PropagationModel& model,
                                double grid_step_deg = kDefaultGridStepDeg,
                                Band band = kSpeechBand);

// ---------------------------------------------------------------------------
// Incoherent wideband MUSIC

/// Per-bin spatial covariance estimates.
struct CovarianceStack {
  std::vector<Eigen::MatrixXcd> matrices;
  std::vector<double> frequencies;  // Hz, one per matrix
  int snapshot_count = 0;
};

struct MusicOptions {
  Band band = kSpeechBand;
  int num_bins = 32;
  double grid_step_deg = kDefaultGridStepDeg;
  std::size_t frame_length = 1024;
  std::size_t hop = 512;
  bool preprocess = true;
};

/// Hann-windowed STFT snapshots -> sample covariance at `num_bins`
/// frequencies spread uniformly over the band. Each matrix carries diagonal
/// loading of 1e-9 * trace / M.
CovarianceStack estimate_covariances(const MultichannelRecording& rec, const MusicOptions& options);

/// Narrowband MUSIC pseudospectrum 1 / |E_n^H a(f, theta)|^2 for one
/// covariance, assuming a single source.
std::vector<double> music_pseudospectrum(const Eigen::MatrixXcd& covariance, double frequency_hz,
                                         const MicArray& array, const PropagationModel& model,
                                         const std::vector<double>& angles_deg);

AoaResult estimate_aoa_music(const MultichannelRecording& rec, const MicArray& array,
                             const PropagationModel& model, const MusicOptions& options = {});

/// Uniform grid over [0, 360) with spacing as close to `step_deg` as an
/// integer number of points allows.
std::vector<double> azimuth_grid(double step_deg);

/// Picks the grid maximum, refines it with quadratic_vertex over the
/// circular neighborhood and fills in confidence. Shared by all methods.
AoaEstimate summarize_spectrum(const AoaSpectrum& spectrum, const std::string& array_id,
                               bool refine);

}  // namespace aoaloc
