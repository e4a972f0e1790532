#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoaloc/dsp.hpp"
#include "aoaloc/geometry.hpp"

namespace aoaloc {

/// One time-difference measurement for an element pair in one window.
struct PairDelay {
  MicPair pair;
  double delay = 0.0;       // seconds, arrival(second) - arrival(first)
  double peak_score = 0.0;  // correlation at the refined peak
  int window_index = 0;
  bool low_confidence = false;  // peak fit was not concave
};

/// Stacked pairwise delays for one array: 15 pairs x num_windows entries.
struct DelayVector {
  std::vector<PairDelay> entries;
  std::string source_array;
  int num_windows = 1;
};

/// GCC-PHAT knobs. Defaults give the refined (GCC+) estimator; the plain
/// GCC-PHAT baseline is {1, false}.
struct GccOptions {
  int upsample_factor = kDefaultUpsampleFactor;
  bool refine = true;
  /// When set, whitened bins outside the band are discarded before the
  /// inverse transform.
  std::optional<Band> phat_band;
  double epsilon = kDefaultPhatEpsilon;
};

/// Vertex of a least-squares parabola fitted around a discrete maximum.
struct VertexEstimate {
  double offset = 0.0;  // grid steps relative to the peak index, in [-1, 1]
  double value = 0.0;   // fitted value at the vertex
  bool concave = true;  // false: fit failed, offset forced to 0
};

/// Fits f(t) = a t^2 + b t + c to the samples around `peak` and returns the
/// vertex -b / 2a. With room on both sides, the two 6-point windows
/// [peak-2, peak+3] and [peak-3, peak+2] are fitted and their vertices
/// averaged, so an even peak yields exactly zero. Near an edge the window
/// shrinks symmetrically down to 3 points.
VertexEstimate quadratic_vertex(std::span<const double> samples, std::size_t peak);

struct PeakRefinement {
  double delay = 0.0;         // seconds
  double offset_steps = 0.0;  // fine-grid steps added to the integer peak
  double value = 0.0;
  bool low_confidence = false;
};

/// Subsample peak location on a correlation's lag axis.
PeakRefinement refine_peak(const CorrelationFunction& corr, std::size_t peak_index);

/// Gating window for a pair: 1.2x the largest physically possible delay.
double default_max_lag(const MicArray& array, MicPair pair, const PropagationModel& model);

/// GCC-PHAT delay of x2 relative to x1, searched over |lag| <= max_lag.
/// Throws NoSignalError on all-zero input and InvalidArgument if max_lag
/// exceeds the correlation's support.
PairDelay estimate_pair_delay(const RealSignal& x1, const RealSignal& x2, double max_lag,
                              const GccOptions& options = {});

/// Same as estimate_pair_delay but starting from precomputed spectra.
PairDelay estimate_pair_delay(const Spectrum& x1, const Spectrum& x2, double max_lag,
                              const GccOptions& options = {});

/// Splits `rec` into `num_windows` equal non-overlapping windows and
/// measures all element pairs in each, gated by default_max_lag.
DelayVector expand_delay_features(const MultichannelRecording& rec, const MicArray& array,
                                  const PropagationModel& model, int num_windows,
                                  const GccOptions& options = {});

inline constexpr std::size_t kMinWindowLength = 1024;

}  // namespace aoaloc
