#pragma once

#include <vector>

#include "aoaloc/app/config.hpp"

namespace aoaloc::app {

/// Runs `method` on one array's recording with the settings in `config`.
AoaResult run_aoa(const MultichannelRecording& rec, const MicArray& array,
                  const PropagationModel& model, AoaMethod method, const PipelineConfig& config);

/// Bearing line through the array center. Weighted by confidence (floored at
/// 1e-3) unless confidence weighting is off, in which case every weight is 1.
BearingLine make_bearing(const MicArray& array, double azimuth_rad, double confidence,
                         const PipelineConfig& config);

LocalizationResult run_solver(const std::vector<BearingLine>& lines, Solver solver,
                              const PipelineConfig& config);

}  // namespace aoaloc::app
