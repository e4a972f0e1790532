#include "aoaloc/app/pipeline.hpp"

#include <algorithm>

namespace aoaloc::app {

AoaResult run_aoa(const MultichannelRecording& rec, const MicArray& array,
                  const PropagationModel& model, AoaMethod method, const PipelineConfig& config) {
  const PipelineConfig e = effective(config);
  switch (method) {
    case AoaMethod::Music:
      return estimate_aoa_music(rec, array, model, music_options(e));
    case AoaMethod::GccPhat:
    case AoaMethod::GccPlus:
      break;
  }
  AoaResult r = estimate_aoa_gcc_plus(rec, array, model, gcc_options(e, method));
  r.estimate.array_id = array.id();
  return r;
}

BearingLine make_bearing(const MicArray& array, double azimuth_rad, double confidence,
                         const PipelineConfig& config) {
  const double weight = effective(config).confidence_weights ? std::max(confidence, 1e-3) : 1.0;
  return BearingLine::from_azimuth(array.center(), azimuth_rad, weight, array.id());
}

LocalizationResult run_solver(const std::vector<BearingLine>& lines, Solver solver,
                              const PipelineConfig& config) {
  switch (solver) {
    case Solver::Mle:
      return solve_mle(lines);
    case Solver::Ransac:
      return solve_ransac(lines, ransac_options(config));
    case Solver::Irls:
      return solve_irls(lines, irls_options(config));
  }
  return solve_mle(lines);
}

}  // namespace aoaloc::app
