#include "fixtures.hpp"

#include <cmath>

namespace fixture {

aoaloc::Scene single_array(double azimuth_deg, double range_m, double snr_db, std::uint64_t seed,
                           double orientation_rad) {
  aoaloc::Scene s;
  s.arrays = {aoaloc::build_hex_array("A", {0.0, 0.0}, orientation_rad)};
  const double a = aoaloc::deg2rad(azimuth_deg);
  s.source = aoaloc::Point2(range_m * std::cos(a), range_m * std::sin(a));
  s.snr_db = snr_db;
  s.seed = seed;
  return s;
}

aoaloc::MultichannelRecording single_array_recording(const aoaloc::Scene& scene) {
  return aoaloc::synthesize(scene).recordings.front();
}

std::vector<aoaloc::MicArray> room_arrays() {
  return {aoaloc::build_hex_array("A", {0.0, 0.0}, 0.3), aoaloc::build_hex_array("B", {6.0, 0.0}, 2.0),
          aoaloc::build_hex_array("C", {3.0, 5.0}, 4.0)};
}

aoaloc::Rect room_bounds() { return {{0.0, 0.0}, {6.0, 5.0}}; }

}  // namespace fixture
