#pragma once

#include <cstdint>

#include "aoaloc/sim.hpp"

namespace fixture {

/// One hexagonal array at the origin with a source `range_m` away at
/// `azimuth_deg` (global frame).
aoaloc::Scene single_array(double azimuth_deg, double range_m = 2.0,
                           double snr_db = aoaloc::kNoNoise, std::uint64_t seed = 1,
                           double orientation_rad = 0.3);

/// Plane-wave recording for that scene's only array.
aoaloc::MultichannelRecording single_array_recording(const aoaloc::Scene& scene);

/// Three arrays on the walls of a 6 m x 5 m room.
std::vector<aoaloc::MicArray> room_arrays();
aoaloc::Rect room_bounds();

}  // namespace fixture
