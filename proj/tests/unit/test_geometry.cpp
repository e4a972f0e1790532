#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "aoaloc/error.hpp"
#include "aoaloc/geometry.hpp"
#include "oracles.hpp"

namespace aoaloc {
namespace {

TEST(HexArray, FirstElementLiesAlongOrientation) {
  const MicArray a = build_hex_array("A", {0.0, 0.0}, 0.0);
  EXPECT_NEAR(a.element(0).x(), 0.0475, 1e-15);
  EXPECT_NEAR(a.element(0).y(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(a.side_length(), kDefaultSideLength);
}

TEST(HexArray, OppositeElementOfUnitHexagon) {
  const MicArray a = build_hex_array("A", {0.0, 0.0}, 0.0, 1.0);
  EXPECT_NEAR(a.element(3).x(), -1.0, 1e-15);
  EXPECT_NEAR(a.element(3).y(), 0.0, 1e-15);
}

TEST(HexArray, RotatedAndTranslatedMatchesHandTable) {
  // Six offsets of 4.75 cm at 30, 90, ..., 330 degrees around (2, 3).
  const double table[6][2] = {
      {2.0411362066797607, 3.0237500000000002}, {2.0, 3.0474999999999999},
      {1.9588637933202391, 3.0237500000000002}, {1.9588637933202391, 2.9762499999999998},
      {2.0, 2.9525000000000001},                {2.0411362066797607, 2.9762499999999998},
  };
  const MicArray a = build_hex_array("A", {2.0, 3.0}, std::numbers::pi / 6);
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(a.element(k).x(), table[k][0], 1e-12) << "element " << k;
    EXPECT_NEAR(a.element(k).y(), table[k][1], 1e-12) << "element " << k;
    const auto o = oracle::hex_element({2.0, 3.0}, std::numbers::pi / 6, 0.0475, k);
    EXPECT_NEAR((a.element(k) - o).norm(), 0.0, 1e-12);
  }
}

TEST(HexArray, RejectsBadInput) {
  EXPECT_THROW(build_hex_array("A", {0.0, 0.0}, 0.0, 0.0), InvalidArgument);
  EXPECT_THROW(build_hex_array("A", {0.0, 0.0}, 0.0, -1.0), InvalidArgument);
  EXPECT_THROW(build_hex_array("A", {std::nan(""), 0.0}, 0.0), InvalidArgument);
  EXPECT_THROW(build_hex_array("A", {0.0, 0.0}, INFINITY), InvalidArgument);
  const MicArray a = build_hex_array("A", {0.0, 0.0}, 0.0);
  EXPECT_THROW(a.element(6), InvalidArgument);
  EXPECT_THROW(a.element(-1), InvalidArgument);
}

TEST(AllPairs, FifteenOrderedPairs) {
  const auto pairs = all_pairs();
  ASSERT_EQ(pairs.size(), 15u);
  EXPECT_EQ(pairs.front(), (MicPair{0, 1}));
  EXPECT_EQ(pairs.back(), (MicPair{4, 5}));
  for (const auto& p : pairs) EXPECT_LT(p.first, p.second);
}

TEST(PredictedPairDelay, EndFireOnDiameter) {
  const MicArray a = build_hex_array("A", {0.0, 0.0}, 0.0);
  const PropagationModel m;
  EXPECT_NEAR(a.baseline({0, 3}), 0.095, 1e-15);
  // Element 0 faces the source, so it hears the wave first.
  EXPECT_NEAR(predicted_pair_delay(a, {0, 3}, 0.0, m), 0.0002769679300291545, 1e-15);
}

TEST(PredictedPairDelay, BroadsideIsZero) {
  const MicArray a = build_hex_array("A", {1.0, -2.0}, 0.4);
  const PropagationModel m;
  for (const auto& p : all_pairs()) {
    const Point2 base = a.element(p.first) - a.element(p.second);
    const double broadside = std::atan2(base.x(), -base.y());
    EXPECT_NEAR(predicted_pair_delay(a, p, broadside, m), 0.0, 1e-18);
  }
}

TEST(PredictedPairDelay, SwapNegates) {
  const MicArray a = build_hex_array("A", {0.0, 0.0}, 1.1);
  const PropagationModel m;
  EXPECT_EQ(predicted_pair_delay(a, {1, 4}, 0.3, m), -predicted_pair_delay(a, {4, 1}, 0.3, m));
}

TEST(PredictedPairDelay, MatchesElementwiseOracle) {
  const MicArray a = build_hex_array("A", {0.5, 0.5}, 2.0);
  const PropagationModel m;
  for (const auto& p : all_pairs()) {
    for (int deg = 0; deg < 360; deg += 7) {
      const double az = deg2rad(deg);
      EXPECT_NEAR(predicted_pair_delay(a, p, az, m),
                  oracle::plane_wave_tdoa(a.element(p.first), a.element(p.second), az, m.speed_of_sound), 1e-18);
    }
  }
}

TEST(SpatialResolution, DefaultModel) {
  EXPECT_NEAR(spatial_resolution({343.0, 44100.0}), 7.777e-3, 1e-5);
  EXPECT_NEAR(spatial_resolution({343.0, 44100.0}), 0.0077777777777777776, 1e-15);
}

TEST(SpatialResolution, OtherModels) {
  EXPECT_DOUBLE_EQ(spatial_resolution({343.0, 343.0}), 1.0);
  EXPECT_NEAR(spatial_resolution({340.0, 48000.0}), 0.007083333333333333, 1e-15);
}

TEST(PropagationModel, RejectsNonPositive) {
  EXPECT_THROW((PropagationModel{0.0, 44100.0}).validate(), InvalidArgument);
  EXPECT_THROW((PropagationModel{343.0, -1.0}).validate(), InvalidArgument);
  EXPECT_NO_THROW(PropagationModel{}.validate());
}

TEST(Angles, WrapAndDistance) {
  EXPECT_NEAR(wrap_degrees(-10.0), 350.0, 1e-12);
  EXPECT_NEAR(wrap_degrees(720.5), 0.5, 1e-12);
  EXPECT_NEAR(wrap_two_pi(-std::numbers::pi / 2), 1.5 * std::numbers::pi, 1e-12);
  EXPECT_LT(wrap_two_pi(2 * std::numbers::pi), 2 * std::numbers::pi);
  EXPECT_NEAR(angular_distance(deg2rad(359.0), deg2rad(1.0)), deg2rad(2.0), 1e-12);
  EXPECT_NEAR(rad2deg(azimuth_between({1.0, 1.0}, {1.0, 3.0})), 90.0, 1e-12);
}

TEST(SphericalPairDelay, ApproachesPlaneWaveFarAway) {
  const MicArray a = build_hex_array("A", {0.0, 0.0}, 0.0);
  const PropagationModel m;
  const double az = deg2rad(40.0);
  const Point2 far = 1e4 * unit_vector(az);
  for (const auto& p : all_pairs()) {
    const double b = a.baseline(p);
    EXPECT_NEAR(spherical_pair_delay(a, p, far, m), predicted_pair_delay(a, p, az, m),
                b * b / (2.0 * 1e4 * m.speed_of_sound));
  }
}

}  // namespace
}  // namespace aoaloc
