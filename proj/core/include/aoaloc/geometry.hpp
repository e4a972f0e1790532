#pragma once

#include <Eigen/Core>

#include <compare>
#include <numbers>
#include <string>
#include <vector>

namespace aoaloc {

using Point2 = Eigen::Vector2d;

inline constexpr double kDefaultSideLength = 0.0475;  // meters
inline constexpr int kHexElements = 6;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Medium and sampling parameters shared by every delay computation.
struct PropagationModel {
  double speed_of_sound = 343.0;  // m/s
  double sample_rate = 44100.0;   // Hz

  /// Throws InvalidArgument unless both fields are finite and positive.
  void validate() const;
};

/// Ordered pair of element indices. Delays are reported as
/// arrival(second) - arrival(first), i.e. positive when `first` hears the
/// wavefront first.
struct MicPair {
  int first = 0;
  int second = 1;

  friend auto operator<=>(const MicPair&, const MicPair&) = default;
  MicPair swapped() const { return {second, first}; }
};

/// A six-element hexagonal microphone array at a known pose.
///
/// Element k sits at center + d * (cos(orientation + k*60deg),
/// sin(orientation + k*60deg)); the hexagon's circumradius equals its side
/// length, so every element is exactly `side_length` from the center.
/// Instances are immutable.
class MicArray {
 public:
  MicArray(std::string id, Point2 center, double orientation,
           double side_length = kDefaultSideLength);

  const std::string& id() const { return id_; }
  const Point2& center() const { return center_; }
  double orientation() const { return orientation_; }
  double side_length() const { return side_length_; }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  const std::vector<Point2>& elements() const { return elements_; }
  const Point2& element(int k) const;

  /// Distance between the two elements of `pair`, meters.
  double baseline(MicPair pair) const;

 private:
  std::string id_;
  Point2 center_;
  double orientation_;
  double side_length_;
  std::vector<Point2> elements_;
};

MicArray build_hex_array(std::string id, const Point2& center, double orientation,
                         double side_length = kDefaultSideLength);

/// All unordered pairs (i < j) in lexicographic order; 15 for six elements.
std::vector<MicPair> all_pairs(int num_elements = kHexElements);

/// Unit vector pointing along `azimuth` (radians CCW from +x).
inline Point2 unit_vector(double azimuth) { return {std::cos(azimuth), std::sin(azimuth)}; }

/// Far-field TDoA for a plane wave arriving from `azimuth`, seconds.
double predicted_pair_delay(const MicArray& array, MicPair pair, double azimuth,
                            const PropagationModel& model);

/// Exact spherical-wavefront TDoA for a point source, seconds. Used to bound
/// the far-field approximation error; the estimators never call it.
double spherical_pair_delay(const MicArray& array, MicPair pair, const Point2& source,
                            const PropagationModel& model);

/// Distance sound travels in one sample period, meters.
double spatial_resolution(const PropagationModel& model);

double wrap_two_pi(double angle);
double wrap_degrees(double degrees);  // into [0, 360)

/// Smallest absolute angle between two directions, same units as input
/// (radians).
double angular_distance(double a, double b);

/// Azimuth of `to` as seen from `from`, in [0, 2pi).
double azimuth_between(const Point2& from, const Point2& to);

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace aoaloc
