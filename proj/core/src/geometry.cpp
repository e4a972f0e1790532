#include "aoaloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aoaloc/error.hpp"

namespace aoaloc {

void PropagationModel::validate() const {
  if (!std::isfinite(speed_of_sound) || speed_of_sound <= 0.0) {
    throw InvalidArgument("speed_of_sound must be finite and positive");
  }
  if (!std::isfinite(sample_rate) || sample_rate <= 0.0) {
    throw InvalidArgument("sample_rate must be finite and positive");
  }
}

MicArray::MicArray(std::string id, Point2 center, double orientation, double side_length)
    : id_(std::move(id)), center_(std::move(center)), orientation_(orientation),
      side_length_(side_length) {
  if (!center_.allFinite() || !std::isfinite(orientation_) || !std::isfinite(side_length_)) {
    throw InvalidArgument("array '" + id_ + "': non-finite pose or side length");
  }
  if (side_length_ <= 0.0) {
    throw InvalidArgument("array '" + id_ + "': side_length must be positive");
  }
  elements_.reserve(kHexElements);
  for (int k = 0; k < kHexElements; ++k) {
    const double angle = orientation_ + k * std::numbers::pi / 3.0;
    elements_.emplace_back(center_ + side_length_ * unit_vector(angle));
  }
}

const Point2& MicArray::element(int k) const {
  if (k < 0 || k >= num_elements()) {
    throw InvalidArgument("element index " + std::to_string(k) + " out of range");
  }
  return elements_[static_cast<std::size_t>(k)];
}

double MicArray::baseline(MicPair pair) const {
  return (element(pair.first) - element(pair.second)).norm();
}

MicArray build_hex_array(std::string id, const Point2& center, double orientation,
                         double side_length) {
  return MicArray(std::move(id), center, orientation, side_length);
}

std::vector<MicPair> all_pairs(int num_elements) {
  std::vector<MicPair> pairs;
  for (int i = 0; i < num_elements; ++i) {
    for (int j = i + 1; j < num_elements; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

double predicted_pair_delay(const MicArray& array, MicPair pair, double azimuth,
                            const PropagationModel& model) {
  if (pair.first == pair.second) throw InvalidArgument("pair elements must differ");
  const Point2 diff = array.element(pair.first) - array.element(pair.second);
  return unit_vector(azimuth).dot(diff) / model.speed_of_sound;
}

double spherical_pair_delay(const MicArray& array, MicPair pair, const Point2& source,
                            const PropagationModel& model) {
  if (pair.first == pair.second) throw InvalidArgument("pair elements must differ");
  const double to_first = (source - array.element(pair.first)).norm();
  const double to_second = (source - array.element(pair.second)).norm();
  return (to_second - to_first) / model.speed_of_sound;
}

double spatial_resolution(const PropagationModel& model) {
  model.validate();
  return model.speed_of_sound / model.sample_rate;
}

double wrap_two_pi(double angle) {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // fmod of a tiny negative value can land exactly on 2pi after the add.
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

double wrap_degrees(double degrees) {
  double wrapped = std::fmod(degrees, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  if (wrapped >= 360.0) wrapped = 0.0;
  return wrapped;
}

double angular_distance(double a, double b) {
  const double d = wrap_two_pi(a - b);
  return std::min(d, kTwoPi - d);
}

double azimuth_between(const Point2& from, const Point2& to) {
  const Point2 d = to - from;
  return wrap_two_pi(std::atan2(d.y(), d.x()));
}

}  // namespace aoaloc
