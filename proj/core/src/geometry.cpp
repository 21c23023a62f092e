#include "latomo/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace latomo {
namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

void FanBeamGeometry::validate() const {
  if (!(source_to_isocenter > 0.0)) {
    throw std::invalid_argument("geometry.source_to_isocenter must be > 0");
  }
  if (!(source_to_detector > source_to_isocenter)) {
    throw std::invalid_argument(
        "geometry.source_to_detector must exceed geometry.source_to_isocenter");
  }
  if (detector_channels == 0) {
    throw std::invalid_argument("geometry.detector_channels must be > 0");
  }
  if (!(channel_size > 0.0)) {
    throw std::invalid_argument("geometry.channel_size must be > 0");
  }
  if (!(angle_increment > 0.0)) {
    throw std::invalid_argument("geometry.angle_increment must be > 0");
  }
  if (!(angle_end >= angle_start)) {
    throw std::invalid_argument("geometry.angle_end must be >= geometry.angle_start");
  }
}

std::size_t FanBeamGeometry::num_views() const {
  return static_cast<std::size_t>(
             std::floor((angle_end - angle_start) / angle_increment + 1e-9)) +
         1;
}

std::vector<double> FanBeamGeometry::view_angles() const {
  std::vector<double> out(num_views());
  for (std::size_t v = 0; v < out.size(); ++v) {
    out[v] = angle_start + static_cast<double>(v) * angle_increment;
  }
  return out;
}

double FanBeamGeometry::half_fan_angle() const {
  const double half_width = 0.5 * static_cast<double>(detector_channels) * channel_size;
  return std::atan(half_width / source_to_detector);
}

double FanBeamGeometry::covered_radius() const {
  return source_to_isocenter * std::sin(half_fan_angle());
}

Point2 FanBeamGeometry::source_position(double angle_deg) const {
  const double b = angle_deg * kDeg;
  return {source_to_isocenter * std::cos(b), source_to_isocenter * std::sin(b)};
}

Point2 FanBeamGeometry::channel_position(double angle_deg, std::size_t channel) const {
  const double b = angle_deg * kDeg;
  const double c = std::cos(b);
  const double s = std::sin(b);
  const double back = source_to_isocenter - source_to_detector;
  const double u = (static_cast<double>(channel) -
                    0.5 * (static_cast<double>(detector_channels) - 1.0)) *
                   channel_size;
  return {back * c - u * s, back * s + u * c};
}

}  // namespace latomo
