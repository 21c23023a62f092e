#pragma once

#include <cstddef>
#include <vector>

#include "latomo/image.hpp"

namespace latomo {

/// Circular fan-beam scan with a flat, equally spaced detector.
///
/// The view angle is measured counter-clockwise from +X. At view angle b the
/// source sits at source_to_isocenter * (cos b, sin b) and the detector center
/// at (source_to_isocenter - source_to_detector) * (cos b, sin b), with the
/// detector axis along (-sin b, cos b). Channel c is centered at
/// (c - (channels-1)/2) * channel_size along that axis. A 10..170 degree scan
/// keeps the source above the object, so the missing directions are the
/// near-horizontal rays and the dominant streaks run along X.
struct FanBeamGeometry {
  double source_to_detector = 1088.0;   // mm
  double source_to_isocenter = 544.0;   // mm
  std::size_t detector_channels = 768;
  double channel_size = 0.5;            // mm
  double angle_start = 10.0;            // degrees
  double angle_end = 170.0;             // degrees, inclusive
  double angle_increment = 1.0;         // degrees

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  std::size_t num_views() const;
  std::vector<double> view_angles() const;

  /// Half fan angle in radians.
  double half_fan_angle() const;
  /// Radius (mm) of the isocentric disc seen by every ray fan.
  double covered_radius() const;

  Point2 source_position(double angle_deg) const;
  Point2 channel_position(double angle_deg, std::size_t channel) const;
};

}  // namespace latomo
