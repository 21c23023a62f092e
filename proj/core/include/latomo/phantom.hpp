#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "latomo/image.hpp"

namespace latomo {

struct Ellipse {
  Point2 center;       // mm
  double semi_x = 0;   // mm, before rotation
  double semi_y = 0;   // mm
  double rotation_deg = 0;
  double value_hu = 0;
};

/// Axis-aligned rectangle; a bar of a resolution pattern.
struct Bar {
  Point2 center;     // mm
  double width = 0;  // extent along X, mm
  double height = 0; // extent along Y, mm
  double value_hu = 0;
};

using Primitive = std::variant<Ellipse, Bar>;

/// Rectangle in mm, used to publish an evaluation region with a phantom.
struct RoiMm {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};

/// Piecewise-constant phantom; later primitives paint over earlier ones.
struct PhantomSpec {
  std::vector<Primitive> primitives;
  std::optional<RoiMm> roi;

  /// Throws std::invalid_argument on non-positive extents or non-finite values.
  void validate() const;
  /// Largest distance (mm) from the isocenter reached by any primitive.
  double extent_radius() const;
};

/// Point-samples the spec at pixel centers: each pixel takes the value of the
/// last primitive containing its center, -1000 HU where none does.
ImageGrid rasterize(const PhantomSpec& spec, std::size_t width, std::size_t height,
                    double pixel_size);

/// Axis-aligned bounding box of a primitive.
RoiMm bounding_box(const Primitive& p);

/// Head surrogate: elliptical skull and brain, eyes with lenses, low/medium
/// contrast interior features (+25/+50/+100 HU over brain), a bony right ear,
/// and two vertical stacks of bar triples (800 HU and 250 HU, widths 0.5..2.5 mm)
/// in place of the left ear. Publishes an ROI between the eyes.
PhantomSpec builtin_head_phantom();

/// Bar triple geometry of the builtin phantom.
struct BarPatternLayout {
  std::vector<double> widths{0.5, 1.0, 1.5, 2.0, 2.5};  // mm
  double bar_length = 4.5;                               // mm, along X
  int bars_per_group = 3;
  double group_gap = 2.5;                                // mm between triples
};

/// Appends a stack of bar groups along +Y starting at `y_start` (bottom edge).
/// Within a group the gap between bars equals the bar width.
void append_bar_stack(PhantomSpec& spec, double center_x, double y_start, double value_hu,
                      const BarPatternLayout& layout = {});

/// Parses the line-oriented text format:
///   ellipse cx cy a b theta_deg value_hu
///   bar cx cy w h value_hu
///   roi xmin ymin xmax ymax
/// with '#' comments. Errors carry the 1-based line number.
PhantomSpec parse_phantom_spec(const std::string& text);
PhantomSpec load_phantom_spec(const std::filesystem::path& path);
std::string format_phantom_spec(const PhantomSpec& spec);

}  // namespace latomo
