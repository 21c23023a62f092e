#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "latomo/geometry.hpp"
#include "latomo/image.hpp"

namespace latomo {

/// Sparse row of the system matrix: the pixels one ray crosses and the
/// intersection length (mm) inside each.
struct RayRow {
  std::span<const std::uint32_t> pixels;
  std::span<const float> lengths;
};

/// Row and column sums of the system matrix restricted to one view.
struct ViewSums {
  std::vector<double> row_sums;     // per channel, mm
  std::vector<double> column_sums;  // per pixel, mm
};

/// Matched forward / back projection for a fixed geometry and image grid.
///
/// One ray per detector channel from the source point to the channel center;
/// weights are exact ray/pixel intersection lengths from a Siddon traversal.
/// The system matrix is traced once at construction and stored per view, so
/// the back projector is the exact transpose of the forward projector.
class FanBeamProjector {
 public:
  FanBeamProjector(FanBeamGeometry geometry, const ImageGrid& grid);

  const FanBeamGeometry& geometry() const { return geometry_; }
  std::size_t num_views() const { return angles_.size(); }
  std::size_t num_channels() const { return geometry_.detector_channels; }
  std::span<const double> view_angles() const { return angles_; }
  std::size_t grid_width() const { return width_; }
  std::size_t grid_height() const { return height_; }
  bool matches(const ImageGrid& img) const;
  /// Number of stored nonzeros.
  std::size_t nonzeros() const { return pixels_.size(); }

  RayRow ray(std::size_t view, std::size_t channel) const;

  Sinogram forward_project(const ImageGrid& img) const;
  /// Line integrals of one view into `out` (length num_channels()).
  void forward_view(const ImageGrid& img, std::size_t view, std::span<double> out) const;

  /// A_view^T q as a fresh image on the projector's grid.
  ImageGrid back_project(std::span<const double> residual, std::size_t view) const;
  /// Accumulates A_view^T q into `accum` (length width*height).
  void back_project_add(std::span<const double> residual, std::size_t view,
                        std::span<double> accum) const;

  double row_sum(std::size_t view, std::size_t channel) const {
    return row_sums_[view * num_channels() + channel];
  }
  ViewSums view_sums(std::size_t view) const;

  ImageGrid make_image() const;

 private:
  void check_view(std::size_t view) const;
  std::size_t ray_index(std::size_t view, std::size_t channel) const {
    return view * num_channels() + channel;
  }

  FanBeamGeometry geometry_;
  std::vector<double> angles_;
  std::size_t width_;
  std::size_t height_;
  double pixel_size_;
  double row_spacing_;
  Point2 origin_;
  std::vector<std::uint64_t> offsets_;  // per ray, CSR
  std::vector<std::uint32_t> pixels_;
  std::vector<float> lengths_;
  std::vector<double> row_sums_;
};

/// Axis-aligned pixel lattice used by the ray tracer.
struct GridBox {
  double xmin, ymin;
  double dx, dy;
  std::size_t nx, ny;
};

/// Siddon traversal of the segment src->dst. Calls `emit(pixel_index, length)`
/// in order along the ray for every pixel crossed with nonzero length.
template <class Emit>
void trace_ray(Point2 src, Point2 dst, const GridBox& box, Emit&& emit);

/// Convenience wrappers that build a projector for a one-off call.
Sinogram forward_project(const ImageGrid& img, const FanBeamGeometry& geometry);
ImageGrid back_project(std::span<const double> residual, const FanBeamGeometry& geometry,
                       std::size_t view_index, const ImageGrid& grid);

}  // namespace latomo

#include "latomo/detail/trace_ray.hpp"
