#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace latomo {

/// Attenuation of water at the reference energy, mm^-1 (0 HU).
inline constexpr double kMuWater = 0.02;
/// Attenuation change per Hounsfield unit, mm^-1.
inline constexpr double kMuPerHu = kMuWater / 1000.0;

constexpr double hu_to_mu(double hu) { return kMuWater * (1.0 + hu / 1000.0); }
constexpr double mu_to_hu(double mu) { return (mu / kMuWater - 1.0) * 1000.0; }

/// Converts an HU difference (a contrast, not an absolute level) to mm^-1.
constexpr double hu_delta_to_mu(double hu) { return kMuPerHu * hu; }

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// 2-D attenuation map in mm^-1.
///
/// Storage is row-major with `data[y * width + x]`. Column index x grows
/// along +X (rightward); row index y grows along +Y (upward), so row 0 is
/// the bottom of the displayed image. Previews flip rows when written.
/// The grid is centered on `origin`; pixel (x, y) has its center at
///   origin + ((x - (width-1)/2) * pixel_size, (y - (height-1)/2) * row_spacing).
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(std::size_t width, std::size_t height, double pixel_size,
            Point2 origin = {});
  ImageGrid(std::size_t width, std::size_t height, double pixel_size,
            std::vector<double> data, Point2 origin = {});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  double pixel_size() const { return pixel_size_; }
  /// Y spacing; equals pixel_size() except on anisotropically resampled grids.
  double row_spacing() const { return row_spacing_; }
  void set_row_spacing(double spacing);
  Point2 origin() const { return origin_; }

  double& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  Point2 pixel_center(std::size_t x, std::size_t y) const;
  bool same_shape(const ImageGrid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Zero image with this grid's geometry.
  ImageGrid zeros_like() const;

  bool all_finite() const;
  double min_value() const;
  double max_value() const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  double pixel_size_ = 1.0;
  double row_spacing_ = 1.0;
  Point2 origin_{};
  std::vector<double> data_;
};

/// Line integrals indexed by (view, channel), view-major.
class Sinogram {
 public:
  Sinogram() = default;
  Sinogram(std::vector<double> view_angles_deg, std::size_t num_channels);
  Sinogram(std::vector<double> view_angles_deg, std::size_t num_channels,
           std::vector<double> data);

  std::size_t num_views() const { return angles_.size(); }
  std::size_t num_channels() const { return channels_; }
  std::span<const double> view_angles() const { return angles_; }

  std::span<double> view(std::size_t v) {
    return {data_.data() + v * channels_, channels_};
  }
  std::span<const double> view(std::size_t v) const {
    return {data_.data() + v * channels_, channels_};
  }
  double& at(std::size_t v, std::size_t c) { return data_[v * channels_ + c]; }
  double at(std::size_t v, std::size_t c) const { return data_[v * channels_ + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

 private:
  std::vector<double> angles_;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

/// Inclusive pixel rectangle.
struct RoiRect {
  std::size_t x0 = 0;
  std::size_t y0 = 0;
  std::size_t x1 = 0;
  std::size_t y1 = 0;

  bool valid_for(const ImageGrid& img) const {
    return x0 <= x1 && y0 <= y1 && x1 < img.width() && y1 < img.height();
  }
  std::size_t pixel_count() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
};

/// Whole-image ROI.
RoiRect full_roi(const ImageGrid& img);

/// Pixels whose centers fall inside the mm rectangle [xmin,xmax]x[ymin,ymax].
/// Throws if no pixel center is covered.
RoiRect roi_from_mm(const ImageGrid& img, double xmin, double ymin, double xmax,
                    double ymax);

}  // namespace latomo
