#include "latomo/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace latomo {

ImageGrid::ImageGrid(std::size_t width, std::size_t height, double pixel_size,
                     Point2 origin)
    : ImageGrid(width, height, pixel_size,
                std::vector<double>(width * height, 0.0), origin) {}

ImageGrid::ImageGrid(std::size_t width, std::size_t height, double pixel_size,
                     std::vector<double> data, Point2 origin)
    : width_(width),
      height_(height),
      pixel_size_(pixel_size),
      row_spacing_(pixel_size),
      origin_(origin),
      data_(std::move(data)) {
  if (width == 0 || height == 0) {
    throw std::invalid_argument("ImageGrid: dimensions must be positive");
  }
  if (!(pixel_size > 0.0) || !std::isfinite(pixel_size)) {
    throw std::invalid_argument("ImageGrid: pixel_size must be > 0");
  }
  if (data_.size() != width * height) {
    throw std::invalid_argument("ImageGrid: data length " +
                                std::to_string(data_.size()) + " != " +
                                std::to_string(width * height));
  }
}

void ImageGrid::set_row_spacing(double spacing) {
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("ImageGrid: row spacing must be > 0");
  }
  row_spacing_ = spacing;
}

Point2 ImageGrid::pixel_center(std::size_t x, std::size_t y) const {
  const double cx = (static_cast<double>(x) - 0.5 * (width_ - 1.0)) * pixel_size_;
  const double cy = (static_cast<double>(y) - 0.5 * (height_ - 1.0)) * row_spacing_;
  return {origin_.x + cx, origin_.y + cy};
}

ImageGrid ImageGrid::zeros_like() const {
  ImageGrid out(width_, height_, pixel_size_, origin_);
  out.row_spacing_ = row_spacing_;
  return out;
}

bool ImageGrid::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double ImageGrid::min_value() const {
  return *std::min_element(data_.begin(), data_.end());
}

double ImageGrid::max_value() const {
  return *std::max_element(data_.begin(), data_.end());
}

Sinogram::Sinogram(std::vector<double> view_angles_deg, std::size_t num_channels)
    : Sinogram(view_angles_deg, num_channels,
               std::vector<double>(view_angles_deg.size() * num_channels, 0.0)) {}

Sinogram::Sinogram(std::vector<double> view_angles_deg, std::size_t num_channels,
                   std::vector<double> data)
    : angles_(std::move(view_angles_deg)),
      channels_(num_channels),
      data_(std::move(data)) {
  if (angles_.empty() || channels_ == 0) {
    throw std::invalid_argument("Sinogram: needs at least one view and channel");
  }
  if (data_.size() != angles_.size() * channels_) {
    throw std::invalid_argument("Sinogram: data length mismatch");
  }
  for (std::size_t i = 1; i < angles_.size(); ++i) {
    if (!(angles_[i] > angles_[i - 1])) {
      throw std::invalid_argument("Sinogram: view angles must be strictly increasing");
    }
  }
}

RoiRect full_roi(const ImageGrid& img) {
  return {0, 0, img.width() - 1, img.height() - 1};
}

RoiRect roi_from_mm(const ImageGrid& img, double xmin, double ymin, double xmax,
                    double ymax) {
  // Index range whose centers satisfy lo <= c <= hi along one axis.
  auto range = [](double lo, double hi, double origin, double spacing,
                  std::size_t n, std::size_t& first, std::size_t& last) {
    const double half = 0.5 * (static_cast<double>(n) - 1.0);
    const double a = std::ceil((lo - origin) / spacing + half);
    const double b = std::floor((hi - origin) / spacing + half);
    const double fa = std::max(a, 0.0);
    const double fb = std::min(b, static_cast<double>(n) - 1.0);
    if (fa > fb) return false;
    first = static_cast<std::size_t>(fa);
    last = static_cast<std::size_t>(fb);
    return true;
  };
  RoiRect roi;
  if (!range(xmin, xmax, img.origin().x, img.pixel_size(), img.width(), roi.x0,
             roi.x1) ||
      !range(ymin, ymax, img.origin().y, img.row_spacing(), img.height(), roi.y0,
             roi.y1)) {
    throw std::invalid_argument("roi_from_mm: rectangle covers no pixel centers");
  }
  return roi;
}

}  // namespace latomo
