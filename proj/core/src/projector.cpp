#include "latomo/projector.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "latomo/log.hpp"

namespace latomo {

FanBeamProjector::FanBeamProjector(FanBeamGeometry geometry, const ImageGrid& grid)
    : geometry_(geometry),
      angles_(geometry.view_angles()),
      width_(grid.width()),
      height_(grid.height()),
      pixel_size_(grid.pixel_size()),
      row_spacing_(grid.row_spacing()),
      origin_(grid.origin()) {
  geometry_.validate();

  const double half_w = 0.5 * static_cast<double>(width_) * pixel_size_;
  const double half_h = 0.5 * static_cast<double>(height_) * row_spacing_;
  const double grid_radius =
      std::hypot(std::abs(origin_.x) + half_w, std::abs(origin_.y) + half_h);
  if (grid_radius > geometry_.covered_radius()) {
    std::ostringstream msg;
    msg << "grid corners (radius " << grid_radius << " mm) extend past the fan ("
        << geometry_.covered_radius() << " mm); rays clip the grid in some views";
    log::debug(msg.str());
  }
  if (geometry_.source_to_isocenter <= grid_radius) {
    throw std::invalid_argument("geometry: source lies inside the image grid");
  }

  const GridBox box{origin_.x - half_w, origin_.y - half_h, pixel_size_, row_spacing_,
                    width_, height_};
  const std::size_t rays = angles_.size() * num_channels();
  offsets_.assign(rays + 1, 0);
  row_sums_.assign(rays, 0.0);
  pixels_.reserve(rays * (width_ + height_) / 2);
  lengths_.reserve(pixels_.capacity());

  for (std::size_t v = 0; v < angles_.size(); ++v) {
    const Point2 src = geometry_.source_position(angles_[v]);
    for (std::size_t c = 0; c < num_channels(); ++c) {
      const Point2 dst = geometry_.channel_position(angles_[v], c);
      const std::size_t r = ray_index(v, c);
      const std::size_t begin = pixels_.size();
      double sum = 0.0;
      trace_ray(src, dst, box, [&](std::size_t pix, double length) {
        // Clamped midpoints can repeat a pixel; fold into the previous entry.
        if (pixels_.size() > begin && pixels_.back() == pix) {
          lengths_.back() = static_cast<float>(lengths_.back() + length);
        } else {
          pixels_.push_back(static_cast<std::uint32_t>(pix));
          lengths_.push_back(static_cast<float>(length));
        }
      });
      for (std::size_t k = begin; k < pixels_.size(); ++k) sum += lengths_[k];
      row_sums_[r] = sum;
      offsets_[r + 1] = pixels_.size();
    }
  }
  pixels_.shrink_to_fit();
  lengths_.shrink_to_fit();
}

bool FanBeamProjector::matches(const ImageGrid& img) const {
  return img.width() == width_ && img.height() == height_;
}

void FanBeamProjector::check_view(std::size_t view) const {
  if (view >= angles_.size()) {
    throw std::out_of_range("view index " + std::to_string(view) + " out of range (" +
                            std::to_string(angles_.size()) + " views)");
  }
}

RayRow FanBeamProjector::ray(std::size_t view, std::size_t channel) const {
  check_view(view);
  if (channel >= num_channels()) throw std::out_of_range("channel index out of range");
  const std::size_t r = ray_index(view, channel);
  const std::size_t b = offsets_[r];
  const std::size_t n = offsets_[r + 1] - b;
  return {{pixels_.data() + b, n}, {lengths_.data() + b, n}};
}

ImageGrid FanBeamProjector::make_image() const {
  ImageGrid img(width_, height_, pixel_size_, origin_);
  if (row_spacing_ != pixel_size_) img.set_row_spacing(row_spacing_);
  return img;
}

void FanBeamProjector::forward_view(const ImageGrid& img, std::size_t view,
                                    std::span<double> out) const {
  check_view(view);
  if (!matches(img)) throw std::invalid_argument("forward_view: image/grid mismatch");
  if (out.size() != num_channels()) {
    throw std::invalid_argument("forward_view: output length != detector channels");
  }
  const double* f = img.values().data();
  const long channels = static_cast<long>(num_channels());
#pragma omp parallel for schedule(static)
  for (long c = 0; c < channels; ++c) {
    const std::size_t r = ray_index(view, static_cast<std::size_t>(c));
    double acc = 0.0;
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      acc += static_cast<double>(lengths_[k]) * f[pixels_[k]];
    }
    out[static_cast<std::size_t>(c)] = acc;
  }
}

Sinogram FanBeamProjector::forward_project(const ImageGrid& img) const {
  Sinogram sino(angles_, num_channels());
  for (std::size_t v = 0; v < angles_.size(); ++v) forward_view(img, v, sino.view(v));
  return sino;
}

void FanBeamProjector::back_project_add(std::span<const double> residual, std::size_t view,
                                        std::span<double> accum) const {
  check_view(view);
  if (residual.size() != num_channels()) {
    throw std::invalid_argument("back_project: residual length != detector channels");
  }
  if (accum.size() != width_ * height_) {
    throw std::invalid_argument("back_project: accumulator size mismatch");
  }
  // Serial scatter in channel order: the summation order, and therefore the
  // result, does not depend on the worker count.
  for (std::size_t c = 0; c < num_channels(); ++c) {
    const double q = residual[c];
    if (q == 0.0) continue;
    const std::size_t r = ray_index(view, c);
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      accum[pixels_[k]] += static_cast<double>(lengths_[k]) * q;
    }
  }
}

ImageGrid FanBeamProjector::back_project(std::span<const double> residual,
                                         std::size_t view) const {
  ImageGrid out = make_image();
  back_project_add(residual, view, out.values());
  return out;
}

ViewSums FanBeamProjector::view_sums(std::size_t view) const {
  check_view(view);
  ViewSums sums;
  sums.row_sums.assign(row_sums_.begin() + static_cast<long>(ray_index(view, 0)),
                       row_sums_.begin() + static_cast<long>(ray_index(view, 0) + num_channels()));
  sums.column_sums.assign(width_ * height_, 0.0);
  const std::vector<double> ones(num_channels(), 1.0);
  back_project_add(ones, view, sums.column_sums);
  return sums;
}

Sinogram forward_project(const ImageGrid& img, const FanBeamGeometry& geometry) {
  return FanBeamProjector(geometry, img).forward_project(img);
}

ImageGrid back_project(std::span<const double> residual, const FanBeamGeometry& geometry,
                       std::size_t view_index, const ImageGrid& grid) {
  return FanBeamProjector(geometry, grid).back_project(residual, view_index);
}

}  // namespace latomo
