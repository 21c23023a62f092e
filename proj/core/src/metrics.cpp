#include "latomo/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace latomo {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 64;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double roi_rmse(const ImageGrid& img, const ImageGrid& reference, const RoiRect& roi) {
  if (!img.same_shape(reference)) {
    throw std::invalid_argument("roi_rmse: image dimensions differ");
  }
  if (!roi.valid_for(img)) {
    throw std::invalid_argument("roi_rmse: ROI outside the image");
  }
  std::vector<double> sq;
  sq.reserve(roi.pixel_count());
  for (std::size_t y = roi.y0; y <= roi.y1; ++y) {
    for (std::size_t x = roi.x0; x <= roi.x1; ++x) {
      const double d = mu_to_hu(img.at(x, y)) - mu_to_hu(reference.at(x, y));
      sq.push_back(d * d);
    }
  }
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
}

double full_rmse(const ImageGrid& img, const ImageGrid& reference) {
  return roi_rmse(img, reference, full_roi(img));
}

}  // namespace latomo
