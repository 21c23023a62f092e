#pragma once

#include <span>

#include "latomo/image.hpp"

namespace latomo {

/// RMSE in HU between `img` and `reference` over the inclusive `roi`.
/// Throws std::invalid_argument on shape mismatch or an ROI outside the grid.
double roi_rmse(const ImageGrid& img, const ImageGrid& reference, const RoiRect& roi);

/// roi_rmse over the whole grid.
double full_rmse(const ImageGrid& img, const ImageGrid& reference);

/// Sum of `values` by fixed-order pairwise reduction; result is independent of
/// how callers partition work.
double pairwise_sum(std::span<const double> values);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace latomo
