#pragma once

#include <cstddef>

#include "latomo/image.hpp"
#include "latomo/ssatv1.hpp"
#include "latomo/tv.hpp"

namespace latomo {

/// Height of the Y-down-sampled grid, ceil(height / s).
std::size_t downsampled_height(std::size_t height, int s);

/// Low-pass filter every column with `h` (clamped rows) and keep rows
/// 0, s, 2s, ...; the result has ceil(H/s) rows and s times the row spacing.
ImageGrid downsample_y(const ImageGrid& f, int s, const LowPassKernel& h);

/// Exact adjoint of downsample_y: zero insertion followed by the reversed
/// kernel, folding the clamped border taps back onto the edge rows.
/// Throws std::invalid_argument unless g_d has ceil(target_height/s) rows.
ImageGrid upsample_adjoint_y(const ImageGrid& g_d, int s, const LowPassKernel& h,
                             std::size_t target_height);

/// State of one scale of the Y pyramid.
struct PyramidLevel {
  int scale = 1;
  LowPassKernel lowpass;
  std::size_t down_height = 0;
  WeightField weights;  // on the down-sampled grid
};

/// Builds a level whose weights come from the down-sampled `f`.
/// Throws when the down-sampled height would be below 2.
PyramidLevel make_pyramid_level(const ImageGrid& f, int s, LowPassKernel h, double eps_hu);

/// Kernel used at scale s: binomial for s >= 2, identity at s = 1.
LowPassKernel pyramid_kernel(int s);

/// Repeats `steps` times: down-sample f, take the wTV gradient on the coarse
/// grid with the level's weights, normalize, line-search the coarse step,
/// pull the direction back with upsample_adjoint_y and update f. Afterwards the
/// level's weights are recomputed from the down-sampled result.
RegularizeResult ssatv2_substep(const ImageGrid& f, PyramidLevel& level, double eps_hu,
                                int steps, const LineSearchParams& params);

}  // namespace latomo
