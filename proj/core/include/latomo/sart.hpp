#pragma once

#include <cstddef>
#include <vector>

#include "latomo/image.hpp"
#include "latomo/projector.hpp"

namespace latomo {

/// Scratch buffers reused across SART view updates.
struct SartWorkspace {
  std::vector<double> residual;
  std::vector<double> numerator;
  std::vector<double> denominator;
};

/// One SART update for a single view:
///   f_j += lambda * sum_i (r_i / rowsum_i) A_ij / sum_i A_ij,
/// with r = p - A f over the view's rays. Rays with zero row sum are skipped
/// and pixels the view never touches keep their value.
/// Throws std::invalid_argument unless 0 < lambda <= 1.
ImageGrid sart_view_update(const ImageGrid& f, const Sinogram& p,
                           const FanBeamProjector& projector, std::size_t view_index,
                           double lambda);

void sart_view_update_inplace(ImageGrid& f, const Sinogram& p,
                              const FanBeamProjector& projector, std::size_t view_index,
                              double lambda, SartWorkspace& work);

/// Sequential update over all views in acquisition order.
void sart_sweep(ImageGrid& f, const Sinogram& p, const FanBeamProjector& projector,
                double lambda, SartWorkspace& work);

ImageGrid apply_nonnegativity(ImageGrid f);
void clamp_nonnegative(ImageGrid& f);

/// ||A f - p||_2 / ||p||_2.
double relative_residual(const ImageGrid& f, const Sinogram& p,
                         const FanBeamProjector& projector);

}  // namespace latomo
