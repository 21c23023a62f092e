#pragma once

#include <cstddef>
#include <vector>

#include "latomo/image.hpp"
#include "latomo/tv.hpp"

namespace latomo {

/// Symmetric 1-D smoothing kernel of length 2L+1 whose taps sum to one.
struct LowPassKernel {
  std::vector<double> taps;
  std::size_t half_length = 0;  // L
  double sigma = 0.0;           // standard deviation of the taps, pixels
};

/// Derivative-like kernel along Y. Tap k multiplies the pixel at row
/// y + offset(k), offset(k) = anchor - k; taps sum to zero with l1 norm 2.
struct DerivKernel {
  std::vector<double> taps;
  std::ptrdiff_t anchor = 0;
  int scale = 1;

  std::ptrdiff_t offset(std::size_t k) const {
    return anchor - static_cast<std::ptrdiff_t>(k);
  }
};

/// Normalized binomial taps C(2s, j) / 4^s, j = 0..2s; variance s/2.
/// Throws std::invalid_argument for s < 1.
LowPassKernel binomial_kernel(int s);

/// The single tap [1]: identity filter.
LowPassKernel delta_kernel();

/// s = 1: the backward difference [1, -1] (f(y) - f(y-1)).
/// s >= 2: binomial_kernel(s) convolved with [1, -1] (2s+2 taps), rescaled to
/// l1 norm 2 and centered on the half pixel between rows y-1 and y.
/// Throws std::invalid_argument for s < 1.
DerivKernel derivative_kernel(int s);

/// (D_x f, D~_y f): X as in grad(), Y by correlating each column with the
/// kernel under clamped row indices. Throws when the kernel is more than
/// twice the image height.
GradField anisotropic_grad(const ImageGrid& f, const DerivKernel& a);

/// sum w * |(D_x f, D~_y f)|.
double anisotropic_wtv_value(const ImageGrid& f, const WeightField& w, const DerivKernel& a);

/// w = 1 / (|(D_x f, D~_y f)| + eps), eps in HU.
WeightField anisotropic_update_weights(const ImageGrid& f, double eps_hu,
                                       const DerivKernel& a);

/// Exact gradient of anisotropic_wtv_value (w fixed, smoothed denominators).
/// In the interior this is the kernel-weighted sum over the kernel support
/// for the Y part and the usual two-term backward-difference adjoint for X.
ImageGrid ssatv1_gradient(const ImageGrid& f, const WeightField& w, const DerivKernel& a);

/// Regularization at one scale: weights from the scale-s operator once, then
/// up to `steps` descent iterations. s = 1 is the plain wtv_regularize.
RegularizeResult ssatv1_regularize(const ImageGrid& f, double eps_hu, int s, int steps,
                                   const LineSearchParams& params);

/// Same loop for an explicit kernel, without the s = 1 shortcut.
RegularizeResult ssatv1_regularize(const ImageGrid& f, double eps_hu, const DerivKernel& a,
                                   int steps, const LineSearchParams& params);

}  // namespace latomo
