#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "latomo/image.hpp"

namespace latomo {

/// Smoothing added under the square root of gradient-magnitude denominators,
/// mm^-1. Keeps flat pixels finite without visibly changing real edges.
inline constexpr double kGradientSmoothing = 1e-8;

/// Per-pixel (D_x f, D_y f) in mm^-1 per pixel step.
struct GradField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> dx;
  std::vector<double> dy;

  double magnitude(std::size_t i) const;
};

/// Per-pixel reweighting factors, mm.
struct WeightField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  static WeightField uniform(std::size_t width, std::size_t height, double value);
  bool matches(const ImageGrid& img) const {
    return width == img.width() && height == img.height();
  }
};

/// Backtracking (Armijo) line search settings.
struct LineSearchParams {
  double alpha = 0.3;   // sufficient-decrease fraction
  double beta = 0.6;    // step shrink factor
  double t0 = 4e-4;     // initial step, mm^-1 (about 20 HU)
  int max_shrinks = 30;

  /// Throws std::invalid_argument naming the bad field.
  void validate() const;
};

/// Backward differences with clamped borders:
///   D_x f(x,y) = f(x,y) - f(x-1,y),  D_y f(x,y) = f(x,y) - f(x,y-1),
/// zero on the x = 0 column and y = 0 row respectively.
GradField grad(const ImageGrid& f);

/// sum_xy w(x,y) * |D f(x,y)|.
double wtv_value(const ImageGrid& f, const WeightField& w);

/// w = 1 / (|D f| + eps), with eps given in HU and converted to mm^-1.
WeightField update_weights(const ImageGrid& f, double eps_hu);

/// Gradient of wtv_value with respect to every pixel, w held fixed.
/// Denominators use sqrt(|D f|^2 + kGradientSmoothing^2).
ImageGrid wtv_gradient(const ImageGrid& f, const WeightField& w);

struct Direction {
  ImageGrid direction;  // g / max|g|
  double scale = 0.0;   // max|g|
  bool converged = false;
};

/// Max-abs normalization. A zero gradient yields a zero direction and
/// `converged = true`.
Direction normalize_direction(const ImageGrid& g);

using Objective = std::function<double(const ImageGrid&)>;

struct LineSearchResult {
  double step = 0.0;   // 0 when no trial satisfied the Armijo condition
  double value = 0.0;  // objective at the accepted point (or at f when step = 0)
  int trials = 0;
};

/// Tries t = t0 * beta^k for k = 0..max_shrinks and accepts the first with
///   objective(f - t*direction) <= objective(f) - alpha * t * slope,
/// where slope = <g, direction> for the unnormalized gradient g.
LineSearchResult backtracking_line_search(const ImageGrid& f, const ImageGrid& direction,
                                          double slope, const Objective& objective,
                                          const LineSearchParams& params);
/// Same, with objective(f) already known.
LineSearchResult backtracking_line_search(const ImageGrid& f, const ImageGrid& direction,
                                          double slope, const Objective& objective,
                                          const LineSearchParams& params, double f_value);

/// Bookkeeping from one regularization pass.
struct RegularizeStats {
  double objective_before = 0.0;
  double objective_after = 0.0;
  std::vector<double> objective_trace;  // after each accepted step
  std::vector<double> steps;            // accepted step sizes
  bool converged = false;               // stopped on a zero gradient

  int steps_accepted() const { return static_cast<int>(steps.size()); }
};

struct RegularizeResult {
  ImageGrid image;
  RegularizeStats stats;
};

/// Weighted-TV regularization: weights from `f` once, then up to `steps`
/// normalized gradient-descent iterations with backtracking line search on
/// the frozen-weight objective. Stops early on a zero gradient or a failed
/// line search.
RegularizeResult wtv_regularize(const ImageGrid& f, double eps_hu, int steps,
                                const LineSearchParams& params);

/// f - t * d, elementwise.
void subtract_scaled(const ImageGrid& f, double t, const ImageGrid& d, ImageGrid& out);

namespace detail {
/// Shared descent loop for frozen-weight objectives.
RegularizeResult descend(ImageGrid f, int steps, const Objective& value,
                         const std::function<ImageGrid(const ImageGrid&)>& gradient,
                         const LineSearchParams& params);
}  // namespace detail

}  // namespace latomo
