#include "latomo/ssatv2.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "latomo/metrics.hpp"

namespace latomo {
namespace {

std::size_t clamp_row(std::ptrdiff_t y, std::size_t height) {
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height) - 1));
}

void check_scale(int s) {
  if (s < 1) throw std::invalid_argument("resampling scale must be >= 1");
}

}  // namespace

std::size_t downsampled_height(std::size_t height, int s) {
  check_scale(s);
  const auto su = static_cast<std::size_t>(s);
  return (height + su - 1) / su;
}

ImageGrid downsample_y(const ImageGrid& f, int s, const LowPassKernel& h) {
  const std::size_t hd = downsampled_height(f.height(), s);
  const std::size_t width = f.width();
  const auto L = static_cast<std::ptrdiff_t>(h.half_length);
  if (h.taps.size() != 2 * h.half_length + 1) {
    throw std::invalid_argument("low-pass kernel length must be 2L+1");
  }
  ImageGrid out(width, hd, f.pixel_size(), f.origin());
  out.set_row_spacing(f.row_spacing() * s);
  const long cols = static_cast<long>(width);
#pragma omp parallel for schedule(static)
  for (long xl = 0; xl < cols; ++xl) {
    const auto x = static_cast<std::size_t>(xl);
    for (std::size_t yd = 0; yd < hd; ++yd) {
      const auto center = static_cast<std::ptrdiff_t>(yd) * s;
      double acc = 0.0;
      for (std::ptrdiff_t j = -L; j <= L; ++j) {
        acc += h.taps[static_cast<std::size_t>(L - j)] * f.at(x, clamp_row(center + j, f.height()));
      }
      out.at(x, yd) = acc;
    }
  }
  return out;
}

ImageGrid upsample_adjoint_y(const ImageGrid& g_d, int s, const LowPassKernel& h,
                             std::size_t target_height) {
  if (g_d.height() != downsampled_height(target_height, s)) {
    throw std::invalid_argument("upsample_adjoint_y: coarse height " +
                                std::to_string(g_d.height()) + " != ceil(" +
                                std::to_string(target_height) + "/" + std::to_string(s) + ")");
  }
  const std::size_t width = g_d.width();
  const auto L = static_cast<std::ptrdiff_t>(h.half_length);
  ImageGrid out(width, target_height, g_d.pixel_size(), g_d.origin());
  out.set_row_spacing(g_d.row_spacing() / s);
  const long cols = static_cast<long>(width);
#pragma omp parallel for schedule(static)
  for (long xl = 0; xl < cols; ++xl) {
    const auto x = static_cast<std::size_t>(xl);
    for (std::size_t yd = 0; yd < g_d.height(); ++yd) {
      const auto center = static_cast<std::ptrdiff_t>(yd) * s;
      const double v = g_d.at(x, yd);
      for (std::ptrdiff_t j = -L; j <= L; ++j) {
        out.at(x, clamp_row(center + j, target_height)) +=
            h.taps[static_cast<std::size_t>(L - j)] * v;
      }
    }
  }
  return out;
}

LowPassKernel pyramid_kernel(int s) {
  check_scale(s);
  return s == 1 ? delta_kernel() : binomial_kernel(s);
}

PyramidLevel make_pyramid_level(const ImageGrid& f, int s, LowPassKernel h, double eps_hu) {
  PyramidLevel level;
  level.scale = s;
  level.down_height = downsampled_height(f.height(), s);
  if (level.down_height < 2) {
    throw std::invalid_argument("scale " + std::to_string(s) +
                                " leaves fewer than two rows after down-sampling");
  }
  level.weights = update_weights(downsample_y(f, s, h), eps_hu);
  level.lowpass = std::move(h);
  return level;
}

RegularizeResult ssatv2_substep(const ImageGrid& f, PyramidLevel& level, double eps_hu,
                                int steps, const LineSearchParams& params) {
  if (steps < 1) throw std::invalid_argument("ssatv2_substep needs at least one step");
  const int s = level.scale;
  const WeightField& w = level.weights;
  auto value = [&](const ImageGrid& img) { return wtv_value(img, w); };

  ImageGrid out = f;
  RegularizeStats stats;
  ImageGrid f_d = downsample_y(out, s, level.lowpass);
  if (!w.matches(f_d)) throw std::invalid_argument("ssatv2_substep: stale level weights");
  double current = value(f_d);
  stats.objective_before = current;
  for (int m = 0; m < steps; ++m) {
    const ImageGrid g_d = wtv_gradient(f_d, w);
    const Direction dir = normalize_direction(g_d);
    if (dir.converged) {
      stats.converged = true;
      break;
    }
    const double slope = dot(g_d.values(), dir.direction.values());
    const LineSearchResult ls =
        backtracking_line_search(f_d, dir.direction, slope, value, params, current);
    if (ls.step == 0.0) break;
    const ImageGrid g_u = upsample_adjoint_y(dir.direction, s, level.lowpass, f.height());
    subtract_scaled(out, ls.step, g_u, out);
    // The fine update moves f_d by D U g_d rather than g_d; record what it actually reached.
    f_d = downsample_y(out, s, level.lowpass);
    current = value(f_d);
    stats.steps.push_back(ls.step);
    stats.objective_trace.push_back(current);
  }
  stats.objective_after = current;
  level.weights = update_weights(downsample_y(out, s, level.lowpass), eps_hu);
  return {std::move(out), std::move(stats)};
}

}  // namespace latomo
