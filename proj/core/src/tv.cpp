#include "latomo/tv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latomo/metrics.hpp"

namespace latomo {

double GradField::magnitude(std::size_t i) const { return std::hypot(dx[i], dy[i]); }

WeightField WeightField::uniform(std::size_t width, std::size_t height, double value) {
  return {width, height, std::vector<double>(width * height, value)};
}

void LineSearchParams::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("line search alpha must lie in (0, 0.5)");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("line search beta must lie in (0, 1)");
  }
  if (!(t0 > 0.0)) throw std::invalid_argument("line search t0 must be > 0");
  if (max_shrinks < 0) throw std::invalid_argument("line search max_shrinks must be >= 0");
}

GradField grad(const ImageGrid& f) {
  const std::size_t w = f.width();
  const std::size_t h = f.height();
  GradField g{w, h, std::vector<double>(w * h), std::vector<double>(w * h)};
  const long rows = static_cast<long>(h);
#pragma omp parallel for schedule(static)
  for (long yl = 0; yl < rows; ++yl) {
    const auto y = static_cast<std::size_t>(yl);
    const std::size_t ym = y > 0 ? y - 1 : 0;
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t xm = x > 0 ? x - 1 : 0;
      const double v = f.at(x, y);
      g.dx[y * w + x] = v - f.at(xm, y);
      g.dy[y * w + x] = v - f.at(x, ym);
    }
  }
  return g;
}

double wtv_value(const ImageGrid& f, const WeightField& w) {
  if (!w.matches(f)) throw std::invalid_argument("wtv_value: weight/image size mismatch");
  const GradField g = grad(f);
  const std::size_t width = f.width();
  std::vector<double> rows(f.height());
  const long nrows = static_cast<long>(f.height());
#pragma omp parallel for schedule(static)
  for (long yl = 0; yl < nrows; ++yl) {
    const auto y = static_cast<std::size_t>(yl);
    double s = 0.0;
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = y * width + x;
      s += w.values[i] * std::sqrt(g.dx[i] * g.dx[i] + g.dy[i] * g.dy[i]);
    }
    rows[y] = s;
  }
  return pairwise_sum(rows);
}

WeightField update_weights(const ImageGrid& f, double eps_hu) {
  if (!(eps_hu > 0.0)) throw std::invalid_argument("eps must be > 0 HU");
  const double eps = hu_delta_to_mu(eps_hu);
  const GradField g = grad(f);
  WeightField w{f.width(), f.height(), std::vector<double>(f.size())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    w.values[i] = 1.0 / (std::sqrt(g.dx[i] * g.dx[i] + g.dy[i] * g.dy[i]) + eps);
  }
  return w;
}

ImageGrid wtv_gradient(const ImageGrid& f, const WeightField& w) {
  if (!w.matches(f)) throw std::invalid_argument("wtv_gradient: weight/image size mismatch");
  const std::size_t width = f.width();
  const std::size_t height = f.height();
  const GradField d = grad(f);
  constexpr double d2 = kGradientSmoothing * kGradientSmoothing;

  // q = w * D f / |D f|_smoothed, per component.
  std::vector<double> qx(f.size());
  std::vector<double> qy(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double inv = w.values[i] / std::sqrt(d.dx[i] * d.dx[i] + d.dy[i] * d.dy[i] + d2);
    qx[i] = d.dx[i] * inv;
    qy[i] = d.dy[i] * inv;
  }

  ImageGrid g = f.zeros_like();
  const long rows = static_cast<long>(height);
#pragma omp parallel for schedule(static)
  for (long yl = 0; yl < rows; ++yl) {
    const auto y = static_cast<std::size_t>(yl);
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = y * width + x;
      double v = qx[i] + qy[i];
      if (x + 1 < width) v -= qx[i + 1];
      if (y + 1 < height) v -= qy[i + width];
      g[i] = v;
    }
  }
  return g;
}

Direction normalize_direction(const ImageGrid& g) {
  double m = 0.0;
  for (double v : g.values()) m = std::max(m, std::abs(v));
  Direction d{g.zeros_like(), m, m == 0.0};
  if (d.converged) return d;
  for (std::size_t i = 0; i < g.size(); ++i) d.direction[i] = g[i] / m;
  return d;
}

void subtract_scaled(const ImageGrid& f, double t, const ImageGrid& d, ImageGrid& out) {
  if (!f.same_shape(d) || !f.same_shape(out)) {
    throw std::invalid_argument("subtract_scaled: shape mismatch");
  }
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] - t * d[i];
}

LineSearchResult backtracking_line_search(const ImageGrid& f, const ImageGrid& direction,
                                          double slope, const Objective& objective,
                                          const LineSearchParams& params, double f_value) {
  params.validate();
  ImageGrid trial = f;
  double t = params.t0;
  for (int k = 0; k <= params.max_shrinks; ++k) {
    subtract_scaled(f, t, direction, trial);
    const double v = objective(trial);
    if (v <= f_value - params.alpha * t * slope) return {t, v, k + 1};
    t *= params.beta;
  }
  return {0.0, f_value, params.max_shrinks + 1};
}

LineSearchResult backtracking_line_search(const ImageGrid& f, const ImageGrid& direction,
                                          double slope, const Objective& objective,
                                          const LineSearchParams& params) {
  return backtracking_line_search(f, direction, slope, objective, params, objective(f));
}

namespace detail {

RegularizeResult descend(ImageGrid f, int steps, const Objective& value,
                         const std::function<ImageGrid(const ImageGrid&)>& gradient,
                         const LineSearchParams& params) {
  if (steps < 1) throw std::invalid_argument("regularization needs at least one step");
  RegularizeStats stats;
  double current = value(f);
  stats.objective_before = current;
  for (int m = 0; m < steps; ++m) {
    const ImageGrid g = gradient(f);
    const Direction dir = normalize_direction(g);
    if (dir.converged) {
      stats.converged = true;
      break;
    }
    const double slope = dot(g.values(), dir.direction.values());
    const LineSearchResult ls =
        backtracking_line_search(f, dir.direction, slope, value, params, current);
    if (ls.step == 0.0) break;
    subtract_scaled(f, ls.step, dir.direction, f);
    current = ls.value;
    stats.steps.push_back(ls.step);
    stats.objective_trace.push_back(current);
  }
  stats.objective_after = current;
  return {std::move(f), std::move(stats)};
}

}  // namespace detail

RegularizeResult wtv_regularize(const ImageGrid& f, double eps_hu, int steps,
                                const LineSearchParams& params) {
  const WeightField w = update_weights(f, eps_hu);
  return detail::descend(
      f, steps, [&](const ImageGrid& img) { return wtv_value(img, w); },
      [&](const ImageGrid& img) { return wtv_gradient(img, w); }, params);
}

}  // namespace latomo
