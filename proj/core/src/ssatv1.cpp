#include "latomo/ssatv1.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latomo/metrics.hpp"

namespace latomo {
namespace {

std::size_t clamp_row(std::ptrdiff_t y, std::size_t height) {
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height) - 1));
}

void check_kernel(const ImageGrid& f, const DerivKernel& a) {
  if (a.taps.empty()) throw std::invalid_argument("derivative kernel has no taps");
  if (a.taps.size() > 2 * f.height()) {
    throw std::invalid_argument("derivative kernel longer than twice the image height");
  }
}

}  // namespace

LowPassKernel binomial_kernel(int s) {
  if (s < 1) throw std::invalid_argument("binomial_kernel: scale must be >= 1");
  const int n = 2 * s;
  LowPassKernel k;
  k.half_length = static_cast<std::size_t>(s);
  k.sigma = std::sqrt(s / 2.0);
  k.taps.resize(static_cast<std::size_t>(n) + 1);
  // Integer binomials stay exact in double for the scales used here.
  double c = 1.0;
  const double norm = std::ldexp(1.0, -n);
  for (int j = 0; j <= n; ++j) {
    k.taps[static_cast<std::size_t>(j)] = c * norm;
    c = c * (n - j) / (j + 1);
  }
  return k;
}

LowPassKernel delta_kernel() { return {{1.0}, 0, 0.0}; }

DerivKernel derivative_kernel(int s) {
  if (s < 1) throw std::invalid_argument("derivative_kernel: scale must be >= 1");
  if (s == 1) return {{1.0, -1.0}, 0, 1};
  const LowPassKernel h = binomial_kernel(s);
  const std::size_t n = h.taps.size() + 1;
  DerivKernel a{std::vector<double>(n, 0.0), s, s};
  for (std::size_t k = 0; k < n; ++k) {
    const double cur = k < h.taps.size() ? h.taps[k] : 0.0;
    const double prev = k > 0 ? h.taps[k - 1] : 0.0;
    a.taps[k] = cur - prev;
  }
  double l1 = 0.0;
  for (double t : a.taps) l1 += std::abs(t);
  for (double& t : a.taps) t *= 2.0 / l1;
  return a;
}

GradField anisotropic_grad(const ImageGrid& f, const DerivKernel& a) {
  check_kernel(f, a);
  GradField g = grad(f);
  const std::size_t w = f.width();
  const std::size_t h = f.height();
  const std::size_t n = a.taps.size();
  // Antisymmetric kernels are summed in pairs so flat regions give exactly 0.
  bool paired = n % 2 == 0;
  for (std::size_t k = 0; paired && k < n / 2; ++k) paired = a.taps[k] == -a.taps[n - 1 - k];
  const long rows = static_cast<long>(h);
#pragma omp parallel for schedule(static)
  for (long yl = 0; yl < rows; ++yl) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      if (paired) {
        for (std::size_t k = 0; k < n / 2; ++k) {
          acc += a.taps[k] * (f.at(x, clamp_row(yl + a.offset(k), h)) -
                              f.at(x, clamp_row(yl + a.offset(n - 1 - k), h)));
        }
      } else {
        for (std::size_t k = 0; k < n; ++k) {
          acc += a.taps[k] * f.at(x, clamp_row(yl + a.offset(k), h));
        }
      }
      g.dy[static_cast<std::size_t>(yl) * w + x] = acc;
    }
  }
  return g;
}

double anisotropic_wtv_value(const ImageGrid& f, const WeightField& w, const DerivKernel& a) {
  if (!w.matches(f)) throw std::invalid_argument("anisotropic_wtv_value: size mismatch");
  const GradField g = anisotropic_grad(f, a);
  const std::size_t width = f.width();
  std::vector<double> rows(f.height());
  for (std::size_t y = 0; y < f.height(); ++y) {
    double s = 0.0;
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = y * width + x;
      s += w.values[i] * std::sqrt(g.dx[i] * g.dx[i] + g.dy[i] * g.dy[i]);
    }
    rows[y] = s;
  }
  return pairwise_sum(rows);
}

WeightField anisotropic_update_weights(const ImageGrid& f, double eps_hu,
                                       const DerivKernel& a) {
  if (!(eps_hu > 0.0)) throw std::invalid_argument("eps must be > 0 HU");
  const double eps = hu_delta_to_mu(eps_hu);
  const GradField g = anisotropic_grad(f, a);
  WeightField w{f.width(), f.height(), std::vector<double>(f.size())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    w.values[i] = 1.0 / (std::sqrt(g.dx[i] * g.dx[i] + g.dy[i] * g.dy[i]) + eps);
  }
  return w;
}

ImageGrid ssatv1_gradient(const ImageGrid& f, const WeightField& w, const DerivKernel& a) {
  if (!w.matches(f)) throw std::invalid_argument("ssatv1_gradient: size mismatch");
  const std::size_t width = f.width();
  const std::size_t height = f.height();
  const GradField d = anisotropic_grad(f, a);
  constexpr double d2 = kGradientSmoothing * kGradientSmoothing;

  std::vector<double> qx(f.size());
  std::vector<double> qy(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double inv = w.values[i] / std::sqrt(d.dx[i] * d.dx[i] + d.dy[i] * d.dy[i] + d2);
    qx[i] = d.dx[i] * inv;
    qy[i] = d.dy[i] * inv;
  }

  ImageGrid g = f.zeros_like();
  const long cols = static_cast<long>(width);
  // Column-parallel: every write stays within the column.
#pragma omp parallel for schedule(static)
  for (long xl = 0; xl < cols; ++xl) {
    const auto x = static_cast<std::size_t>(xl);
    for (std::size_t y = 0; y < height; ++y) {
      const std::size_t i = y * width + x;
      double v = qx[i];
      if (x + 1 < width) v -= qx[i + 1];
      g[i] += v;
      // Y part: transpose of the clamped correlation.
      const double q = qy[i];
      for (std::size_t k = 0; k < a.taps.size(); ++k) {
        const std::size_t yy =
            clamp_row(static_cast<std::ptrdiff_t>(y) + a.offset(k), height);
        g[yy * width + x] += a.taps[k] * q;
      }
    }
  }
  return g;
}

RegularizeResult ssatv1_regularize(const ImageGrid& f, double eps_hu, const DerivKernel& a,
                                   int steps, const LineSearchParams& params) {
  const WeightField w = anisotropic_update_weights(f, eps_hu, a);
  return detail::descend(
      f, steps, [&](const ImageGrid& img) { return anisotropic_wtv_value(img, w, a); },
      [&](const ImageGrid& img) { return ssatv1_gradient(img, w, a); }, params);
}

RegularizeResult ssatv1_regularize(const ImageGrid& f, double eps_hu, int s, int steps,
                                   const LineSearchParams& params) {
  if (s == 1) return wtv_regularize(f, eps_hu, steps, params);
  return ssatv1_regularize(f, eps_hu, derivative_kernel(s), steps, params);
}

}  // namespace latomo
