#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "latomo/geometry.hpp"
#include "latomo/image.hpp"
#include "latomo/tv.hpp"

namespace latomo::testing {

inline ImageGrid random_image(std::size_t w, std::size_t h, std::uint64_t seed,
                              double lo = 0.0, double hi = 0.04, double pixel_size = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  ImageGrid img(w, h, pixel_size);
  for (double& v : img.values()) v = u(rng);
  return img;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline WeightField random_weights(std::size_t w, std::size_t h, std::uint64_t seed) {
  WeightField wf{w, h, random_vector(w * h, seed, 0.5, 2.0)};
  return wf;
}

// Short-throw scanner that covers a 32 mm grid with 16 channels.
inline FanBeamGeometry small_geometry(std::size_t channels = 16, double channel_size = 6.0) {
  FanBeamGeometry g;
  g.source_to_detector = 200.0;
  g.source_to_isocenter = 100.0;
  g.detector_channels = channels;
  g.channel_size = channel_size;
  g.angle_start = 10.0;
  g.angle_end = 170.0;
  g.angle_increment = 8.0;
  return g;
}

// Central differences of a scalar functional, one pixel at a time.
template <class Fn>
ImageGrid numeric_gradient(const ImageGrid& f, Fn&& value, double step = 1e-7) {
  ImageGrid g = f.zeros_like();
  ImageGrid probe = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double keep = probe[i];
    probe[i] = keep + step;
    const double up = value(probe);
    probe[i] = keep - step;
    const double down = value(probe);
    probe[i] = keep;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

inline double relative_l2(const ImageGrid& a, const ImageGrid& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace latomo::testing
