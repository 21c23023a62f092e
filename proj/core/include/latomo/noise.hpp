#pragma once

#include <cstdint>
#include <random>

#include "latomo/image.hpp"

namespace latomo {

struct NoiseSpec {
  double incident_photons = 5e6;  // unattenuated counts per channel
  std::uint64_t rng_seed = 42;
};

/// Portable Poisson sampler on a 64-bit Mersenne Twister. Means below
/// kInversionLimit are drawn exactly by inversion from the mode; larger means
/// use a rounded normal approximation clamped at zero.
class PoissonSampler {
 public:
  static constexpr double kInversionLimit = 1e4;

  explicit PoissonSampler(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t operator()(double mean);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double standard_normal();

 private:
  std::uint64_t inversion(double mean);

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Transmission noise: for each line integral p, counts N ~ Poisson(N0 exp(-p))
/// and the output is -ln(max(N, 1) / N0). Deterministic for a given seed.
/// Throws std::invalid_argument on non-finite or negative input or N0 <= 0.
Sinogram add_poisson_noise(const Sinogram& sino, const NoiseSpec& noise);

}  // namespace latomo
