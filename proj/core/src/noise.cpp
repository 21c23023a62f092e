#include "latomo/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "latomo/log.hpp"

namespace latomo {

double PoissonSampler::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PoissonSampler::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t PoissonSampler::inversion(double mean) {
  const double u = uniform();
  const auto mode = static_cast<std::uint64_t>(std::floor(mean));
  const double md = static_cast<double>(mode);
  const double p_mode = std::exp(md * std::log(mean) - mean - std::lgamma(md + 1.0));

  // CDF at the mode by summing the left tail downward.
  double cdf_mode = 0.0;
  {
    double p = p_mode;
    for (std::uint64_t k = mode;; --k) {
      cdf_mode += p;
      if (k == 0 || p < 1e-18 * cdf_mode) break;
      p *= static_cast<double>(k) / mean;
    }
  }

  std::uint64_t k = mode;
  double p = p_mode;
  double cdf = cdf_mode;
  if (u <= cdf) {
    while (k > 0 && cdf - p >= u) {
      cdf -= p;
      p *= static_cast<double>(k) / mean;
      --k;
    }
    return k;
  }
  while (cdf < u) {
    ++k;
    p *= mean / static_cast<double>(k);
    if (p <= 0.0) break;  // tail exhausted by rounding
    cdf += p;
  }
  return k;
}

std::uint64_t PoissonSampler::operator()(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("Poisson mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < kInversionLimit) return inversion(mean);
  const double draw = std::round(mean + std::sqrt(mean) * standard_normal());
  return draw <= 0.0 ? 0 : static_cast<std::uint64_t>(draw);
}

Sinogram add_poisson_noise(const Sinogram& sino, const NoiseSpec& noise) {
  if (!(noise.incident_photons > 0.0) || !std::isfinite(noise.incident_photons)) {
    throw std::invalid_argument("noise.incident_photons must be > 0");
  }
  Sinogram out = sino;
  PoissonSampler sampler(noise.rng_seed);
  const double n0 = noise.incident_photons;
  std::size_t clamped = 0;
  for (double& p : out.values()) {
    if (!std::isfinite(p)) throw std::invalid_argument("add_poisson_noise: non-finite line integral");
    if (p < 0.0) throw std::invalid_argument("add_poisson_noise: negative line integral");
    const std::uint64_t counts = sampler(n0 * std::exp(-p));
    if (counts == 0) ++clamped;
    p = -std::log(static_cast<double>(std::max<std::uint64_t>(counts, 1)) / n0);
  }
  if (clamped > 0) {
    std::ostringstream msg;
    msg << clamped << " sinogram entries had zero counts and were clamped to one photon";
    log::warn(msg.str());
  }
  return out;
}

}  // namespace latomo
