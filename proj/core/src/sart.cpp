#include "latomo/sart.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latomo/metrics.hpp"

namespace latomo {
namespace {

void check_inputs(const ImageGrid& f, const Sinogram& p, const FanBeamProjector& projector,
                  double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("SART relaxation must satisfy 0 < lambda <= 1");
  }
  if (!projector.matches(f)) throw std::invalid_argument("SART: image/grid mismatch");
  if (p.num_views() != projector.num_views() ||
      p.num_channels() != projector.num_channels()) {
    throw std::invalid_argument("SART: sinogram does not match the geometry");
  }
}

}  // namespace

void sart_view_update_inplace(ImageGrid& f, const Sinogram& p,
                              const FanBeamProjector& projector, std::size_t view_index,
                              double lambda, SartWorkspace& work) {
  check_inputs(f, p, projector, lambda);
  const std::size_t channels = projector.num_channels();
  const std::size_t n = f.size();
  work.residual.resize(channels);
  work.numerator.assign(n, 0.0);
  work.denominator.assign(n, 0.0);

  projector.forward_view(f, view_index, work.residual);
  const auto measured = p.view(view_index);
  std::vector<double> ones(channels, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    const double rs = projector.row_sum(view_index, c);
    if (rs > 0.0) {
      work.residual[c] = (measured[c] - work.residual[c]) / rs;
      ones[c] = 1.0;
    } else {
      work.residual[c] = 0.0;
    }
  }
  projector.back_project_add(work.residual, view_index, work.numerator);
  projector.back_project_add(ones, view_index, work.denominator);

  auto values = f.values();
  for (std::size_t j = 0; j < n; ++j) {
    if (work.denominator[j] > 0.0) {
      values[j] += lambda * work.numerator[j] / work.denominator[j];
    }
  }
}

ImageGrid sart_view_update(const ImageGrid& f, const Sinogram& p,
                           const FanBeamProjector& projector, std::size_t view_index,
                           double lambda) {
  ImageGrid out = f;
  SartWorkspace work;
  sart_view_update_inplace(out, p, projector, view_index, lambda, work);
  return out;
}

void sart_sweep(ImageGrid& f, const Sinogram& p, const FanBeamProjector& projector,
                double lambda, SartWorkspace& work) {
  for (std::size_t v = 0; v < projector.num_views(); ++v) {
    sart_view_update_inplace(f, p, projector, v, lambda, work);
  }
}

void clamp_nonnegative(ImageGrid& f) {
  for (double& v : f.values()) v = std::max(v, 0.0);
}

ImageGrid apply_nonnegativity(ImageGrid f) {
  clamp_nonnegative(f);
  return f;
}

double relative_residual(const ImageGrid& f, const Sinogram& p,
                         const FanBeamProjector& projector) {
  const Sinogram est = projector.forward_project(f);
  std::vector<double> diff(p.values().begin(), p.values().end());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = est.values()[i] - diff[i];
  const double denom = norm2(p.values());
  return denom > 0.0 ? norm2(diff) / denom : norm2(diff);
}

}  // namespace latomo
