#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace latomo {

template <class Emit>
void trace_ray(Point2 src, Point2 dst, const GridBox& box, Emit&& emit) {
  const double ddx = dst.x - src.x;
  const double ddy = dst.y - src.y;
  const double len = std::hypot(ddx, ddy);
  if (!(len > 0.0)) return;

  const double xmax = box.xmin + static_cast<double>(box.nx) * box.dx;
  const double ymax = box.ymin + static_cast<double>(box.ny) * box.dy;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double parallel_tol = 1e-14 * len;

  double amin = 0.0;
  double amax = 1.0;
  auto clip = [&](double s, double d, double lo, double hi) {
    if (std::abs(d) <= parallel_tol) return s > lo && s < hi;
    double a0 = (lo - s) / d;
    double a1 = (hi - s) / d;
    if (a0 > a1) std::swap(a0, a1);
    amin = std::max(amin, a0);
    amax = std::min(amax, a1);
    return true;
  };
  if (!clip(src.x, ddx, box.xmin, xmax) || !clip(src.y, ddy, box.ymin, ymax)) return;
  if (!(amin < amax)) return;

  // Next plane crossing along one axis, tracked by integer plane index so
  // that long rays do not accumulate drift.
  struct Axis {
    double s, d, lo, step;
    long k;
    int dir;
    double alpha() const {
      return dir == 0 ? kInf : (lo + static_cast<double>(k) * step - s) / d;
    }
  };
  auto make_axis = [&](double s, double d, double lo, double step) {
    Axis ax{s, d, lo, step, 0, 0};
    if (std::abs(d) <= parallel_tol) return ax;
    const double pos = (s + amin * d - lo) / step;
    if (d > 0.0) {
      ax.dir = 1;
      ax.k = static_cast<long>(std::floor(pos)) + 1;
      while (ax.alpha() <= amin) ++ax.k;
    } else {
      ax.dir = -1;
      ax.k = static_cast<long>(std::ceil(pos)) - 1;
      while (ax.alpha() <= amin) --ax.k;
    }
    return ax;
  };
  Axis ax = make_axis(src.x, ddx, box.xmin, box.dx);
  Axis ay = make_axis(src.y, ddy, box.ymin, box.dy);

  const long nx = static_cast<long>(box.nx);
  const long ny = static_cast<long>(box.ny);
  double a_cur = amin;
  for (;;) {
    const double nax = ax.alpha();
    const double nay = ay.alpha();
    const double a_next = std::min({nax, nay, amax});
    if (a_next > a_cur) {
      const double mid = 0.5 * (a_cur + a_next);
      long px = static_cast<long>(std::floor((src.x + mid * ddx - box.xmin) / box.dx));
      long py = static_cast<long>(std::floor((src.y + mid * ddy - box.ymin) / box.dy));
      px = std::clamp(px, 0L, nx - 1);
      py = std::clamp(py, 0L, ny - 1);
      emit(static_cast<std::size_t>(py * nx + px), (a_next - a_cur) * len);
    }
    if (a_next >= amax) break;
    if (nax <= a_next) ax.k += ax.dir;
    if (nay <= a_next) ay.k += ay.dir;
    a_cur = a_next;
  }
}

}  // namespace latomo
