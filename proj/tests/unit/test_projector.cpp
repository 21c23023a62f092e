#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "latomo/metrics.hpp"
#include "latomo/projector.hpp"
#include "latomo/sart.hpp"
#include "latomo/threads.hpp"
#include "support.hpp"

namespace latomo {
namespace {

using testing::random_image;
using testing::random_vector;
using testing::small_geometry;

// Length of segment a->b inside the box [x0,x1]x[y0,y1], by parametric clipping.
double clip_length(Point2 a, Point2 b, double x0, double x1, double y0, double y1) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return 0.0;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  return t1 > t0 ? (t1 - t0) * std::hypot(dx, dy) : 0.0;
}

double oracle_length(const FanBeamGeometry& g, const ImageGrid& grid, std::size_t view,
                     std::size_t channel, std::size_t px, std::size_t py) {
  const double beta = g.view_angles()[view];
  const Point2 c = grid.pixel_center(px, py);
  const double h = 0.5 * grid.pixel_size();
  const double hy = 0.5 * grid.row_spacing();
  return clip_length(g.source_position(beta), g.channel_position(beta, channel), c.x - h,
                     c.x + h, c.y - hy, c.y + hy);
}

// Dense rows of one view, built from unit images.
std::vector<std::vector<double>> dense_view(const FanBeamProjector& P, std::size_t view) {
  const std::size_t n = P.grid_width() * P.grid_height();
  std::vector<std::vector<double>> A(P.num_channels(), std::vector<double>(n, 0.0));
  ImageGrid e = P.make_image();
  std::vector<double> col(P.num_channels());
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    P.forward_view(e, view, col);
    for (std::size_t i = 0; i < col.size(); ++i) A[i][j] = col[i];
    e[j] = 0.0;
  }
  return A;
}

TEST(Geometry, DefaultScanHas161Views) {
  const FanBeamGeometry g;
  EXPECT_EQ(g.num_views(), 161u);
  EXPECT_DOUBLE_EQ(g.view_angles().front(), 10.0);
  EXPECT_DOUBLE_EQ(g.view_angles().back(), 170.0);
  EXPECT_NEAR(g.covered_radius(), 544.0 * std::sin(std::atan(192.0 / 1088.0)), 1e-12);
}

TEST(Geometry, ValidationNamesTheField) {
  FanBeamGeometry g;
  g.source_to_isocenter = 2000.0;
  try {
    g.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("source_to_detector"), std::string::npos);
  }
}

TEST(Geometry, SourceAndDetectorOnOppositeSides) {
  const FanBeamGeometry g;
  const Point2 s = g.source_position(0.0);
  EXPECT_DOUBLE_EQ(s.x, 544.0);
  EXPECT_NEAR(s.y, 0.0, 1e-12);
  const Point2 lo = g.channel_position(0.0, 0);
  const Point2 hi = g.channel_position(0.0, 767);
  EXPECT_NEAR(lo.x, -544.0, 1e-9);
  EXPECT_NEAR(hi.y - lo.y, 767 * 0.5, 1e-9);
}

TEST(ForwardProject, ZeroImageGivesZeroSinogram) {
  const ImageGrid img(16, 16, 2.0);
  const Sinogram s = forward_project(img, small_geometry());
  for (double v : s.values()) EXPECT_EQ(v, 0.0);
}

TEST(ForwardProject, UniformSquareMatchesAnalyticChord) {
  // Central ray at 90 degrees runs along -Y through x = 0, perpendicular to the square.
  FanBeamGeometry g = small_geometry(17, 4.0);
  g.angle_start = 90.0;
  g.angle_end = 90.0;
  const double mu = 0.02;
  ImageGrid img(40, 40, 1.0);
  for (double& v : img.values()) v = mu;
  const Sinogram s = forward_project(img, g);
  EXPECT_NEAR(s.at(0, 8), 40.0 * mu, 0.005 * 40.0 * mu);
  // Off-centre channels cross the square obliquely: chord = 40 / cos(gamma).
  const Point2 src = g.source_position(90.0);
  const Point2 det = g.channel_position(90.0, 12);
  const double cos_gamma = std::abs(det.y - src.y) / std::hypot(det.x - src.x, det.y - src.y);
  EXPECT_NEAR(s.at(0, 12), 40.0 / cos_gamma * mu, 0.005 * 40.0 * mu);
}

TEST(ForwardProject, SinglePixelMatchesClippingOracle) {
  const FanBeamGeometry g = small_geometry();
  const ImageGrid grid(32, 32, 1.0);
  const FanBeamProjector P(g, grid);
  std::size_t hits = 0;
  for (std::size_t v = 0; v < P.num_views(); ++v) {
    for (std::size_t c = 0; c < P.num_channels(); ++c) {
      for (auto [px, py] : {std::pair<std::size_t, std::size_t>{13, 17}, {0, 31}, {20, 4}}) {
        ImageGrid e = P.make_image();
        e.at(px, py) = 1.0;
        std::vector<double> out(P.num_channels());
        P.forward_view(e, v, out);
        const double expect = oracle_length(g, grid, v, c, px, py);
        EXPECT_NEAR(out[c], expect, 1e-6) << v << ' ' << c << ' ' << px << ' ' << py;
        hits += expect > 0.0;
      }
    }
  }
  EXPECT_GT(hits, 20u);
}

TEST(ForwardProject, WholeRayMatchesClippingOracle) {
  const FanBeamGeometry g = small_geometry();
  const ImageGrid grid(12, 9, 2.5);
  const FanBeamProjector P(g, grid);
  for (std::size_t v : {0u, 7u, 15u, 20u}) {
    for (std::size_t c = 0; c < P.num_channels(); ++c) {
      double total = 0.0;
      for (std::size_t y = 0; y < 9; ++y) {
        for (std::size_t x = 0; x < 12; ++x) total += oracle_length(g, grid, v, c, x, y);
      }
      EXPECT_NEAR(P.row_sum(v, c), total, 1e-5);
    }
  }
}

TEST(ForwardProject, Linearity) {
  const FanBeamGeometry g = small_geometry();
  const ImageGrid a = random_image(32, 32, 11);
  const ImageGrid b = random_image(32, 32, 12);
  ImageGrid mix = a.zeros_like();
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.5 * a[i] - 0.75 * b[i];
  const FanBeamProjector P(g, a);
  const Sinogram sa = P.forward_project(a);
  const Sinogram sb = P.forward_project(b);
  const Sinogram sm = P.forward_project(mix);
  for (std::size_t i = 0; i < sm.values().size(); ++i) {
    const double expect = 2.5 * sa.values()[i] - 0.75 * sb.values()[i];
    EXPECT_NEAR(sm.values()[i], expect, 1e-10 * std::max(1.0, std::abs(expect)));
  }
}

TEST(BackProject, ZeroResidualGivesZeroIncrement) {
  const ImageGrid grid(16, 16, 2.0);
  const ImageGrid inc = back_project(std::vector<double>(16, 0.0), small_geometry(), 3, grid);
  for (double v : inc.values()) EXPECT_EQ(v, 0.0);
}

TEST(BackProject, AdjointIdentityOnRandomPairs) {
  const FanBeamGeometry g = small_geometry();
  const FanBeamProjector P(g, ImageGrid(32, 32, 1.0));
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    ImageGrid f = random_image(32, 32, 100 + trial, -1.0, 1.0);
    const std::size_t view = trial % P.num_views();
    const auto q = random_vector(P.num_channels(), 200 + trial);
    std::vector<double> Af(P.num_channels());
    P.forward_view(f, view, Af);
    const ImageGrid Atq = P.back_project(q, view);
    const double lhs = dot(Af, q);
    const double rhs = dot(f.values(), Atq.values());
    EXPECT_LT(std::abs(lhs - rhs) / (norm2(Af) * norm2(q)), 1e-5) << trial;
  }
}

TEST(BackProject, EqualsDenseTranspose) {
  const FanBeamGeometry g = small_geometry();
  const FanBeamProjector P(g, ImageGrid(16, 16, 2.0));
  const auto A = dense_view(P, 5);
  const auto q = random_vector(P.num_channels(), 9);
  const ImageGrid bp = P.back_project(q, 5);
  for (std::size_t j = 0; j < bp.size(); ++j) {
    double expect = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) expect += A[i][j] * q[i];
    EXPECT_NEAR(bp[j], expect, 1e-6 * (1.0 + std::abs(expect)));
  }
}

TEST(BackProject, SinglePixelRayConcentratesOnThatPixel) {
  FanBeamGeometry g = small_geometry(1, 1.0);
  g.angle_start = g.angle_end = 30.0;
  const ImageGrid grid(1, 1, 3.0);
  const FanBeamProjector P(g, grid);
  const ImageGrid inc = P.back_project(std::vector<double>{1.0}, 0);
  EXPECT_NEAR(inc[0], oracle_length(g, grid, 0, 0, 0, 0), 1e-6);
  EXPECT_GT(inc[0], 3.0);
}

TEST(BackProject, OutOfRangeViewThrows) {
  const FanBeamProjector P(small_geometry(), ImageGrid(8, 8, 2.0));
  EXPECT_THROW(P.back_project(std::vector<double>(16, 0.0), P.num_views()), std::out_of_range);
}

TEST(BackProject, ThreadCountDoesNotChangeResults) {
  const FanBeamGeometry g = small_geometry();
  const ImageGrid f = random_image(32, 32, 21);
  const int before = num_threads();
  set_num_threads(1);
  const FanBeamProjector P1(g, f);
  const Sinogram s1 = P1.forward_project(f);
  const ImageGrid b1 = P1.back_project(s1.view(4), 4);
  set_num_threads(4);
  const FanBeamProjector P4(g, f);
  const Sinogram s4 = P4.forward_project(f);
  const ImageGrid b4 = P4.back_project(s4.view(4), 4);
  set_num_threads(before);
  EXPECT_TRUE(std::equal(s1.values().begin(), s1.values().end(), s4.values().begin()));
  EXPECT_EQ(b1.storage(), b4.storage());
}

TEST(ViewSums, RowAndColumnSumsAreNonnegative) {
  const FanBeamProjector P(small_geometry(), ImageGrid(16, 16, 2.0));
  const ViewSums s = P.view_sums(2);
  for (double v : s.row_sums) EXPECT_GE(v, 0.0);
  for (double v : s.column_sums) EXPECT_GE(v, 0.0);
  EXPECT_NEAR(pairwise_sum(s.row_sums), pairwise_sum(s.column_sums), 1e-9);
}

TEST(Sart, ConsistentDataIsFixedPoint) {
  const FanBeamGeometry g = small_geometry();
  const ImageGrid f = random_image(32, 32, 31);
  const FanBeamProjector P(g, f);
  const Sinogram p = P.forward_project(f);
  const ImageGrid out = sart_view_update(f, p, P, 6, 0.8);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(out[i], f[i], 1e-15);
}

TEST(Sart, OneRayOnePixelRecoversValue) {
  FanBeamGeometry g = small_geometry(1, 1.0);
  g.angle_start = g.angle_end = 40.0;
  const ImageGrid grid(1, 1, 2.0);
  const FanBeamProjector P(g, grid);
  const double l = P.row_sum(0, 0);
  Sinogram p(g.view_angles(), 1);
  p.at(0, 0) = 0.03 * l;
  const ImageGrid out = sart_view_update(grid, p, P, 0, 1.0);
  EXPECT_NEAR(out[0], 0.03, 1e-15);
}

TEST(Sart, MatchesDenseMatrixOracle) {
  const FanBeamGeometry g = small_geometry(16, 2.0);
  const ImageGrid f = random_image(8, 8, 41, 0.0, 0.04, 1.0);
  const FanBeamProjector P(g, f);
  Sinogram p(g.view_angles(), P.num_channels());
  const auto noise = random_vector(p.values().size(), 42, 0.0, 0.5);
  std::copy(noise.begin(), noise.end(), p.values().begin());
  const double lambda = 0.8;
  for (std::size_t view : {0u, 9u, 20u}) {
    const auto A = dense_view(P, view);
    const std::size_t n = f.size();
    std::vector<double> num(n, 0.0);
    std::vector<double> den(n, 0.0);
    for (std::size_t i = 0; i < A.size(); ++i) {
      double rowsum = 0.0;
      double proj = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        rowsum += A[i][j];
        proj += A[i][j] * f[j];
      }
      if (rowsum == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        num[j] += (p.at(view, i) - proj) / rowsum * A[i][j];
        den[j] += A[i][j];
      }
    }
    const ImageGrid out = sart_view_update(f, p, P, view, lambda);
    std::size_t touched = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double expect = den[j] > 0.0 ? f[j] + lambda * num[j] / den[j] : f[j];
      touched += den[j] > 0.0;
      EXPECT_LE(std::abs(out[j] - expect), 1e-10 * std::max(std::abs(expect), 1e-3)) << j;
    }
    EXPECT_GT(touched, n / 2);
  }
}

TEST(Sart, RejectsBadRelaxation) {
  const FanBeamGeometry g = small_geometry();
  const ImageGrid f(8, 8, 2.0);
  const FanBeamProjector P(g, f);
  const Sinogram p = P.forward_project(f);
  EXPECT_THROW(sart_view_update(f, p, P, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(sart_view_update(f, p, P, 0, 1.5), std::invalid_argument);
}

TEST(Nonnegativity, ClampsOnlyNegatives) {
  ImageGrid f = random_image(6, 6, 51, -0.01, 0.01);
  f[3] = -0.001;
  const ImageGrid out = apply_nonnegativity(f);
  EXPECT_EQ(out[3], 0.0);
  EXPECT_EQ(out.min_value(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] >= 0.0) EXPECT_EQ(out[i], f[i]);
  }
  const ImageGrid pos = random_image(6, 6, 52, 0.001, 0.01);
  EXPECT_EQ(apply_nonnegativity(pos).storage(), pos.storage());
}

TEST(Sart, SweepReducesResidualOnConsistentData) {
  const FanBeamGeometry g = small_geometry();
  const ImageGrid truth = random_image(32, 32, 61);
  const FanBeamProjector P(g, truth);
  const Sinogram p = P.forward_project(truth);
  ImageGrid f = P.make_image();
  SartWorkspace work;
  double prev = relative_residual(f, p, P);
  EXPECT_DOUBLE_EQ(prev, 1.0);
  for (int it = 0; it < 5; ++it) {
    sart_sweep(f, p, P, 0.8, work);
    const double r = relative_residual(f, p, P);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

}  // namespace
}  // namespace latomo
