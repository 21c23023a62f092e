#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "latomo/image.hpp"
#include "latomo/metrics.hpp"
#include "latomo/raw_io.hpp"
#include "support.hpp"

namespace latomo {
namespace {

using testing::random_image;

TEST(HuConversion, AnchorPoints) {
  EXPECT_DOUBLE_EQ(hu_to_mu(0.0), 0.02);
  EXPECT_DOUBLE_EQ(hu_to_mu(-1000.0), 0.0);
  EXPECT_DOUBLE_EQ(hu_to_mu(1000.0), 0.04);
  EXPECT_NEAR(mu_to_hu(0.02), 0.0, 1e-12);
  EXPECT_NEAR(mu_to_hu(0.0), -1000.0, 1e-12);
  EXPECT_NEAR(mu_to_hu(0.03), 500.0, 1e-9);
}

TEST(HuConversion, RoundTripWithinRelativeTolerance) {
  for (double hu = -1e5; hu <= 1e5; hu += 137.25) {
    const double back = mu_to_hu(hu_to_mu(hu));
    EXPECT_LE(std::abs(back - hu), 1e-12 * std::max(1.0, std::abs(hu))) << hu;
  }
}

TEST(ImageGrid, RejectsBadConstruction) {
  EXPECT_THROW(ImageGrid(0, 4, 1.0), std::invalid_argument);
  EXPECT_THROW(ImageGrid(4, 4, 0.0), std::invalid_argument);
  EXPECT_THROW(ImageGrid(2, 2, 1.0, std::vector<double>(3)), std::invalid_argument);
}

TEST(ImageGrid, PixelCentersAreIsocentricWithYUp) {
  const ImageGrid img(4, 2, 0.5);
  const Point2 c00 = img.pixel_center(0, 0);
  EXPECT_DOUBLE_EQ(c00.x, -0.75);
  EXPECT_DOUBLE_EQ(c00.y, -0.25);
  const Point2 c31 = img.pixel_center(3, 1);
  EXPECT_DOUBLE_EQ(c31.x, 0.75);
  EXPECT_DOUBLE_EQ(c31.y, 0.25);
}

TEST(Sinogram, AnglesMustIncrease) {
  EXPECT_THROW(Sinogram({10.0, 10.0}, 4), std::invalid_argument);
  EXPECT_NO_THROW(Sinogram({10.0, 11.0}, 4));
}

TEST(RoiRmse, IdenticalImagesGiveZero) {
  const ImageGrid a = random_image(6, 5, 1);
  EXPECT_EQ(roi_rmse(a, a, full_roi(a)), 0.0);
}

TEST(RoiRmse, UniformOffsetInsideRoi) {
  const ImageGrid ref = random_image(8, 8, 2);
  ImageGrid img = ref;
  const RoiRect roi{2, 3, 5, 6};
  for (std::size_t y = roi.y0; y <= roi.y1; ++y) {
    for (std::size_t x = roi.x0; x <= roi.x1; ++x) img.at(x, y) += hu_delta_to_mu(10.0);
  }
  EXPECT_NEAR(roi_rmse(img, ref, roi), 10.0, 1e-9);
}

TEST(RoiRmse, MatchesBruteForceOracle) {
  const ImageGrid a = random_image(4, 4, 3);
  const ImageGrid b = random_image(4, 4, 4);
  const RoiRect roi{1, 0, 3, 2};
  double sum = 0.0;
  for (std::size_t y = 0; y <= 2; ++y) {
    for (std::size_t x = 1; x <= 3; ++x) {
      const double d = mu_to_hu(a.at(x, y)) - mu_to_hu(b.at(x, y));
      sum += d * d;
    }
  }
  EXPECT_NEAR(roi_rmse(a, b, roi), std::sqrt(sum / 9.0), 1e-9);
  EXPECT_EQ(roi_rmse(a, b, roi), roi_rmse(b, a, roi));
}

TEST(RoiRmse, FullGridAgainstZeroIsRmsInHu) {
  const ImageGrid a = random_image(5, 7, 5);
  const ImageGrid zero = a.zeros_like();
  double sum = 0.0;
  for (double v : a.values()) sum += std::pow(mu_to_hu(v) - mu_to_hu(0.0), 2);
  EXPECT_NEAR(roi_rmse(a, zero, full_roi(a)), std::sqrt(sum / 35.0), 1e-9);
}

TEST(RoiRmse, RejectsMismatch) {
  const ImageGrid a(4, 4, 1.0);
  const ImageGrid b(4, 5, 1.0);
  EXPECT_THROW(roi_rmse(a, b, full_roi(a)), std::invalid_argument);
  EXPECT_THROW(roi_rmse(a, a, RoiRect{0, 0, 4, 0}), std::invalid_argument);
}

TEST(RoiFromMm, SelectsPixelCentersInside) {
  const ImageGrid img(8, 8, 1.0);  // centers at -3.5 .. 3.5
  const RoiRect r = roi_from_mm(img, -1.0, 0.0, 2.0, 3.0);
  EXPECT_EQ(r.x0, 3u);
  EXPECT_EQ(r.x1, 5u);
  EXPECT_EQ(r.y0, 4u);
  EXPECT_EQ(r.y1, 6u);
  EXPECT_THROW(roi_from_mm(img, 10.0, 10.0, 11.0, 11.0), std::invalid_argument);
}

TEST(PairwiseSum, MatchesLongDoubleReference) {
  const auto v = testing::random_vector(10000, 6);
  long double ref = 0.0L;
  for (double x : v) ref += x;
  EXPECT_NEAR(pairwise_sum(v), static_cast<double>(ref), 1e-10);
}

class RawIo : public ::testing::Test {
 protected:
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "latomo_test_raw";
  void SetUp() override { std::filesystem::create_directories(dir); }
  void TearDown() override { std::filesystem::remove_all(dir); }
};

TEST_F(RawIo, ImageRoundTripIsBitExactForFloatValues) {
  ImageGrid img = random_image(7, 5, 7, 0.0, 0.04, 0.75);
  for (double& v : img.values()) v = static_cast<float>(v);
  write_raw(dir / "a.raw", img);
  EXPECT_EQ(std::filesystem::file_size(dir / "a.raw"), kRawHeaderBytes + 4 * 35);
  const ImageGrid back = read_raw(dir / "a.raw");
  ASSERT_EQ(back.width(), 7u);
  ASSERT_EQ(back.height(), 5u);
  EXPECT_EQ(back.pixel_size(), 0.75);
  EXPECT_EQ(back.storage(), img.storage());
}

TEST_F(RawIo, HeaderIsLittleEndian) {
  write_raw(dir / "h.raw", ImageGrid(3, 2, 0.5));
  std::ifstream in(dir / "h.raw", std::ios::binary);
  unsigned char h[16];
  in.read(reinterpret_cast<char*>(h), 16);
  EXPECT_EQ(h[0], 3);
  EXPECT_EQ(h[1], 0);
  EXPECT_EQ(h[4], 2);
  // 0.5f = 0x3F000000
  EXPECT_EQ(h[8], 0x00);
  EXPECT_EQ(h[11], 0x3F);
}

TEST_F(RawIo, SinogramRoundTrip) {
  Sinogram s({1.0, 2.0, 3.0}, 4);
  for (std::size_t i = 0; i < s.values().size(); ++i) s.values()[i] = 0.25 * static_cast<double>(i);
  write_raw(dir / "s.raw", s, 0.5);
  const Sinogram back = read_raw_sinogram(dir / "s.raw", {1.0, 2.0, 3.0});
  ASSERT_EQ(back.num_channels(), 4u);
  for (std::size_t i = 0; i < s.values().size(); ++i) EXPECT_EQ(back.values()[i], s.values()[i]);
}

TEST_F(RawIo, PgmWindowMapsToFullRange) {
  ImageGrid img(2, 1, 1.0);
  img.at(0, 0) = hu_to_mu(-50.0);
  img.at(1, 0) = hu_to_mu(200.0);
  write_pgm16(dir / "p.pgm", img, 0.0, 100.0);
  std::ifstream in(dir / "p.pgm", std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxv = 0;
  in >> magic >> w >> h >> maxv;
  in.get();
  unsigned char px[4];
  in.read(reinterpret_cast<char*>(px), 4);
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(maxv, 65535);
  EXPECT_EQ(px[0] * 256 + px[1], 0);
  EXPECT_EQ(px[2] * 256 + px[3], 65535);
}

}  // namespace
}  // namespace latomo
