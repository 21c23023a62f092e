#include "latomo/raw_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace latomo {
namespace {

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f32(std::vector<unsigned char>& buf, float v) {
  put_u32(buf, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<unsigned char> encode(std::uint32_t w, std::uint32_t h, float spacing,
                                  std::span<const double> values) {
  std::vector<unsigned char> buf;
  buf.reserve(kRawHeaderBytes + 4 * values.size());
  put_u32(buf, w);
  put_u32(buf, h);
  put_f32(buf, spacing);
  put_u32(buf, 0);
  for (double v : values) put_f32(buf, static_cast<float>(v));
  return buf;
}

struct Decoded {
  std::uint32_t w, h;
  float spacing;
  std::vector<double> values;
};

Decoded decode(const std::vector<unsigned char>& buf, const std::filesystem::path& path) {
  if (buf.size() < kRawHeaderBytes) {
    throw std::runtime_error("raw file too short: " + path.string());
  }
  Decoded d{get_u32(buf.data()), get_u32(buf.data() + 4), get_f32(buf.data() + 8), {}};
  const std::size_t n = static_cast<std::size_t>(d.w) * d.h;
  if (buf.size() != kRawHeaderBytes + 4 * n) {
    throw std::runtime_error("raw file size does not match header: " + path.string());
  }
  d.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.values[i] = get_f32(buf.data() + kRawHeaderBytes + 4 * i);
  }
  return d;
}

void write_pgm_hu(const std::filesystem::path& path, std::size_t w, std::size_t h,
                  const auto& hu_at, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("PGM window must satisfy hi > lo");
  const std::string header =
      "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n65535\n";
  std::vector<unsigned char> buf(header.begin(), header.end());
  buf.reserve(buf.size() + 2 * w * h);
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t y = h - 1 - row;
    for (std::size_t x = 0; x < w; ++x) {
      const double v = std::clamp(hu_at(x, y), lo, hi);
      const auto q = static_cast<std::uint16_t>(std::lround((v - lo) / (hi - lo) * 65535.0));
      buf.push_back(static_cast<unsigned char>(q >> 8));  // PGM is big-endian
      buf.push_back(static_cast<unsigned char>(q & 0xFF));
    }
  }
  write_bytes(path, buf);
}

}  // namespace

void write_raw(const std::filesystem::path& path, const ImageGrid& img) {
  write_bytes(path, encode(static_cast<std::uint32_t>(img.width()),
                           static_cast<std::uint32_t>(img.height()),
                           static_cast<float>(img.pixel_size()), img.values()));
}

ImageGrid read_raw(const std::filesystem::path& path) {
  Decoded d = decode(read_bytes(path), path);
  return ImageGrid(d.w, d.h, d.spacing, std::move(d.values));
}

void write_raw(const std::filesystem::path& path, const Sinogram& sino,
               double channel_size) {
  write_bytes(path, encode(static_cast<std::uint32_t>(sino.num_channels()),
                           static_cast<std::uint32_t>(sino.num_views()),
                           static_cast<float>(channel_size), sino.values()));
}

Sinogram read_raw_sinogram(const std::filesystem::path& path,
                           std::vector<double> view_angles_deg) {
  Decoded d = decode(read_bytes(path), path);
  if (d.h != view_angles_deg.size()) {
    throw std::runtime_error("sinogram view count does not match supplied angles: " +
                             path.string());
  }
  return Sinogram(std::move(view_angles_deg), d.w, std::move(d.values));
}

void write_pgm16(const std::filesystem::path& path, const ImageGrid& img,
                 double window_lo_hu, double window_hi_hu) {
  write_pgm_hu(
      path, img.width(), img.height(),
      [&](std::size_t x, std::size_t y) { return mu_to_hu(img.at(x, y)); },
      window_lo_hu, window_hi_hu);
}

void write_pgm16_difference(const std::filesystem::path& path, const ImageGrid& diff_mu,
                            double window_lo_hu, double window_hi_hu) {
  write_pgm_hu(
      path, diff_mu.width(), diff_mu.height(),
      [&](std::size_t x, std::size_t y) { return diff_mu.at(x, y) / kMuPerHu; },
      window_lo_hu, window_hi_hu);
}

}  // namespace latomo
