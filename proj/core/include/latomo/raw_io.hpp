#pragma once

#include <filesystem>

#include "latomo/image.hpp"

namespace latomo {

// Raw dump layout (little-endian):
//   u32 width | u32 height | f32 pixel_size | u32 reserved (0) | f32 data[width*height]
// Sinograms use width = channels, height = views, pixel_size = channel size.
inline constexpr std::size_t kRawHeaderBytes = 16;

void write_raw(const std::filesystem::path& path, const ImageGrid& img);
ImageGrid read_raw(const std::filesystem::path& path);

void write_raw(const std::filesystem::path& path, const Sinogram& sino,
               double channel_size);
/// View angles are not stored in the file; the caller supplies them.
Sinogram read_raw_sinogram(const std::filesystem::path& path,
                           std::vector<double> view_angles_deg);

/// 16-bit binary PGM. HU values are clamped to [window_lo, window_hi] and mapped
/// affinely onto 0..65535; the top row of the file is the +Y edge of the image.
void write_pgm16(const std::filesystem::path& path, const ImageGrid& img,
                 double window_lo_hu, double window_hi_hu);

/// Same, for images already holding HU differences (e.g. recon - truth).
void write_pgm16_difference(const std::filesystem::path& path, const ImageGrid& diff_mu,
                            double window_lo_hu, double window_hi_hu);

}  // namespace latomo
