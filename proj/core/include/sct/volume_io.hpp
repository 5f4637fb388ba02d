#pragma once

#include <cstdint>
#include <string>

#include "sct/types.hpp"

namespace sct {

enum class VolumeKind : std::uint32_t { Image = 0, Sinogram = 1 };

struct VolumeHeader {
    VolumeKind kind = VolumeKind::Image;
    std::uint32_t dims[3] = {0, 0, 0}; // (S, H, W) or (S, V, D)
    std::uint64_t config_hash = 0;
};

/// Binary volume format: magic "SCTV", version, axis tag, dims as u32,
/// producing-config hash, payload as 32-bit little-endian reals,
/// channel-major. Lossless round trip at 32-bit precision.
void write_volume(const std::string& path, const SpectralImage& img, std::uint64_t config_hash);
void write_volume(const std::string& path, const SpectralSinogram& sino,
                  std::uint64_t config_hash);

VolumeHeader peek_volume(const std::string& path);

/// Angles are not part of the format; sinogram consumers restore them from
/// the producing configuration's geometry.
SpectralImage read_volume_image(const std::string& path, double pixel_size_cm = 0.1,
                                VolumeHeader* header = nullptr);
SpectralSinogram read_volume_sinogram(const std::string& path, VolumeHeader* header = nullptr);

/// 8-bit binary PGM of one channel, values clipped to [0, vmax].
void write_pgm(const std::string& path, std::span<const double> plane, int height, int width,
               double vmax);

} // namespace sct
