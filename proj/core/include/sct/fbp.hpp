#pragma once

#include <span>
#include <vector>

#include "sct/geometry.hpp"
#include "sct/types.hpp"

namespace sct {

enum class RampKind { RamLak, HannRamLak };

struct FilterConfig {
    RampKind kind = RampKind::RamLak;
    int zero_pad_factor = 2; // FFT length = next_pow2(zero_pad_factor * bins)
};

/// Band-limited ramp sequence in normalized units (bin spacing = 1):
/// h[0] = 1/4, h[k] = -1/(pi^2 k^2) for odd k, 0 for even k.
std::vector<double> ramp_kernel(int half_length);

/// Convolves every view row with the discrete ramp (optionally Hann-apodized)
/// via zero-padded FFT. Output has the sinogram's shape, normalized units;
/// physical scaling happens in fbp_reconstruct.
void filter_sinogram(std::span<const double> sino, int views, int bins, const FilterConfig& cfg,
                     std::span<double> out);
std::vector<double> filter_sinogram(std::span<const double> sino, int views, int bins,
                                    const FilterConfig& cfg = {});

/// Filtered back projection of every channel: back_project(filter(row)) scaled
/// by pi / (V * pixel_size^2) so a dense-view scan of a disk recovers its mu.
/// No non-negativity clamp; the network consumes raw FBP output.
SpectralImage fbp_reconstruct(const SpectralSinogram& sino, const ScanGeometry& geo,
                              const FilterConfig& cfg = {});

} // namespace sct
