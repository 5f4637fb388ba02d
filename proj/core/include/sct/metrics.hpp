#pragma once

#include <string>
#include <vector>

#include "sct/types.hpp"

namespace sct {

/// Scalar summary plus the per-channel breakdown behind it.
struct MetricValue {
    double scalar = 0.0;
    std::vector<double> per_channel;
};

/// Mean absolute difference, overall and per channel.
MetricValue mae(const SpectralImage& a, const SpectralImage& b);

struct SsimConfig {
    int window = 8; // uniform sliding window
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 7.66;
};

/// Classic SSIM with a uniform window, averaged over all window positions
/// per channel; the scalar is the channel mean.
MetricValue ssim(const SpectralImage& a, const SpectralImage& b, const SsimConfig& cfg = {});

/// Per-channel isotropic TV normalized by pixel count (comparable across
/// image sizes); scalar is the channel mean.
MetricValue image_tv(const SpectralImage& img);

struct PatchSpec {
    int row = 0, col = 0, height = 1, width = 1;
    std::string label;
};

struct SpectralProfile {
    std::vector<double> mean; // per channel
    std::vector<double> std;  // population std per channel
};

/// Mean and population std of the patch pixels across every channel.
SpectralProfile spectral_profile(const SpectralImage& img, const PatchSpec& patch);

} // namespace sct
