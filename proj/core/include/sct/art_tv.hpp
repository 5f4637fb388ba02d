#pragma once

#include "sct/geometry.hpp"
#include "sct/types.hpp"

namespace sct {

struct ArtTvConfig {
    int outer_iters = 200;          // I
    int tv_iters = 30;              // T
    double art_relaxation = 1.0;    // in (0, 2]
    double relaxation_decay = 0.99; // multiplied in per outer iteration
    double tv_step_ratio = 0.2;     // TV step = ratio * ||ART update||
    bool nonneg = true;
};

/// Per-channel ART-TV: each outer iteration is one full relaxed Kaczmarz
/// sweep in view-major ray order, a non-negativity clamp, then tv_iters TV
/// descent steps sized by the sweep's update norm.
/// Throws numerical_error if the data residual grows past 10x its initial
/// value.
SpectralImage art_tv_reconstruct(const SpectralSinogram& sino, const ScanGeometry& geo,
                                 const ArtTvConfig& cfg = {});

} // namespace sct
