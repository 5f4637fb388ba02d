#pragma once

#include "sct/fbp.hpp"
#include "sct/geometry.hpp"
#include "sct/types.hpp"
#include "sct/unet.hpp"

namespace sct {

/// Two-step reconstruction: per-channel FBP, network refinement of the scaled
/// image, rescale, clamp to [0, ref.max_attenuation]. A single-channel model
/// (cfg.channels == 1) is applied channel by channel.
SpectralImage dsir_reconstruct(const SpectralSinogram& sino, const ScanGeometry& geo,
                               const UNetModel& model, const ScaleReference& ref = {},
                               const FilterConfig& filter = {});

} // namespace sct
