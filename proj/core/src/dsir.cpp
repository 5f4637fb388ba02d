#include "sct/dsir.hpp"

#include <algorithm>
#include <stdexcept>

namespace sct {

SpectralImage dsir_reconstruct(const SpectralSinogram& sino, const ScanGeometry& geo,
                               const UNetModel& model, const ScaleReference& ref,
                               const FilterConfig& filter) {
    if (geo.image_size != model.cfg.input_size)
        throw std::invalid_argument("dsir_reconstruct: model input size != image grid");
    if (model.cfg.channels != sino.channels && model.cfg.channels != 1)
        throw std::invalid_argument("dsir_reconstruct: model channels fit neither joint nor "
                                    "channel-by-channel use");

    const SpectralImage fbp = fbp_reconstruct(sino, geo, filter);
    const SpectralImage scaled = scale_to_unit(fbp, ref);

    Tensor refined(sino.channels, geo.image_size, geo.image_size);
    if (model.cfg.channels == sino.channels) {
        refined = unet_forward(model, image_to_tensor(scaled), false);
    } else {
        // Single-channel variant: refine each channel independently.
        const std::size_t plane = refined.plane_size();
        Tensor one(1, geo.image_size, geo.image_size);
        for (int s = 0; s < sino.channels; ++s) {
            const auto src = scaled.channel(s);
            std::copy(src.begin(), src.end(), one.v.begin());
            const Tensor out = unet_forward(model, one, false);
            std::copy(out.v.begin(), out.v.end(), refined.v.begin() + s * plane);
        }
    }

    SpectralImage img = rescale_from_unit(tensor_to_image(refined, geo.pixel_size_cm), ref);
    for (double& v : img.data) v = std::clamp(v, 0.0, ref.max_attenuation);
    return img;
}

} // namespace sct
