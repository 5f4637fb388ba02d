#include "sct/types.hpp"

#include <cmath>
#include <stdexcept>

namespace sct {

EnergyGrid EnergyGrid::uniform(int channels, double min_keV, double max_keV) {
    if (channels < 1) throw std::invalid_argument("EnergyGrid: need at least one channel");
    if (channels > 1 && !(max_keV > min_keV))
        throw std::invalid_argument("EnergyGrid: max_keV must exceed min_keV");
    EnergyGrid g;
    g.num_channels = channels;
    g.energies_keV.resize(channels);
    if (channels == 1) {
        g.energies_keV[0] = min_keV;
        return g;
    }
    const double step = (max_keV - min_keV) / (channels - 1);
    for (int k = 0; k < channels; ++k) g.energies_keV[k] = min_keV + step * k;
    g.energies_keV.back() = max_keV;
    return g;
}

int nearest_channel(const EnergyGrid& grid, double keV) {
    int best = 0;
    double best_d = std::abs(grid.energies_keV[0] - keV);
    for (int k = 1; k < grid.num_channels; ++k) {
        const double d = std::abs(grid.energies_keV[k] - keV);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

void counts_to_mu(std::span<const double> transmitted, std::span<const double> incident,
                  std::span<double> mu_out, double cap) {
    if (transmitted.size() != incident.size() || transmitted.size() != mu_out.size())
        throw std::invalid_argument("counts_to_mu: shape mismatch");
    for (std::size_t i = 0; i < transmitted.size(); ++i) {
        const double i0 = incident[i];
        const double it = transmitted[i];
        if (!(i0 > 0.0)) throw std::domain_error("counts_to_mu: incident counts must be positive");
        if (it < 0.0) throw std::domain_error("counts_to_mu: negative transmitted counts");
        mu_out[i] = it == 0.0 ? cap : std::min(-std::log(it / i0), cap);
    }
}

namespace {
void require_finite(const SpectralImage& img, const char* who) {
    for (double v : img.data)
        if (!std::isfinite(v)) throw std::domain_error(std::string(who) + ": non-finite input");
}
} // namespace

SpectralImage scale_to_unit(const SpectralImage& img, const ScaleReference& ref) {
    if (!(ref.max_attenuation > 0.0))
        throw std::invalid_argument("scale_to_unit: reference must be positive");
    require_finite(img, "scale_to_unit");
    SpectralImage out = img;
    const double inv = 1.0 / ref.max_attenuation;
    for (double& v : out.data) v *= inv;
    return out;
}

SpectralImage rescale_from_unit(const SpectralImage& img, const ScaleReference& ref) {
    if (!(ref.max_attenuation > 0.0))
        throw std::invalid_argument("rescale_from_unit: reference must be positive");
    require_finite(img, "rescale_from_unit");
    SpectralImage out = img;
    for (double& v : out.data) v *= ref.max_attenuation;
    return out;
}

} // namespace sct
