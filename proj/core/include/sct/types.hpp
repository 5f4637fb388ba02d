#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sct {

/// Midpoint energies of the spectral channels, strictly increasing, in keV.
struct EnergyGrid {
    int num_channels = 0;
    std::vector<double> energies_keV;

    static EnergyGrid uniform(int channels, double min_keV, double max_keV);
    /// 32 channels evenly spaced on [20, 108.2] keV.
    static EnergyGrid standard32() { return uniform(32, 20.0, 108.2); }
};

/// Index of the channel whose midpoint is closest to the requested energy.
int nearest_channel(const EnergyGrid& grid, double keV);

/// S-channel square attenuation map (cm^-1), channel-major storage.
struct SpectralImage {
    int channels = 0;
    int height = 0;
    int width = 0;
    double pixel_size_cm = 0.1;
    std::vector<double> data;

    SpectralImage() = default;
    SpectralImage(int s, int h, int w, double pix_cm = 0.1)
        : channels(s), height(h), width(w), pixel_size_cm(pix_cm),
          data(static_cast<std::size_t>(s) * h * w, 0.0) {}

    double& at(int s, int r, int c) {
        return data[(static_cast<std::size_t>(s) * height + r) * width + c];
    }
    double at(int s, int r, int c) const {
        return data[(static_cast<std::size_t>(s) * height + r) * width + c];
    }
    std::span<double> channel(int s) {
        return {data.data() + static_cast<std::size_t>(s) * height * width,
                static_cast<std::size_t>(height) * width};
    }
    std::span<const double> channel(int s) const {
        return {data.data() + static_cast<std::size_t>(s) * height * width,
                static_cast<std::size_t>(height) * width};
    }
};

/// S-channel projection data: line integrals mu over (view, detector bin).
struct SpectralSinogram {
    int channels = 0;
    int views = 0;
    int bins = 0;
    std::vector<double> angles_rad; // one per view, in [0, 2*pi)
    std::vector<double> data;       // channel-major, then view-major

    SpectralSinogram() = default;
    SpectralSinogram(int s, int v, int d)
        : channels(s), views(v), bins(d), angles_rad(v, 0.0),
          data(static_cast<std::size_t>(s) * v * d, 0.0) {}

    double& at(int s, int v, int b) {
        return data[(static_cast<std::size_t>(s) * views + v) * bins + b];
    }
    double at(int s, int v, int b) const {
        return data[(static_cast<std::size_t>(s) * views + v) * bins + b];
    }
    std::span<double> channel(int s) {
        return {data.data() + static_cast<std::size_t>(s) * views * bins,
                static_cast<std::size_t>(views) * bins};
    }
    std::span<const double> channel(int s) const {
        return {data.data() + static_cast<std::size_t>(s) * views * bins,
                static_cast<std::size_t>(views) * bins};
    }
};

/// Application-wide attenuation reference used to map images into the unit
/// range seen by the network. 7.66 cm^-1 is the Cadmium peak.
struct ScaleReference {
    double max_attenuation = 7.66;
};

/// mu = min(-ln(I/I0), cap), elementwise. I = 0 flows to the cap instead of
/// +inf so downstream FFT filtering stays finite.
/// Throws std::invalid_argument on shape mismatch, std::domain_error if any
/// I0 <= 0 or I < 0.
void counts_to_mu(std::span<const double> transmitted, std::span<const double> incident,
                  std::span<double> mu_out, double cap = 20.0);

/// img / ref.max_attenuation. No clipping; values above 1 pass through.
/// Throws std::domain_error on non-finite input.
SpectralImage scale_to_unit(const SpectralImage& img, const ScaleReference& ref);

/// img * ref.max_attenuation, the inverse of scale_to_unit.
SpectralImage rescale_from_unit(const SpectralImage& img, const ScaleReference& ref);

} // namespace sct
