#include "sct/fbp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sct/fft.hpp"
#include "sct/parallel.hpp"
#include "sct/projector.hpp"

namespace sct {

std::vector<double> ramp_kernel(int half_length) {
    std::vector<double> h(half_length + 1, 0.0);
    h[0] = 0.25;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int k = 1; k <= half_length; k += 2) h[k] = -1.0 / (pi2 * k * k);
    return h;
}

namespace {

/// DFT of the circularly arranged band-limited ramp, optionally Hann-windowed.
std::vector<double> ramp_response(std::size_t len, RampKind kind) {
    const auto h = ramp_kernel(static_cast<int>(len / 2));
    std::vector<std::complex<double>> k(len, 0.0);
    k[0] = h[0];
    for (std::size_t j = 1; j <= len / 2; ++j) {
        k[j] = h[j];
        k[len - j] = h[j];
    }
    fft_pow2(k, false);
    std::vector<double> resp(len);
    for (std::size_t j = 0; j < len; ++j) {
        double w = 1.0;
        if (kind == RampKind::HannRamLak) {
            const std::size_t f = std::min(j, len - j);
            w = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * static_cast<double>(f) /
                                      static_cast<double>(len)));
        }
        resp[j] = k[j].real() * w;
    }
    return resp;
}

} // namespace

void filter_sinogram(std::span<const double> sino, int views, int bins, const FilterConfig& cfg,
                     std::span<double> out) {
    if (views < 1 || bins < 1) throw std::invalid_argument("filter_sinogram: bad shape");
    if (sino.size() != static_cast<std::size_t>(views) * bins || sino.size() != out.size())
        throw std::invalid_argument("filter_sinogram: size mismatch");
    if (cfg.zero_pad_factor < 2)
        throw std::invalid_argument("filter_sinogram: zero_pad_factor must be >= 2");

    const std::size_t len = next_pow2(static_cast<std::size_t>(cfg.zero_pad_factor) * bins);
    const auto resp = ramp_response(len, cfg.kind);

    std::vector<std::complex<double>> row(len);
    for (int v = 0; v < views; ++v) {
        std::fill(row.begin(), row.end(), std::complex<double>(0.0, 0.0));
        const double* src = sino.data() + static_cast<std::size_t>(v) * bins;
        for (int b = 0; b < bins; ++b) row[b] = src[b];
        fft_pow2(row, false);
        for (std::size_t j = 0; j < len; ++j) row[j] *= resp[j];
        fft_pow2(row, true);
        double* dst = out.data() + static_cast<std::size_t>(v) * bins;
        for (int b = 0; b < bins; ++b) dst[b] = row[b].real();
    }
}

std::vector<double> filter_sinogram(std::span<const double> sino, int views, int bins,
                                    const FilterConfig& cfg) {
    std::vector<double> out(sino.size());
    filter_sinogram(sino, views, bins, cfg, out);
    return out;
}

SpectralImage fbp_reconstruct(const SpectralSinogram& sino, const ScanGeometry& geo,
                              const FilterConfig& cfg) {
    if (sino.views != geo.num_views || sino.bins != geo.num_bins)
        throw std::invalid_argument("fbp_reconstruct: sinogram/geometry mismatch");
    SpectralImage img(sino.channels, geo.image_size, geo.image_size, geo.pixel_size_cm);
    const double scale =
        std::numbers::pi / (geo.num_views * geo.pixel_size_cm * geo.pixel_size_cm);
    parallel_for(0, static_cast<std::size_t>(sino.channels), [&](std::size_t si) {
        const int s = static_cast<int>(si);
        std::vector<double> filtered(static_cast<std::size_t>(sino.views) * sino.bins);
        filter_sinogram(sino.channel(s), sino.views, sino.bins, cfg, filtered);
        back_project(filtered, geo, img.channel(s));
        for (double& v : img.channel(s)) v *= scale;
    });
    return img;
}

} // namespace sct
