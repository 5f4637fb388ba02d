#pragma once

#include <cmath>
#include <vector>

#include "sct/geometry.hpp"
#include "sct/projector.hpp"
#include "sct/rng.hpp"
#include "sct/types.hpp"

namespace sct::test {

inline std::vector<double> aa_disk(int n, double radius_px, double mu) {
    std::vector<double> img(static_cast<std::size_t>(n) * n, 0.0);
    const double cx = (n - 1) / 2.0;
    constexpr int sub = 8;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            int inside = 0;
            for (int sy = 0; sy < sub; ++sy)
                for (int sx = 0; sx < sub; ++sx) {
                    const double y = r - cx + (sy + 0.5) / sub - 0.5;
                    const double x = c - cx + (sx + 0.5) / sub - 0.5;
                    if (x * x + y * y <= radius_px * radius_px) ++inside;
                }
            img[static_cast<std::size_t>(r) * n + c] = mu * inside / (sub * sub);
        }
    return img;
}

/// Smooth positive test image: a few Gaussian bumps inside the FOV.
inline std::vector<double> gaussian_bumps(int n, std::uint64_t seed = 31) {
    std::vector<double> img(static_cast<std::size_t>(n) * n, 0.0);
    Rng rng(seed);
    const double cx = (n - 1) / 2.0;
    for (int bump = 0; bump < 3; ++bump) {
        const double bx = rng.uniform(-0.3, 0.3) * n;
        const double by = rng.uniform(-0.3, 0.3) * n;
        const double amp = rng.uniform(0.4, 1.0);
        const double width = rng.uniform(0.08, 0.2) * n;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                const double dx = c - cx - bx;
                const double dy = r - cx - by;
                img[static_cast<std::size_t>(r) * n + c] +=
                    amp * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
            }
    }
    return img;
}

inline SpectralSinogram wrap_sino(const std::vector<double>& flat, const ScanGeometry& geo) {
    SpectralSinogram sino(1, geo.num_views, geo.num_bins);
    sino.angles_rad = geo.angles_rad;
    sino.data = flat;
    return sino;
}

inline SpectralImage wrap_image(const std::vector<double>& flat, int n, double pixel_cm = 0.1) {
    SpectralImage img(1, n, n, pixel_cm);
    img.data = flat;
    return img;
}

inline double rel_rmse(std::span<const double> got, std::span<const double> want) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double d = got[i] - want[i];
        diff += d * d;
        ref += want[i] * want[i];
    }
    return std::sqrt(diff / ref);
}

} // namespace sct::test
