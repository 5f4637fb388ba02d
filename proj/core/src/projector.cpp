#include "sct/projector.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sct/parallel.hpp"
#include "sct/rng.hpp"

namespace sct {

ScanGeometry ScanGeometry::parallel(int image_size, int num_views, double pixel_size_cm) {
    const int bins = static_cast<int>(std::ceil(image_size * std::numbers::sqrt2)) + 1;
    return parallel_with_bins(image_size, num_views, bins, pixel_size_cm);
}

ScanGeometry ScanGeometry::parallel_with_bins(int image_size, int num_views, int num_bins,
                                              double pixel_size_cm) {
    if (image_size < 1 || num_views < 1 || num_bins < 1)
        throw std::invalid_argument("ScanGeometry: sizes must be positive");
    ScanGeometry g;
    g.image_size = image_size;
    g.num_views = num_views;
    g.num_bins = num_bins;
    g.pixel_size_cm = pixel_size_cm;
    g.angles_rad.resize(num_views);
    for (int v = 0; v < num_views; ++v)
        g.angles_rad[v] = 2.0 * std::numbers::pi * v / num_views;
    return g;
}

void ray_footprint(const ScanGeometry& geo, int view, int bin, RayFootprint& out) {
    if (view < 0 || view >= geo.num_views || bin < 0 || bin >= geo.num_bins)
        throw std::invalid_argument("ray_footprint: view/bin out of range");
    const int n = geo.image_size;
    const double angle = geo.angles_rad[view];
    const double cos_a = std::cos(angle);
    const double sin_a = std::sin(angle);
    const double center = (n - 1) / 2.0;
    const double s = (bin - (geo.num_bins - 1) / 2.0) * geo.detector_spacing;

    if (std::abs(cos_a) >= std::abs(sin_a)) {
        // More vertical ray: one crossing per image row.
        const double step_len = geo.pixel_size_cm / std::abs(cos_a);
        for (int r = 0; r < n; ++r) {
            const double y = r - center;
            const double x = (s - y * sin_a) / cos_a + center;
            const double cf = std::floor(x);
            const int c0 = static_cast<int>(cf);
            const double frac = x - cf;
            if (c0 >= 0 && c0 < n) {
                out.index.push_back(r * n + c0);
                out.weight.push_back((1.0 - frac) * step_len);
            }
            if (c0 + 1 >= 0 && c0 + 1 < n && frac != 0.0) {
                out.index.push_back(r * n + c0 + 1);
                out.weight.push_back(frac * step_len);
            }
        }
    } else {
        const double step_len = geo.pixel_size_cm / std::abs(sin_a);
        for (int c = 0; c < n; ++c) {
            const double x = c - center;
            const double y = (s - x * cos_a) / sin_a + center;
            const double rf = std::floor(y);
            const int r0 = static_cast<int>(rf);
            const double frac = y - rf;
            if (r0 >= 0 && r0 < n) {
                out.index.push_back(r0 * n + c);
                out.weight.push_back((1.0 - frac) * step_len);
            }
            if (r0 + 1 >= 0 && r0 + 1 < n && frac != 0.0) {
                out.index.push_back((r0 + 1) * n + c);
                out.weight.push_back(frac * step_len);
            }
        }
    }
}

namespace {

void check_image(std::span<const double> img, const ScanGeometry& geo) {
    const std::size_t want = static_cast<std::size_t>(geo.image_size) * geo.image_size;
    if (img.size() != want) throw std::invalid_argument("projector: image size mismatch");
}

void check_sino(std::span<const double> sino, const ScanGeometry& geo) {
    const std::size_t want = static_cast<std::size_t>(geo.num_views) * geo.num_bins;
    if (sino.size() != want) throw std::invalid_argument("projector: sinogram size mismatch");
}

} // namespace

void forward_project(std::span<const double> img, const ScanGeometry& geo,
                     std::span<double> sino_out) {
    check_image(img, geo);
    check_sino(sino_out, geo);
    RayFootprint row;
    row.index.reserve(2 * geo.image_size);
    row.weight.reserve(2 * geo.image_size);
    for (int v = 0; v < geo.num_views; ++v) {
        for (int b = 0; b < geo.num_bins; ++b) {
            row.clear();
            ray_footprint(geo, v, b, row);
            double acc = 0.0;
            for (std::size_t k = 0; k < row.index.size(); ++k)
                acc += img[row.index[k]] * row.weight[k];
            sino_out[static_cast<std::size_t>(v) * geo.num_bins + b] = acc;
        }
    }
}

std::vector<double> forward_project(std::span<const double> img, const ScanGeometry& geo) {
    std::vector<double> out(static_cast<std::size_t>(geo.num_views) * geo.num_bins);
    forward_project(img, geo, out);
    return out;
}

void back_project(std::span<const double> sino, const ScanGeometry& geo,
                  std::span<double> img_out) {
    check_sino(sino, geo);
    check_image(img_out, geo);
    for (double& v : img_out) v = 0.0;
    RayFootprint row;
    row.index.reserve(2 * geo.image_size);
    row.weight.reserve(2 * geo.image_size);
    for (int v = 0; v < geo.num_views; ++v) {
        for (int b = 0; b < geo.num_bins; ++b) {
            const double val = sino[static_cast<std::size_t>(v) * geo.num_bins + b];
            if (val == 0.0) continue;
            row.clear();
            ray_footprint(geo, v, b, row);
            for (std::size_t k = 0; k < row.index.size(); ++k)
                img_out[row.index[k]] += row.weight[k] * val;
        }
    }
}

std::vector<double> back_project(std::span<const double> sino, const ScanGeometry& geo) {
    std::vector<double> out(static_cast<std::size_t>(geo.image_size) * geo.image_size);
    back_project(sino, geo, out);
    return out;
}

SpectralSinogram spectral_forward(const SpectralImage& img, const ScanGeometry& geo) {
    if (img.height != geo.image_size || img.width != geo.image_size)
        throw std::invalid_argument("spectral_forward: image/geometry mismatch");
    SpectralSinogram sino(img.channels, geo.num_views, geo.num_bins);
    sino.angles_rad = geo.angles_rad;
    parallel_for(0, static_cast<std::size_t>(img.channels), [&](std::size_t s) {
        forward_project(img.channel(static_cast<int>(s)), geo,
                        sino.channel(static_cast<int>(s)));
    });
    return sino;
}

SpectralImage spectral_back(const SpectralSinogram& sino, const ScanGeometry& geo) {
    if (sino.views != geo.num_views || sino.bins != geo.num_bins)
        throw std::invalid_argument("spectral_back: sinogram/geometry mismatch");
    SpectralImage img(sino.channels, geo.image_size, geo.image_size, geo.pixel_size_cm);
    parallel_for(0, static_cast<std::size_t>(sino.channels), [&](std::size_t s) {
        back_project(sino.channel(static_cast<int>(s)), geo, img.channel(static_cast<int>(s)));
    });
    return img;
}

double operator_norm(const ScanGeometry& geo, int iterations, std::uint64_t seed) {
    if (iterations < 10) throw std::invalid_argument("operator_norm: need >= 10 iterations");
    const std::size_t npix = static_cast<std::size_t>(geo.image_size) * geo.image_size;
    std::vector<double> x(npix), ax(static_cast<std::size_t>(geo.num_views) * geo.num_bins),
        atax(npix);
    Rng rng(seed);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        forward_project(x, geo, ax);
        back_project(ax, geo, atax);
        double xx = 0.0, x_atax = 0.0, norm2 = 0.0;
        for (std::size_t i = 0; i < npix; ++i) {
            xx += x[i] * x[i];
            x_atax += x[i] * atax[i];
            norm2 += atax[i] * atax[i];
        }
        if (xx == 0.0 || norm2 == 0.0) return 0.0;
        estimate = std::sqrt(x_atax / xx);
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < npix; ++i) x[i] = atax[i] * inv;
    }
    return estimate;
}

} // namespace sct
