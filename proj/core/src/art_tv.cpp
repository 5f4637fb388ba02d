#include "sct/art_tv.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "sct/errors.hpp"
#include "sct/parallel.hpp"
#include "sct/projector.hpp"
#include "sct/tv.hpp"

namespace sct {

namespace {

// Sparse rows of A in view-major ray order, shared by every channel.
struct RayTable {
    std::vector<std::int32_t> offsets; // per-ray start into index/weight
    std::vector<std::int32_t> index;
    std::vector<double> weight;
    std::vector<double> sq_norm;

    explicit RayTable(const ScanGeometry& geo) {
        const int rays = geo.num_views * geo.num_bins;
        offsets.reserve(rays + 1);
        offsets.push_back(0);
        sq_norm.reserve(rays);
        RayFootprint row;
        for (int v = 0; v < geo.num_views; ++v) {
            for (int b = 0; b < geo.num_bins; ++b) {
                row.clear();
                ray_footprint(geo, v, b, row);
                double n2 = 0.0;
                for (std::size_t k = 0; k < row.index.size(); ++k) {
                    index.push_back(row.index[k]);
                    weight.push_back(row.weight[k]);
                    n2 += row.weight[k] * row.weight[k];
                }
                offsets.push_back(static_cast<std::int32_t>(index.size()));
                sq_norm.push_back(n2);
            }
        }
    }

    int rays() const { return static_cast<int>(sq_norm.size()); }

    double dot(int ray, const double* x) const {
        double acc = 0.0;
        for (std::int32_t k = offsets[ray]; k < offsets[ray + 1]; ++k)
            acc += weight[k] * x[index[k]];
        return acc;
    }

    void axpy(int ray, double alpha, double* x) const {
        for (std::int32_t k = offsets[ray]; k < offsets[ray + 1]; ++k)
            x[index[k]] += alpha * weight[k];
    }
};

void solve_channel(const RayTable& rays, std::span<const double> b, int height, int width,
                   const ArtTvConfig& cfg, std::span<double> x) {
    double b_norm2 = 0.0;
    for (double v : b) b_norm2 += v * v;
    if (b_norm2 == 0.0) return; // zero data -> zero image

    std::vector<double> prev(x.size());
    double relaxation = cfg.art_relaxation;
    for (int outer = 0; outer < cfg.outer_iters; ++outer) {
        std::copy(x.begin(), x.end(), prev.begin());
        for (int ray = 0; ray < rays.rays(); ++ray) {
            const double n2 = rays.sq_norm[ray];
            if (n2 == 0.0) continue;
            const double residual = b[ray] - rays.dot(ray, x.data());
            rays.axpy(ray, relaxation * residual / n2, x.data());
        }
        if (cfg.nonneg)
            for (double& v : x)
                if (v < 0.0) v = 0.0;

        double update2 = 0.0, data_res2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - prev[i];
            update2 += d * d;
        }
        for (int ray = 0; ray < rays.rays(); ++ray) {
            const double r = b[ray] - rays.dot(ray, x.data());
            data_res2 += r * r;
        }
        if (!std::isfinite(data_res2) || data_res2 > 100.0 * b_norm2)
            throw numerical_error("art_tv_reconstruct: data residual diverged");

        if (cfg.tv_iters > 0 && update2 > 0.0)
            tv_descent(x, height, width, cfg.tv_iters, cfg.tv_step_ratio * std::sqrt(update2));

        relaxation *= cfg.relaxation_decay;
    }
}

} // namespace

SpectralImage art_tv_reconstruct(const SpectralSinogram& sino, const ScanGeometry& geo,
                                 const ArtTvConfig& cfg) {
    if (sino.views != geo.num_views || sino.bins != geo.num_bins)
        throw std::invalid_argument("art_tv_reconstruct: sinogram/geometry mismatch");
    if (cfg.outer_iters < 1 || cfg.tv_iters < 0)
        throw std::invalid_argument("art_tv_reconstruct: bad iteration counts");
    if (!(cfg.art_relaxation > 0.0) || cfg.art_relaxation > 2.0)
        throw std::invalid_argument("art_tv_reconstruct: relaxation must be in (0, 2]");

    const RayTable rays(geo);
    SpectralImage img(sino.channels, geo.image_size, geo.image_size, geo.pixel_size_cm);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(0, static_cast<std::size_t>(sino.channels), [&](std::size_t s) {
        try {
            solve_channel(rays, sino.channel(static_cast<int>(s)), geo.image_size,
                          geo.image_size, cfg, img.channel(static_cast<int>(s)));
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return img;
}

} // namespace sct
