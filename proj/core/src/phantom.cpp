#include "sct/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sct/parallel.hpp"
#include "sct/projector.hpp"
#include "sct/rng.hpp"

namespace sct {

bool Shape2D::contains(double x, double y) const {
    const double dx = x - center_x;
    const double dy = y - center_y;
    const double ca = std::cos(rotation);
    const double sa = std::sin(rotation);
    const double u = (dx * ca + dy * sa) / half_x;
    const double v = (-dx * sa + dy * ca) / half_y;
    switch (kind) {
        case ShapeKind::Ellipse:
            return u * u + v * v <= 1.0;
        case ShapeKind::Rectangle:
            return std::abs(u) <= 1.0 && std::abs(v) <= 1.0;
        case ShapeKind::Squircle: {
            const double u2 = u * u, v2 = v * v;
            return u2 * u2 + v2 * v2 <= 1.0;
        }
        case ShapeKind::Annulus: {
            const double r2 = u * u + v * v;
            return r2 <= 1.0 && r2 >= inner_scale * inner_scale;
        }
    }
    return false;
}

double MaterialSpectrum::mu(double keV) const {
    const double rel = keV / 60.0;
    return photoelectric / (rel * rel * rel) + compton;
}

std::vector<double> MaterialSpectrum::mu_curve(const EnergyGrid& grid) const {
    std::vector<double> out(grid.num_channels);
    for (int k = 0; k < grid.num_channels; ++k) out[k] = mu(grid.energies_keV[k]);
    return out;
}

std::vector<MaterialSpectrum> build_material_library(int count, std::uint64_t rng_seed) {
    if (count < 1) throw std::invalid_argument("build_material_library: count must be >= 1");
    std::vector<MaterialSpectrum> lib;
    lib.reserve(count);
    lib.push_back({"aluminum-like", 0.20, 0.35});

    // mu(20 keV) = 27 p + c; keep every entry under the 7.66 scale reference.
    constexpr double kPeakAt20 = 27.0;
    constexpr double kMaxPeak = 7.66;
    Rng rng(rng_seed);
    int id = 1;
    while (static_cast<int>(lib.size()) < count) {
        const double p = std::exp(rng.uniform(std::log(1e-3), std::log(0.26)));
        const double c = rng.uniform(0.05, 0.75);
        if (kPeakAt20 * p + c > kMaxPeak) continue;
        lib.push_back({"material-" + std::to_string(id++), p, c});
    }
    return lib;
}

PhantomScene sample_scene(std::uint64_t rng_seed, const SceneConfig& cfg) {
    if (cfg.min_shapes < 1 || cfg.max_shapes < cfg.min_shapes)
        throw std::invalid_argument("sample_scene: bad shape-count bounds");
    Rng rng(mix_seed(rng_seed, 0x5ce4e));
    PhantomScene scene;
    const int count =
        cfg.min_shapes + static_cast<int>(rng.uniform_index(cfg.max_shapes - cfg.min_shapes + 1));
    scene.shapes.reserve(count);
    for (int i = 0; i < count; ++i) {
        Shape2D s;
        s.kind = static_cast<ShapeKind>(rng.uniform_index(4));
        s.half_x = rng.uniform(0.08, 0.45);
        s.half_y = rng.uniform(0.08, 0.45);
        s.rotation = rng.uniform(0.0, 3.141592653589793);
        s.inner_scale = rng.uniform(0.35, 0.75);
        // Conservative bounding radius keeps any rotated shape inside the FOV.
        const double bound = std::hypot(s.half_x, s.half_y);
        const double max_center = std::max(0.0, cfg.fov_radius - bound);
        const double radius = max_center * std::sqrt(rng.uniform());
        const double phi = rng.uniform(0.0, 2.0 * 3.141592653589793);
        s.center_x = radius * std::cos(phi);
        s.center_y = radius * std::sin(phi);
        s.material_id = static_cast<int>(rng.uniform_index(cfg.num_materials));
        scene.shapes.push_back(s);
    }
    if (cfg.force_material_id) {
        bool present = false;
        for (const auto& s : scene.shapes) present |= s.material_id == *cfg.force_material_id;
        if (!present)
            scene.shapes[rng.uniform_index(scene.shapes.size())].material_id =
                *cfg.force_material_id;
    }
    return scene;
}

SpectralImage rasterize(const PhantomScene& scene, const ScanGeometry& geo,
                        const EnergyGrid& grid,
                        const std::vector<MaterialSpectrum>& materials) {
    const int n = geo.image_size;
    SpectralImage img(grid.num_channels, n, n, geo.pixel_size_cm);

    for (const auto& s : scene.shapes)
        if (s.material_id < 0 || s.material_id >= static_cast<int>(materials.size()))
            throw std::invalid_argument("rasterize: material id outside the library");

    std::vector<std::vector<double>> curves(materials.size());
    for (std::size_t m = 0; m < materials.size(); ++m) curves[m] = materials[m].mu_curve(grid);

    constexpr int kSub = 4;
    const double pixel = 2.0 / n; // FOV spans [-1, 1] in both axes

    parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t row) {
        const int r = static_cast<int>(row);
        std::vector<int> hits(materials.size() + 1);
        for (int c = 0; c < n; ++c) {
            std::fill(hits.begin(), hits.end(), 0);
            for (int sy = 0; sy < kSub; ++sy) {
                for (int sx = 0; sx < kSub; ++sx) {
                    const double x = -1.0 + (c + (sx + 0.5) / kSub) * pixel;
                    const double y = -1.0 + (r + (sy + 0.5) / kSub) * pixel;
                    int material = -1; // background
                    for (int i = static_cast<int>(scene.shapes.size()) - 1; i >= 0; --i) {
                        if (scene.shapes[i].contains(x, y)) {
                            material = scene.shapes[i].material_id;
                            break;
                        }
                    }
                    ++hits[material + 1];
                }
            }
            for (std::size_t m = 0; m < materials.size(); ++m) {
                if (hits[m + 1] == 0) continue;
                const double frac = hits[m + 1] / static_cast<double>(kSub * kSub);
                for (int s = 0; s < grid.num_channels; ++s)
                    img.at(s, r, c) += frac * curves[m][s];
            }
        }
    });
    return img;
}

namespace {

// Deterministic Poisson draw; Knuth's product method for small rates, normal
// approximation above it (counts there are ~1e2..1e6 and the relative error
// of the approximation is negligible for this simulator).
double poisson_draw(double rate, Rng& rng) {
    if (rate <= 0.0) return 0.0;
    if (rate < 64.0) {
        const double limit = std::exp(-rate);
        double prod = rng.uniform();
        int k = 0;
        while (prod > limit) {
            prod *= rng.uniform();
            ++k;
        }
        return k;
    }
    const double draw = std::round(rate + std::sqrt(rate) * rng.normal());
    return draw < 0.0 ? 0.0 : draw;
}

} // namespace

SpectralSinogram simulate_scan(const SpectralImage& phantom, const ScanGeometry& geo_dense,
                               const NoiseConfig& noise) {
    SpectralSinogram sino = spectral_forward(phantom, geo_dense);
    if (noise.mode == NoiseMode::None) return sino;

    std::vector<char> touched(sino.channels, noise.target_channels.empty() ? 1 : 0);
    for (int ch : noise.target_channels) {
        if (ch < 0 || ch >= sino.channels)
            throw std::invalid_argument("simulate_scan: target channel out of range");
        touched[ch] = 1;
    }

    if (noise.mode == NoiseMode::GaussianSinogram) {
        if (noise.sigma < 0.0) throw std::invalid_argument("simulate_scan: sigma must be >= 0");
        if (noise.sigma == 0.0) return sino;
        for (int s = 0; s < sino.channels; ++s) {
            if (!touched[s]) continue;
            for (int v = 0; v < sino.views; ++v)
                for (int b = 0; b < sino.bins; ++b) {
                    Rng rng(mix_seed(noise.seed, s, v, b));
                    sino.at(s, v, b) += noise.sigma * rng.normal();
                }
        }
        return sino;
    }

    // Poisson counts: I ~ Poisson(I0 exp(-mu)), then back through the log.
    if (!(noise.incident_counts >= 1.0))
        throw std::invalid_argument("simulate_scan: incident_counts must be >= 1");
    for (int s = 0; s < sino.channels; ++s) {
        if (!touched[s]) continue;
        for (int v = 0; v < sino.views; ++v)
            for (int b = 0; b < sino.bins; ++b) {
                Rng rng(mix_seed(noise.seed, s, v, b));
                const double expected = noise.incident_counts * std::exp(-sino.at(s, v, b));
                const double counts = poisson_draw(expected, rng);
                sino.at(s, v, b) = counts == 0.0
                                       ? noise.mu_cap
                                       : std::min(-std::log(counts / noise.incident_counts),
                                                  noise.mu_cap);
            }
    }
    return sino;
}

std::vector<int> subsample_indices(int v_dense, int v_sparse) {
    if (v_sparse < 1 || v_sparse > v_dense)
        throw std::invalid_argument("subsample_indices: need 1 <= v_sparse <= v_dense");
    std::vector<int> idx(v_sparse);
    for (int i = 0; i < v_sparse; ++i)
        idx[i] = static_cast<int>(static_cast<long long>(i) * v_dense / v_sparse);
    return idx;
}

SpectralSinogram subsample_views(const SpectralSinogram& sino, int v_sparse) {
    const auto idx = subsample_indices(sino.views, v_sparse);
    SpectralSinogram out(sino.channels, v_sparse, sino.bins);
    for (int i = 0; i < v_sparse; ++i) out.angles_rad[i] = sino.angles_rad[idx[i]];
    for (int s = 0; s < sino.channels; ++s)
        for (int i = 0; i < v_sparse; ++i)
            for (int b = 0; b < sino.bins; ++b) out.at(s, i, b) = sino.at(s, idx[i], b);
    return out;
}

ScanGeometry subsample_geometry(const ScanGeometry& dense, int v_sparse) {
    const auto idx = subsample_indices(dense.num_views, v_sparse);
    ScanGeometry g = dense;
    g.num_views = v_sparse;
    g.angles_rad.resize(v_sparse);
    for (int i = 0; i < v_sparse; ++i) g.angles_rad[i] = dense.angles_rad[idx[i]];
    return g;
}

} // namespace sct
