#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sct/geometry.hpp"
#include "sct/types.hpp"

namespace sct {

enum class ShapeKind { Ellipse, Rectangle, Squircle, Annulus };

/// Parametric 2D shape in field-of-view coordinates ([-1, 1]^2, y down).
struct Shape2D {
    ShapeKind kind = ShapeKind::Ellipse;
    double center_x = 0.0, center_y = 0.0;
    double half_x = 0.2, half_y = 0.2;
    double rotation = 0.0;    // radians
    double inner_scale = 0.5; // annulus hole as a fraction of the half-axes
    int material_id = 0;

    bool contains(double x, double y) const;
};

/// Two-term attenuation model mu(E) = p (E / 60 keV)^-3 + c, photoelectric
/// plus energy-flat Compton. Monotone non-increasing in E by construction.
struct MaterialSpectrum {
    std::string name;
    double photoelectric = 0.0; // p >= 0
    double compton = 0.0;       // c >= 0

    double mu(double keV) const;
    std::vector<double> mu_curve(const EnergyGrid& grid) const;
};

/// count materials spanning soft to metal-like regimes. Entry 0 is a fixed
/// aluminum-like spectrum (mu(20 keV) >= 5) used by the metal-artifact
/// experiments; every entry satisfies mu(20 keV) <= 7.66.
std::vector<MaterialSpectrum> build_material_library(int count = 48,
                                                     std::uint64_t rng_seed = 42);

struct SceneConfig {
    int min_shapes = 2;
    int max_shapes = 6;
    double fov_radius = 0.9; // shapes stay inside this radius
    int num_materials = 48;  // size of the library the ids index into
    /// When set, at least one shape uses this material.
    std::optional<int> force_material_id;
};

struct PhantomScene {
    std::vector<Shape2D> shapes; // later shapes overwrite earlier ones
};

/// Deterministic scene for a given seed; every shape fits inside the FOV.
PhantomScene sample_scene(std::uint64_t rng_seed, const SceneConfig& cfg = {});

/// Paints the scene onto the grid: per pixel the topmost covering shape wins,
/// background is 0, edges are anti-aliased with 4x4 subpixel sampling.
SpectralImage rasterize(const PhantomScene& scene, const ScanGeometry& geo,
                        const EnergyGrid& grid,
                        const std::vector<MaterialSpectrum>& materials);

enum class NoiseMode { None, GaussianSinogram, PoissonCounts };

struct NoiseConfig {
    NoiseMode mode = NoiseMode::None;
    double sigma = 0.0;             // per-channel std in line-integral units
    double incident_counts = 1e6;   // I0 per channel for Poisson mode
    std::uint64_t seed = 0;
    /// Empty = all channels; otherwise only these channel indices are touched.
    std::vector<int> target_channels;
    double mu_cap = 20.0;
};

/// Dense-view forward projection followed by the configured noise. Gaussian
/// noise is keyed per (channel, view, bin), so entries are independent of
/// evaluation order.
SpectralSinogram simulate_scan(const SpectralImage& phantom, const ScanGeometry& geo_dense,
                               const NoiseConfig& noise = {});

/// Keeps views at indices floor(i * V_dense / v_sparse), i = 0..v_sparse-1.
SpectralSinogram subsample_views(const SpectralSinogram& sino, int v_sparse);
std::vector<int> subsample_indices(int v_dense, int v_sparse);

/// Geometry restricted to the subsampled views (same grid and detector).
ScanGeometry subsample_geometry(const ScanGeometry& dense, int v_sparse);

} // namespace sct
