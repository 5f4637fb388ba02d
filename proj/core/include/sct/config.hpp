#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sct/art_tv.hpp"
#include "sct/geometry.hpp"
#include "sct/types.hpp"

namespace sct {

/// Flat key-value run configuration shared by every command. Keys are
/// namespaced by module (e.g. "geometry.num_views_sparse = 9"); the canonical
/// serialization is echoed into every output's metadata.
struct RunConfig {
    // geometry.*
    int image_size = 96;
    int num_views_dense = 74;
    int num_views_sparse = 9;
    double pixel_size_cm = 0.1;
    double detector_spacing = 1.0;
    // energy.*
    int num_channels = 32;
    double min_kev = 20.0;
    double max_kev = 108.2;
    // scale.*
    double max_attenuation = 7.66;
    // phantom.*
    int min_shapes = 2;
    int max_shapes = 6;
    int material_count = 48;
    std::uint64_t material_seed = 42;
    // data.*
    int count = 10;
    bool art74_target = false;
    bool force_metal = false;
    // noise.*
    std::string noise_mode = "none"; // none | gaussian | poisson
    double noise_sigma = 0.0;
    double incident_counts = 1e6;
    std::vector<double> noise_target_kev; // empty = all channels
    // art.*
    int art_outer_iters = 200;
    int art_tv_iters = 30;
    double art_relaxation = 1.0;
    double art_relaxation_decay = 0.99;
    double art_tv_step_ratio = 0.2;
    bool art_nonneg = true;
    // tnv.*
    double tnv_lambda = 0.01;
    int tnv_iters = 200;
    double tnv_step_margin = 0.99;
    // network.*
    int base_filters = 64;
    int levels = 3;
    double dropout_rate = 0.02;
    bool residual = false;
    bool single_channel = false;
    // train.*
    int epochs = 30;
    int batch_size = 50;
    double augment_sigma = 0.02;
    double val_fraction = 0.1;
    double learning_rate = 1e-4;
    double lr_decay = 1e-6;
    // run.*
    std::uint64_t seed = 1;
    int threads = 0; // 0 = hardware concurrency
    std::string out_dir = "out";
    // bench.*
    int bench_reps = 5;

    EnergyGrid energy_grid() const;
    ScanGeometry dense_geometry() const;
    ScanGeometry sparse_geometry() const;
    ArtTvConfig art_config() const;

    /// Named defaults: "ci" (64 px, 8 channels, 8 filters) for fast runs,
    /// "paper" (96 px, 32 channels, 64 filters) for fidelity runs.
    void apply_preset(const std::string& name);

    void set(const std::string& key, const std::string& value);
    std::vector<std::pair<std::string, std::string>> items() const;
    std::string serialize() const;

    /// Hash of the geometry/energy/scale subset; outputs with different
    /// geometry hashes are not comparable.
    std::uint64_t geometry_hash() const;
    std::uint64_t full_hash() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys are errors.
RunConfig parse_config_text(const std::string& text, const RunConfig& base = {});
RunConfig load_config_file(const std::string& path, const RunConfig& base = {});

std::uint64_t fnv1a_hash(const std::string& text);

} // namespace sct
