#include <benchmark/benchmark.h>

#include "sct/fbp.hpp"
#include "sct/parallel.hpp"
#include "sct/phantom.hpp"
#include "sct/projector.hpp"
#include "sct/rng.hpp"

using namespace sct;

namespace {

SpectralImage make_phantom(int n, int channels) {
    const ScanGeometry geo = ScanGeometry::parallel(n, 74, 0.1);
    const EnergyGrid grid = EnergyGrid::uniform(channels, 20.0, 108.2);
    const auto materials = build_material_library(48, 42);
    SceneConfig cfg;
    cfg.num_materials = 48;
    return rasterize(sample_scene(7, cfg), geo, grid, materials);
}

} // namespace

static void ForwardProject(benchmark::State& state) {
    set_num_threads(1);
    const int n = static_cast<int>(state.range(0));
    const ScanGeometry geo = ScanGeometry::parallel(n, 74, 0.1);
    const SpectralImage img = make_phantom(n, 1);
    std::vector<double> sino(static_cast<std::size_t>(geo.num_views) * geo.num_bins);
    for (auto _ : state) {
        forward_project(img.channel(0), geo, sino);
        benchmark::DoNotOptimize(sino.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(ForwardProject)->Arg(64)->Arg(96)->Arg(128)->Complexity();

static void BackProject(benchmark::State& state) {
    set_num_threads(1);
    const int n = static_cast<int>(state.range(0));
    const ScanGeometry geo = ScanGeometry::parallel(n, 74, 0.1);
    const SpectralImage img = make_phantom(n, 1);
    const auto sino = forward_project(img.channel(0), geo);
    std::vector<double> out(img.channel(0).size());
    for (auto _ : state) {
        back_project(sino, geo, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BackProject)->Arg(64)->Arg(96)->Arg(128)->Complexity();

static void SpectralForwardChannels(benchmark::State& state) {
    set_num_threads(1);
    const int channels = static_cast<int>(state.range(0));
    const ScanGeometry geo = ScanGeometry::parallel(64, 74, 0.1);
    const SpectralImage img = make_phantom(64, channels);
    for (auto _ : state) {
        const SpectralSinogram sino = spectral_forward(img, geo);
        benchmark::DoNotOptimize(sino.data.data());
    }
    state.SetComplexityN(channels);
}
BENCHMARK(SpectralForwardChannels)->Arg(1)->Arg(8)->Arg(32)->Complexity();

static void FbpReconstruct(benchmark::State& state) {
    set_num_threads(1);
    const int n = static_cast<int>(state.range(0));
    const ScanGeometry dense = ScanGeometry::parallel(n, 74, 0.1);
    const ScanGeometry sparse = subsample_geometry(dense, 9);
    const SpectralImage img = make_phantom(n, 1);
    const SpectralSinogram nine = subsample_views(spectral_forward(img, dense), 9);
    for (auto _ : state) {
        const SpectralImage rec = fbp_reconstruct(nine, sparse);
        benchmark::DoNotOptimize(rec.data.data());
    }
}
BENCHMARK(FbpReconstruct)->Arg(64)->Arg(96);
