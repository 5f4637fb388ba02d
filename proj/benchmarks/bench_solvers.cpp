#include <benchmark/benchmark.h>

#include "sct/art_tv.hpp"
#include "sct/parallel.hpp"
#include "sct/phantom.hpp"
#include "sct/projector.hpp"
#include "sct/tnv.hpp"
#include "sct/tv.hpp"

using namespace sct;

namespace {

SpectralSinogram nine_view_scan(int n, int channels) {
    const ScanGeometry dense = ScanGeometry::parallel(n, 74, 0.1);
    const EnergyGrid grid = EnergyGrid::uniform(channels, 20.0, 108.2);
    const auto materials = build_material_library(48, 42);
    SceneConfig cfg;
    cfg.num_materials = 48;
    const SpectralImage phantom = rasterize(sample_scene(7, cfg), dense, grid, materials);
    return subsample_views(simulate_scan(phantom, dense, {}), 9);
}

} // namespace

static void ArtTvChannel(benchmark::State& state) {
    set_num_threads(1);
    const int n = 64;
    const ScanGeometry sparse = subsample_geometry(ScanGeometry::parallel(n, 74, 0.1), 9);
    const SpectralSinogram sino = nine_view_scan(n, 1);
    ArtTvConfig cfg;
    cfg.outer_iters = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const SpectralImage rec = art_tv_reconstruct(sino, sparse, cfg);
        benchmark::DoNotOptimize(rec.data.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(ArtTvChannel)->Arg(50)->Arg(100)->Arg(200)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void TnvJoint(benchmark::State& state) {
    set_num_threads(1);
    const int n = 64;
    const ScanGeometry sparse = subsample_geometry(ScanGeometry::parallel(n, 74, 0.1), 9);
    const SpectralSinogram sino = nine_view_scan(n, static_cast<int>(state.range(0)));
    TnvConfig cfg;
    cfg.lambda = 0.01;
    cfg.iters = 50;
    for (auto _ : state) {
        const SpectralImage rec = tnv_reconstruct(sino, sparse, cfg);
        benchmark::DoNotOptimize(rec.data.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(TnvJoint)->Arg(2)->Arg(4)->Arg(8)->Complexity()->Unit(benchmark::kMillisecond);

static void TvDescentStep(benchmark::State& state) {
    set_num_threads(1);
    const int n = static_cast<int>(state.range(0));
    std::vector<double> img(static_cast<std::size_t>(n) * n, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(i % 7);
    for (auto _ : state) {
        tv_descent(img, n, n, 1, 0.01);
        benchmark::DoNotOptimize(img.data());
    }
}
BENCHMARK(TvDescentStep)->Arg(64)->Arg(96)->Arg(128);
