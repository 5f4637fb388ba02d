#include <benchmark/benchmark.h>

#include "sct/parallel.hpp"
#include "sct/rng.hpp"
#include "sct/unet.hpp"

using namespace sct;

namespace {

Tensor random_input(int channels, int n, std::uint64_t seed) {
    Tensor t(channels, n, n);
    Rng rng(seed);
    for (double& v : t.v) v = rng.uniform(0.0, 1.0);
    return t;
}

} // namespace

// The joint-vs-channelwise comparison: internal layers are shared, so the
// forward cost barely moves with the channel count.
static void UnetForwardJoint(benchmark::State& state) {
    set_num_threads(1);
    const int channels = static_cast<int>(state.range(0));
    UNetConfig cfg;
    cfg.channels = channels;
    cfg.base_filters = 8;
    cfg.input_size = 64;
    const UNetModel model = build_unet(cfg, 1);
    const Tensor x = random_input(channels, 64, 2);
    for (auto _ : state) {
        const Tensor y = unet_forward(model, x, false);
        benchmark::DoNotOptimize(y.v.data());
    }
    state.SetComplexityN(channels);
}
BENCHMARK(UnetForwardJoint)->Arg(1)->Arg(8)->Arg(32)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void UnetTrainStep(benchmark::State& state) {
    set_num_threads(1);
    UNetConfig cfg;
    cfg.channels = 8;
    cfg.base_filters = static_cast<int>(state.range(0));
    cfg.input_size = 64;
    UNetModel model = build_unet(cfg, 1);
    const Tensor x = random_input(8, 64, 3);
    const Tensor target = random_input(8, 64, 4);
    UNetTape tape;
    for (auto _ : state) {
        const Tensor pred = unet_forward(model, x, true, 5, &tape);
        const auto grads = unet_backward(model, tape, mae_loss_gradient(pred, target));
        benchmark::DoNotOptimize(grads.data());
    }
}
BENCHMARK(UnetTrainStep)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void UnetBatchParallelism(benchmark::State& state) {
    set_num_threads(static_cast<int>(state.range(0)));
    UNetConfig cfg;
    cfg.channels = 8;
    cfg.base_filters = 8;
    cfg.input_size = 64;
    UNetModel model = build_unet(cfg, 1);
    OptimizerState opt;
    std::vector<TrainPair> data;
    for (int i = 0; i < 8; ++i)
        data.push_back({random_input(8, 64, 10 + i), random_input(8, 64, 50 + i)});
    TrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = 8;
    tc.use_augment = false;
    for (auto _ : state) {
        train_unet(model, opt, data, {}, tc);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(UnetBatchParallelism)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
