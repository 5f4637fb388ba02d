#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sct/types.hpp"

namespace sct {

/// Dense 3D activation block, channel-major.
struct Tensor {
    int ch = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int c, int hh, int ww)
        : ch(c), h(hh), w(ww), v(static_cast<std::size_t>(c) * hh * ww, 0.0) {}

    std::size_t plane_size() const { return static_cast<std::size_t>(h) * w; }
    double* plane(int c) { return v.data() + c * plane_size(); }
    const double* plane(int c) const { return v.data() + c * plane_size(); }
};

struct UNetConfig {
    int channels = 32;     // S, input and output
    int levels = 3;        // encoder/decoder levels
    int base_filters = 64; // R, doubled per level down to 8R at the bottleneck
    int kernel_size = 3;   // K, odd
    double dropout_rate = 0.02;
    int input_size = 96;   // N, divisible by 2^levels
    bool residual = false; // optional global input-to-output skip

    int conv_layer_count() const { return 5 * levels + 2; } // 17 at defaults
    int block_count() const { return 2 * levels + 1 ; }     // 7 at defaults
};

struct ConvLayer {
    int in_ch = 0, out_ch = 0, k = 3;
    std::vector<double> w; // [out][in][k][k]
    std::vector<double> b; // [out]
};

/// Fixed-topology multi-channel U-Net: no batch normalization, zero-padded
/// convolutions, max pooling down, nearest-neighbor resize + convolution up,
/// skip concatenation, ReLU after every convolution, dropout after each
/// block's last layer in training mode.
struct UNetModel {
    UNetConfig cfg;
    std::vector<ConvLayer> layers; // declaration (checkpoint) order

    std::size_t parameter_count() const;
};

/// Deterministic build: fan-in-scaled uniform weights from the seed, zero
/// biases. Throws std::invalid_argument on an invalid config.
UNetModel build_unet(const UNetConfig& cfg, std::uint64_t rng_seed);

/// Gradient (or optimizer) storage matching one conv layer.
struct ParamBlock {
    std::vector<double> w, b;
};

/// Everything backward needs from the matching forward pass.
struct UNetTape {
    bool valid = false;
    bool training = false;
    Tensor input;
    std::vector<Tensor> conv_in;                   // one per conv layer
    std::vector<Tensor> conv_out;                  // post-ReLU (and dropout)
    std::vector<std::vector<std::uint8_t>> pool_arg; // one per encoder level
    std::vector<std::vector<double>> dropout_mask; // per block: one factor per channel
};

/// Single-sample forward pass. In training mode, dropout masks are drawn from
/// dropout_seed with inverted scaling; inference is deterministic and
/// dropout-free. Pass a tape to enable backward().
Tensor unet_forward(const UNetModel& model, const Tensor& x, bool training,
                    std::uint64_t dropout_seed = 0, UNetTape* tape = nullptr);

/// Exact reverse-mode gradients for every weight and bias, with dropout masks
/// replayed from the tape. Throws std::logic_error without a valid tape.
std::vector<ParamBlock> unet_backward(const UNetModel& model, const UNetTape& tape,
                                      const Tensor& grad_output);

/// Mean of |pred - target| over all elements.
double mae_loss(const Tensor& pred, const Tensor& target);

/// d(mae)/d(pred): sign(pred - target) / count, with sign(0) = 0.
Tensor mae_loss_gradient(const Tensor& pred, const Tensor& target);

struct OptimizerState {
    double base_lr = 1e-4;
    double lr_decay = 1e-6; // per update
    double rho = 0.9;
    double epsilon = 1e-8;
    long long step_count = 0;
    std::vector<ParamBlock> v; // squared-gradient accumulator

    double current_lr() const { return base_lr / (1.0 + lr_decay * step_count); }
};

/// lr_t = base_lr / (1 + decay t); v <- rho v + (1-rho) g^2;
/// theta <- theta - lr_t g / (sqrt(v) + eps); t <- t + 1.
void rmsprop_step(UNetModel& model, const std::vector<ParamBlock>& grads, OptimizerState& state);

struct AugmentConfig {
    double noise_sigma = 0.02; // scaled units, input only
    double flip_probability = 0.5;
};

/// Seeded flips (applied identically to input and target) plus additive white
/// Gaussian noise on the input only.
void augment(Tensor& input, Tensor& target, std::uint64_t rng_seed,
             const AugmentConfig& cfg = {});

struct TrainPair {
    Tensor input;  // scaled FBP reconstruction
    Tensor target; // scaled reference
};

struct TrainConfig {
    int epochs = 30;
    int batch_size = 50;
    std::uint64_t seed = 1;
    AugmentConfig augment;
    bool use_augment = true;
};

struct TrainReport {
    std::vector<double> train_loss; // one per epoch
    std::vector<double> val_loss;   // one per epoch
};

/// Seeded shuffled mini-batch training: augment, forward (training), MAE,
/// backward, RMSprop. Deterministic for a fixed seed. Throws numerical_error
/// naming the batch if the loss turns non-finite.
TrainReport train_unet(UNetModel& model, OptimizerState& opt, std::span<const TrainPair> train,
                       std::span<const TrainPair> val, const TrainConfig& cfg);

/// Checkpoint: magic "SCTM", version, config, then weight tensors in
/// declaration order as 64-bit little-endian values.
void save_checkpoint(const std::string& path, const UNetModel& model);
UNetModel load_checkpoint(const std::string& path);

SpectralImage tensor_to_image(const Tensor& t, double pixel_size_cm);
Tensor image_to_tensor(const SpectralImage& img);

} // namespace sct
