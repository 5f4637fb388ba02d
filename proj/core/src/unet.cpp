#include "sct/unet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "sct/errors.hpp"
#include "sct/parallel.hpp"
#include "sct/rng.hpp"

namespace sct {

namespace {

void validate(const UNetConfig& cfg) {
    if (cfg.channels < 1 || cfg.levels < 1 || cfg.base_filters < 1)
        throw std::invalid_argument("UNetConfig: channels/levels/filters must be positive");
    if (cfg.kernel_size < 1 || cfg.kernel_size % 2 == 0)
        throw std::invalid_argument("UNetConfig: kernel size must be odd");
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
        throw std::invalid_argument("UNetConfig: dropout rate must be in [0, 1)");
    const int down = 1 << cfg.levels;
    if (cfg.input_size < down || cfg.input_size % down != 0)
        throw std::invalid_argument("UNetConfig: input size must be divisible by 2^levels");
}

ConvLayer make_layer(int in_ch, int out_ch, int k) {
    ConvLayer l;
    l.in_ch = in_ch;
    l.out_ch = out_ch;
    l.k = k;
    l.w.assign(static_cast<std::size_t>(out_ch) * in_ch * k * k, 0.0);
    l.b.assign(out_ch, 0.0);
    return l;
}

// Run fn over [0, count) in parallel only when the total work is worth the
// thread spawn; keeps tiny test networks fast and results identical either way.
void for_each_channel(int count, std::size_t work_per_item,
                      const std::function<void(std::size_t)>& fn) {
    if (static_cast<std::size_t>(count) * work_per_item < (1u << 20)) {
        for (int i = 0; i < count; ++i) fn(i);
    } else {
        parallel_for(0, static_cast<std::size_t>(count), fn);
    }
}

void conv_forward(const ConvLayer& layer, const Tensor& in, Tensor& out) {
    const int k = layer.k, pad = k / 2, h = in.h, w = in.w;
    out.ch = layer.out_ch;
    out.h = h;
    out.w = w;
    out.v.assign(static_cast<std::size_t>(layer.out_ch) * h * w, 0.0);
    const std::size_t work = static_cast<std::size_t>(layer.in_ch) * k * k * h * w;
    for_each_channel(layer.out_ch, work, [&](std::size_t oi) {
        const int o = static_cast<int>(oi);
        double* op = out.plane(o);
        std::fill(op, op + out.plane_size(), layer.b[o]);
        for (int i = 0; i < layer.in_ch; ++i) {
            const double* ip = in.plane(i);
            const double* wp = &layer.w[(static_cast<std::size_t>(o) * layer.in_ch + i) * k * k];
            for (int ky = 0; ky < k; ++ky) {
                const int y0 = std::max(0, pad - ky);
                const int y1 = std::min(h, h + pad - ky);
                for (int kx = 0; kx < k; ++kx) {
                    const double coef = wp[ky * k + kx];
                    if (coef == 0.0) continue;
                    const int x0 = std::max(0, pad - kx);
                    const int x1 = std::min(w, w + pad - kx);
                    for (int y = y0; y < y1; ++y) {
                        const double* irow = ip + (y + ky - pad) * w + (x0 + kx - pad);
                        double* orow = op + y * w + x0;
                        for (int x = 0; x < x1 - x0; ++x) orow[x] += coef * irow[x];
                    }
                }
            }
        }
    });
}

// grad_pre is d(loss)/d(pre-activation); fills the layer gradient and the
// gradient w.r.t. the layer input.
void conv_backward(const ConvLayer& layer, const Tensor& in, const Tensor& grad_pre,
                   ParamBlock& grad, Tensor& grad_in) {
    const int k = layer.k, pad = k / 2, h = in.h, w = in.w;
    grad.w.assign(layer.w.size(), 0.0);
    grad.b.assign(layer.b.size(), 0.0);
    const std::size_t work = static_cast<std::size_t>(layer.in_ch) * k * k * h * w;

    for_each_channel(layer.out_ch, work, [&](std::size_t oi) {
        const int o = static_cast<int>(oi);
        const double* gp = grad_pre.plane(o);
        double acc_b = 0.0;
        for (std::size_t i = 0; i < grad_pre.plane_size(); ++i) acc_b += gp[i];
        grad.b[o] = acc_b;
        for (int i = 0; i < layer.in_ch; ++i) {
            const double* ip = in.plane(i);
            double* wg = &grad.w[(static_cast<std::size_t>(o) * layer.in_ch + i) * k * k];
            for (int ky = 0; ky < k; ++ky) {
                const int y0 = std::max(0, pad - ky);
                const int y1 = std::min(h, h + pad - ky);
                for (int kx = 0; kx < k; ++kx) {
                    const int x0 = std::max(0, pad - kx);
                    const int x1 = std::min(w, w + pad - kx);
                    double acc = 0.0;
                    for (int y = y0; y < y1; ++y) {
                        const double* irow = ip + (y + ky - pad) * w + (x0 + kx - pad);
                        const double* grow = gp + y * w + x0;
                        for (int x = 0; x < x1 - x0; ++x) acc += grow[x] * irow[x];
                    }
                    wg[ky * k + kx] = acc;
                }
            }
        }
    });

    grad_in.ch = layer.in_ch;
    grad_in.h = h;
    grad_in.w = w;
    grad_in.v.assign(static_cast<std::size_t>(layer.in_ch) * h * w, 0.0);
    const std::size_t work_in = static_cast<std::size_t>(layer.out_ch) * k * k * h * w;
    for_each_channel(layer.in_ch, work_in, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        double* gip = grad_in.plane(i);
        for (int o = 0; o < layer.out_ch; ++o) {
            const double* gp = grad_pre.plane(o);
            const double* wp = &layer.w[(static_cast<std::size_t>(o) * layer.in_ch + i) * k * k];
            for (int ky = 0; ky < k; ++ky) {
                const int y0 = std::max(0, pad - ky);
                const int y1 = std::min(h, h + pad - ky);
                for (int kx = 0; kx < k; ++kx) {
                    const double coef = wp[ky * k + kx];
                    if (coef == 0.0) continue;
                    const int x0 = std::max(0, pad - kx);
                    const int x1 = std::min(w, w + pad - kx);
                    for (int y = y0; y < y1; ++y) {
                        const double* grow = gp + y * w + x0;
                        double* girow = gip + (y + ky - pad) * w + (x0 + kx - pad);
                        for (int x = 0; x < x1 - x0; ++x) girow[x] += coef * grow[x];
                    }
                }
            }
        }
    });
}

void relu_inplace(Tensor& t) {
    for (double& x : t.v)
        if (x < 0.0) x = 0.0;
}

void maxpool2_forward(const Tensor& in, Tensor& out, std::vector<std::uint8_t>& arg) {
    out.ch = in.ch;
    out.h = in.h / 2;
    out.w = in.w / 2;
    out.v.resize(static_cast<std::size_t>(out.ch) * out.h * out.w);
    arg.resize(out.v.size());
    for (int c = 0; c < in.ch; ++c) {
        const double* ip = in.plane(c);
        double* op = out.plane(c);
        std::uint8_t* ap = arg.data() + c * out.plane_size();
        for (int y = 0; y < out.h; ++y) {
            for (int x = 0; x < out.w; ++x) {
                const double* cell = ip + 2 * y * in.w + 2 * x;
                double best = cell[0];
                std::uint8_t idx = 0;
                if (cell[1] > best) { best = cell[1]; idx = 1; }
                if (cell[in.w] > best) { best = cell[in.w]; idx = 2; }
                if (cell[in.w + 1] > best) { best = cell[in.w + 1]; idx = 3; }
                op[y * out.w + x] = best;
                ap[y * out.w + x] = idx;
            }
        }
    }
}

void maxpool2_backward(const Tensor& grad_out, const std::vector<std::uint8_t>& arg, int in_h,
                       int in_w, Tensor& grad_in) {
    grad_in.ch = grad_out.ch;
    grad_in.h = in_h;
    grad_in.w = in_w;
    grad_in.v.assign(static_cast<std::size_t>(grad_out.ch) * in_h * in_w, 0.0);
    for (int c = 0; c < grad_out.ch; ++c) {
        const double* gp = grad_out.plane(c);
        const std::uint8_t* ap = arg.data() + c * grad_out.plane_size();
        double* gip = grad_in.plane(c);
        for (int y = 0; y < grad_out.h; ++y) {
            for (int x = 0; x < grad_out.w; ++x) {
                const std::uint8_t idx = ap[y * grad_out.w + x];
                const int yy = 2 * y + (idx >> 1);
                const int xx = 2 * x + (idx & 1);
                gip[yy * in_w + xx] += gp[y * grad_out.w + x];
            }
        }
    }
}

void upsample2_forward(const Tensor& in, Tensor& out) {
    out.ch = in.ch;
    out.h = in.h * 2;
    out.w = in.w * 2;
    out.v.resize(static_cast<std::size_t>(out.ch) * out.h * out.w);
    for (int c = 0; c < in.ch; ++c) {
        const double* ip = in.plane(c);
        double* op = out.plane(c);
        for (int y = 0; y < out.h; ++y) {
            const double* irow = ip + (y / 2) * in.w;
            double* orow = op + y * out.w;
            for (int x = 0; x < out.w; ++x) orow[x] = irow[x / 2];
        }
    }
}

void upsample2_backward(const Tensor& grad_out, Tensor& grad_in) {
    grad_in.ch = grad_out.ch;
    grad_in.h = grad_out.h / 2;
    grad_in.w = grad_out.w / 2;
    grad_in.v.assign(static_cast<std::size_t>(grad_in.ch) * grad_in.h * grad_in.w, 0.0);
    for (int c = 0; c < grad_out.ch; ++c) {
        const double* gp = grad_out.plane(c);
        double* gip = grad_in.plane(c);
        for (int y = 0; y < grad_out.h; ++y) {
            double* girow = gip + (y / 2) * grad_in.w;
            for (int x = 0; x < grad_out.w; ++x) girow[x / 2] += gp[y * grad_out.w + x];
        }
    }
}

Tensor concat(const Tensor& first, const Tensor& second) {
    Tensor out(first.ch + second.ch, first.h, first.w);
    std::copy(first.v.begin(), first.v.end(), out.v.begin());
    std::copy(second.v.begin(), second.v.end(), out.v.begin() + first.v.size());
    return out;
}

// Channel-wise (spatial) dropout: a dropped feature map vanishes entirely.
// Whole-channel masks commute with ReLU and max pooling, so the inverted
// scaling stays unbiased through the encoder-decoder path.
void apply_dropout(Tensor& t, double rate, std::uint64_t seed, int block_id,
                   std::vector<double>& mask_out) {
    mask_out.assign(static_cast<std::size_t>(t.ch), 1.0);
    if (rate <= 0.0) return;
    const double inv_keep = 1.0 / (1.0 - rate);
    Rng rng(mix_seed(seed, 0xd40u, static_cast<std::uint64_t>(block_id)));
    for (int c = 0; c < t.ch; ++c) {
        const double factor = rng.uniform() < rate ? 0.0 : inv_keep;
        mask_out[c] = factor;
        if (factor != 1.0) {
            double* p = t.plane(c);
            for (std::size_t i = 0; i < t.plane_size(); ++i) p[i] *= factor;
        }
    }
}

} // namespace

std::size_t UNetModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

UNetModel build_unet(const UNetConfig& cfg, std::uint64_t rng_seed) {
    validate(cfg);
    UNetModel m;
    m.cfg = cfg;
    const int s = cfg.channels, r = cfg.base_filters, k = cfg.kernel_size, lv = cfg.levels;

    // Encoder blocks, finest to coarsest.
    for (int l = 0; l < lv; ++l) {
        const int filters = r << l;
        m.layers.push_back(make_layer(l == 0 ? s : filters / 2, filters, k));
        m.layers.push_back(make_layer(filters, filters, k));
    }
    // Bottleneck block.
    m.layers.push_back(make_layer(r << (lv - 1), r << lv, k));
    m.layers.push_back(make_layer(r << lv, r << lv, k));
    // Decoder: up-convolution then a block per level, coarsest to finest.
    for (int l = lv - 1; l >= 0; --l) {
        const int filters = r << l;
        m.layers.push_back(make_layer(filters * 2, filters, k)); // after nn-resize
        m.layers.push_back(make_layer(filters * 2, filters, k)); // after concat
        m.layers.push_back(make_layer(filters, l == 0 ? s : filters, k));
    }

    // Fan-in-scaled uniform init. The conservative bound keeps early outputs
    // small relative to the targets so the ReLU-only topology grows into the
    // signal; with larger gains the MAE sign gradients drive whole layers
    // into the dead half-plane within the first few hundred updates.
    Rng rng(rng_seed);
    for (auto& layer : m.layers) {
        const double bound = std::sqrt(0.54 / (static_cast<double>(layer.in_ch) * k * k));
        for (double& w : layer.w) w = rng.uniform(-bound, bound);
    }
    return m;
}

Tensor unet_forward(const UNetModel& model, const Tensor& x, bool training,
                    std::uint64_t dropout_seed, UNetTape* tape) {
    const UNetConfig& cfg = model.cfg;
    if (x.ch != cfg.channels || x.h != cfg.input_size || x.w != cfg.input_size)
        throw std::invalid_argument("unet_forward: input shape mismatch");

    const int lv = cfg.levels;
    if (tape) {
        tape->valid = true;
        tape->training = training;
        tape->input = x;
        tape->conv_in.assign(model.layers.size(), {});
        tape->conv_out.assign(model.layers.size(), {});
        tape->pool_arg.assign(lv, {});
        tape->dropout_mask.assign(cfg.block_count(), {});
    }

    auto run_conv = [&](int layer_idx, const Tensor& in, Tensor& out) {
        if (tape) tape->conv_in[layer_idx] = in;
        conv_forward(model.layers[layer_idx], in, out);
        relu_inplace(out);
    };
    auto end_block = [&](int block_id, Tensor& t, int layer_idx) {
        if (training) {
            std::vector<double> mask;
            apply_dropout(t, cfg.dropout_rate, dropout_seed, block_id, mask);
            if (tape) tape->dropout_mask[block_id] = std::move(mask);
        }
        if (tape) tape->conv_out[layer_idx] = t;
    };
    auto note_out = [&](int layer_idx, const Tensor& t) {
        if (tape) tape->conv_out[layer_idx] = t;
    };

    Tensor a = x, tmp;
    std::vector<Tensor> skips(lv);
    int li = 0;
    for (int l = 0; l < lv; ++l) {
        run_conv(li, a, tmp);
        note_out(li, tmp);
        ++li;
        run_conv(li, tmp, a);
        end_block(l, a, li);
        ++li;
        skips[l] = a;
        std::vector<std::uint8_t> arg;
        maxpool2_forward(a, tmp, arg);
        if (tape) tape->pool_arg[l] = std::move(arg);
        std::swap(a, tmp);
    }

    run_conv(li, a, tmp);
    note_out(li, tmp);
    ++li;
    run_conv(li, tmp, a);
    end_block(lv, a, li);
    ++li;

    for (int l = lv - 1; l >= 0; --l) {
        upsample2_forward(a, tmp);
        run_conv(li, tmp, a); // up-convolution
        note_out(li, a);
        ++li;
        Tensor joined = concat(skips[l], a);
        run_conv(li, joined, tmp);
        note_out(li, tmp);
        ++li;
        run_conv(li, tmp, a);
        end_block(lv + 1 + (lv - 1 - l), a, li);
        ++li;
    }

    if (cfg.residual)
        for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += x.v[i];
    return a;
}

std::vector<ParamBlock> unet_backward(const UNetModel& model, const UNetTape& tape,
                                      const Tensor& grad_output) {
    if (!tape.valid) throw std::logic_error("unet_backward: no cached forward pass");
    const UNetConfig& cfg = model.cfg;
    const int lv = cfg.levels;
    std::vector<ParamBlock> grads(model.layers.size());

    // d/d(pre-activation) from d/d(block output): dropout mask first (zeros
    // kill the dropped units), then the ReLU mask from the cached output.
    auto through_relu = [&](Tensor& g, int layer_idx) {
        const Tensor& out = tape.conv_out[layer_idx];
        for (std::size_t i = 0; i < g.v.size(); ++i)
            if (out.v[i] <= 0.0) g.v[i] = 0.0;
    };
    auto through_dropout = [&](Tensor& g, int block_id) {
        if (!tape.training) return;
        const auto& mask = tape.dropout_mask[block_id];
        for (int c = 0; c < g.ch; ++c) {
            if (mask[c] == 1.0) continue;
            double* p = g.plane(c);
            for (std::size_t i = 0; i < g.plane_size(); ++i) p[i] *= mask[c];
        }
    };

    Tensor g = grad_output; // d/d(final output); the residual skip is additive
    Tensor g_prev;
    std::vector<Tensor> skip_grads(lv);
    int li = static_cast<int>(model.layers.size()) - 1;

    // Decoder levels, finest first (reverse of the forward order).
    for (int l = 0; l < lv; ++l) {
        through_dropout(g, lv + 1 + (lv - 1 - l));
        through_relu(g, li);
        conv_backward(model.layers[li], tape.conv_in[li], g, grads[li], g_prev);
        std::swap(g, g_prev);
        --li;
        through_relu(g, li);
        conv_backward(model.layers[li], tape.conv_in[li], g, grads[li], g_prev);
        std::swap(g, g_prev);
        --li;
        // g is now the concat gradient: skip channels first, then the
        // up-convolution output.
        const Tensor& skip_out = tape.conv_out[2 * l + 1];
        Tensor g_skip(skip_out.ch, g.h, g.w);
        Tensor g_up(g.ch - skip_out.ch, g.h, g.w);
        std::copy(g.v.begin(), g.v.begin() + static_cast<long>(g_skip.v.size()),
                  g_skip.v.begin());
        std::copy(g.v.begin() + static_cast<long>(g_skip.v.size()), g.v.end(), g_up.v.begin());
        skip_grads[l] = std::move(g_skip);
        through_relu(g_up, li);
        conv_backward(model.layers[li], tape.conv_in[li], g_up, grads[li], g_prev);
        --li;
        upsample2_backward(g_prev, g);
    }

    // Bottleneck block.
    through_dropout(g, lv);
    through_relu(g, li);
    conv_backward(model.layers[li], tape.conv_in[li], g, grads[li], g_prev);
    std::swap(g, g_prev);
    --li;
    through_relu(g, li);
    conv_backward(model.layers[li], tape.conv_in[li], g, grads[li], g_prev);
    std::swap(g, g_prev);
    --li;

    // Encoder levels, coarsest first; fold in the stored skip gradients.
    for (int l = lv - 1; l >= 0; --l) {
        const Tensor& block_out = tape.conv_out[2 * l + 1];
        maxpool2_backward(g, tape.pool_arg[l], block_out.h, block_out.w, g_prev);
        std::swap(g, g_prev);
        for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] += skip_grads[l].v[i];
        through_dropout(g, l);
        through_relu(g, li);
        conv_backward(model.layers[li], tape.conv_in[li], g, grads[li], g_prev);
        std::swap(g, g_prev);
        --li;
        through_relu(g, li);
        conv_backward(model.layers[li], tape.conv_in[li], g, grads[li], g_prev);
        std::swap(g, g_prev);
        --li;
    }

    return grads;
}

double mae_loss(const Tensor& pred, const Tensor& target) {
    if (pred.v.size() != target.v.size())
        throw std::invalid_argument("mae_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.v.size(); ++i) acc += std::abs(pred.v[i] - target.v[i]);
    return acc / static_cast<double>(pred.v.size());
}

Tensor mae_loss_gradient(const Tensor& pred, const Tensor& target) {
    if (pred.v.size() != target.v.size())
        throw std::invalid_argument("mae_loss_gradient: shape mismatch");
    Tensor g(pred.ch, pred.h, pred.w);
    const double inv = 1.0 / static_cast<double>(pred.v.size());
    for (std::size_t i = 0; i < pred.v.size(); ++i) {
        const double d = pred.v[i] - target.v[i];
        g.v[i] = d > 0.0 ? inv : d < 0.0 ? -inv : 0.0;
    }
    return g;
}

void rmsprop_step(UNetModel& model, const std::vector<ParamBlock>& grads, OptimizerState& state) {
    if (grads.size() != model.layers.size())
        throw std::invalid_argument("rmsprop_step: gradient/layer count mismatch");
    if (state.v.size() != model.layers.size()) {
        state.v.assign(model.layers.size(), {});
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            state.v[l].w.assign(model.layers[l].w.size(), 0.0);
            state.v[l].b.assign(model.layers[l].b.size(), 0.0);
        }
    }
    const double lr = state.current_lr();
    const double rho = state.rho, eps = state.epsilon;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto step = [&](std::vector<double>& theta, const std::vector<double>& g,
                        std::vector<double>& v) {
            if (theta.size() != g.size())
                throw std::invalid_argument("rmsprop_step: gradient shape mismatch");
            for (std::size_t i = 0; i < theta.size(); ++i) {
                v[i] = rho * v[i] + (1.0 - rho) * g[i] * g[i];
                theta[i] -= lr * g[i] / (std::sqrt(v[i]) + eps);
            }
        };
        step(model.layers[l].w, grads[l].w, state.v[l].w);
        step(model.layers[l].b, grads[l].b, state.v[l].b);
    }
    ++state.step_count;
}

namespace {

void flip_horizontal(Tensor& t) {
    for (int c = 0; c < t.ch; ++c) {
        double* p = t.plane(c);
        for (int y = 0; y < t.h; ++y) {
            double* row = p + static_cast<std::size_t>(y) * t.w;
            std::reverse(row, row + t.w);
        }
    }
}

void flip_vertical(Tensor& t) {
    for (int c = 0; c < t.ch; ++c) {
        double* p = t.plane(c);
        for (int y = 0; y < t.h / 2; ++y)
            std::swap_ranges(p + static_cast<std::size_t>(y) * t.w,
                             p + static_cast<std::size_t>(y + 1) * t.w,
                             p + static_cast<std::size_t>(t.h - 1 - y) * t.w);
    }
}

} // namespace

void augment(Tensor& input, Tensor& target, std::uint64_t rng_seed, const AugmentConfig& cfg) {
    if (input.v.size() != target.v.size())
        throw std::invalid_argument("augment: input/target shape mismatch");
    Rng rng(mix_seed(rng_seed, 0xa09u));
    if (rng.uniform() < cfg.flip_probability) {
        flip_horizontal(input);
        flip_horizontal(target);
    }
    if (rng.uniform() < cfg.flip_probability) {
        flip_vertical(input);
        flip_vertical(target);
    }
    if (cfg.noise_sigma > 0.0)
        for (double& v : input.v) v += cfg.noise_sigma * rng.normal();
}

TrainReport train_unet(UNetModel& model, OptimizerState& opt, std::span<const TrainPair> train,
                       std::span<const TrainPair> val, const TrainConfig& cfg) {
    if (train.empty()) throw std::invalid_argument("train_unet: empty training set");
    if (cfg.epochs < 1 || cfg.batch_size < 1)
        throw std::invalid_argument("train_unet: epochs and batch size must be positive");

    TrainReport report;
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<ParamBlock> batch_grads(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        batch_grads[l].w.assign(model.layers[l].w.size(), 0.0);
        batch_grads[l].b.assign(model.layers[l].b.size(), 0.0);
    }

    // Per-sample gradients land in slots and are reduced in sample order, so
    // the result is identical for any worker count.
    std::vector<std::vector<ParamBlock>> slots(cfg.batch_size);
    std::vector<double> slot_loss(cfg.batch_size);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(cfg.seed, 0x5f1eu, epoch));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);

        double epoch_loss = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const double inv_batch = 1.0 / static_cast<double>(stop - start);

            parallel_for(0, stop - start, [&](std::size_t k) {
                Tensor in = train[order[start + k]].input;
                Tensor tgt = train[order[start + k]].target;
                const std::uint64_t sample_seed =
                    mix_seed(cfg.seed, epoch, batches, static_cast<std::uint64_t>(k));
                if (cfg.use_augment) augment(in, tgt, sample_seed, cfg.augment);
                UNetTape tape;
                const Tensor pred = unet_forward(model, in, true, sample_seed, &tape);
                slot_loss[k] = mae_loss(pred, tgt);
                slots[k] = unet_backward(model, tape, mae_loss_gradient(pred, tgt));
            });

            for (auto& g : batch_grads) {
                std::fill(g.w.begin(), g.w.end(), 0.0);
                std::fill(g.b.begin(), g.b.end(), 0.0);
            }
            double batch_loss = 0.0;
            for (std::size_t k = 0; k < stop - start; ++k) {
                batch_loss += slot_loss[k];
                for (std::size_t l = 0; l < slots[k].size(); ++l) {
                    for (std::size_t i = 0; i < slots[k][l].w.size(); ++i)
                        batch_grads[l].w[i] += inv_batch * slots[k][l].w[i];
                    for (std::size_t i = 0; i < slots[k][l].b.size(); ++i)
                        batch_grads[l].b[i] += inv_batch * slots[k][l].b[i];
                }
            }
            batch_loss *= inv_batch;
            if (!std::isfinite(batch_loss))
                throw numerical_error("train_unet: non-finite loss in epoch " +
                                      std::to_string(epoch) + ", batch " +
                                      std::to_string(batches));
            rmsprop_step(model, batch_grads, opt);
            epoch_loss += batch_loss;
            ++batches;
        }
        report.train_loss.push_back(epoch_loss / batches);

        std::vector<double> val_losses(val.size());
        parallel_for(0, val.size(), [&](std::size_t i) {
            const Tensor pred = unet_forward(model, val[i].input, false);
            val_losses[i] = mae_loss(pred, val[i].target);
        });
        double val_loss = 0.0;
        for (double v : val_losses) val_loss += v;
        report.val_loss.push_back(val.empty() ? 0.0 : val_loss / static_cast<double>(val.size()));
    }
    return report;
}

namespace {

constexpr char kCheckpointMagic[4] = {'S', 'C', 'T', 'M'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
double read_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void save_checkpoint(const std::string& path, const UNetModel& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("save_checkpoint: cannot open " + path);
    os.write(kCheckpointMagic, 4);
    write_u32(os, kCheckpointVersion);
    write_u32(os, static_cast<std::uint32_t>(model.cfg.channels));
    write_u32(os, static_cast<std::uint32_t>(model.cfg.levels));
    write_u32(os, static_cast<std::uint32_t>(model.cfg.base_filters));
    write_u32(os, static_cast<std::uint32_t>(model.cfg.kernel_size));
    write_u32(os, static_cast<std::uint32_t>(model.cfg.input_size));
    write_u32(os, model.cfg.residual ? 1u : 0u);
    write_f64(os, model.cfg.dropout_rate);
    for (const auto& layer : model.layers) {
        os.write(reinterpret_cast<const char*>(layer.w.data()),
                 static_cast<std::streamsize>(layer.w.size() * sizeof(double)));
        os.write(reinterpret_cast<const char*>(layer.b.data()),
                 static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
    }
    if (!os) throw io_error("save_checkpoint: write failed for " + path);
}

UNetModel load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("load_checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw io_error("load_checkpoint: bad magic in " + path);
    if (read_u32(is) != kCheckpointVersion)
        throw io_error("load_checkpoint: unsupported version in " + path);
    UNetConfig cfg;
    cfg.channels = static_cast<int>(read_u32(is));
    cfg.levels = static_cast<int>(read_u32(is));
    cfg.base_filters = static_cast<int>(read_u32(is));
    cfg.kernel_size = static_cast<int>(read_u32(is));
    cfg.input_size = static_cast<int>(read_u32(is));
    cfg.residual = read_u32(is) != 0;
    cfg.dropout_rate = read_f64(is);
    if (!is) throw io_error("load_checkpoint: truncated header in " + path);

    UNetModel model = build_unet(cfg, 0); // shapes from config, weights replaced
    for (auto& layer : model.layers) {
        is.read(reinterpret_cast<char*>(layer.w.data()),
                static_cast<std::streamsize>(layer.w.size() * sizeof(double)));
        is.read(reinterpret_cast<char*>(layer.b.data()),
                static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
    }
    if (!is) throw io_error("load_checkpoint: weight payload does not match the config");
    is.peek();
    if (!is.eof()) throw io_error("load_checkpoint: trailing bytes after weights");
    for (const auto& layer : model.layers)
        for (double w : layer.w)
            if (!std::isfinite(w)) throw io_error("load_checkpoint: non-finite weight");
    return model;
}

SpectralImage tensor_to_image(const Tensor& t, double pixel_size_cm) {
    SpectralImage img(t.ch, t.h, t.w, pixel_size_cm);
    img.data = t.v;
    return img;
}

Tensor image_to_tensor(const SpectralImage& img) {
    Tensor t(img.channels, img.height, img.width);
    t.v = img.data;
    return t;
}

} // namespace sct
