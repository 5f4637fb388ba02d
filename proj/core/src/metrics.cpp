#include "sct/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "sct/tv.hpp"

namespace sct {

namespace {
void check_same_shape(const SpectralImage& a, const SpectralImage& b, const char* who) {
    if (a.channels != b.channels || a.height != b.height || a.width != b.width)
        throw std::invalid_argument(std::string(who) + ": shape mismatch");
}
} // namespace

MetricValue mae(const SpectralImage& a, const SpectralImage& b) {
    check_same_shape(a, b, "mae");
    MetricValue out;
    out.per_channel.resize(a.channels);
    const std::size_t plane = static_cast<std::size_t>(a.height) * a.width;
    double total = 0.0;
    for (int s = 0; s < a.channels; ++s) {
        const auto ca = a.channel(s);
        const auto cb = b.channel(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < plane; ++i) acc += std::abs(ca[i] - cb[i]);
        out.per_channel[s] = acc / plane;
        total += acc;
    }
    out.scalar = total / (plane * a.channels);
    return out;
}

namespace {

// Summed-area table with a zero top row and left column.
void integral_image(std::span<const double> img, int h, int w, std::vector<double>& sat,
                    bool square, std::span<const double> other = {}) {
    sat.assign(static_cast<std::size_t>(h + 1) * (w + 1), 0.0);
    for (int r = 0; r < h; ++r) {
        double row_acc = 0.0;
        for (int c = 0; c < w; ++c) {
            const double v = square ? img[r * w + c] * img[r * w + c]
                             : other.empty() ? img[r * w + c]
                                             : img[r * w + c] * other[r * w + c];
            row_acc += v;
            sat[(r + 1) * (w + 1) + (c + 1)] = sat[r * (w + 1) + (c + 1)] + row_acc;
        }
    }
}

double window_sum(const std::vector<double>& sat, int w, int r, int c, int win) {
    const int stride = w + 1;
    return sat[(r + win) * stride + (c + win)] - sat[r * stride + (c + win)] -
           sat[(r + win) * stride + c] + sat[r * stride + c];
}

} // namespace

MetricValue ssim(const SpectralImage& a, const SpectralImage& b, const SsimConfig& cfg) {
    check_same_shape(a, b, "ssim");
    if (cfg.window < 1 || cfg.window > a.height || cfg.window > a.width)
        throw std::invalid_argument("ssim: window does not fit inside the image");
    if (!(cfg.dynamic_range > 0.0)) throw std::invalid_argument("ssim: dynamic range <= 0");

    const double c1 = cfg.k1 * cfg.dynamic_range * cfg.k1 * cfg.dynamic_range;
    const double c2 = cfg.k2 * cfg.dynamic_range * cfg.k2 * cfg.dynamic_range;
    const int h = a.height, w = a.width, win = cfg.window;
    const double area = static_cast<double>(win) * win;

    MetricValue out;
    out.per_channel.resize(a.channels);
    std::vector<double> sa, sb, saa, sbb, sab;
    for (int s = 0; s < a.channels; ++s) {
        const auto ca = a.channel(s);
        const auto cb = b.channel(s);
        integral_image(ca, h, w, sa, false);
        integral_image(cb, h, w, sb, false);
        integral_image(ca, h, w, saa, true);
        integral_image(cb, h, w, sbb, true);
        integral_image(ca, h, w, sab, false, cb);

        double acc = 0.0;
        int count = 0;
        for (int r = 0; r + win <= h; ++r) {
            for (int c = 0; c + win <= w; ++c) {
                const double mu_a = window_sum(sa, w, r, c, win) / area;
                const double mu_b = window_sum(sb, w, r, c, win) / area;
                const double var_a = window_sum(saa, w, r, c, win) / area - mu_a * mu_a;
                const double var_b = window_sum(sbb, w, r, c, win) / area - mu_b * mu_b;
                const double cov = window_sum(sab, w, r, c, win) / area - mu_a * mu_b;
                const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
                const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                acc += num / den;
                ++count;
            }
        }
        out.per_channel[s] = acc / count;
        out.scalar += out.per_channel[s];
    }
    out.scalar /= a.channels;
    return out;
}

MetricValue image_tv(const SpectralImage& img) {
    MetricValue out;
    out.per_channel.resize(img.channels);
    const double pixels = static_cast<double>(img.height) * img.width;
    for (int s = 0; s < img.channels; ++s) {
        out.per_channel[s] = tv_value(img.channel(s), img.height, img.width) / pixels;
        out.scalar += out.per_channel[s];
    }
    out.scalar /= img.channels;
    return out;
}

SpectralProfile spectral_profile(const SpectralImage& img, const PatchSpec& patch) {
    if (patch.row < 0 || patch.col < 0 || patch.height < 1 || patch.width < 1 ||
        patch.row + patch.height > img.height || patch.col + patch.width > img.width)
        throw std::invalid_argument("spectral_profile: patch outside image bounds");
    SpectralProfile out;
    out.mean.resize(img.channels);
    out.std.resize(img.channels);
    const double count = static_cast<double>(patch.height) * patch.width;
    for (int s = 0; s < img.channels; ++s) {
        double sum = 0.0, sum2 = 0.0;
        for (int r = patch.row; r < patch.row + patch.height; ++r)
            for (int c = patch.col; c < patch.col + patch.width; ++c) {
                const double v = img.at(s, r, c);
                sum += v;
                sum2 += v * v;
            }
        const double mean = sum / count;
        out.mean[s] = mean;
        out.std[s] = std::sqrt(std::max(0.0, sum2 / count - mean * mean));
    }
    return out;
}

} // namespace sct
