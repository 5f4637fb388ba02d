#include "sct/tv.hpp"

#include <cmath>
#include <stdexcept>

namespace sct {

namespace {
void check(std::size_t size, int height, int width, const char* who) {
    if (size != static_cast<std::size_t>(height) * width)
        throw std::invalid_argument(std::string(who) + ": size mismatch");
}
} // namespace

double tv_value(std::span<const double> img, int height, int width) {
    check(img.size(), height, width, "tv_value");
    double acc = 0.0;
    for (int r = 0; r < height; ++r) {
        const double* row = img.data() + static_cast<std::size_t>(r) * width;
        const double* below = r + 1 < height ? row + width : nullptr;
        for (int c = 0; c < width; ++c) {
            const double dx = c + 1 < width ? row[c + 1] - row[c] : 0.0;
            const double dy = below ? below[c] - row[c] : 0.0;
            acc += std::sqrt(dx * dx + dy * dy);
        }
    }
    return acc;
}

void gradient_forward(std::span<const double> img, int height, int width, std::span<double> gx,
                      std::span<double> gy) {
    check(img.size(), height, width, "gradient_forward");
    check(gx.size(), height, width, "gradient_forward");
    check(gy.size(), height, width, "gradient_forward");
    for (int r = 0; r < height; ++r) {
        const std::size_t off = static_cast<std::size_t>(r) * width;
        for (int c = 0; c < width; ++c) {
            gx[off + c] = c + 1 < width ? img[off + c + 1] - img[off + c] : 0.0;
            gy[off + c] = r + 1 < height ? img[off + width + c] - img[off + c] : 0.0;
        }
    }
}

void gradient_adjoint(std::span<const double> gx, std::span<const double> gy, int height,
                      int width, std::span<double> out) {
    check(out.size(), height, width, "gradient_adjoint");
    for (int r = 0; r < height; ++r) {
        const std::size_t off = static_cast<std::size_t>(r) * width;
        for (int c = 0; c < width; ++c) {
            double acc = 0.0;
            if (c + 1 < width) acc -= gx[off + c];
            if (c >= 1) acc += gx[off + c - 1];
            if (r + 1 < height) acc -= gy[off + c];
            if (r >= 1) acc += gy[off - width + c];
            out[off + c] += acc;
        }
    }
}

void tv_gradient(std::span<const double> img, int height, int width, std::span<double> grad,
                 double eps) {
    check(img.size(), height, width, "tv_gradient");
    check(grad.size(), height, width, "tv_gradient");
    const double eps2 = eps * eps;
    std::vector<double> gx(img.size()), gy(img.size());
    gradient_forward(img, height, width, gx, gy);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double m = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eps2);
        gx[i] /= m;
        gy[i] /= m;
    }
    for (double& g : grad) g = 0.0;
    gradient_adjoint(gx, gy, height, width, grad);
}

void tv_descent(std::span<double> img, int height, int width, int steps, double step_length,
                double eps) {
    if (steps <= 0 || step_length == 0.0) return;
    std::vector<double> grad(img.size());
    for (int t = 0; t < steps; ++t) {
        tv_gradient({img.data(), img.size()}, height, width, grad, eps);
        double norm2 = 0.0;
        for (double g : grad) norm2 += g * g;
        if (norm2 <= 0.0) return; // flat image, nothing to descend
        const double scale = step_length / std::sqrt(norm2);
        for (std::size_t i = 0; i < img.size(); ++i) img[i] -= scale * grad[i];
    }
}

} // namespace sct
