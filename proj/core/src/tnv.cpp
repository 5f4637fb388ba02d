#include "sct/tnv.hpp"

#include <cmath>
#include <stdexcept>

#include "sct/errors.hpp"
#include "sct/parallel.hpp"
#include "sct/projector.hpp"
#include "sct/tv.hpp"

namespace sct {

SingularPair2 singular_pair_2col(std::span<const double> col_x, std::span<const double> col_y) {
    if (col_x.size() != col_y.size())
        throw std::invalid_argument("singular_pair_2col: column length mismatch");
    double a = 0.0, b = 0.0, d = 0.0; // Gram matrix [[a, b], [b, d]]
    for (std::size_t i = 0; i < col_x.size(); ++i) {
        a += col_x[i] * col_x[i];
        b += col_x[i] * col_y[i];
        d += col_y[i] * col_y[i];
    }
    SingularPair2 out;
    if (a == 0.0 && d == 0.0) return out;

    // s1 s2 = |det J| computed through the Gram-Schmidt residual against the
    // larger column; the naive sqrt(mid - disc) route cancels catastrophically
    // for nearly rank-1 pixels.
    double res2 = 0.0;
    if (a >= d) {
        const double t = b / a;
        for (std::size_t i = 0; i < col_x.size(); ++i) {
            const double r = col_y[i] - t * col_x[i];
            res2 += r * r;
        }
        res2 *= a;
    } else {
        const double t = b / d;
        for (std::size_t i = 0; i < col_x.size(); ++i) {
            const double r = col_x[i] - t * col_y[i];
            res2 += r * r;
        }
        res2 *= d;
    }
    const double product = std::sqrt(res2); // s1 * s2
    const double trace = a + d;
    const double sum = std::sqrt(trace + 2.0 * product);              // s1 + s2
    const double gap = std::sqrt(std::max(0.0, trace - 2.0 * product)); // s1 - s2
    out.s1 = 0.5 * (sum + gap);
    out.s2 = out.s1 > 0.0 ? product / out.s1 : 0.0;

    const double lam1 = out.s1 * out.s1;
    if (std::abs(b) > 1e-300) {
        const double n = std::hypot(b, lam1 - a);
        out.v11 = b / n;
        out.v21 = (lam1 - a) / n;
    } else if (a >= d) {
        out.v11 = 1.0;
        out.v21 = 0.0;
    } else {
        out.v11 = 0.0;
        out.v21 = 1.0;
    }
    out.v12 = -out.v21;
    out.v22 = out.v11;
    return out;
}

namespace {

struct BallScaling {
    bool identity = true;
    double m11 = 1.0, m12 = 0.0, m22 = 1.0; // M = V diag(f) V^T
};

// Clip matrix for the Gram [[a, b], [b, d]] against the given radius.
BallScaling ball_scaling_from_gram(double a, double b, double d, double radius) {
    const double half_gap = 0.5 * (a - d);
    const double disc = std::sqrt(half_gap * half_gap + b * b);
    const double mid = 0.5 * (a + d);
    const double s1 = std::sqrt(std::max(0.0, mid + disc));
    if (s1 <= radius) return {};
    const double s2 = std::sqrt(std::max(0.0, mid - disc));
    double v11, v21;
    if (std::abs(b) > 1e-300) {
        const double lam1 = mid + disc;
        const double n = std::hypot(b, lam1 - a);
        v11 = b / n;
        v21 = (lam1 - a) / n;
    } else if (a >= d) {
        v11 = 1.0;
        v21 = 0.0;
    } else {
        v11 = 0.0;
        v21 = 1.0;
    }
    const double v12 = -v21, v22 = v11;
    const double f1 = radius / s1;
    const double f2 = s2 > radius ? radius / s2 : 1.0;
    BallScaling m;
    m.identity = false;
    m.m11 = f1 * v11 * v11 + f2 * v12 * v12;
    m.m12 = f1 * v11 * v21 + f2 * v12 * v22;
    m.m22 = f1 * v21 * v21 + f2 * v22 * v22;
    return m;
}

// Strided per-pixel projection used by the solver's dual update.
void project_pixel(double* col_x, double* col_y, std::size_t stride, int s_count, double radius) {
    double a = 0.0, b = 0.0, d = 0.0;
    for (int s = 0; s < s_count; ++s) {
        const double gx = col_x[s * stride];
        const double gy = col_y[s * stride];
        a += gx * gx;
        b += gx * gy;
        d += gy * gy;
    }
    const BallScaling m = ball_scaling_from_gram(a, b, d, radius);
    if (m.identity) return;
    for (int s = 0; s < s_count; ++s) {
        const double gx = col_x[s * stride];
        const double gy = col_y[s * stride];
        col_x[s * stride] = gx * m.m11 + gy * m.m12;
        col_y[s * stride] = gx * m.m12 + gy * m.m22;
    }
}

// Per-pixel spectral Jacobian columns for a whole image: gx, gy are S x H x W.
void spectral_gradient(const SpectralImage& img, std::vector<double>& gx,
                       std::vector<double>& gy) {
    gx.resize(img.data.size());
    gy.resize(img.data.size());
    const std::size_t plane = static_cast<std::size_t>(img.height) * img.width;
    for (int s = 0; s < img.channels; ++s)
        gradient_forward(img.channel(s), img.height, img.width,
                         {gx.data() + s * plane, plane}, {gy.data() + s * plane, plane});
}

} // namespace

void project_spectral_norm_ball(std::span<double> col_x, std::span<double> col_y, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("project_spectral_norm_ball: radius <= 0");
    if (col_x.size() != col_y.size())
        throw std::invalid_argument("project_spectral_norm_ball: column length mismatch");
    project_pixel(col_x.data(), col_y.data(), 1, static_cast<int>(col_x.size()), radius);
}

double tnv_penalty(const SpectralImage& img) {
    std::vector<double> gx, gy;
    spectral_gradient(img, gx, gy);
    const std::size_t plane = static_cast<std::size_t>(img.height) * img.width;
    const int s_count = img.channels;
    double acc = 0.0;
    for (std::size_t p = 0; p < plane; ++p) {
        double a = 0.0, b = 0.0, d = 0.0;
        for (int s = 0; s < s_count; ++s) {
            const double jx = gx[s * plane + p];
            const double jy = gy[s * plane + p];
            a += jx * jx;
            b += jx * jy;
            d += jy * jy;
        }
        if (a == 0.0 && d == 0.0) continue;
        // s1 + s2 = sqrt(trace + 2 |det|), with |det| from the stable
        // Gram-Schmidt residual (see singular_pair_2col).
        double res2 = 0.0;
        if (a >= d) {
            const double t = b / a;
            for (int s = 0; s < s_count; ++s) {
                const double r = gy[s * plane + p] - t * gx[s * plane + p];
                res2 += r * r;
            }
            res2 *= a;
        } else {
            const double t = b / d;
            for (int s = 0; s < s_count; ++s) {
                const double r = gx[s * plane + p] - t * gy[s * plane + p];
                res2 += r * r;
            }
            res2 *= d;
        }
        acc += std::sqrt(a + d + 2.0 * std::sqrt(res2));
    }
    return acc;
}

double tnv_objective(const SpectralImage& x, const SpectralSinogram& sino,
                     const ScanGeometry& geo, double lambda) {
    const SpectralSinogram ax = spectral_forward(x, geo);
    double data = 0.0;
    for (std::size_t i = 0; i < ax.data.size(); ++i) {
        const double r = ax.data[i] - sino.data[i];
        data += r * r;
    }
    return 0.5 * data + lambda * tnv_penalty(x);
}

TnvResult tnv_solve(const SpectralSinogram& sino, const ScanGeometry& geo, const TnvConfig& cfg) {
    if (sino.views != geo.num_views || sino.bins != geo.num_bins)
        throw std::invalid_argument("tnv_solve: sinogram/geometry mismatch");
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("tnv_solve: lambda must be positive");
    if (cfg.iters < 1) throw std::invalid_argument("tnv_solve: iters must be positive");

    const int s_count = sino.channels;
    const int n = geo.image_size;
    const std::size_t plane = static_cast<std::size_t>(n) * n;
    const std::size_t sino_plane = static_cast<std::size_t>(sino.views) * sino.bins;

    // ||K||^2 <= ||A||^2 + 8 (forward-difference gradient bound in 2D).
    const double norm_a = operator_norm(geo, 100);
    const double norm_k = std::sqrt(norm_a * norm_a + 8.0);
    const double sigma = cfg.step_product_margin / norm_k;
    const double tau = sigma;

    SpectralImage x(s_count, n, n, geo.pixel_size_cm);
    SpectralImage x_bar = x;
    SpectralImage x_avg = x;
    std::vector<double> y1(static_cast<std::size_t>(s_count) * sino_plane, 0.0);
    std::vector<double> px(x.data.size(), 0.0), py(x.data.size(), 0.0);
    std::vector<double> gx, gy;

    int performed = 0;
    for (int it = 0; it < cfg.iters; ++it) {
        // Dual update, data term: y1 <- (y1 + sigma (A x_bar - b)) / (1 + sigma).
        parallel_for(0, static_cast<std::size_t>(s_count), [&](std::size_t si) {
            std::vector<double> ax(sino_plane);
            forward_project(x_bar.channel(static_cast<int>(si)), geo, ax);
            double* y = y1.data() + si * sino_plane;
            const double* b = sino.data.data() + si * sino_plane;
            for (std::size_t i = 0; i < sino_plane; ++i)
                y[i] = (y[i] + sigma * (ax[i] - b[i])) / (1.0 + sigma);
        });

        // Dual update, TNV term: project (p + sigma grad x_bar) onto the ball.
        spectral_gradient(x_bar, gx, gy);
        for (std::size_t i = 0; i < px.size(); ++i) {
            px[i] += sigma * gx[i];
            py[i] += sigma * gy[i];
        }
        parallel_for(0, plane, [&](std::size_t p) {
            project_pixel(px.data() + p, py.data() + p, plane, s_count, cfg.lambda);
        });

        // Primal update: x_new = max(0, x - tau K^T y), then theta = 1
        // over-relaxation into x_bar.
        std::vector<double> change2_per(s_count, 0.0), norm2_per(s_count, 0.0);
        parallel_for(0, static_cast<std::size_t>(s_count), [&](std::size_t si) {
            const int s = static_cast<int>(si);
            std::vector<double> kty(plane, 0.0);
            back_project({y1.data() + si * sino_plane, sino_plane}, geo, kty);
            gradient_adjoint({px.data() + si * plane, plane}, {py.data() + si * plane, plane},
                             n, n, kty);
            double* xs = x.channel(s).data();
            double* xb = x_bar.channel(s).data();
            double c2 = 0.0, n2 = 0.0;
            for (std::size_t i = 0; i < plane; ++i) {
                const double old = xs[i];
                double next = old - tau * kty[i];
                if (next < 0.0) next = 0.0;
                const double d = next - old;
                c2 += d * d;
                n2 += next * next;
                xs[i] = next;
                xb[i] = next + d; // x_new + theta (x_new - x_old)
            }
            change2_per[si] = c2;
            norm2_per[si] = n2;
        });

        double change2 = 0.0, norm2 = 0.0;
        for (int s = 0; s < s_count; ++s) {
            change2 += change2_per[s];
            norm2 += norm2_per[s];
        }
        if (!std::isfinite(change2) || !std::isfinite(norm2))
            throw numerical_error("tnv_solve: non-finite iterate");

        performed = it + 1;
        const double inv = 1.0 / performed;
        for (std::size_t i = 0; i < x_avg.data.size(); ++i)
            x_avg.data[i] += (x.data[i] - x_avg.data[i]) * inv;

        if (change2 <= cfg.stop_tol * cfg.stop_tol * std::max(norm2, 1e-300)) break;
    }

    TnvResult result;
    result.image = std::move(x);
    result.averaged = std::move(x_avg);
    result.iterations = performed;
    return result;
}

SpectralImage tnv_reconstruct(const SpectralSinogram& sino, const ScanGeometry& geo,
                              const TnvConfig& cfg) {
    return tnv_solve(sino, geo, cfg).image;
}

} // namespace sct
