#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <numbers>

#include "sct/projector.hpp"
#include "sct/rng.hpp"

using namespace sct;

namespace {

// Dense ray-marching reference: walks the dominant axis in 0.01-pixel steps
// and integrates the row-interpolated image model, independently of the
// closed-form footprint enumeration.
double march_ray(std::span<const double> img, const ScanGeometry& geo, int view, int bin,
                 double step = 0.01) {
    const int n = geo.image_size;
    const double angle = geo.angles_rad[view];
    const double cos_a = std::cos(angle);
    const double sin_a = std::sin(angle);
    const double center = (n - 1) / 2.0;
    const double s = (bin - (geo.num_bins - 1) / 2.0) * geo.detector_spacing;
    const bool row_major = std::abs(cos_a) >= std::abs(sin_a);
    const double dominant = row_major ? std::abs(cos_a) : std::abs(sin_a);

    double acc = 0.0;
    for (double u = -0.5 + step / 2.0; u < n - 0.5; u += step) {
        const int line = static_cast<int>(std::lround(u));
        double cross, val = 0.0;
        if (row_major) {
            const double y = line - center;
            cross = (s - y * sin_a) / cos_a + center;
        } else {
            const double x = line - center;
            cross = (s - x * cos_a) / sin_a + center;
        }
        const int p0 = static_cast<int>(std::floor(cross));
        const double frac = cross - p0;
        auto sample = [&](int p) -> double {
            if (p < 0 || p >= n) return 0.0;
            return row_major ? img[line * n + p] : img[p * n + line];
        };
        val = (1.0 - frac) * sample(p0) + frac * sample(p0 + 1);
        acc += val * step / dominant;
    }
    return acc * geo.pixel_size_cm;
}

std::vector<double> aa_disk(int n, double radius_px, double mu) {
    std::vector<double> img(static_cast<std::size_t>(n) * n, 0.0);
    const double cx = (n - 1) / 2.0;
    constexpr int sub = 8;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            int inside = 0;
            for (int sy = 0; sy < sub; ++sy)
                for (int sx = 0; sx < sub; ++sx) {
                    const double y = r - cx + (sy + 0.5) / sub - 0.5;
                    const double x = c - cx + (sx + 0.5) / sub - 0.5;
                    if (x * x + y * y <= radius_px * radius_px) ++inside;
                }
            img[static_cast<std::size_t>(r) * n + c] = mu * inside / (sub * sub);
        }
    return img;
}

} // namespace

TEST_SUITE_BEGIN("projector");

TEST_CASE("zero image projects to a zero sinogram") {
    const ScanGeometry geo = ScanGeometry::parallel(16, 6);
    std::vector<double> img(16 * 16, 0.0);
    for (double v : forward_project(img, geo)) CHECK(v == 0.0);
}

TEST_CASE("center ray through a constant disk matches the chord length") {
    // radius 10 px * 0.1 cm/px, mu = 1 -> line integral 2 * 1.0 cm * 1.0.
    const int n = 65;
    const ScanGeometry geo = ScanGeometry::parallel_with_bins(n, 4, 93, 0.1);
    const auto img = aa_disk(n, 10.0, 1.0);
    const auto sino = forward_project(img, geo);
    const int center_bin = (geo.num_bins - 1) / 2;
    for (int v = 0; v < geo.num_views; ++v) {
        const double value = sino[static_cast<std::size_t>(v) * geo.num_bins + center_bin];
        CHECK(value == doctest::Approx(2.0).epsilon(0.02));
    }
}

TEST_CASE("ray sums match the dense marching reference") {
    Rng rng(11);
    std::vector<double> img(16 * 16);
    for (double& v : img) v = rng.uniform(0.0, 1.0);

    SUBCASE("V = 4") {
        const ScanGeometry geo = ScanGeometry::parallel(16, 4);
        const auto sino = forward_project(img, geo);
        double max_rel = 0.0;
        for (int v = 0; v < geo.num_views; ++v)
            for (int b = 0; b < geo.num_bins; ++b) {
                const double ref = march_ray(img, geo, v, b);
                const double got = sino[static_cast<std::size_t>(v) * geo.num_bins + b];
                const double denom = std::max(std::abs(ref), 1e-9);
                max_rel = std::max(max_rel, std::abs(got - ref) / denom);
            }
        CHECK(max_rel < 1e-3);
    }
    SUBCASE("oblique views") {
        ScanGeometry geo = ScanGeometry::parallel(16, 5);
        geo.angles_rad = {0.3, 0.7, 1.9, 3.8, 5.2};
        const auto sino = forward_project(img, geo);
        double max_abs = 0.0, scale = 0.0;
        for (int v = 0; v < geo.num_views; ++v)
            for (int b = 0; b < geo.num_bins; ++b) {
                const double ref = march_ray(img, geo, v, b, 0.002);
                const double got = sino[static_cast<std::size_t>(v) * geo.num_bins + b];
                max_abs = std::max(max_abs, std::abs(got - ref));
                scale = std::max(scale, std::abs(ref));
            }
        CHECK(max_abs < 5e-3 * scale);
    }
}

TEST_CASE("back projection of an impulse equals the ray footprint") {
    const ScanGeometry geo = ScanGeometry::parallel(8, 5);
    const std::size_t pixels = 64;

    // Oracle: enumerate the ray's weights by forward-projecting every basis image.
    const int view = 3, bin = geo.num_bins / 2 - 1;
    std::vector<double> weights(pixels, 0.0);
    std::vector<double> basis(pixels, 0.0);
    for (std::size_t j = 0; j < pixels; ++j) {
        basis[j] = 1.0;
        weights[j] = forward_project(basis, geo)[static_cast<std::size_t>(view) * geo.num_bins +
                                                 bin];
        basis[j] = 0.0;
    }

    std::vector<double> impulse(static_cast<std::size_t>(geo.num_views) * geo.num_bins, 0.0);
    impulse[static_cast<std::size_t>(view) * geo.num_bins + bin] = 1.0;
    const auto img = back_project(impulse, geo);
    for (std::size_t j = 0; j < pixels; ++j)
        CHECK(img[j] == doctest::Approx(weights[j]).epsilon(1e-12));
}

TEST_CASE("zero sinogram back-projects to a zero image") {
    const ScanGeometry geo = ScanGeometry::parallel(8, 3);
    std::vector<double> sino(static_cast<std::size_t>(geo.num_views) * geo.num_bins, 0.0);
    for (double v : back_project(sino, geo)) CHECK(v == 0.0);
}

TEST_CASE("adjoint identity holds to 1e-10 over 100 random pairs") {
    const ScanGeometry geo = ScanGeometry::parallel(32, 9);
    const std::size_t pixels = 32 * 32;
    const std::size_t rays = static_cast<std::size_t>(geo.num_views) * geo.num_bins;
    Rng rng(123);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(pixels), y(rays);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        for (double& v : y) v = rng.uniform(-1.0, 1.0);
        const auto ax = forward_project(x, geo);
        const auto aty = back_project(y, geo);
        double ax_y = 0.0, x_aty = 0.0, ax_norm = 0.0, y_norm = 0.0;
        for (std::size_t i = 0; i < rays; ++i) {
            ax_y += ax[i] * y[i];
            ax_norm += ax[i] * ax[i];
            y_norm += y[i] * y[i];
        }
        for (std::size_t i = 0; i < pixels; ++i) x_aty += x[i] * aty[i];
        worst = std::max(worst,
                         std::abs(ax_y - x_aty) / (std::sqrt(ax_norm) * std::sqrt(y_norm)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("forward projection is linear") {
    const ScanGeometry geo = ScanGeometry::parallel(12, 7);
    Rng rng(5);
    std::vector<double> x(144), y(144), combo(144);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(-1.0, 1.0);
        y[i] = rng.uniform(-1.0, 1.0);
        combo[i] = 1.7 * x[i] - 0.4 * y[i];
    }
    const auto ax = forward_project(x, geo);
    const auto ay = forward_project(y, geo);
    const auto ac = forward_project(combo, geo);
    for (std::size_t i = 0; i < ac.size(); ++i)
        CHECK(ac[i] == doctest::Approx(1.7 * ax[i] - 0.4 * ay[i]).epsilon(1e-12));
}

TEST_CASE("isotropic phantom projects identically across views") {
    const int n = 64;
    const ScanGeometry geo = ScanGeometry::parallel(n, 12, 0.1);
    const auto img = aa_disk(n, 20.0, 1.0);
    const auto sino = forward_project(img, geo);
    std::vector<double> first(sino.begin(), sino.begin() + geo.num_bins);
    double ref_norm = 0.0;
    for (double v : first) ref_norm += v * v;
    ref_norm = std::sqrt(ref_norm);
    for (int v = 1; v < geo.num_views; ++v) {
        double diff = 0.0;
        for (int b = 0; b < geo.num_bins; ++b) {
            const double d = sino[static_cast<std::size_t>(v) * geo.num_bins + b] - first[b];
            diff += d * d;
        }
        CHECK(std::sqrt(diff) / ref_norm < 0.01);
    }
}

TEST_CASE("spectral operators act channel-wise") {
    const ScanGeometry geo = ScanGeometry::parallel(16, 5);
    Rng rng(17);
    SpectralImage img(3, 16, 16);
    for (double& v : img.data) v = rng.uniform(0.0, 1.0);

    const SpectralSinogram sino = spectral_forward(img, geo);

    SUBCASE("S = 1 reduces to the single-channel operator") {
        SpectralImage one(1, 16, 16);
        std::copy(img.channel(1).begin(), img.channel(1).end(), one.channel(0).begin());
        const SpectralSinogram s1 = spectral_forward(one, geo);
        const auto direct = forward_project(img.channel(1), geo);
        for (std::size_t i = 0; i < direct.size(); ++i) {
            CHECK(s1.data[i] == direct[i]);
            CHECK(sino.channel(1)[i] == direct[i]);
        }
    }
    SUBCASE("channel permutation commutes with the operator") {
        SpectralImage permuted(3, 16, 16);
        const int perm[3] = {2, 0, 1};
        for (int s = 0; s < 3; ++s)
            std::copy(img.channel(perm[s]).begin(), img.channel(perm[s]).end(),
                      permuted.channel(s).begin());
        const SpectralSinogram ps = spectral_forward(permuted, geo);
        for (int s = 0; s < 3; ++s)
            for (std::size_t i = 0; i < ps.channel(s).size(); ++i)
                CHECK(ps.channel(s)[i] == sino.channel(perm[s])[i]);
    }
    SUBCASE("round trip through the adjoint matches shapes") {
        const SpectralImage back = spectral_back(sino, geo);
        CHECK(back.channels == 3);
        CHECK(back.height == 16);
    }
}

TEST_CASE("operator norm: single-pixel geometry equals the pixel size") {
    // V = 1, axis-aligned, D = N with N = 1: the system matrix is the 1x1
    // scaled identity [pixel_size], so the norm is the pixel size itself.
    const ScanGeometry geo = ScanGeometry::parallel_with_bins(1, 1, 1, 0.1);
    CHECK(operator_norm(geo, 25) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("operator norm estimates are non-decreasing in iteration count") {
    const ScanGeometry geo = ScanGeometry::parallel(16, 7);
    double prev = 0.0;
    for (int iters = 10; iters <= 100; iters += 10) {
        const double est = operator_norm(geo, iters);
        CHECK(est >= prev - 1e-12 * est);
        prev = est;
    }
}

TEST_CASE("operator norm matches a dense SVD within 0.5%") {
    const ScanGeometry geo = ScanGeometry::parallel(32, 9);
    const std::size_t pixels = 32 * 32;
    const std::size_t rays = static_cast<std::size_t>(geo.num_views) * geo.num_bins;
    Eigen::MatrixXd dense(rays, pixels);
    std::vector<double> basis(pixels, 0.0);
    for (std::size_t j = 0; j < pixels; ++j) {
        basis[j] = 1.0;
        const auto col = forward_project(basis, geo);
        for (std::size_t i = 0; i < rays; ++i) dense(i, j) = col[i];
        basis[j] = 0.0;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
    const double truth = svd.singularValues()(0);
    const double est = operator_norm(geo, 300);
    CHECK(std::abs(est - truth) / truth < 0.005);
}

TEST_CASE("spectral forward scales roughly linearly in channel count") {
    const ScanGeometry geo = ScanGeometry::parallel(64, 9);
    SpectralImage one(1, 64, 64), many(32, 64, 64);
    Rng rng(2);
    for (double& v : many.data) v = rng.uniform(0.0, 1.0);
    std::copy(many.channel(0).begin(), many.channel(0).end(), one.channel(0).begin());

    auto time_of = [&](const SpectralImage& img) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto sino = spectral_forward(img, geo);
        const auto t1 = std::chrono::steady_clock::now();
        (void)sino;
        return std::chrono::duration<double>(t1 - t0).count();
    };
    time_of(one); // warm-up
    double best_one = 1e9, best_many = 1e9;
    for (int rep = 0; rep < 3; ++rep) {
        best_one = std::min(best_one, time_of(one));
        best_many = std::min(best_many, time_of(many));
    }
    CHECK(best_many <= 40.0 * std::max(best_one, 1e-6));
}

TEST_SUITE_END();
