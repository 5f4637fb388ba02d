#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sct/metrics.hpp"
#include "sct/rng.hpp"
#include "sct/tv.hpp"

using namespace sct;

namespace {

SpectralImage random_image(int s, int n, std::uint64_t seed, double lo = 0.0, double hi = 7.0) {
    SpectralImage img(s, n, n);
    Rng rng(seed);
    for (double& v : img.data) v = rng.uniform(lo, hi);
    return img;
}

SpectralImage flip_both(const SpectralImage& img) {
    SpectralImage out = img;
    for (int s = 0; s < img.channels; ++s)
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c)
                out.at(s, r, c) = img.at(s, r, img.width - 1 - c);
    return out;
}

// Naive per-window SSIM, the reference the fast version is checked against.
double ssim_brute(std::span<const double> a, std::span<const double> b, int n, int win,
                  double c1, double c2) {
    double acc = 0.0;
    int count = 0;
    for (int r = 0; r + win <= n; ++r)
        for (int c = 0; c + win <= n; ++c) {
            double ma = 0.0, mb = 0.0;
            for (int y = 0; y < win; ++y)
                for (int x = 0; x < win; ++x) {
                    ma += a[(r + y) * n + c + x];
                    mb += b[(r + y) * n + c + x];
                }
            const double area = win * win;
            ma /= area;
            mb /= area;
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int y = 0; y < win; ++y)
                for (int x = 0; x < win; ++x) {
                    const double da = a[(r + y) * n + c + x] - ma;
                    const double db = b[(r + y) * n + c + x] - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va /= area;
            vb /= area;
            cov /= area;
            acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                   ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return acc / count;
}

} // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("mae basics") {
    const SpectralImage a = random_image(3, 12, 1);
    SUBCASE("identical images give zero") {
        const MetricValue m = mae(a, a);
        CHECK(m.scalar == 0.0);
        for (double v : m.per_channel) CHECK(v == 0.0);
    }
    SUBCASE("constant offset gives the offset") {
        SpectralImage b = a;
        for (double& v : b.data) v += 0.5;
        CHECK(mae(a, b).scalar == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("shape mismatch is an argument error") {
        const SpectralImage b = random_image(3, 10, 2);
        CHECK_THROWS_AS(mae(a, b), std::invalid_argument);
    }
    SUBCASE("triangle inequality on random triples") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const SpectralImage x = random_image(2, 8, rng.next_u64());
            const SpectralImage y = random_image(2, 8, rng.next_u64());
            const SpectralImage z = random_image(2, 8, rng.next_u64());
            CHECK(mae(x, z).scalar <= mae(x, y).scalar + mae(y, z).scalar + 1e-12);
        }
    }
}

TEST_CASE("ssim properties") {
    const SpectralImage a = random_image(2, 16, 7);
    SUBCASE("self-similarity is exactly one") {
        const MetricValue m = ssim(a, a);
        CHECK(m.scalar == 1.0);
        for (double v : m.per_channel) CHECK(v == 1.0);
    }
    SUBCASE("symmetry") {
        const SpectralImage b = random_image(2, 16, 8);
        CHECK(ssim(a, b).scalar == doctest::Approx(ssim(b, a).scalar).epsilon(1e-12));
    }
    SUBCASE("matches the brute-force sliding window to 1e-12") {
        const SpectralImage b = random_image(2, 16, 9);
        const SsimConfig cfg;
        const double c1 = cfg.k1 * cfg.dynamic_range * cfg.k1 * cfg.dynamic_range;
        const double c2 = cfg.k2 * cfg.dynamic_range * cfg.k2 * cfg.dynamic_range;
        const MetricValue fast = ssim(a, b, cfg);
        for (int s = 0; s < 2; ++s) {
            const double slow = ssim_brute(a.channel(s), b.channel(s), 16, cfg.window, c1, c2);
            CHECK(std::abs(fast.per_channel[s] - slow) < 1e-12);
        }
    }
    SUBCASE("stays in (0, 1] for non-negative reconstruction-style pairs") {
        Rng rng(31);
        for (int trial = 0; trial < 10; ++trial) {
            const SpectralImage x = random_image(1, 16, rng.next_u64());
            SpectralImage y = x; // degraded copy of the reference
            for (double& v : y.data) v = std::max(0.0, v + rng.uniform(-0.5, 0.5));
            const double v = ssim(x, y).scalar;
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("window larger than the image is an argument error") {
        const SpectralImage tiny = random_image(1, 4, 3);
        CHECK_THROWS_AS(ssim(tiny, tiny), std::invalid_argument);
    }
}

TEST_CASE("image_tv is pixel-normalized per-channel TV") {
    SUBCASE("constant image") {
        SpectralImage img(2, 10, 10);
        for (double& v : img.data) v = 3.0;
        CHECK(image_tv(img).scalar == 0.0);
    }
    SUBCASE("agrees with tv_value / N^2") {
        const SpectralImage img = random_image(3, 9, 13);
        const MetricValue m = image_tv(img);
        for (int s = 0; s < 3; ++s)
            CHECK(m.per_channel[s] ==
                  doctest::Approx(tv_value(img.channel(s), 9, 9) / 81.0).epsilon(1e-14));
    }
}

TEST_CASE("metrics are invariant under a simultaneous flip") {
    const SpectralImage a = random_image(2, 16, 21);
    const SpectralImage b = random_image(2, 16, 22);
    const SpectralImage fa = flip_both(a);
    const SpectralImage fb = flip_both(b);
    CHECK(mae(a, b).scalar == doctest::Approx(mae(fa, fb).scalar).epsilon(1e-12));
    CHECK(ssim(a, b).scalar == doctest::Approx(ssim(fa, fb).scalar).epsilon(1e-12));
    // Forward differences re-pair (dx, dy) under a flip, so isotropic TV is
    // only approximately flip invariant.
    CHECK(image_tv(a).scalar == doctest::Approx(image_tv(fa).scalar).epsilon(0.02));
}

TEST_CASE("spectral_profile summarizes a patch per channel") {
    SpectralImage img(3, 12, 12);
    for (int s = 0; s < 3; ++s)
        for (int r = 0; r < 12; ++r)
            for (int c = 0; c < 12; ++c) img.at(s, r, c) = 1.0 + s;

    SUBCASE("constant patch has the material mean and zero std") {
        const SpectralProfile p = spectral_profile(img, {2, 3, 4, 5, "patch"});
        for (int s = 0; s < 3; ++s) {
            CHECK(p.mean[s] == doctest::Approx(1.0 + s).epsilon(1e-14));
            CHECK(p.std[s] == 0.0);
        }
    }
    SUBCASE("1x1 patch picks the single pixel") {
        img.at(1, 4, 7) = 9.5;
        const SpectralProfile p = spectral_profile(img, {4, 7, 1, 1, "pixel"});
        CHECK(p.mean[1] == 9.5);
        CHECK(p.std[1] == 0.0);
    }
    SUBCASE("out-of-bounds patch is an argument error") {
        CHECK_THROWS_AS(spectral_profile(img, {10, 10, 4, 4, "oob"}), std::invalid_argument);
    }
}

TEST_SUITE_END();
