#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "sct/fbp.hpp"
#include "sct/projector.hpp"
#include "sct/rng.hpp"

using namespace sct;
using namespace sct::test;

TEST_SUITE_BEGIN("fbp");

TEST_CASE("impulse row filters to the analytic Ram-Lak sequence") {
    const int views = 2, bins = 137;
    std::vector<double> sino(static_cast<std::size_t>(views) * bins, 0.0);
    const int impulse = bins / 2;
    sino[impulse] = 1.0;

    const auto filtered = filter_sinogram(sino, views, bins, {});
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int b = 0; b < bins; ++b) {
        const int k = b - impulse;
        double expected = 0.0;
        if (k == 0) expected = 0.25;
        else if (k % 2 != 0) expected = -1.0 / (pi2 * k * k);
        CHECK(std::abs(filtered[b] - expected) < 1e-6);
    }
    // Untouched rows stay zero.
    for (int b = 0; b < bins; ++b) CHECK(std::abs(filtered[bins + b]) < 1e-12);
}

TEST_CASE("zero sinogram filters to zero") {
    std::vector<double> sino(3 * 64, 0.0);
    for (double v : filter_sinogram(sino, 3, 64, {})) CHECK(v == doctest::Approx(0.0).scale(1));
}

TEST_CASE("ramp filtering kills a constant row") {
    // The window-edge lobes carry O(1) mass, so the DC-gain behavior shows in
    // the row mean once the row is long enough to dwarf them.
    const int bins = 2048;
    std::vector<double> sino(bins, 1.0);
    const auto filtered = filter_sinogram(sino, 1, bins, {});
    double mean = 0.0;
    for (double v : filtered) mean += v;
    mean /= bins;
    CHECK(std::abs(mean) < 1e-3);
}

TEST_CASE("hann window tames the ramp response") {
    const int bins = 64;
    Rng rng(9);
    std::vector<double> sino(bins);
    for (double& v : sino) v = rng.uniform(0.0, 1.0);
    const auto ramlak = filter_sinogram(sino, 1, bins, {RampKind::RamLak, 2});
    const auto hann = filter_sinogram(sino, 1, bins, {RampKind::HannRamLak, 2});
    double e_ramlak = 0.0, e_hann = 0.0;
    for (int b = 0; b < bins; ++b) {
        e_ramlak += ramlak[b] * ramlak[b];
        e_hann += hann[b] * hann[b];
    }
    CHECK(e_hann < e_ramlak);
}

TEST_CASE("dense-view reconstruction recovers a constant disk") {
    const int n = 96;
    const ScanGeometry geo = ScanGeometry::parallel(n, 360, 0.1);
    const auto disk = aa_disk(n, 30.0, 1.0);
    const auto sino = spectral_forward(wrap_image(disk, n), geo);
    const SpectralImage rec = fbp_reconstruct(sino, geo);

    const double cx = (n - 1) / 2.0;
    double interior_err2 = 0.0, interior_mean = 0.0;
    int count = 0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double dist = std::hypot(r - cx, c - cx);
            if (dist <= 27.0) { // stay clear of the band-limited edge
                const double v = rec.at(0, r, c);
                interior_mean += v;
                interior_err2 += (v - 1.0) * (v - 1.0);
                ++count;
            }
        }
    interior_mean /= count;
    CHECK(interior_mean == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::sqrt(interior_err2 / count) < 0.05);
}

TEST_CASE("zero sinogram reconstructs to a zero image") {
    const ScanGeometry geo = ScanGeometry::parallel(32, 12);
    SpectralSinogram sino(2, geo.num_views, geo.num_bins);
    sino.angles_rad = geo.angles_rad;
    const SpectralImage rec = fbp_reconstruct(sino, geo);
    for (double v : rec.data) CHECK(v == 0.0);
}

TEST_CASE("the whole pipeline is linear") {
    const ScanGeometry geo = ScanGeometry::parallel(24, 18);
    Rng rng(21);
    SpectralSinogram a(1, geo.num_views, geo.num_bins), b = a;
    a.angles_rad = b.angles_rad = geo.angles_rad;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        a.data[i] = rng.uniform(-1.0, 1.0);
        b.data[i] = rng.uniform(-1.0, 1.0);
    }
    SpectralSinogram combo = a;
    for (std::size_t i = 0; i < combo.data.size(); ++i)
        combo.data[i] = 0.6 * a.data[i] + 2.5 * b.data[i];
    const auto ra = fbp_reconstruct(a, geo);
    const auto rb = fbp_reconstruct(b, geo);
    const auto rc = fbp_reconstruct(combo, geo);
    for (std::size_t i = 0; i < rc.data.size(); ++i)
        CHECK(rc.data[i] ==
              doctest::Approx(0.6 * ra.data[i] + 2.5 * rb.data[i]).epsilon(1e-10).scale(1));
}

TEST_CASE("reconstruction error decreases monotonically with view count") {
    const int n = 64;
    const auto phantom = gaussian_bumps(n);
    double prev = 1e30;
    for (int views : {9, 18, 36, 72, 180}) {
        const ScanGeometry geo = ScanGeometry::parallel(n, views, 0.1);
        const auto sino = spectral_forward(wrap_image(phantom, n), geo);
        const SpectralImage rec = fbp_reconstruct(sino, geo);
        const double err = rel_rmse(rec.channel(0), phantom);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("full-circle FBP equals conjugate-folded half-circle FBP") {
    const int n = 48;
    const int views = 16;
    const ScanGeometry geo = ScanGeometry::parallel(n, views, 0.1);
    const auto phantom = gaussian_bumps(n, 77);
    const auto sino = spectral_forward(wrap_image(phantom, n), geo);
    const SpectralImage full = fbp_reconstruct(sino, geo);

    ScanGeometry half = geo;
    half.num_views = views / 2;
    half.angles_rad.assign(geo.angles_rad.begin(), geo.angles_rad.begin() + views / 2);
    SpectralSinogram folded(1, views / 2, geo.num_bins);
    folded.angles_rad = half.angles_rad;
    for (int v = 0; v < views / 2; ++v)
        for (int b = 0; b < geo.num_bins; ++b)
            folded.at(0, v, b) =
                0.5 * (sino.at(0, v, b) + sino.at(0, v + views / 2, geo.num_bins - 1 - b));
    const SpectralImage half_rec = fbp_reconstruct(folded, half);
    CHECK(rel_rmse(half_rec.channel(0), full.channel(0)) < 0.01);
}

TEST_SUITE_END();
