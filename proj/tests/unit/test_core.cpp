#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sct/rng.hpp"
#include "sct/types.hpp"

using namespace sct;

TEST_SUITE_BEGIN("core");

TEST_CASE("default energy grid spans 20 to 108.2 keV over 32 channels") {
    const EnergyGrid g = EnergyGrid::standard32();
    REQUIRE(g.num_channels == 32);
    CHECK(g.energies_keV.front() == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(g.energies_keV.back() == doctest::Approx(108.2).epsilon(1e-15));
    const double step = g.energies_keV[1] - g.energies_keV[0];
    for (int k = 1; k < 32; ++k) {
        CHECK(g.energies_keV[k] > g.energies_keV[k - 1]);
        CHECK(g.energies_keV[k] - g.energies_keV[k - 1] == doctest::Approx(step).epsilon(1e-12));
    }
}

TEST_CASE("nearest_channel picks the closest midpoint") {
    const EnergyGrid g = EnergyGrid::standard32();
    CHECK(nearest_channel(g, 20.0) == 0);
    CHECK(nearest_channel(g, 108.2) == 31);
    // The noise-experiment energies sit closest to channels 8 and 20.
    CHECK(nearest_channel(g, 42.0) == 8);
    CHECK(nearest_channel(g, 76.2) == 20);
}

TEST_CASE("counts_to_mu implements -ln(I/I0) with a finite cap") {
    const double i0[3] = {1000.0, 1000.0, 1000.0};
    double mu[3];

    SUBCASE("full transmission gives zero") {
        const double i[3] = {1000.0, 1000.0, 1000.0};
        counts_to_mu({i, 3}, {i0, 3}, {mu, 3});
        for (double m : mu) CHECK(m == 0.0);
    }
    SUBCASE("1/e transmission gives one") {
        const double i[3] = {1000.0 / std::exp(1.0), 1000.0, 1000.0};
        counts_to_mu({i, 3}, {i0, 3}, {mu, 3});
        CHECK(mu[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("I=100, I0=1000 gives ln 10") {
        const double i[3] = {100.0, 100.0, 100.0};
        counts_to_mu({i, 3}, {i0, 3}, {mu, 3});
        CHECK(mu[0] == doctest::Approx(2.302585092994046).epsilon(1e-12));
    }
    SUBCASE("zero counts land on the cap") {
        const double i[3] = {0.0, 1000.0, 1000.0};
        counts_to_mu({i, 3}, {i0, 3}, {mu, 3}, 20.0);
        CHECK(mu[0] == 20.0);
    }
    SUBCASE("shape mismatch is an argument error") {
        const double i[2] = {1.0, 1.0};
        CHECK_THROWS_AS(counts_to_mu({i, 2}, {i0, 3}, {mu, 3}), std::invalid_argument);
    }
    SUBCASE("non-positive incident counts are a domain error") {
        const double i[3] = {1.0, 1.0, 1.0};
        const double bad[3] = {1000.0, 0.0, 1000.0};
        CHECK_THROWS_AS(counts_to_mu({i, 3}, {bad, 3}, {mu, 3}), std::domain_error);
    }
}

TEST_CASE("counts_to_mu is monotone: decreasing I never decreases mu") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const double i0 = rng.uniform(10.0, 1e6);
        double i_hi = rng.uniform(0.0, i0);
        double i_lo = rng.uniform(0.0, i_hi);
        double mu_hi, mu_lo;
        counts_to_mu({&i_hi, 1}, {&i0, 1}, {&mu_hi, 1});
        counts_to_mu({&i_lo, 1}, {&i0, 1}, {&mu_lo, 1});
        CHECK(mu_lo >= mu_hi);
    }
}

TEST_CASE("scale round trip is the identity") {
    const ScaleReference ref;
    Rng rng(3);
    SpectralImage img(3, 8, 8);
    for (double& v : img.data) v = rng.uniform(0.0, 12.0);

    SUBCASE("reference value maps to one and back") {
        img.data[0] = 7.66;
        const SpectralImage unit = scale_to_unit(img, ref);
        CHECK(unit.data[0] == doctest::Approx(1.0).epsilon(1e-15));
        const SpectralImage back = rescale_from_unit(unit, ref);
        for (std::size_t i = 0; i < img.data.size(); ++i)
            CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
    }
    SUBCASE("half the reference maps to one half") {
        img.data[5] = 3.83;
        CHECK(scale_to_unit(img, ref).data[5] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("zero stays zero") {
        img.data[9] = 0.0;
        CHECK(scale_to_unit(img, ref).data[9] == 0.0);
    }
    SUBCASE("non-finite input is a domain error") {
        img.data[2] = std::nan("");
        CHECK_THROWS_AS(scale_to_unit(img, ref), std::domain_error);
    }
}

TEST_SUITE_END();
