#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "sct/config.hpp"
#include "sct/errors.hpp"
#include "sct/rng.hpp"
#include "sct/volume_io.hpp"

using namespace sct;

TEST_SUITE_BEGIN("io-config");

TEST_CASE("volume files round-trip at 32-bit precision") {
    Rng rng(3);
    SpectralImage img(2, 6, 6, 0.1);
    for (double& v : img.data) v = rng.uniform(0.0, 8.0);
    const std::string path = "volume_test.sctv";
    write_volume(path, img, 0xabcd1234u);

    VolumeHeader header;
    const SpectralImage back = read_volume_image(path, 0.1, &header);
    CHECK(header.kind == VolumeKind::Image);
    CHECK(header.dims[0] == 2);
    CHECK(header.dims[1] == 6);
    CHECK(header.config_hash == 0xabcd1234u);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(back.data[i] == static_cast<double>(static_cast<float>(img.data[i])));

    SUBCASE("a second write/read cycle is lossless") {
        write_volume(path, back, 0xabcd1234u);
        const SpectralImage again = read_volume_image(path);
        CHECK(again.data == back.data);
    }
    SUBCASE("reading an image as a sinogram fails") {
        CHECK_THROWS_AS(read_volume_sinogram(path), io_error);
    }
    SUBCASE("truncated payloads fail") {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os << "SCTV12";
        os.close();
        CHECK_THROWS_AS(read_volume_image(path), io_error);
    }
    std::remove(path.c_str());
}

TEST_CASE("sinogram volumes carry the sinogram axis tag") {
    SpectralSinogram sino(1, 4, 7);
    for (std::size_t i = 0; i < sino.data.size(); ++i) sino.data[i] = static_cast<double>(i);
    const std::string path = "sino_test.sctv";
    write_volume(path, sino, 7);
    CHECK(peek_volume(path).kind == VolumeKind::Sinogram);
    const SpectralSinogram back = read_volume_sinogram(path);
    CHECK(back.views == 4);
    CHECK(back.bins == 7);
    CHECK(back.data == sino.data);
    std::remove(path.c_str());
}

TEST_CASE("pgm export writes a parseable header") {
    std::vector<double> plane(16, 3.83);
    const std::string path = "test_plane.pgm";
    write_pgm(path, plane, 4, 4, 7.66);
    std::ifstream is(path, std::ios::binary);
    std::string magic;
    int w, h, maxval;
    is >> magic >> w >> h >> maxval;
    CHECK(magic == "P5");
    CHECK(w == 4);
    CHECK(h == 4);
    CHECK(maxval == 255);
    is.get();
    CHECK(is.get() == 128); // 3.83 / 7.66 -> mid gray
    std::remove(path.c_str());
}

TEST_CASE("config parsing, presets, and hashing") {
    SUBCASE("defaults match the fidelity-scale geometry") {
        const RunConfig cfg;
        CHECK(cfg.image_size == 96);
        CHECK(cfg.num_views_dense == 74);
        CHECK(cfg.num_views_sparse == 9);
        CHECK(cfg.num_channels == 32);
    }
    SUBCASE("key-value text overrides defaults") {
        const RunConfig cfg = parse_config_text("geometry.num_views_sparse = 12\n"
                                                "# comment line\n"
                                                "tnv.lambda = 0.05\n"
                                                "noise.target_kev = 42.0, 76.2\n");
        CHECK(cfg.num_views_sparse == 12);
        CHECK(cfg.tnv_lambda == 0.05);
        REQUIRE(cfg.noise_target_kev.size() == 2);
        CHECK(cfg.noise_target_kev[1] == 76.2);
    }
    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_AS(parse_config_text("geometry.image_sizes = 64\n"), std::invalid_argument);
    }
    SUBCASE("serialize/parse round trip preserves the full hash") {
        RunConfig cfg;
        cfg.apply_preset("ci");
        cfg.tnv_lambda = 0.037;
        cfg.noise_target_kev = {42.0};
        const RunConfig back = parse_config_text(cfg.serialize());
        CHECK(back.full_hash() == cfg.full_hash());
        CHECK(back.image_size == 64);
    }
    SUBCASE("geometry hash ignores solver settings but sees the grid") {
        RunConfig a, b;
        b.tnv_lambda = 99.0;
        CHECK(a.geometry_hash() == b.geometry_hash());
        b.image_size = 32;
        CHECK(a.geometry_hash() != b.geometry_hash());
    }
    SUBCASE("presets") {
        RunConfig ci;
        ci.apply_preset("ci");
        CHECK(ci.image_size == 64);
        CHECK(ci.num_channels == 8);
        CHECK(ci.base_filters == 8);
        RunConfig paper;
        paper.apply_preset("paper");
        CHECK(paper.image_size == 96);
        CHECK(paper.num_channels == 32);
        CHECK_THROWS_AS(paper.apply_preset("huge"), std::invalid_argument);
    }
    SUBCASE("derived geometry uses subsampled views") {
        RunConfig cfg;
        cfg.apply_preset("ci");
        const ScanGeometry dense = cfg.dense_geometry();
        const ScanGeometry sparse = cfg.sparse_geometry();
        CHECK(dense.num_views == 74);
        CHECK(sparse.num_views == 9);
        CHECK(sparse.angles_rad[1] == dense.angles_rad[8]);
    }
}

TEST_SUITE_END();
