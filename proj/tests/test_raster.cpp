#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "rawtone/numerics.hpp"
#include "rawtone/raster.hpp"

using namespace rawtone;
namespace fs = std::filesystem;

namespace {

RasterMeta meta_12bit() {
    RasterMeta m;
    m.bit_depth = 12;
    m.black_level = {64, 64, 64};
    m.white_level = 4095;
    m.sensor_name = "test";
    return m;
}

fs::path tmp_file(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST_CASE("normalize_raw endpoints and midpoint") {
    const RasterMeta meta = meta_12bit();
    std::vector<std::uint32_t> counts = {64, 4095, 2079};
    // single pixel per channel: R=black, G=white, B=midpoint
    const LinearRawImage img = normalize_raw(counts, 1, 1, meta);
    CHECK(img.at(0, 0, 0) == 0.0f);
    CHECK(img.at(1, 0, 0) == 1.0f);
    CHECK(img.at(2, 0, 0) == doctest::Approx((2079.0 - 64.0) / 4031.0).epsilon(1e-6));
}

TEST_CASE("normalize_raw clamps below black level") {
    const RasterMeta meta = meta_12bit();
    std::vector<std::uint32_t> counts = {10, 64, 64};
    const LinearRawImage img = normalize_raw(counts, 1, 1, meta);
    CHECK(img.at(0, 0, 0) == 0.0f);
}

TEST_CASE("normalize_raw rejects bad meta and dimension mismatch") {
    RasterMeta meta = meta_12bit();
    meta.white_level = 64;  // == black
    std::vector<std::uint32_t> counts(3, 0);
    CHECK_THROWS_AS(normalize_raw(counts, 1, 1, meta), RasterError);

    const RasterMeta good = meta_12bit();
    std::vector<std::uint32_t> wrong(5, 0);
    CHECK_THROWS_AS(normalize_raw(wrong, 1, 1, good), RasterError);
}

TEST_CASE("normalize_raw is monotone in counts") {
    const RasterMeta meta = meta_12bit();
    float prev = -1.0f;
    for (std::uint32_t v = 0; v <= 4095; v += 13) {
        std::vector<std::uint32_t> counts = {v, v, v};
        const LinearRawImage img = normalize_raw(counts, 1, 1, meta);
        CHECK(img.at(0, 0, 0) >= prev);
        prev = img.at(0, 0, 0);
    }
}

TEST_CASE("pack_bayer_rggb direct 2x2 example") {
    RasterMeta meta;
    meta.bit_depth = 10;
    meta.white_level = 1000;
    meta.sidecar["cfa"] = "RGGB";
    std::vector<std::uint32_t> mosaic = {100, 200, 400, 800};
    const LinearRawImage img = pack_bayer_rggb(mosaic, 2, 2, meta);
    CHECK(img.height() == 1);
    CHECK(img.width() == 1);
    CHECK(img.at(0, 0, 0) == doctest::Approx(0.1).epsilon(1e-7));
    CHECK(img.at(1, 0, 0) == doctest::Approx(0.3).epsilon(1e-7));
    CHECK(img.at(2, 0, 0) == doctest::Approx(0.8).epsilon(1e-7));
}

TEST_CASE("pack_bayer_rggb uniform mosaic gives uniform image") {
    RasterMeta meta;
    meta.bit_depth = 10;
    meta.white_level = 1023;
    meta.sidecar["cfa"] = "RGGB";
    std::vector<std::uint32_t> mosaic(6 * 6, 700);
    const LinearRawImage img = pack_bayer_rggb(mosaic, 6, 6, meta);
    for (int c = 0; c < 3; ++c)
        for (float v : img.plane(c)) CHECK(v == doctest::Approx(700.0 / 1023.0).epsilon(1e-7));
}

TEST_CASE("pack_bayer_rggb matches the exhaustive per-cell oracle") {
    RasterMeta meta;
    meta.bit_depth = 12;
    meta.white_level = 4095;
    meta.black_level = {16, 16, 16};
    meta.sidecar["cfa"] = "RGGB";

    SeededRng rng(7);
    std::vector<std::uint32_t> mosaic(4 * 4);
    for (auto& v : mosaic) v = static_cast<std::uint32_t>(rng.uniform_index(4096));
    const LinearRawImage img = pack_bayer_rggb(mosaic, 4, 4, meta);

    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) {
            const double r = mosaic[(2 * y) * 4 + 2 * x];
            const double g1 = mosaic[(2 * y) * 4 + 2 * x + 1];
            const double g2 = mosaic[(2 * y + 1) * 4 + 2 * x];
            const double b = mosaic[(2 * y + 1) * 4 + 2 * x + 1];
            auto norm = [&](double count) {
                const double v = (count - 16.0) / (4095.0 - 16.0);
                return std::clamp(v, 0.0, 1.0);
            };
            CHECK(img.at(0, y, x) == doctest::Approx(norm(r)).epsilon(1e-7));
            CHECK(img.at(1, y, x) == doctest::Approx(norm((g1 + g2) / 2.0)).epsilon(1e-7));
            CHECK(img.at(2, y, x) == doctest::Approx(norm(b)).epsilon(1e-7));
        }
}

TEST_CASE("pack_bayer_rggb rejects odd dimensions and unknown CFA") {
    RasterMeta meta;
    meta.bit_depth = 10;
    meta.white_level = 1000;
    meta.sidecar["cfa"] = "RGGB";
    std::vector<std::uint32_t> mosaic(3 * 4, 1);
    CHECK_THROWS_AS(pack_bayer_rggb(mosaic, 3, 4, meta), RasterError);

    meta.sidecar["cfa"] = "GRBG";
    std::vector<std::uint32_t> square(4 * 4, 1);
    CHECK_THROWS_AS(pack_bayer_rggb(square, 4, 4, meta), RasterError);
}

TEST_CASE("rawf round trip is bit exact") {
    SeededRng rng(11);
    LinearRawImage img(8, 8, meta_12bit());
    for (float& v : img.data()) v = static_cast<float>(rng.uniform01());
    img.meta().sidecar["note"] = "round trip";

    const auto path = tmp_file("rawtone_test_roundtrip.rawf");
    write_rawf(img, path);
    const LinearRawImage back = read_rawf(path);

    CHECK(back.height() == img.height());
    CHECK(back.width() == img.width());
    CHECK(std::memcmp(back.data().data(), img.data().data(),
                      img.data().size() * sizeof(float)) == 0);
    CHECK(back.meta().bit_depth == img.meta().bit_depth);
    CHECK(back.meta().black_level == img.meta().black_level);
    CHECK(back.meta().white_level == img.meta().white_level);
    CHECK(back.meta().sensor_name == img.meta().sensor_name);
    CHECK(back.meta().sidecar == img.meta().sidecar);
    fs::remove(path);
}

TEST_CASE("truncated rawf is rejected without a partial image") {
    SeededRng rng(12);
    LinearRawImage img(4, 4, meta_12bit());
    for (float& v : img.data()) v = static_cast<float>(rng.uniform01());

    const auto path = tmp_file("rawtone_test_trunc.rawf");
    write_rawf(img, path);
    const auto size = fs::file_size(path);
    fs::resize_file(path, size - 7);
    CHECK_THROWS_AS(read_rawf(path), RasterError);
    fs::remove(path);
}

TEST_CASE("bad magic is rejected") {
    const auto path = tmp_file("rawtone_test_magic.rawf");
    std::ofstream os(path, std::ios::binary);
    os << "NOPE-this-is-not-a-raster";
    os.close();
    CHECK_THROWS_AS(read_rawf(path), RasterError);
    fs::remove(path);
}

TEST_CASE("16-bit pgm import normalizes against 65535") {
    const auto path = tmp_file("rawtone_test_const.pgm");
    std::ofstream os(path, std::ios::binary);
    os << "P5\n4 2\n65535\n";
    for (int i = 0; i < 8; ++i) {
        os.put(static_cast<char>(0x80));  // 32768 big-endian
        os.put(static_cast<char>(0x00));
    }
    os.close();

    const LinearRawImage img = read_pnm(path);
    CHECK(img.height() == 2);
    CHECK(img.width() == 4);
    for (int c = 0; c < 3; ++c)
        for (float v : img.plane(c))
            CHECK(v == doctest::Approx(32768.0 / 65535.0).epsilon(1e-9));
    fs::remove(path);
}

TEST_CASE("pnm export applies the declared display gamma") {
    LinearRawImage img(1, 2);
    img.at(0, 0, 0) = img.at(1, 0, 0) = img.at(2, 0, 0) = 0.25f;
    img.at(0, 0, 1) = img.at(1, 0, 1) = img.at(2, 0, 1) = 1.0f;

    const auto path = tmp_file("rawtone_test_gamma.ppm");
    write_pnm(img, path);
    const LinearRawImage back = read_pnm(path);
    CHECK(back.at(0, 0, 0) ==
          doctest::Approx(std::pow(0.25, 1.0 / 2.2)).epsilon(2e-5));
    CHECK(back.at(0, 0, 1) == doctest::Approx(1.0).epsilon(1e-9));
    fs::remove(path);
}

TEST_CASE("bayer output depends only on its own 2x2 cell") {
    RasterMeta meta;
    meta.bit_depth = 10;
    meta.white_level = 1023;
    meta.sidecar["cfa"] = "RGGB";
    SeededRng rng(13);
    std::vector<std::uint32_t> mosaic(8 * 8);
    for (auto& v : mosaic) v = static_cast<std::uint32_t>(rng.uniform_index(1024));

    const LinearRawImage base = pack_bayer_rggb(mosaic, 8, 8, meta);
    mosaic[0] = (mosaic[0] + 511) % 1024;  // perturb the far corner cell
    const LinearRawImage poked = pack_bayer_rggb(mosaic, 8, 8, meta);

    CHECK(base.at(0, 3, 3) == poked.at(0, 3, 3));
    CHECK(base.at(0, 0, 0) != poked.at(0, 0, 0));
}
