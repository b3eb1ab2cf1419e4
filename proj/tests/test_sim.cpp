#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "rawtone/numerics.hpp"
#include "rawtone/sim.hpp"

using namespace rawtone;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = RAWTONE_TEST_DATA_DIR;

struct Fixture {
    SpectralTables tables = load_spectral_tables(kDataDir);
    PcaModel pca = fit_pca(tables.cameras);
    CameraSensitivity mean = mean_sensitivity(tables.cameras);
    PatchResponse pa = colorchecker_response(mean, tables.d65, tables.reflectance);
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

LinearRawImage random_image(SeededRng& rng, int h, int w) {
    LinearRawImage img(h, w);
    for (float& v : img.data()) v = static_cast<float>(rng.uniform01());
    return img;
}

SimParams draw_params(std::uint64_t seed) {
    SimConfig config;
    SeededRng rng(seed);
    return sample_params(config, fixture().pca, fixture().pa, fixture().tables.reflectance,
                         rng);
}

}  // namespace

TEST_CASE("tint gains at zero offset are unity") {
    const auto g = tint_gain(0.0, 15.0);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 1.0);
    CHECK(g[2] == 1.0);
}

TEST_CASE("tint gains at the sampled extreme") {
    const auto g = tint_gain(0.04, 15.0);
    CHECK(g[0] == 0.7);
    CHECK(g[1] == 1.0);
    CHECK(g[2] == 0.4);
}

TEST_CASE("tint gain clamps at the 0.1 floor only when reached") {
    const auto neg = tint_gain(-0.2, 15.0);  // gains above 1: floor inactive
    CHECK(neg[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(neg[1] == 1.0);
    CHECK(neg[2] == doctest::Approx(4.0).epsilon(1e-12));

    const auto pos = tint_gain(0.2, 15.0);  // both chroma gains floor at 0.1
    CHECK(pos[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(pos[1] == 1.0);
    CHECK(pos[2] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("gray images get unit gray-world gains") {
    LinearRawImage img(4, 4);
    for (float& v : img.data()) v = 0.5f;
    const auto g = gray_world_gains(img);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g[1] == 1.0);
    CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gray-world gains equal the channel-mean ratios") {
    LinearRawImage img(2, 2);
    for (float& v : img.plane(0)) v = 0.2f;
    for (float& v : img.plane(1)) v = 0.4f;
    for (float& v : img.plane(2)) v = 0.1f;
    const auto g = gray_world_gains(img);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(g[1] == 1.0);
    CHECK(g[2] == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("gray-world gains match the mean oracle on random images") {
    SeededRng rng(1);
    const LinearRawImage img = random_image(rng, 16, 16);
    const auto g = gray_world_gains(img);
    double means[3];
    for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (float v : img.plane(c)) acc += v;
        means[c] = acc / static_cast<double>(img.pixel_count());
    }
    CHECK(g[0] == doctest::Approx(means[1] / means[0]).epsilon(1e-12));
    CHECK(g[2] == doctest::Approx(means[1] / means[2]).epsilon(1e-12));
}

TEST_CASE("an effectively missing channel is an error") {
    LinearRawImage img(4, 4);
    for (float& v : img.plane(0)) v = 0.0f;
    for (float& v : img.plane(1)) v = 0.5f;
    for (float& v : img.plane(2)) v = 0.5f;
    CHECK_THROWS_AS(gray_world_gains(img), std::runtime_error);
}

TEST_CASE("target white balance of a symmetric sensor is unity") {
    CameraSensitivity s;
    for (int c = 0; c < 3; ++c)
        for (int l = 0; l < kSpectrumSize; ++l) s.channels[c][l] = 0.5;
    const auto g = target_wb_gains(s, fixture().tables.d65);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g[1] == 1.0);
    CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("halved red response doubles the red gain") {
    CameraSensitivity s;
    for (int l = 0; l < kSpectrumSize; ++l) {
        s.channels[1][l] = 0.6;
        s.channels[0][l] = 0.3;  // half of green everywhere
        s.channels[2][l] = 0.6;
    }
    const auto g = target_wb_gains(s, fixture().tables.d65);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("target white balance matches the summation oracle") {
    const auto g = target_wb_gains(fixture().mean, fixture().tables.d65);
    double r[3];
    for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int l = 0; l < kSpectrumSize; ++l)
            acc += fixture().mean.channels[c][l] * fixture().tables.d65[l] * 10.0;
        r[c] = acc;
    }
    CHECK(g[0] == doctest::Approx(r[1] / r[0]).epsilon(1e-12));
    CHECK(g[2] == doctest::Approx(r[1] / r[2]).epsilon(1e-12));
}

TEST_CASE("full matrix assembly composes as stated") {
    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d zero = Eigen::Matrix3d::Zero();

    Eigen::Matrix3d ccm;
    ccm << 1.1, -0.1, 0.0, 0.05, 0.9, 0.05, 0.0, -0.2, 1.2;
    CHECK((assemble_full_matrix(1.0, {1, 1, 1}, ccm, zero) - ccm).cwiseAbs().maxCoeff() <
          1e-15);

    const Eigen::Matrix3d diag = assemble_full_matrix(2.0, {0.7, 1.0, 0.4}, id, zero);
    CHECK(diag(0, 0) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(diag(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(diag(2, 2) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(std::abs(diag(0, 1)) < 1e-15);

    SeededRng rng(2);
    Eigen::Matrix3d eps = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) eps(i, j) = rng.uniform(-0.05, 0.05);
    const double alpha = rng.uniform(0.5, 2.0);
    const std::array<double, 3> tint{rng.uniform(0.5, 1.5), 1.0, rng.uniform(0.5, 1.5)};
    const Eigen::Matrix3d full = assemble_full_matrix(alpha, tint, ccm, eps);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(full(i, j) ==
                  doctest::Approx(alpha * (tint[static_cast<std::size_t>(i)] * ccm(i, j) +
                                           eps(i, j)))
                      .epsilon(1e-12));
}

TEST_CASE("rolloff fixes zero, bends at the threshold, and saturates") {
    CHECK(rolloff(0.0, 1.0) == 0.0);
    CHECK(rolloff(1.0, 1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
    // tanh saturates to 1.0 exactly in double for huge arguments, so the
    // mathematically-strict bound shows up as equality here
    CHECK(rolloff(1e9, 0.95) <= 0.95);
    CHECK(rolloff(1e9, 0.95) == doctest::Approx(0.95).epsilon(1e-9));
    CHECK(rolloff(3.0, 0.95) < 0.95);
    // unit slope at the origin
    const double fd = (rolloff(1e-6, 0.9) - rolloff(-1e-6, 0.9)) / 2e-6;
    CHECK(fd == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(rolloff(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("quantization endpoints and the direct example") {
    CHECK(quantize(0.0, 10, 1.0) == 0.0);
    CHECK(quantize(1.0, 10, 1.0) == 1.0);
    CHECK(quantize(0.95, 12, 0.95) == 1.0);
    // floor(0.5 * 1023 + 0.5) / 1023 = 512 / 1023
    CHECK(quantize(0.5, 10, 1.0) == doctest::Approx(512.0 / 1023.0).epsilon(1e-12));
}

TEST_CASE("quantized values live on the bit-depth lattice") {
    SeededRng rng(3);
    for (int bits : {10, 12, 14, 16}) {
        const double levels = static_cast<double>((1 << bits) - 1);
        for (int trial = 0; trial < 2000; ++trial) {
            const double q = quantize(rng.uniform(0.0, 1.1), bits, rng.uniform(0.9, 1.0));
            const double scaled = q * levels;
            REQUIRE(std::abs(scaled - std::round(scaled)) < 1e-9);
            REQUIRE(q >= 0.0);
            REQUIRE(q <= 1.0);
        }
    }
}

TEST_CASE("sampled parameters respect their defining relations") {
    const SimParams p = draw_params(5);
    CHECK(p.alpha == doctest::Approx(std::exp2(p.u)).epsilon(1e-12));
    CHECK(p.kelvin == doctest::Approx(1e6 / p.mired).epsilon(1e-12));
    CHECK(p.u >= -3.0);
    CHECK(p.u <= 3.0);
    CHECK(p.mired >= 50.0);
    CHECK(p.mired <= 400.0);
    CHECK(p.delta_uv >= -0.04);
    CHECK(p.delta_uv <= 0.04);
    CHECK(p.s_sat >= 0.9);
    CHECK(p.s_sat <= 1.0);
    const std::vector<int> depths{10, 12, 14, 16};
    CHECK(std::count(depths.begin(), depths.end(), p.bits) == 1);
    for (int i = 0; i < 3; ++i) {
        CHECK(p.crosstalk(i, i) == 0.0);
        CHECK(p.tint_gains[static_cast<std::size_t>(i)] >= 0.1);
    }
    CHECK(p.tint_gains[1] == 1.0);
    CHECK(p.wb_target[1] == 1.0);
    // mired endpoints map exactly
    CHECK(1e6 / 50.0 == 20000.0);
    CHECK(1e6 / 400.0 == 2500.0);
}

TEST_CASE("identical seeds give identical parameter draws") {
    const SimParams a = draw_params(99);
    const SimParams b = draw_params(99);
    CHECK(a.u == b.u);
    CHECK(a.mired == b.mired);
    CHECK(a.delta_uv == b.delta_uv);
    CHECK(a.s_sat == b.s_sat);
    CHECK(a.bits == b.bits);
    CHECK((a.ccm - b.ccm).cwiseAbs().maxCoeff() == 0.0);
    for (int c = 0; c < 3; ++c) CHECK(a.pca_coeffs[c] == b.pca_coeffs[c]);
}

TEST_CASE("disabling every stage reproduces the input exactly") {
    SeededRng rng(6);
    const LinearRawImage img = random_image(rng, 12, 12);
    const SimParams p = draw_params(7);
    SimStageToggles none;
    none.wb_source = none.color_matrix = none.wb_target = false;
    none.clip_negative = none.rolloff = none.quantize = false;
    const SimResult r = apply_sim(img, p, none);
    CHECK(std::memcmp(r.image.data().data(), img.data().data(),
                      img.data().size() * sizeof(float)) == 0);
}

TEST_CASE("the full chain matches a per-pixel scalar oracle") {
    SeededRng rng(8);
    const LinearRawImage img = random_image(rng, 32, 32);
    const SimParams p = draw_params(9);
    const SimStageToggles all;  // every stage on
    const SimResult r = apply_sim(img, p, all);

    const auto wb_src = gray_world_gains(img);
    const Eigen::Matrix3d m_full =
        assemble_full_matrix(p.alpha, p.tint_gains, p.ccm, p.crosstalk);
    const double levels = static_cast<double>((1 << p.bits) - 1);

    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        double x[3];
        for (int c = 0; c < 3; ++c)
            x[c] = static_cast<double>(img.plane(c)[i]) * wb_src[static_cast<std::size_t>(c)];
        double y[3];
        for (int c = 0; c < 3; ++c)
            y[c] = m_full(c, 0) * x[0] + m_full(c, 1) * x[1] + m_full(c, 2) * x[2] +
                   p.black_offset[static_cast<std::size_t>(c)];
        for (int c = 0; c < 3; ++c) {
            double v = y[c] / p.wb_target[static_cast<std::size_t>(c)];
            v = std::max(v, 0.0);
            v = p.s_sat * std::tanh(v / p.s_sat);
            v = std::floor(std::clamp(v, 0.0, p.s_sat) / p.s_sat * levels + 0.5) / levels;
            REQUIRE(static_cast<double>(r.image.plane(c)[i]) ==
                    doctest::Approx(v).epsilon(1e-6));
        }
    }
}

TEST_CASE("pinned exposure scaling is monotone") {
    SeededRng rng(10);
    const LinearRawImage img = random_image(rng, 8, 8);
    SimParams lo = draw_params(11);
    // a positive black offset combined with a negative matrix response can
    // legitimately shrink a pixel as alpha grows; at beta = 0 monotonicity
    // is exact for every stage
    lo.black_offset = {0.0, 0.0, 0.0};
    SimParams hi = lo;
    lo.alpha = 0.7;
    hi.alpha = 2.1;
    const SimResult a = apply_sim(img, lo, SimStageToggles{});
    const SimResult b = apply_sim(img, hi, SimStageToggles{});
    for (std::size_t i = 0; i < a.image.data().size(); ++i)
        REQUIRE(b.image.data()[i] >= a.image.data()[i]);
}

TEST_CASE("provenance records the full parameter draw") {
    SeededRng rng(12);
    const LinearRawImage img = random_image(rng, 6, 6);
    const SimParams p = draw_params(13);
    const SimResult r = apply_sim(img, p, SimStageToggles{}, 13, 0xABCD);
    const auto& prov = r.provenance;
    CHECK(prov.at("seed").get<std::uint64_t>() == 13);
    CHECK(prov.at("alpha").get<double>() == p.alpha);
    CHECK(prov.at("T").get<double>() == p.kelvin);
    CHECK(prov.at("bits").get<int>() == p.bits);
    CHECK(prov.at("pca_model_hash").get<std::uint64_t>() == 0xABCD);
    CHECK(prov.at("g_tint").size() == 3);
    CHECK(prov.at("epsilon").size() == 3);
    CHECK(prov.at("ccm").size() == 3);
    CHECK(prov.at("toggles").at("rolloff").get<bool>());
    CHECK(prov.at("camera_draw_coeffs").size() == 3);
}

TEST_CASE("toml config subset parses values and toggles") {
    const auto path = fs::temp_directory_path() / "rawtone_test_config.toml";
    std::ofstream os(path);
    os << "# test config\n"
       << "u_min = -2.0\n"
       << "u_max = 2.0\n"
       << "mired_min = 100\n"
       << "mired_max = 300\n"
       << "tint_scale = 12.5\n"
       << "bit_depths = [10, 14]\n"
       << "seed = 1234\n"
       << "\n"
       << "[toggles]\n"
       << "rolloff = false\n"
       << "quantize = true\n";
    os.close();

    const SimConfig c = config_from_toml(path);
    CHECK(c.u_min == -2.0);
    CHECK(c.u_max == 2.0);
    CHECK(c.mired_min == 100.0);
    CHECK(c.mired_max == 300.0);
    CHECK(c.tint_scale == 12.5);
    REQUIRE(c.bit_depths.size() == 2);
    CHECK(c.bit_depths[0] == 10);
    CHECK(c.bit_depths[1] == 14);
    CHECK(c.seed == 1234);
    CHECK_FALSE(c.toggles.rolloff);
    CHECK(c.toggles.quantize);
    fs::remove(path);
}

TEST_CASE("invalid config ranges are rejected") {
    SimConfig c;
    c.u_min = 3.0;
    c.u_max = -3.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    SimConfig bits;
    bits.bit_depths = {30};
    CHECK_THROWS_AS(bits.validate(), std::invalid_argument);
}

TEST_CASE("config json round trip") {
    SimConfig c;
    c.u_min = -1.5;
    c.bit_depths = {12};
    c.toggles.rolloff = false;
    const SimConfig back = config_from_json(config_to_json(c));
    CHECK(back.u_min == -1.5);
    REQUIRE(back.bit_depths.size() == 1);
    CHECK(back.bit_depths[0] == 12);
    CHECK_FALSE(back.toggles.rolloff);
}
