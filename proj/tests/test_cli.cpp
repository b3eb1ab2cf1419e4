#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rawtone/adapter.hpp"
#include "rawtone/numerics.hpp"
#include "rawtone/raster.hpp"

using namespace rawtone;
namespace fs = std::filesystem;

namespace {

const std::string kCli = RAWTONE_CLI_PATH;
const std::string kData = RAWTONE_TEST_DATA_DIR;

int run(const std::string& args) {
    const std::string cmd = kCli + " --data-dir " + kData + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

int run_capture(const std::string& args, std::string& out) {
    const fs::path tmp = fs::temp_directory_path() / "rawtone_cli_capture.txt";
    const std::string cmd =
        kCli + " --data-dir " + kData + " " + args + " > " + tmp.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream is(tmp);
    std::stringstream buf;
    buf << is.rdbuf();
    out = buf.str();
    fs::remove(tmp);
    return WEXITSTATUS(status);
}

std::string read_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

struct TempTree {
    fs::path root;
    explicit TempTree(const std::string& name) : root(fs::temp_directory_path() / name) {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~TempTree() { fs::remove_all(root); }
};

void write_random_inputs(const fs::path& dir, int count, std::uint64_t seed) {
    fs::create_directories(dir);
    SeededRng rng(seed);
    for (int i = 0; i < count; ++i) {
        LinearRawImage img(12, 16);
        for (float& v : img.data()) v = static_cast<float>(rng.uniform01());
        img.meta().sensor_name = "cli-test";
        write_rawf(img, dir / ("input_" + std::to_string(i) + ".rawf"));
    }
}

}  // namespace

TEST_CASE("sim runs are deterministic and replayable") {
    TempTree tree("rawtone_cli_sim");
    write_random_inputs(tree.root / "in", 3, 42);

    REQUIRE(run("sim --in " + (tree.root / "in").string() + " --out " +
                (tree.root / "out1").string() + " --seed 7 --count 2") == 0);
    REQUIRE(run("sim --in " + (tree.root / "in").string() + " --out " +
                (tree.root / "out2").string() + " --seed 7 --count 2") == 0);

    int outputs = 0;
    for (const auto& entry : fs::directory_iterator(tree.root / "out1")) {
        if (entry.path().extension() != ".rawf") continue;
        ++outputs;
        const auto twin = tree.root / "out2" / entry.path().filename();
        REQUIRE(fs::exists(twin));
        CHECK(read_bytes(entry.path()) == read_bytes(twin));
        const auto prov = entry.path().parent_path() /
                          (entry.path().stem().string() + ".prov.json");
        CHECK(fs::exists(prov));
    }
    CHECK(outputs == 6);
    CHECK(fs::exists(tree.root / "out1" / "manifest.json"));

    const auto manifest = nlohmann::json::parse(read_bytes(tree.root / "out1" / "manifest.json"));
    CHECK(manifest.at("outputs").size() == 6);
    CHECK(manifest.at("seed").get<std::uint64_t>() == 7);
}

TEST_CASE("disabling every stage copies inputs byte-for-byte") {
    TempTree tree("rawtone_cli_noop");
    write_random_inputs(tree.root / "in", 1, 43);

    REQUIRE(run("sim --in " + (tree.root / "in" / "input_0.rawf").string() + " --out " +
                (tree.root / "out").string() + " --seed 1 --toggle all=off") == 0);
    CHECK(read_bytes(tree.root / "in" / "input_0.rawf") ==
          read_bytes(tree.root / "out" / "input_0_v0.rawf"));
}

TEST_CASE("pinned bit depth produces lattice-valued outputs") {
    TempTree tree("rawtone_cli_bits");
    write_random_inputs(tree.root / "in", 1, 44);

    REQUIRE(run("sim --in " + (tree.root / "in").string() + " --out " +
                (tree.root / "out").string() + " --seed 3 --bits 12") == 0);
    const LinearRawImage out = read_rawf(tree.root / "out" / "input_0_v0.rawf");
    CHECK(out.meta().bit_depth == 12);
    for (float v : out.data()) {
        const double scaled = static_cast<double>(v) * 4095.0;
        // f32 storage rounding: 4095 * 2^-25 ~ 1.2e-4
        REQUIRE(std::abs(scaled - std::round(scaled)) < 1e-3);
    }
}

TEST_CASE("apply with an identity bundle reproduces the input") {
    TempTree tree("rawtone_cli_apply");
    write_random_inputs(tree.root / "in", 1, 45);

    AdapterParams identity;
    identity.curve = CurveParams::identity(8);
    identity.grid = GridCoeffs::zeros(8, 1, 1);
    write_bundle(identity, tree.root / "params.json");

    REQUIRE(run("apply --in " + (tree.root / "in" / "input_0.rawf").string() + " --out " +
                (tree.root / "out.rawf").string() + " --params " +
                (tree.root / "params.json").string()) == 0);

    const LinearRawImage in = read_rawf(tree.root / "in" / "input_0.rawf");
    const LinearRawImage out = read_rawf(tree.root / "out.rawf");
    CHECK(std::memcmp(in.data().data(), out.data().data(),
                      in.data().size() * sizeof(float)) == 0);
}

TEST_CASE("hist of a constant image is a constant table") {
    TempTree tree("rawtone_cli_hist");
    LinearRawImage img(8, 8);
    for (float& v : img.data()) v = 0.25f;
    write_rawf(img, tree.root / "const.rawf");

    std::string out;
    REQUIRE(run_capture("hist --in " + (tree.root / "const.rawf").string() + " --q 8", out) == 0);
    std::istringstream lines(out);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string field;
        int cols = 0;
        while (std::getline(fields, field, ',')) {
            ++cols;
            CHECK(std::stod(field) == doctest::Approx(0.25).epsilon(1e-6));
        }
        CHECK(cols == 8);
    }
    CHECK(rows == 3);
}

TEST_CASE("curve-plot emits the identity diagonal for an identity curve") {
    TempTree tree("rawtone_cli_plot");
    std::ofstream cf(tree.root / "curve.json");
    cf << curve_to_json(CurveParams::identity(8)).dump() << "\n";
    cf.close();

    std::string out;
    REQUIRE(run_capture("curve-plot --params " + (tree.root / "curve.json").string() +
                            " --samples 5",
                        out) == 0);
    std::istringstream lines(out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,g_R,g_G,g_B");
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string t, r;
        std::getline(fields, t, ',');
        std::getline(fields, r, ',');
        CHECK(std::stod(r) == doctest::Approx(std::stod(t)).epsilon(1e-9));
    }
}

TEST_CASE("fit-ccm of the mean camera against itself is the identity") {
    std::string out;
    REQUIRE(run_capture("fit-ccm --sens-a mean --sens-b mean --illum d65", out) == 0);
    const auto j = nlohmann::json::parse(out);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            CHECK(j.at("ccm")[i][k].get<double>() ==
                  doctest::Approx(i == k ? 1.0 : 0.0).epsilon(1e-10));
    CHECK(j.at("residual").get<double>() < 1e-10);
}

TEST_CASE("spectra planck emits a normalized table") {
    std::string out;
    REQUIRE(run_capture("spectra planck --temp 6500", out) == 0);
    std::istringstream lines(out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "wavelength,power");
    double peak = 0.0;
    int rows = 0;
    std::string line;
    while (std::getline(lines, line)) {
        ++rows;
        const auto comma = line.find(',');
        peak = std::max(peak, std::stod(line.substr(comma + 1)));
    }
    CHECK(rows == 33);
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("verify runs a fast suite cleanly") {
    CHECK(run("verify --suite numerics") == 0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("sim --out /tmp/nowhere") == 2);       // missing required --in
    CHECK(run("definitely-not-a-command") == 2);
}

TEST_CASE("missing files exit with code 3") {
    CHECK(run("hist --in /nonexistent/file.rawf") == 3);
}
