#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rawtone/adapter.hpp"
#include "rawtone/curve.hpp"
#include "rawtone/grid.hpp"
#include "rawtone/numerics.hpp"
#include "rawtone/quantiles.hpp"
#include "rawtone/raster.hpp"
#include "rawtone/sim.hpp"
#include "rawtone/spectral.hpp"
#include "rawtone/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::uint64_t hash_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << is.rdbuf();
    const std::string s = buf.str();
    return rawtone::fnv1a64(s.data(), s.size());
}

std::vector<fs::path> collect_inputs(const fs::path& in) {
    std::vector<fs::path> files;
    if (fs::is_directory(in)) {
        for (const auto& entry : fs::directory_iterator(in)) {
            const auto ext = entry.path().extension().string();
            if (ext == ".rawf" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(in);
    }
    if (files.empty()) throw std::runtime_error("no decodable inputs under " + in.string());
    return files;
}

void apply_toggle_spec(rawtone::SimStageToggles& toggles, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--toggle expects stage=on|off");
    const std::string stage = spec.substr(0, eq);
    const std::string state = spec.substr(eq + 1);
    if (state != "on" && state != "off") throw CLI::ValidationError("--toggle expects on|off");
    const bool value = state == "on";
    if (stage == "all") {
        toggles.wb_source = toggles.color_matrix = toggles.wb_target = value;
        toggles.clip_negative = toggles.rolloff = toggles.quantize = value;
    } else if (stage == "wb_source") {
        toggles.wb_source = value;
    } else if (stage == "color_matrix") {
        toggles.color_matrix = value;
    } else if (stage == "wb_target") {
        toggles.wb_target = value;
    } else if (stage == "clip_negative") {
        toggles.clip_negative = value;
    } else if (stage == "rolloff") {
        toggles.rolloff = value;
    } else if (stage == "quantize") {
        toggles.quantize = value;
    } else {
        throw CLI::ValidationError("unknown stage: " + stage);
    }
}

rawtone::CameraSensitivity pick_sensitivity(const rawtone::SpectralTables& tables,
                                            const std::string& spec) {
    if (spec == "mean") return rawtone::mean_sensitivity(tables.cameras);
    for (const auto& cam : tables.cameras)
        if (cam.name == spec) return cam;
    try {
        const std::size_t idx = std::stoul(spec);
        return tables.cameras.at(idx);
    } catch (const std::exception&) {
        throw std::runtime_error("unknown camera: " + spec +
                                 " (use 'mean', a camera name, or a 0-based index)");
    }
}

rawtone::Spectrum pick_illuminant(const rawtone::SpectralTables& tables,
                                  const std::string& spec) {
    if (spec == "d65" || spec == "D65") return tables.d65;
    return rawtone::planck_spd(std::stod(spec));
}

// ---- sim ----

int cmd_sim(const std::string& in, const std::string& out_dir, const std::string& config_path,
            std::optional<std::uint64_t> seed_flag, int count,
            const std::vector<std::string>& toggle_specs, std::optional<int> bits_pin,
            const std::string& data_dir) {
    rawtone::SimConfig config;
    if (!config_path.empty()) config = rawtone::config_from_toml(config_path);
    if (seed_flag) config.seed = *seed_flag;
    for (const auto& spec : toggle_specs) apply_toggle_spec(config.toggles, spec);
    if (bits_pin) config.bit_depths = {*bits_pin};
    config.validate();

    const rawtone::SpectralTables tables =
        rawtone::load_spectral_tables(rawtone::resolve_data_dir(data_dir));
    const rawtone::PcaModel pca = rawtone::fit_pca(tables.cameras);
    const rawtone::CameraSensitivity mean = rawtone::mean_sensitivity(tables.cameras);
    const rawtone::PatchResponse pa =
        rawtone::colorchecker_response(mean, tables.d65, tables.reflectance);
    const std::uint64_t pca_hash = rawtone::pca_model_hash(pca);

    const auto inputs = collect_inputs(in);
    fs::create_directories(out_dir);

    json manifest{{"command", "sim"},
                  {"tool_version", RAWTONE_VERSION},
                  {"seed", config.seed},
                  {"count", count},
                  {"config", rawtone::config_to_json(config)},
                  {"inputs", json::array()},
                  {"outputs", json::array()}};

    int failures = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        manifest["inputs"].push_back(
            json{{"path", inputs[i].string()}, {"fnv1a64", hash_file(inputs[i])}});
        rawtone::LinearRawImage img;
        try {
            img = rawtone::read_raster(inputs[i]);
        } catch (const std::exception& e) {
            std::cerr << "error: " << inputs[i].string() << ": " << e.what() << "\n";
            ++failures;
            continue;
        }
        for (int v = 0; v < count; ++v) {
            const std::uint64_t seed = rawtone::derive_seed(
                config.seed, i * static_cast<std::size_t>(count) + static_cast<std::size_t>(v));
            try {
                rawtone::SeededRng rng(seed);
                const rawtone::SimParams params =
                    rawtone::sample_params(config, pca, pa, tables.reflectance, rng);
                rawtone::SimResult result =
                    rawtone::apply_sim(img, params, config.toggles, seed, pca_hash);

                const std::string stem =
                    inputs[i].stem().string() + "_v" + std::to_string(v);
                const fs::path out_img = fs::path(out_dir) / (stem + ".rawf");
                const fs::path out_prov = fs::path(out_dir) / (stem + ".prov.json");
                rawtone::write_rawf(result.image, out_img);
                std::ofstream pf(out_prov);
                pf << result.provenance.dump(2) << "\n";

                manifest["outputs"].push_back(json{{"image", out_img.string()},
                                                   {"provenance", out_prov.string()},
                                                   {"seed", seed},
                                                   {"fnv1a64", hash_file(out_img)}});
            } catch (const std::exception& e) {
                std::cerr << "error: " << inputs[i].string() << " variant " << v << ": "
                          << e.what() << "\n";
                ++failures;
            }
        }
    }

    std::ofstream mf(fs::path(out_dir) / "manifest.json");
    mf << manifest.dump(2) << "\n";
    if (failures) {
        std::cerr << failures << " file(s) failed\n";
        return kExitData;
    }
    std::cout << "wrote " << manifest["outputs"].size() << " image(s) to " << out_dir << "\n";
    return kExitOk;
}

// ---- apply ----

int cmd_apply(const std::string& in, const std::string& out, const std::string& params_path) {
    const rawtone::AdapterParams params = rawtone::read_bundle(params_path);
    const rawtone::LinearRawImage img = rawtone::read_raster(in);
    rawtone::write_raster(rawtone::apply_adapter(img, params), out);
    return kExitOk;
}

// ---- hist ----

int cmd_hist(const std::string& in, int q, const std::string& mode, double tau,
             std::size_t cap, const std::string& format, const std::string& out) {
    const rawtone::LinearRawImage img = rawtone::read_raster(in);
    const auto m = mode == "soft" ? rawtone::QuantileMode::kSoft : rawtone::QuantileMode::kHard;
    const rawtone::QuantileDescriptor d = rawtone::descriptor_for_image(img, q, m, cap, tau);

    std::string payload = format == "json" ? rawtone::descriptor_to_json(d).dump(2) + "\n"
                                           : rawtone::descriptor_to_csv(d);
    if (out.empty()) {
        std::cout << payload;
    } else {
        std::ofstream os(out);
        os << payload;
    }
    return kExitOk;
}

// ---- curve-plot ----

int cmd_curve_plot(const std::string& params_path, int samples, const std::string& out) {
    rawtone::CurveParams curve = rawtone::CurveParams::identity(8);
    std::ifstream is(params_path);
    if (!is) throw std::runtime_error("cannot open " + params_path);
    json j;
    is >> j;
    if (j.contains("degree")) {
        curve = rawtone::curve_from_json(j);
    } else {
        curve = rawtone::read_bundle(params_path).curve;
    }

    std::ostringstream os;
    os.precision(10);
    os << "t,g_R,g_G,g_B\n";
    for (int i = 0; i < samples; ++i) {
        const double t = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
        os << t << "," << rawtone::eval_curve(curve, 0, t) << ","
           << rawtone::eval_curve(curve, 1, t) << "," << rawtone::eval_curve(curve, 2, t) << "\n";
    }
    if (out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out);
        f << os.str();
    }
    return kExitOk;
}

// ---- fit-ccm ----

int cmd_fit_ccm(const std::string& sens_a, const std::string& sens_b, const std::string& illum,
                const std::string& data_dir) {
    const rawtone::SpectralTables tables =
        rawtone::load_spectral_tables(rawtone::resolve_data_dir(data_dir));
    const rawtone::CameraSensitivity a = pick_sensitivity(tables, sens_a);
    const rawtone::CameraSensitivity b = pick_sensitivity(tables, sens_b);
    // source responses are defined under D65; the illuminant applies to the target side
    const rawtone::PatchResponse pa =
        rawtone::colorchecker_response(a, tables.d65, tables.reflectance);
    const rawtone::PatchResponse pb =
        rawtone::colorchecker_response(b, pick_illuminant(tables, illum), tables.reflectance);
    const rawtone::CcmFit fit = rawtone::fit_ccm(pa, pb);

    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({fit.m(i, 0), fit.m(i, 1), fit.m(i, 2)});
    std::cout << json{{"ccm", rows}, {"residual", fit.residual}, {"condition", fit.condition}}
                     .dump(2)
              << "\n";
    return kExitOk;
}

// ---- spectra ----

int cmd_spectra_fit_pca(const std::string& out, const std::string& data_dir) {
    const rawtone::SpectralTables tables =
        rawtone::load_spectral_tables(rawtone::resolve_data_dir(data_dir));
    const rawtone::PcaModel pca = rawtone::fit_pca(tables.cameras);
    const json j = rawtone::pca_to_json(pca);
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream os(out);
        os << j.dump(2) << "\n";
    }
    for (int c = 0; c < 3; ++c) {
        const auto& ch = pca.channels[c];
        std::cerr << "channel " << "RGB"[c] << ": explained variance "
                  << ch.explained_ratio(0) + ch.explained_ratio(1) << " (top-2)\n";
    }
    return kExitOk;
}

int cmd_spectra_sample(const std::string& pca_path, std::uint64_t seed, int count,
                       const std::string& data_dir) {
    rawtone::PcaModel pca;
    if (pca_path.empty()) {
        const rawtone::SpectralTables tables =
            rawtone::load_spectral_tables(rawtone::resolve_data_dir(data_dir));
        pca = rawtone::fit_pca(tables.cameras);
    } else {
        std::ifstream is(pca_path);
        if (!is) throw std::runtime_error("cannot open " + pca_path);
        json j;
        is >> j;
        pca = rawtone::pca_from_json(j);
    }
    rawtone::SeededRng rng(seed);
    std::vector<rawtone::CameraSensitivity> cams;
    for (int i = 0; i < count; ++i) {
        auto cam = rawtone::sample_sensitivity(pca, rng);
        cam.name = "sampled_" + std::to_string(i);
        cams.push_back(std::move(cam));
    }
    rawtone::write_sensitivity_db(cams, "/dev/stdout");
    return kExitOk;
}

int cmd_spectra_planck(double kelvin, const std::string& out) {
    const rawtone::Spectrum spd = rawtone::planck_spd(kelvin);
    std::ostringstream os;
    os.precision(10);
    os << "wavelength,power\n";
    for (int i = 0; i < rawtone::kSpectrumSize; ++i)
        os << rawtone::wavelength_nm(i) << "," << spd[i] << "\n";
    if (out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out);
        f << os.str();
    }
    return kExitOk;
}

// ---- verify ----

int cmd_verify(const std::string& suite, const std::string& report_path,
               const std::string& data_dir) {
    rawtone::VerifyOptions options;
    options.data_dir = data_dir;

    std::vector<rawtone::SuiteResult> results;
    if (suite == "all") {
        results = rawtone::run_all_suites(options);
    } else {
        results.push_back(rawtone::run_verify_suite(suite, options));
    }

    bool all_pass = true;
    for (const auto& sr : results) {
        for (const auto& c : sr.checks) {
            std::cout << (c.pass ? "PASS" : "FAIL") << "  " << sr.suite << "/" << c.name << " — "
                      << c.detail << "\n";
            all_pass = all_pass && c.pass;
        }
    }
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        os << rawtone::verify_report_json(results).dump(2) << "\n";
    }
    std::cout << (all_pass ? "all checks passed" : "verification FAILED") << "\n";
    return all_pass ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rawtone: linear-RAW tone-mapping operators and sensor simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", RAWTONE_VERSION);

    std::string data_dir;
    app.add_option("--data-dir", data_dir,
                   "spectral data directory (default: RAWTONE_DATA env or built-in)");

    // sim
    auto* sim = app.add_subcommand("sim", "synthesize virtual-sensor captures");
    std::string sim_in, sim_out, sim_config;
    std::optional<std::uint64_t> sim_seed;
    int sim_count = 1;
    std::vector<std::string> sim_toggles;
    std::optional<int> sim_bits;
    sim->add_option("--in", sim_in, "input file or directory")->required();
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_option("--config", sim_config, "TOML config file");
    sim->add_option("--seed", sim_seed, "master seed (overrides config)");
    sim->add_option("--count", sim_count, "variants per input")->check(CLI::PositiveNumber);
    sim->add_option("--toggle", sim_toggles, "stage=on|off (stages: wb_source, color_matrix, "
                                             "wb_target, clip_negative, rolloff, quantize, all)");
    sim->add_option("--bits", sim_bits, "pin the quantization bit depth");

    // apply
    auto* apply = app.add_subcommand("apply", "apply an adapter parameter bundle");
    std::string apply_in, apply_out, apply_params;
    apply->add_option("--in", apply_in)->required();
    apply->add_option("--out", apply_out)->required();
    apply->add_option("--params", apply_params, "bundle manifest JSON")->required();

    // hist
    auto* hist = app.add_subcommand("hist", "per-channel quantile descriptor");
    std::string hist_in, hist_mode = "hard", hist_format = "csv", hist_out;
    int hist_q = 64;
    double hist_tau = 1e-3;
    std::size_t hist_cap = 4096;
    hist->add_option("--in", hist_in)->required();
    hist->add_option("--q", hist_q)->check(CLI::PositiveNumber);
    hist->add_option("--mode", hist_mode)->check(CLI::IsMember({"hard", "soft"}));
    hist->add_option("--tau", hist_tau)->check(CLI::PositiveNumber);
    hist->add_option("--cap", hist_cap, "soft-mode subsample cap");
    hist->add_option("--format", hist_format)->check(CLI::IsMember({"csv", "json"}));
    hist->add_option("--out", hist_out, "output file (default stdout)");

    // curve-plot
    auto* plot = app.add_subcommand("curve-plot", "tabulate curve values as CSV");
    std::string plot_params, plot_out;
    int plot_samples = 256;
    plot->add_option("--params", plot_params, "curve JSON or bundle manifest")->required();
    plot->add_option("--samples", plot_samples)->check(CLI::PositiveNumber);
    plot->add_option("--out", plot_out, "output file (default stdout)");

    // fit-ccm
    auto* ccm = app.add_subcommand("fit-ccm", "cross-camera color matrix fit");
    std::string ccm_a = "mean", ccm_b = "mean", ccm_illum = "d65";
    ccm->add_option("--sens-a", ccm_a, "source camera: mean | name | index");
    ccm->add_option("--sens-b", ccm_b, "target camera: mean | name | index");
    ccm->add_option("--illum", ccm_illum, "target illuminant: d65 | <kelvin>");

    // spectra
    auto* spectra = app.add_subcommand("spectra", "spectral database tools");
    spectra->require_subcommand(1);
    auto* fit_pca_cmd = spectra->add_subcommand("fit-pca", "fit the per-channel PCA");
    std::string pca_out;
    fit_pca_cmd->add_option("--out", pca_out, "output JSON (default stdout)");
    auto* sample_cmd = spectra->add_subcommand("sample", "sample virtual sensitivities");
    std::string sample_pca;
    std::uint64_t sample_seed = 0;
    int sample_count = 1;
    sample_cmd->add_option("--pca", sample_pca, "PCA model JSON (default: fit from database)");
    sample_cmd->add_option("--seed", sample_seed);
    sample_cmd->add_option("--count", sample_count)->check(CLI::PositiveNumber);
    auto* planck_cmd = spectra->add_subcommand("planck", "black-body SPD table");
    double planck_t = 6500.0;
    std::string planck_out;
    planck_cmd->add_option("--temp", planck_t, "temperature in kelvin")->required();
    planck_cmd->add_option("--out", planck_out, "output file (default stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "run verification suites");
    std::string verify_suite = "all", verify_report;
    verify->add_option("--suite", verify_suite, "suite name or 'all'");
    verify->add_option("--report", verify_report, "write machine-readable JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed())
            return cmd_sim(sim_in, sim_out, sim_config, sim_seed, sim_count, sim_toggles,
                           sim_bits, data_dir);
        if (apply->parsed()) return cmd_apply(apply_in, apply_out, apply_params);
        if (hist->parsed())
            return cmd_hist(hist_in, hist_q, hist_mode, hist_tau, hist_cap, hist_format, hist_out);
        if (plot->parsed()) return cmd_curve_plot(plot_params, plot_samples, plot_out);
        if (ccm->parsed()) return cmd_fit_ccm(ccm_a, ccm_b, ccm_illum, data_dir);
        if (spectra->parsed()) {
            if (fit_pca_cmd->parsed()) return cmd_spectra_fit_pca(pca_out, data_dir);
            if (sample_cmd->parsed())
                return cmd_spectra_sample(sample_pca, sample_seed, sample_count, data_dir);
            if (planck_cmd->parsed()) return cmd_spectra_planck(planck_t, planck_out);
        }
        if (verify->parsed()) return cmd_verify(verify_suite, verify_report, data_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
