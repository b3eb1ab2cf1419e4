#include "rawtone/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rawtone {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

nlohmann::json mat3_to_json(const Eigen::Matrix3d& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
}

}  // namespace

void SimConfig::validate() const {
    require(u_min <= u_max, "sim config: exposure range inverted");
    require(mired_min <= mired_max && mired_min > 0, "sim config: mired range invalid");
    require(tint_min <= tint_max, "sim config: tint range inverted");
    require(crosstalk_min <= crosstalk_max, "sim config: crosstalk range inverted");
    require(black_offset_min <= black_offset_max, "sim config: black offset range inverted");
    require(sat_min <= sat_max && sat_min > 0, "sim config: saturation range invalid");
    require(!bit_depths.empty(), "sim config: empty bit depth set");
    for (int b : bit_depths) require(b >= 8 && b <= 24, "sim config: bit depth outside [8, 24]");
}

std::array<double, 3> tint_gain(double delta_uv, double scale) {
    return {std::max(1.0 - 0.5 * scale * delta_uv, 0.1), 1.0,
            std::max(1.0 - scale * delta_uv, 0.1)};
}

std::array<double, 3> gray_world_gains(const LinearRawImage& image) {
    if (image.pixel_count() == 0) throw std::invalid_argument("gray_world_gains: empty image");
    std::array<double, 3> means{};
    for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (float v : image.plane(c)) acc += v;
        means[c] = acc / static_cast<double>(image.pixel_count());
    }
    std::array<double, 3> gains;
    for (int c = 0; c < 3; ++c) {
        if (means[c] < 1e-8)
            throw std::runtime_error("gray_world_gains: channel mean below guard (missing channel?)");
        gains[c] = means[1] / means[c];
    }
    gains[1] = 1.0;
    return gains;
}

std::array<double, 3> target_wb_gains(const CameraSensitivity& sensitivity,
                                      const Spectrum& illuminant) {
    std::array<double, 3> r{};
    for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int l = 0; l < kSpectrumSize; ++l) acc += sensitivity.channels[c][l] * illuminant[l];
        r[c] = acc * kLambdaStepNm;
    }
    std::array<double, 3> gains;
    for (int c = 0; c < 3; ++c) {
        if (r[c] < 1e-12) throw std::runtime_error("target_wb_gains: degenerate channel response");
        gains[c] = r[1] / r[c];
    }
    gains[1] = 1.0;
    return gains;
}

Eigen::Matrix3d assemble_full_matrix(double alpha, const std::array<double, 3>& tint_gains,
                                     const Eigen::Matrix3d& ccm,
                                     const Eigen::Matrix3d& crosstalk) {
    Eigen::Vector3d tint(tint_gains[0], tint_gains[1], tint_gains[2]);
    return alpha * (tint.asDiagonal() * ccm + crosstalk);
}

double rolloff(double x, double s_sat) {
    if (!(s_sat > 0.0)) throw std::invalid_argument("rolloff: s_sat <= 0");
    return s_sat * std::tanh(x / s_sat);
}

double quantize(double x, int bits, double s_sat) {
    require(bits >= 8 && bits <= 24, "quantize: bits outside [8, 24]");
    require(s_sat > 0.0, "quantize: s_sat <= 0");
    const double levels = static_cast<double>((std::int64_t{1} << bits) - 1);
    const double t = std::clamp(x, 0.0, s_sat) / s_sat;
    return std::floor(t * levels + 0.5) / levels;
}

SimParams sample_params(const SimConfig& config, const PcaModel& pca,
                        const PatchResponse& source_response, const ReflectanceTable& reflectance,
                        SeededRng& rng) {
    config.validate();

    for (int attempt = 0; attempt <= 8; ++attempt) {
        SimParams p;
        p.u = rng.uniform(config.u_min, config.u_max);
        p.alpha = std::exp2(p.u);
        p.mired = rng.uniform(config.mired_min, config.mired_max);
        p.kelvin = 1e6 / p.mired;
        p.delta_uv = rng.uniform(config.tint_min, config.tint_max);
        p.tint_scale = config.tint_scale;

        for (int c = 0; c < 3; ++c) {
            const auto& ch = pca.channels[c];
            for (int j = 0; j < 2; ++j) {
                const double z = rng.normal(ch.coeff_mean(j), ch.coeff_std(j));
                p.pca_coeffs[c](j) = std::clamp(z, ch.coeff_min(j), ch.coeff_max(j));
            }
        }

        p.crosstalk = Eigen::Matrix3d::Zero();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j)
                    p.crosstalk(i, j) = rng.uniform(config.crosstalk_min, config.crosstalk_max);

        for (int c = 0; c < 3; ++c)
            p.black_offset[c] = rng.uniform(config.black_offset_min, config.black_offset_max);
        p.s_sat = rng.uniform(config.sat_min, config.sat_max);
        p.bits = rng.uniform_choice(config.bit_depths);

        p.target_sensitivity = reconstruct_sensitivity(pca, p.pca_coeffs);
        p.target_sensitivity.name = "sampled";
        p.illuminant = planck_spd(p.kelvin);
        p.tint_gains = tint_gain(p.delta_uv, p.tint_scale);
        p.wb_target = target_wb_gains(p.target_sensitivity, p.illuminant);

        try {
            const PatchResponse pb =
                colorchecker_response(p.target_sensitivity, p.illuminant, reflectance);
            const CcmFit fit = fit_ccm(source_response, pb);
            p.ccm = fit.m;
            p.ccm_residual = fit.residual;
        } catch (const RankDeficientError&) {
            continue;  // complete fresh draw
        }
        return p;
    }
    throw std::runtime_error("sample_params: repeated rank-deficient color fits (8 retries)");
}

SimResult apply_sim(const LinearRawImage& image, const SimParams& params,
                    const SimStageToggles& toggles, std::uint64_t seed, std::uint64_t pca_hash) {
    const std::size_t n = image.pixel_count();
    if (n == 0) throw std::invalid_argument("apply_sim: empty image");

    std::array<double, 3> wb_src{1.0, 1.0, 1.0};
    if (toggles.wb_source) wb_src = gray_world_gains(image);

    const Eigen::Matrix3d m_full =
        assemble_full_matrix(params.alpha, params.tint_gains, params.ccm, params.crosstalk);

    LinearRawImage out(image.height(), image.width(), image.meta());
    if (toggles.quantize) out.meta().bit_depth = params.bits;

    const float* rp = image.plane(0).data();
    const float* gp = image.plane(1).data();
    const float* bp = image.plane(2).data();
    float* ro = out.plane(0).data();
    float* go = out.plane(1).data();
    float* bo = out.plane(2).data();

    const double levels = static_cast<double>((std::int64_t{1} << params.bits) - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double x[3] = {rp[i], gp[i], bp[i]};

        if (toggles.wb_source)
            for (int c = 0; c < 3; ++c) x[c] *= wb_src[c];

        if (toggles.color_matrix) {
            double y[3];
            for (int c = 0; c < 3; ++c)
                y[c] = m_full(c, 0) * x[0] + m_full(c, 1) * x[1] + m_full(c, 2) * x[2] +
                       params.black_offset[c];
            x[0] = y[0];
            x[1] = y[1];
            x[2] = y[2];
        }

        if (toggles.wb_target)
            for (int c = 0; c < 3; ++c) x[c] /= params.wb_target[c];

        if (toggles.clip_negative)
            for (int c = 0; c < 3; ++c) x[c] = std::max(x[c], 0.0);

        if (toggles.rolloff)
            for (int c = 0; c < 3; ++c) x[c] = params.s_sat * std::tanh(x[c] / params.s_sat);

        if (toggles.quantize)
            for (int c = 0; c < 3; ++c)
                x[c] = std::floor(std::clamp(x[c], 0.0, params.s_sat) / params.s_sat * levels +
                                  0.5) /
                       levels;

        ro[i] = static_cast<float>(x[0]);
        go[i] = static_cast<float>(x[1]);
        bo[i] = static_cast<float>(x[2]);
    }

    nlohmann::json prov{
        {"seed", seed},
        {"u", params.u},
        {"alpha", params.alpha},
        {"mired", params.mired},
        {"T", params.kelvin},
        {"delta_uv", params.delta_uv},
        {"s", params.tint_scale},
        {"S_sat", params.s_sat},
        {"bits", params.bits},
        {"epsilon", mat3_to_json(params.crosstalk)},
        {"beta", params.black_offset},
        {"g_tint", params.tint_gains},
        {"g_wb_src", wb_src},
        {"g_wb_tgt", params.wb_target},
        {"ccm", mat3_to_json(params.ccm)},
        {"ccm_residual", params.ccm_residual},
        {"toggles",
         {{"wb_source", toggles.wb_source},
          {"color_matrix", toggles.color_matrix},
          {"wb_target", toggles.wb_target},
          {"clip_negative", toggles.clip_negative},
          {"rolloff", toggles.rolloff},
          {"quantize", toggles.quantize}}},
        {"pca_model_hash", pca_hash},
        {"camera_draw_coeffs",
         {{params.pca_coeffs[0](0), params.pca_coeffs[0](1)},
          {params.pca_coeffs[1](0), params.pca_coeffs[1](1)},
          {params.pca_coeffs[2](0), params.pca_coeffs[2](1)}}}};

    return SimResult{std::move(out), std::move(prov)};
}

nlohmann::json config_to_json(const SimConfig& config) {
    return nlohmann::json{
        {"u_min", config.u_min},
        {"u_max", config.u_max},
        {"mired_min", config.mired_min},
        {"mired_max", config.mired_max},
        {"tint_min", config.tint_min},
        {"tint_max", config.tint_max},
        {"tint_scale", config.tint_scale},
        {"crosstalk_min", config.crosstalk_min},
        {"crosstalk_max", config.crosstalk_max},
        {"black_offset_min", config.black_offset_min},
        {"black_offset_max", config.black_offset_max},
        {"sat_min", config.sat_min},
        {"sat_max", config.sat_max},
        {"bit_depths", config.bit_depths},
        {"seed", config.seed},
        {"toggles",
         {{"wb_source", config.toggles.wb_source},
          {"color_matrix", config.toggles.color_matrix},
          {"wb_target", config.toggles.wb_target},
          {"clip_negative", config.toggles.clip_negative},
          {"rolloff", config.toggles.rolloff},
          {"quantize", config.toggles.quantize}}}};
}

SimConfig config_from_json(const nlohmann::json& j) {
    SimConfig c;
    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    get("u_min", c.u_min);
    get("u_max", c.u_max);
    get("mired_min", c.mired_min);
    get("mired_max", c.mired_max);
    get("tint_min", c.tint_min);
    get("tint_max", c.tint_max);
    get("tint_scale", c.tint_scale);
    get("crosstalk_min", c.crosstalk_min);
    get("crosstalk_max", c.crosstalk_max);
    get("black_offset_min", c.black_offset_min);
    get("black_offset_max", c.black_offset_max);
    get("sat_min", c.sat_min);
    get("sat_max", c.sat_max);
    get("bit_depths", c.bit_depths);
    get("seed", c.seed);
    if (j.contains("toggles")) {
        const auto& t = j.at("toggles");
        auto gt = [&](const char* key, bool& dst) {
            if (t.contains(key)) dst = t.at(key).get<bool>();
        };
        gt("wb_source", c.toggles.wb_source);
        gt("color_matrix", c.toggles.color_matrix);
        gt("wb_target", c.toggles.wb_target);
        gt("clip_negative", c.toggles.clip_negative);
        gt("rolloff", c.toggles.rolloff);
        gt("quantize", c.toggles.quantize);
    }
    c.validate();
    return c;
}

SimConfig config_from_toml(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path.string());

    // flat TOML subset: comments, [table] headers (flattened to dotted
    // keys), key = number | string | boolean | array-of-numbers
    nlohmann::json j = nlohmann::json::object();
    std::string line, prefix;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error("config: bad table header");
            prefix = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected key = value at line " +
                                     std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!prefix.empty()) key = prefix + "." + key;

        nlohmann::json parsed;
        if (value == "true" || value == "false") {
            parsed = (value == "true");
        } else if (!value.empty() && value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                throw std::runtime_error("config: unterminated string");
            parsed = value.substr(1, value.size() - 2);
        } else if (!value.empty() && value.front() == '[') {
            if (value.back() != ']') throw std::runtime_error("config: unterminated array");
            parsed = nlohmann::json::array();
            std::istringstream as(value.substr(1, value.size() - 2));
            std::string item;
            while (std::getline(as, item, ',')) {
                item = trim(item);
                if (!item.empty()) parsed.push_back(std::stod(item));
            }
        } else {
            try {
                std::size_t used = 0;
                parsed = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::runtime_error("config: cannot parse value at line " +
                                         std::to_string(lineno));
            }
        }

        // dotted keys under "toggles." nest one level
        if (key.rfind("toggles.", 0) == 0) {
            j["toggles"][key.substr(8)] = parsed;
        } else {
            j[key] = parsed;
        }
    }
    return config_from_json(j);
}

}  // namespace rawtone
