#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rawtone/numerics.hpp"
#include "rawtone/raster.hpp"
#include "rawtone/spectral.hpp"

namespace rawtone {

/// Per-stage enable flags. Disabling a stage replaces it with the identity
/// map; the flags are recorded in provenance.
struct SimStageToggles {
    bool wb_source = true;      // source gray-world balance
    bool color_matrix = true;   // M_full multiply + black offset
    bool wb_target = true;      // divide by target gray-world gains
    bool clip_negative = true;  // clamp sub-zero values to 0
    bool rolloff = true;        // tanh highlight roll-off
    bool quantize = true;       // ADC bit-depth quantization

    bool all_disabled() const {
        return !wb_source && !color_matrix && !wb_target && !clip_negative && !rolloff &&
               !quantize;
    }
};

struct SimConfig {
    double u_min = -3.0, u_max = 3.0;             // exposure, stops
    double mired_min = 50.0, mired_max = 400.0;   // 20000 K .. 2500 K
    double tint_min = -0.04, tint_max = 0.04;     // delta-uv offset
    double tint_scale = 15.0;
    double crosstalk_min = -0.05, crosstalk_max = 0.05;
    double black_offset_min = -0.02, black_offset_max = 0.02;
    double sat_min = 0.9, sat_max = 1.0;
    std::vector<int> bit_depths{10, 12, 14, 16};
    SimStageToggles toggles;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One sampled draw of the full simulation parameter set.
struct SimParams {
    double u = 0.0;
    double alpha = 1.0;
    double mired = 0.0;
    double kelvin = 6500.0;
    double delta_uv = 0.0;
    double tint_scale = 15.0;
    double s_sat = 1.0;
    int bits = 16;

    CameraSensitivity target_sensitivity;
    Spectrum illuminant{};
    std::array<Eigen::Vector2d, 3> pca_coeffs{};

    Eigen::Matrix3d ccm = Eigen::Matrix3d::Identity();
    double ccm_residual = 0.0;
    Eigen::Matrix3d crosstalk = Eigen::Matrix3d::Zero();  // zero diagonal
    std::array<double, 3> black_offset{0.0, 0.0, 0.0};
    std::array<double, 3> tint_gains{1.0, 1.0, 1.0};
    std::array<double, 3> wb_target{1.0, 1.0, 1.0};
};

/// g = [max(1 - 0.5 s duv, 0.1), 1, max(1 - s duv, 0.1)].
std::array<double, 3> tint_gain(double delta_uv, double scale = 15.0);

/// Gray-world gains mean(G)/mean(c); throws when a channel mean is below
/// 1e-8.
std::array<double, 3> gray_world_gains(const LinearRawImage& image);

/// Target-side gray-world gains from integrated channel responses
/// r_c = sum S_c * I * dLambda; gains = r_G / r_c.
std::array<double, 3> target_wb_gains(const CameraSensitivity& sensitivity,
                                      const Spectrum& illuminant);

/// M_full = alpha * (diag(g_tint) * ccm + crosstalk).
Eigen::Matrix3d assemble_full_matrix(double alpha, const std::array<double, 3>& tint_gains,
                                     const Eigen::Matrix3d& ccm,
                                     const Eigen::Matrix3d& crosstalk);

/// s_sat * tanh(x / s_sat): monotone, slope 1 at 0, asymptote s_sat.
double rolloff(double x, double s_sat);

/// floor(clamp(x, 0, s_sat)/s_sat * (2^b - 1) + 0.5) / (2^b - 1).
double quantize(double x, int bits, double s_sat);

/// Draws one SimParams. Sampling order is fixed (exposure, mired, tint,
/// sensitivity coefficients, crosstalk, black offsets, saturation, bit
/// depth) so that streams replay exactly. Rank-deficient CCM fits retry
/// with a complete fresh draw, at most 8 times.
SimParams sample_params(const SimConfig& config, const PcaModel& pca,
                        const PatchResponse& source_response, const ReflectanceTable& reflectance,
                        SeededRng& rng);

struct SimResult {
    LinearRawImage image;
    nlohmann::json provenance;
};

/// Applies the simulation chain: source gray-world balance; M_full multiply
/// plus black offset; target white-balance reversal; negative clip; tanh
/// roll-off; quantization. The provenance record carries every sampled
/// value, both gray-world gain vectors, and the stage toggles.
SimResult apply_sim(const LinearRawImage& image, const SimParams& params,
                    const SimStageToggles& toggles, std::uint64_t seed = 0,
                    std::uint64_t pca_hash = 0);

// ---- config / provenance serialization ----

nlohmann::json config_to_json(const SimConfig& config);
SimConfig config_from_json(const nlohmann::json& j);

/// Minimal TOML subset reader (key = value with numbers, strings, booleans,
/// arrays; [table] headers flatten to dotted keys). Covers the SimConfig
/// surface.
SimConfig config_from_toml(const std::filesystem::path& path);

}  // namespace rawtone
