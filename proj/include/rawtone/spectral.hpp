#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rawtone/numerics.hpp"

namespace rawtone {

class SpectralError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 33-point spectral grid: 400..720 nm in 10 nm steps.
inline constexpr int kSpectrumSize = 33;
inline constexpr double kLambdaStartNm = 400.0;
inline constexpr double kLambdaStepNm = 10.0;

using Spectrum = std::array<double, kSpectrumSize>;

inline double wavelength_nm(int i) { return kLambdaStartNm + kLambdaStepNm * i; }

/// Per-channel sensitivity curves, peak-normalized to unity per channel.
struct CameraSensitivity {
    std::string name;
    std::array<Spectrum, 3> channels;  // R, G, B
};

/// Two-component per-channel PCA of standardized sensitivity curves, plus
/// the coefficient statistics of the fitted cameras.
struct PcaModel {
    struct Channel {
        Eigen::Matrix<double, kSpectrumSize, 1> mean;
        Eigen::Matrix<double, kSpectrumSize, 1> scale;          // per-wavelength std
        Eigen::Matrix<double, kSpectrumSize, 2> components;     // orthonormal columns
        Eigen::Vector2d coeff_mean;
        Eigen::Vector2d coeff_std;
        Eigen::Vector2d coeff_min;
        Eigen::Vector2d coeff_max;
        Eigen::Vector2d explained_ratio;                        // of total standardized variance
    };
    std::array<Channel, 3> channels;
};

/// 24 ColorChecker patches x 3 channels, scaled so the green column has
/// unit mean.
struct PatchResponse {
    Eigen::Matrix<double, 24, 3> p;
};

using ReflectanceTable = Eigen::Matrix<double, kSpectrumSize, 24>;

struct CcmFit {
    Eigen::Matrix3d m;       // minimizes |P_A M^T - P_B|_F
    double residual = 0.0;
    double condition = 1.0;
};

// ---- data files ----

/// CSV layout per camera: "# camera: <name>" comment line, "wavelength,R,G,B"
/// header, then 33 data rows. Curves are peak-normalized on load.
std::vector<CameraSensitivity> load_sensitivity_db(const std::filesystem::path& path);
void write_sensitivity_db(const std::vector<CameraSensitivity>& db,
                          const std::filesystem::path& path);

/// 33 rows of "wavelength,<24 reflectances>" (header allowed).
ReflectanceTable load_reflectance(const std::filesystem::path& path);

/// 33 rows of "wavelength,power" (header allowed).
Spectrum load_illuminant(const std::filesystem::path& path);

/// Resolution order: explicit argument, RAWTONE_DATA env var, built-in
/// default directory.
std::filesystem::path resolve_data_dir(const std::string& explicit_dir = "");

/// Bundled tables loaded from one directory (camera_sensitivities.csv,
/// colorchecker_reflectance.csv, d65.csv).
struct SpectralTables {
    std::vector<CameraSensitivity> cameras;
    ReflectanceTable reflectance;
    Spectrum d65;
};
SpectralTables load_spectral_tables(const std::filesystem::path& data_dir);

// ---- operations ----

PcaModel fit_pca(const std::vector<CameraSensitivity>& db);

/// Arithmetic mean per wavelength per channel; deliberately not re-peak-
/// normalized (it is the source-camera proxy as defined).
CameraSensitivity mean_sensitivity(const std::vector<CameraSensitivity>& db);

/// Planck black-body SPD on the grid, peak-normalized to unity.
Spectrum planck_spd(double kelvin);

/// P[patch][c] = sum_lambda R(lambda,patch) * illum(lambda) * S_c(lambda) * dLambda,
/// then green-mean normalization.
PatchResponse colorchecker_response(const CameraSensitivity& sensitivity, const Spectrum& illum,
                                    const ReflectanceTable& reflectance);

/// Least-squares fit of M with P_A M^T ~ P_B over the 24 patches, via
/// orthogonal decomposition. Throws RankDeficientError when P_A is
/// rank-deficient.
CcmFit fit_ccm(const PatchResponse& pa, const PatchResponse& pb);

/// Truncated-Gaussian coefficient draw (sample-then-clip to the observed
/// extrema), reconstruction, negative clamp, peak renormalization.
CameraSensitivity sample_sensitivity(const PcaModel& pca, SeededRng& rng);

/// Deterministic reconstruction from explicit coefficients (test hook and
/// provenance replay path).
CameraSensitivity reconstruct_sensitivity(const PcaModel& pca,
                                          const std::array<Eigen::Vector2d, 3>& coeffs);

nlohmann::json pca_to_json(const PcaModel& pca);
PcaModel pca_from_json(const nlohmann::json& j);

/// Stable content hash of the serialized model, recorded in provenance.
std::uint64_t pca_model_hash(const PcaModel& pca);

}  // namespace rawtone
