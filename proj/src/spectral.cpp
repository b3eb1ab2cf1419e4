#include "rawtone/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rawtone {

namespace {

constexpr double kStdGuard = 1e-12;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    return out;
}

bool is_number_row(const std::vector<std::string>& fields) {
    if (fields.empty()) return false;
    char* end = nullptr;
    std::strtod(fields[0].c_str(), &end);
    return end != fields[0].c_str();
}

void check_wavelength(double lam, int row, const std::filesystem::path& path) {
    if (std::abs(lam - wavelength_nm(row)) > 1e-6)
        throw SpectralError("spectral: wrong wavelength grid in " + path.string());
}

}  // namespace

std::vector<CameraSensitivity> load_sensitivity_db(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw SpectralError("spectral: cannot open " + path.string());

    std::vector<CameraSensitivity> db;
    std::string line;
    CameraSensitivity current;
    int row = -1;  // -1: waiting for camera comment

    auto finish = [&]() {
        if (row == -1) return;
        if (row != kSpectrumSize)
            throw SpectralError("spectral: wrong wavelength grid in " + path.string());
        // peak-normalize each channel (idempotent when already normalized)
        for (auto& ch : current.channels) {
            double peak = 0.0;
            for (double& v : ch) {
                if (v < -1e-9)
                    throw SpectralError("spectral: negative sensitivity in " + path.string());
                v = std::max(v, 0.0);
                peak = std::max(peak, v);
            }
            if (peak <= 0.0)
                throw SpectralError("spectral: all-zero channel in " + path.string());
            for (double& v : ch) v /= peak;
        }
        db.push_back(current);
        row = -1;
    };

    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# camera:", 0) == 0) {
            finish();
            current = CameraSensitivity{};
            current.name = line.substr(9);
            while (!current.name.empty() && current.name.front() == ' ')
                current.name.erase(current.name.begin());
            row = 0;
            continue;
        }
        if (line[0] == '#') continue;
        auto fields = split_csv(line);
        if (!is_number_row(fields)) continue;  // header row
        if (row < 0) throw SpectralError("spectral: data before camera marker in " + path.string());
        if (fields.size() != 4)
            throw SpectralError("spectral: sensitivity rows need wavelength,R,G,B");
        if (row >= kSpectrumSize)
            throw SpectralError("spectral: wrong wavelength grid in " + path.string());
        check_wavelength(std::stod(fields[0]), row, path);
        for (int c = 0; c < 3; ++c) {
            const double v = std::stod(fields[static_cast<std::size_t>(c) + 1]);
            if (!std::isfinite(v)) throw SpectralError("spectral: non-finite sensitivity");
            current.channels[c][row] = v;
        }
        ++row;
    }
    finish();
    if (db.empty()) throw SpectralError("spectral: no cameras in " + path.string());
    return db;
}

void write_sensitivity_db(const std::vector<CameraSensitivity>& db,
                          const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw SpectralError("spectral: cannot write " + path.string());
    os.precision(12);
    for (const auto& cam : db) {
        os << "# camera: " << cam.name << "\n";
        os << "wavelength,R,G,B\n";
        for (int i = 0; i < kSpectrumSize; ++i)
            os << wavelength_nm(i) << "," << cam.channels[0][i] << "," << cam.channels[1][i]
               << "," << cam.channels[2][i] << "\n";
    }
}

ReflectanceTable load_reflectance(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw SpectralError("spectral: missing reflectance table " + path.string());
    ReflectanceTable table;
    std::string line;
    int row = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv(line);
        if (!is_number_row(fields)) continue;
        if (fields.size() != 25)
            throw SpectralError("spectral: reflectance rows need wavelength + 24 values");
        if (row >= kSpectrumSize)
            throw SpectralError("spectral: wrong wavelength grid in " + path.string());
        check_wavelength(std::stod(fields[0]), row, path);
        for (int p = 0; p < 24; ++p)
            table(row, p) = std::stod(fields[static_cast<std::size_t>(p) + 1]);
        ++row;
    }
    if (row != kSpectrumSize)
        throw SpectralError("spectral: wrong wavelength grid in " + path.string());
    return table;
}

Spectrum load_illuminant(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw SpectralError("spectral: missing illuminant table " + path.string());
    Spectrum spd{};
    std::string line;
    int row = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv(line);
        if (!is_number_row(fields)) continue;
        if (fields.size() != 2) throw SpectralError("spectral: illuminant rows need wavelength,power");
        if (row >= kSpectrumSize)
            throw SpectralError("spectral: wrong wavelength grid in " + path.string());
        check_wavelength(std::stod(fields[0]), row, path);
        spd[row] = std::stod(fields[1]);
        ++row;
    }
    if (row != kSpectrumSize)
        throw SpectralError("spectral: wrong wavelength grid in " + path.string());
    return spd;
}

std::filesystem::path resolve_data_dir(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("RAWTONE_DATA"); env && *env) return env;
    return RAWTONE_DEFAULT_DATA_DIR;
}

SpectralTables load_spectral_tables(const std::filesystem::path& data_dir) {
    SpectralTables t;
    t.cameras = load_sensitivity_db(data_dir / "camera_sensitivities.csv");
    t.reflectance = load_reflectance(data_dir / "colorchecker_reflectance.csv");
    t.d65 = load_illuminant(data_dir / "d65.csv");
    return t;
}

PcaModel fit_pca(const std::vector<CameraSensitivity>& db) {
    const auto n = static_cast<Eigen::Index>(db.size());
    if (n < 3) throw SpectralError("fit_pca: need at least 3 cameras");

    PcaModel model;
    for (int c = 0; c < 3; ++c) {
        Eigen::MatrixXd x(n, kSpectrumSize);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int l = 0; l < kSpectrumSize; ++l)
                x(i, l) = db[static_cast<std::size_t>(i)].channels[c][l];

        auto& ch = model.channels[c];
        ch.mean = x.colwise().mean();
        Eigen::MatrixXd centered = x.rowwise() - ch.mean.transpose();
        // sample std per wavelength, epsilon-guarded for flat columns
        for (int l = 0; l < kSpectrumSize; ++l) {
            const double var = centered.col(l).squaredNorm() / static_cast<double>(n - 1);
            ch.scale(l) = std::sqrt(var) + kStdGuard;
        }
        Eigen::MatrixXd standardized = centered.array().rowwise() / ch.scale.transpose().array();

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(standardized,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
        ch.components = svd.matrixV().leftCols<2>();
        Eigen::MatrixXd coeffs = standardized * ch.components;  // n x 2

        const double total_var = standardized.squaredNorm();
        for (int j = 0; j < 2; ++j) {
            ch.coeff_mean(j) = coeffs.col(j).mean();
            const double var =
                (coeffs.col(j).array() - ch.coeff_mean(j)).square().sum() / static_cast<double>(n - 1);
            ch.coeff_std(j) = std::sqrt(var);
            ch.coeff_min(j) = coeffs.col(j).minCoeff();
            ch.coeff_max(j) = coeffs.col(j).maxCoeff();
            const double sv = svd.singularValues()(j);
            ch.explained_ratio(j) = total_var > 0.0 ? (sv * sv) / total_var : 0.0;
        }
    }
    return model;
}

CameraSensitivity mean_sensitivity(const std::vector<CameraSensitivity>& db) {
    if (db.empty()) throw SpectralError("mean_sensitivity: empty database");
    CameraSensitivity mean;
    mean.name = "mean";
    for (int c = 0; c < 3; ++c) {
        mean.channels[c].fill(0.0);
        for (const auto& cam : db)
            for (int l = 0; l < kSpectrumSize; ++l) mean.channels[c][l] += cam.channels[c][l];
        for (int l = 0; l < kSpectrumSize; ++l)
            mean.channels[c][l] /= static_cast<double>(db.size());
    }
    return mean;
}

Spectrum planck_spd(double kelvin) {
    if (!(kelvin > 0.0)) throw SpectralError("planck_spd: non-positive temperature");
    constexpr double h = 6.62607015e-34;   // Planck constant, J s
    constexpr double c = 2.99792458e8;     // speed of light, m/s
    constexpr double kb = 1.380649e-23;    // Boltzmann constant, J/K

    Spectrum spd{};
    double peak = 0.0;
    for (int i = 0; i < kSpectrumSize; ++i) {
        const double lam = wavelength_nm(i) * 1e-9;
        const double expo = h * c / (kb * kelvin * lam);
        spd[i] = 2.0 * M_PI * h * c * c / (std::pow(lam, 5) * std::expm1(expo));
        peak = std::max(peak, spd[i]);
    }
    if (!(peak > 0.0) || !std::isfinite(peak))
        throw SpectralError("planck_spd: spectrum underflow on the grid");
    for (double& v : spd) v /= peak;
    return spd;
}

PatchResponse colorchecker_response(const CameraSensitivity& sensitivity, const Spectrum& illum,
                                    const ReflectanceTable& reflectance) {
    PatchResponse out;
    for (int p = 0; p < 24; ++p)
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int l = 0; l < kSpectrumSize; ++l)
                acc += reflectance(l, p) * illum[l] * sensitivity.channels[c][l];
            out.p(p, c) = acc * kLambdaStepNm;
        }
    // "green column equals unity": global scale by the green-column mean,
    // which preserves chromaticity ratios (a per-entry reading is impossible)
    const double green_mean = out.p.col(1).mean();
    if (!(green_mean > 0.0)) throw SpectralError("colorchecker_response: zero green response");
    out.p /= green_mean;
    return out;
}

CcmFit fit_ccm(const PatchResponse& pa, const PatchResponse& pb) {
    const LsqSolution sol = solve_lsq(pa.p, pb.p);  // X = M^T
    CcmFit fit;
    fit.m = sol.x.transpose();
    fit.residual = sol.residual_fro;
    fit.condition = sol.condition;
    return fit;
}

CameraSensitivity sample_sensitivity(const PcaModel& pca, SeededRng& rng) {
    std::array<Eigen::Vector2d, 3> coeffs;
    for (int c = 0; c < 3; ++c) {
        const auto& ch = pca.channels[c];
        for (int j = 0; j < 2; ++j) {
            const double z = rng.normal(ch.coeff_mean(j), ch.coeff_std(j));
            coeffs[c](j) = std::clamp(z, ch.coeff_min(j), ch.coeff_max(j));
        }
    }
    auto cam = reconstruct_sensitivity(pca, coeffs);
    cam.name = "sampled";
    return cam;
}

CameraSensitivity reconstruct_sensitivity(const PcaModel& pca,
                                          const std::array<Eigen::Vector2d, 3>& coeffs) {
    CameraSensitivity cam;
    cam.name = "reconstructed";
    for (int c = 0; c < 3; ++c) {
        const auto& ch = pca.channels[c];
        Eigen::Matrix<double, kSpectrumSize, 1> curve =
            ch.scale.cwiseProduct(ch.components * coeffs[c]) + ch.mean;
        double peak = 0.0;
        for (int l = 0; l < kSpectrumSize; ++l) {
            curve(l) = std::max(curve(l), 0.0);
            peak = std::max(peak, curve(l));
        }
        for (int l = 0; l < kSpectrumSize; ++l) cam.channels[c][l] = curve(l) / (peak + 1e-8);
    }
    return cam;
}

namespace {

nlohmann::json vec_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
    std::vector<double> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
}

}  // namespace

nlohmann::json pca_to_json(const PcaModel& pca) {
    nlohmann::json channels = nlohmann::json::array();
    for (int c = 0; c < 3; ++c) {
        const auto& ch = pca.channels[c];
        nlohmann::json comp = nlohmann::json::array();
        for (int j = 0; j < 2; ++j) comp.push_back(vec_to_json(ch.components.col(j)));
        channels.push_back(nlohmann::json{{"mean", vec_to_json(ch.mean)},
                                          {"scale", vec_to_json(ch.scale)},
                                          {"components", comp},
                                          {"coeff_mean", vec_to_json(ch.coeff_mean)},
                                          {"coeff_std", vec_to_json(ch.coeff_std)},
                                          {"coeff_min", vec_to_json(ch.coeff_min)},
                                          {"coeff_max", vec_to_json(ch.coeff_max)},
                                          {"explained_ratio", vec_to_json(ch.explained_ratio)}});
    }
    return nlohmann::json{{"wavelength_start", kLambdaStartNm},
                          {"wavelength_step", kLambdaStepNm},
                          {"size", kSpectrumSize},
                          {"channels", channels}};
}

PcaModel pca_from_json(const nlohmann::json& j) {
    if (j.at("size").get<int>() != kSpectrumSize)
        throw SpectralError("pca_from_json: wrong wavelength grid");
    PcaModel pca;
    const auto& channels = j.at("channels");
    for (int c = 0; c < 3; ++c) {
        auto& ch = pca.channels[c];
        const auto& jc = channels.at(static_cast<std::size_t>(c));
        auto load_vec = [&](const char* key, auto& dst) {
            const auto v = jc.at(key).template get<std::vector<double>>();
            if (static_cast<Eigen::Index>(v.size()) != dst.size())
                throw SpectralError("pca_from_json: bad vector length");
            for (Eigen::Index i = 0; i < dst.size(); ++i) dst(i) = v[static_cast<std::size_t>(i)];
        };
        load_vec("mean", ch.mean);
        load_vec("scale", ch.scale);
        for (int col = 0; col < 2; ++col) {
            const auto v = jc.at("components")
                               .at(static_cast<std::size_t>(col))
                               .get<std::vector<double>>();
            if (v.size() != kSpectrumSize) throw SpectralError("pca_from_json: bad component");
            for (int l = 0; l < kSpectrumSize; ++l) ch.components(l, col) = v[static_cast<std::size_t>(l)];
        }
        load_vec("coeff_mean", ch.coeff_mean);
        load_vec("coeff_std", ch.coeff_std);
        load_vec("coeff_min", ch.coeff_min);
        load_vec("coeff_max", ch.coeff_max);
        load_vec("explained_ratio", ch.explained_ratio);
    }
    return pca;
}

std::uint64_t pca_model_hash(const PcaModel& pca) {
    return fnv1a64(pca_to_json(pca).dump());
}

}  // namespace rawtone
