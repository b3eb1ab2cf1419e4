#include "rawtone/adapter.hpp"

#include <fstream>

#include <json.hpp>

namespace rawtone {

std::vector<float> luminance_map(const LinearRawImage& image) {
    const std::size_t n = image.pixel_count();
    std::vector<float> lum(n);
    auto r = image.plane(0);
    auto g = image.plane(1);
    auto b = image.plane(2);
    for (std::size_t i = 0; i < n; ++i)
        lum[i] = static_cast<float>(
            (static_cast<double>(r[i]) + g[i] + b[i]) / 3.0);
    return lum;
}

LinearRawImage apply_adapter(const LinearRawImage& image, const AdapterParams& params) {
    const std::vector<float> lum = luminance_map(image);
    const LinearRawImage mapped = apply_curve(params.curve, image);
    return apply_grid(params.grid, mapped, lum);
}

void write_bundle(const AdapterParams& params, const std::filesystem::path& manifest_path) {
    const auto dir = manifest_path.parent_path();
    const auto stem = manifest_path.stem().string();
    const std::string curve_name = stem + ".curve.json";
    const std::string grid_name = stem + ".grid";

    std::ofstream cf(dir / curve_name);
    if (!cf) throw std::runtime_error("bundle: cannot write curve file");
    cf << curve_to_json(params.curve).dump(2) << "\n";
    cf.close();

    write_grid(params.grid, dir / grid_name);

    std::ofstream mf(manifest_path);
    if (!mf) throw std::runtime_error("bundle: cannot write manifest");
    mf << nlohmann::json{{"curve", curve_name}, {"grid", grid_name}}.dump(2) << "\n";
}

AdapterParams read_bundle(const std::filesystem::path& manifest_path) {
    std::ifstream mf(manifest_path);
    if (!mf) throw std::runtime_error("bundle: cannot open manifest: " + manifest_path.string());
    nlohmann::json manifest;
    try {
        mf >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("bundle: bad manifest: ") + e.what());
    }

    const auto dir = manifest_path.parent_path();
    AdapterParams params;

    std::ifstream cf(dir / manifest.at("curve").get<std::string>());
    if (!cf) throw std::runtime_error("bundle: missing curve file");
    nlohmann::json cj;
    cf >> cj;
    params.curve = curve_from_json(cj);
    params.grid = read_grid(dir / manifest.at("grid").get<std::string>());
    return params;
}

}  // namespace rawtone
