#pragma once

#include <filesystem>
#include <vector>

#include "rawtone/curve.hpp"
#include "rawtone/grid.hpp"
#include "rawtone/raster.hpp"

namespace rawtone {

struct AdapterParams {
    CurveParams curve = CurveParams::identity(8);
    GridCoeffs grid = GridCoeffs::zeros(8, 1, 1);
};

/// Per-pixel mean of the three channels. Always computed from the raw
/// (pre-curve) image so the luminance axis keeps a fixed physical meaning.
std::vector<float> luminance_map(const LinearRawImage& image);

/// out = clip_[0,1]( M(x, y, lum(I)) * curve(I) ): the luminance index uses
/// the unmapped input even though the matrix multiplies the curve-mapped
/// image. Zero residuals and zero grid coefficients give a bit-exact
/// identity.
LinearRawImage apply_adapter(const LinearRawImage& image, const AdapterParams& params);

/// Bundle on disk: a JSON manifest {"curve": <relative path>, "grid":
/// <relative path>} next to the two component files.
void write_bundle(const AdapterParams& params, const std::filesystem::path& manifest_path);
AdapterParams read_bundle(const std::filesystem::path& manifest_path);

}  // namespace rawtone
