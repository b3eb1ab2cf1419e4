#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rawtone {

class RasterError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RasterMeta {
    int bit_depth = 16;                        // 10..24 for sensor data, 8..24 accepted
    std::array<std::int64_t, 3> black_level{0, 0, 0};
    std::int64_t white_level = 65535;
    std::string sensor_name;
    std::map<std::string, std::string> sidecar;

    std::int64_t max_count() const { return (std::int64_t{1} << bit_depth) - 1; }
    void validate() const;                     // throws RasterError
};

/// Three-channel planar raster of normalized linear values in [0, 1].
/// Channel-major layout: R plane, then G, then B, each height*width floats.
/// Images are treated as immutable once constructed.
class LinearRawImage {
public:
    LinearRawImage() = default;
    LinearRawImage(int height, int width, RasterMeta meta = {});

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }

    std::span<const float> plane(int c) const;
    std::span<float> plane(int c);
    float at(int c, int y, int x) const {
        return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
    }
    float& at(int c, int y, int x) {
        return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
    }

    std::span<const float> data() const { return data_; }
    std::span<float> data() { return data_; }

    const RasterMeta& meta() const { return meta_; }
    RasterMeta& meta() { return meta_; }

private:
    int height_ = 0;
    int width_ = 0;
    RasterMeta meta_;
    std::vector<float> data_;
};

/// (count - black) / (white - black), clamped to [0, 1], per channel.
/// `counts` is planar channel-major, 3 * h * w entries.
LinearRawImage normalize_raw(std::span<const std::uint32_t> counts, int height, int width,
                             const RasterMeta& meta);

/// Half-resolution RGGB packer: R and B taken from their sites, G is the
/// mean of the two green sites of each 2x2 cell, then normalize_raw
/// semantics. Requires meta.sidecar["cfa"] == "RGGB" and even dimensions.
LinearRawImage pack_bayer_rggb(std::span<const std::uint32_t> mosaic, int height, int width,
                               const RasterMeta& meta);

/// RAWF container (bit-exact round trip):
///   magic "RAWF" | version u32 LE = 1 | height u32 | width u32 |
///   channels u32 = 3 | dtype u32 = 0 (f32 LE) | metadata length u32 |
///   UTF-8 JSON metadata | planar f32 LE payload.
void write_rawf(const LinearRawImage& image, const std::filesystem::path& path);
LinearRawImage read_rawf(const std::filesystem::path& path);

/// 16-bit binary PNM bridge. Import (P5 grayscale replicated to 3 channels,
/// or P6) normalizes with black 0 / white 65535. Export writes P6 with a
/// gamma 1/2.2 display transform and is lossy by design.
LinearRawImage read_pnm(const std::filesystem::path& path);
void write_pnm(const LinearRawImage& image, const std::filesystem::path& path);

/// Dispatch on extension: .rawf, or .pgm/.ppm/.pnm.
LinearRawImage read_raster(const std::filesystem::path& path);
void write_raster(const LinearRawImage& image, const std::filesystem::path& path);

}  // namespace rawtone
