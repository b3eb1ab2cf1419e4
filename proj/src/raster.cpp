#include "rawtone/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace rawtone {

namespace {

constexpr std::size_t kMaxPixels = std::size_t{1} << 28;  // 268M pixels

void check_dims(std::int64_t height, std::int64_t width) {
    if (height <= 0 || width <= 0) throw RasterError("raster: non-positive dimensions");
    if (static_cast<std::size_t>(height) * static_cast<std::size_t>(width) > kMaxPixels)
        throw RasterError("raster: dimension overflow");
}

void write_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw RasterError("rawf: truncated header");
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

nlohmann::json meta_to_json(const RasterMeta& meta) {
    return nlohmann::json{{"bit_depth", meta.bit_depth},
                          {"black_level", meta.black_level},
                          {"white_level", meta.white_level},
                          {"sensor_name", meta.sensor_name},
                          {"sidecar", meta.sidecar}};
}

RasterMeta meta_from_json(const nlohmann::json& j) {
    RasterMeta meta;
    meta.bit_depth = j.at("bit_depth").get<int>();
    meta.black_level = j.at("black_level").get<std::array<std::int64_t, 3>>();
    meta.white_level = j.at("white_level").get<std::int64_t>();
    meta.sensor_name = j.at("sensor_name").get<std::string>();
    meta.sidecar = j.at("sidecar").get<std::map<std::string, std::string>>();
    return meta;
}

}  // namespace

void RasterMeta::validate() const {
    if (bit_depth < 8 || bit_depth > 24) throw RasterError("meta: bit_depth outside [8, 24]");
    for (int c = 0; c < 3; ++c) {
        if (black_level[c] < 0) throw RasterError("meta: negative black level");
        if (white_level <= black_level[c]) throw RasterError("meta: white_level <= black_level");
    }
    if (white_level > max_count()) throw RasterError("meta: white_level exceeds bit depth range");
}

LinearRawImage::LinearRawImage(int height, int width, RasterMeta meta)
    : height_(height), width_(width), meta_(std::move(meta)) {
    check_dims(height, width);
    data_.assign(pixel_count() * 3, 0.0f);
}

std::span<const float> LinearRawImage::plane(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
}

std::span<float> LinearRawImage::plane(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
}

LinearRawImage normalize_raw(std::span<const std::uint32_t> counts, int height, int width,
                             const RasterMeta& meta) {
    meta.validate();
    check_dims(height, width);
    const std::size_t n = static_cast<std::size_t>(height) * width;
    if (counts.size() != n * 3) throw RasterError("normalize_raw: raster/meta dimension mismatch");

    LinearRawImage out(height, width, meta);
    const std::int64_t max_count = meta.max_count();
    for (int c = 0; c < 3; ++c) {
        const double black = static_cast<double>(meta.black_level[c]);
        const double range = static_cast<double>(meta.white_level) - black;
        auto dst = out.plane(c);
        auto src = counts.subspan(static_cast<std::size_t>(c) * n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (src[i] > static_cast<std::uint64_t>(max_count))
                throw RasterError("normalize_raw: count exceeds bit depth range");
            const double v = (static_cast<double>(src[i]) - black) / range;
            dst[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

LinearRawImage pack_bayer_rggb(std::span<const std::uint32_t> mosaic, int height, int width,
                               const RasterMeta& meta) {
    meta.validate();
    check_dims(height, width);
    if (height % 2 != 0 || width % 2 != 0)
        throw RasterError("pack_bayer_rggb: odd mosaic dimensions");
    if (mosaic.size() != static_cast<std::size_t>(height) * width)
        throw RasterError("pack_bayer_rggb: raster/meta dimension mismatch");
    auto cfa = meta.sidecar.find("cfa");
    if (cfa == meta.sidecar.end() || cfa->second != "RGGB")
        throw RasterError("pack_bayer_rggb: unsupported CFA label");

    const int oh = height / 2;
    const int ow = width / 2;
    LinearRawImage out(oh, ow, meta);
    const std::int64_t max_count = meta.max_count();
    const std::int64_t white = meta.white_level;

    auto norm = [&](double count, int c) {
        const double black = static_cast<double>(meta.black_level[c]);
        const double v = (count - black) / (static_cast<double>(white) - black);
        return static_cast<float>(std::clamp(v, 0.0, 1.0));
    };

    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            const std::size_t base = static_cast<std::size_t>(2 * y) * width + 2 * x;
            const std::uint32_t r = mosaic[base];
            const std::uint32_t g1 = mosaic[base + 1];
            const std::uint32_t g2 = mosaic[base + width];
            const std::uint32_t b = mosaic[base + width + 1];
            for (std::uint32_t v : {r, g1, g2, b})
                if (v > static_cast<std::uint64_t>(max_count))
                    throw RasterError("pack_bayer_rggb: count exceeds bit depth range");
            out.at(0, y, x) = norm(r, 0);
            out.at(1, y, x) = norm(0.5 * (static_cast<double>(g1) + g2), 1);
            out.at(2, y, x) = norm(b, 2);
        }
    }
    return out;
}

void write_rawf(const LinearRawImage& image, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw RasterError("rawf: cannot open for writing: " + path.string());

    const std::string meta = meta_to_json(image.meta()).dump();
    os.write("RAWF", 4);
    write_u32le(os, 1);
    write_u32le(os, static_cast<std::uint32_t>(image.height()));
    write_u32le(os, static_cast<std::uint32_t>(image.width()));
    write_u32le(os, 3);
    write_u32le(os, 0);
    write_u32le(os, static_cast<std::uint32_t>(meta.size()));
    os.write(meta.data(), static_cast<std::streamsize>(meta.size()));

    static_assert(sizeof(float) == 4);
    // payload is little-endian f32; this build targets LE hosts
    os.write(reinterpret_cast<const char*>(image.data().data()),
             static_cast<std::streamsize>(image.data().size() * sizeof(float)));
    if (!os) throw RasterError("rawf: write failed: " + path.string());
}

LinearRawImage read_rawf(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw RasterError("rawf: cannot open: " + path.string());

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RAWF", 4) != 0) throw RasterError("rawf: bad magic");
    if (read_u32le(is) != 1) throw RasterError("rawf: unsupported version");
    const std::uint32_t height = read_u32le(is);
    const std::uint32_t width = read_u32le(is);
    if (read_u32le(is) != 3) throw RasterError("rawf: unsupported channel count");
    if (read_u32le(is) != 0) throw RasterError("rawf: unsupported dtype");
    const std::uint32_t meta_len = read_u32le(is);
    check_dims(height, width);

    std::string meta_str(meta_len, '\0');
    is.read(meta_str.data(), meta_len);
    if (!is) throw RasterError("rawf: truncated metadata");

    RasterMeta meta;
    try {
        meta = meta_from_json(nlohmann::json::parse(meta_str));
    } catch (const nlohmann::json::exception& e) {
        throw RasterError(std::string("rawf: bad metadata: ") + e.what());
    }

    LinearRawImage out(static_cast<int>(height), static_cast<int>(width), meta);
    is.read(reinterpret_cast<char*>(out.data().data()),
            static_cast<std::streamsize>(out.data().size() * sizeof(float)));
    if (is.gcount() != static_cast<std::streamsize>(out.data().size() * sizeof(float)))
        throw RasterError("rawf: truncated payload");
    return out;
}

namespace {

int pnm_read_token(std::istream& is) {
    // skips whitespace and '#' comments per the PNM spec
    int c = is.get();
    while (is && (std::isspace(c) || c == '#')) {
        if (c == '#')
            while (is && is.get() != '\n') {}
        c = is.get();
    }
    int value = 0;
    bool any = false;
    while (is && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = is.get();
    }
    if (!any) throw RasterError("pnm: malformed header");
    return value;
}

}  // namespace

LinearRawImage read_pnm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw RasterError("pnm: cannot open: " + path.string());

    char p = 0, kind = 0;
    is.get(p).get(kind);
    if (p != 'P' || (kind != '5' && kind != '6')) throw RasterError("pnm: bad magic");
    const int channels = kind == '6' ? 3 : 1;

    const int width = pnm_read_token(is);
    const int height = pnm_read_token(is);
    const int maxval = pnm_read_token(is);
    if (maxval != 65535) throw RasterError("pnm: only 16-bit maxval 65535 supported");
    check_dims(height, width);

    const std::size_t n = static_cast<std::size_t>(height) * width;
    std::vector<unsigned char> buf(n * channels * 2);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (is.gcount() != static_cast<std::streamsize>(buf.size()))
        throw RasterError("pnm: truncated payload");

    RasterMeta meta;
    meta.bit_depth = 16;
    meta.black_level = {0, 0, 0};
    meta.white_level = 65535;
    meta.sensor_name = "pnm-import";

    std::vector<std::uint32_t> counts(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            const std::size_t src = channels == 3 ? (i * 3 + c) : i;  // big-endian samples
            counts[static_cast<std::size_t>(c) * n + i] =
                (std::uint32_t(buf[src * 2]) << 8) | buf[src * 2 + 1];
        }
    }
    return normalize_raw(counts, height, width, meta);
}

void write_pnm(const LinearRawImage& image, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw RasterError("pnm: cannot open for writing: " + path.string());

    const std::size_t n = image.pixel_count();
    os << "P6\n" << image.width() << " " << image.height() << "\n65535\n";
    std::vector<unsigned char> buf(n * 3 * 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            const double v = std::clamp(static_cast<double>(image.plane(c)[i]), 0.0, 1.0);
            const auto q =
                static_cast<std::uint32_t>(std::lround(65535.0 * std::pow(v, 1.0 / 2.2)));
            buf[(i * 3 + c) * 2] = static_cast<unsigned char>(q >> 8);
            buf[(i * 3 + c) * 2 + 1] = static_cast<unsigned char>(q & 0xFF);
        }
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) throw RasterError("pnm: write failed");
}

LinearRawImage read_raster(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".rawf") return read_rawf(path);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
    throw RasterError("read_raster: unknown extension: " + ext);
}

void write_raster(const LinearRawImage& image, const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".rawf") return write_rawf(image, path);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return write_pnm(image, path);
    throw RasterError("write_raster: unknown extension: " + ext);
}

}  // namespace rawtone
