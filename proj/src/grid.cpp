#include "rawtone/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rawtone {

namespace {

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

struct AxisSample {
    int lo;
    int hi;
    double frac;
};

/// Vertex-aligned lookup: i0 = clamp(floor(c), 0, dim-2), f = clamp(c-i0, 0, 1).
AxisSample axis_sample(double c, int dim) {
    if (dim <= 1) return {0, 0, 0.0};
    int lo = static_cast<int>(std::floor(c));
    lo = std::clamp(lo, 0, dim - 2);
    const double frac = std::clamp(c - lo, 0.0, 1.0);
    return {lo, lo + 1, frac};
}

}  // namespace

GridCoeffs GridCoeffs::zeros(int depth, int height, int width, double k) {
    if (depth < 1 || height < 1 || width < 1)
        throw std::invalid_argument("grid: non-positive dimensions");
    GridCoeffs g;
    g.depth = depth;
    g.height = height;
    g.width = width;
    g.k = k;
    g.raw.assign(g.cell_count() * 9, 0.0f);
    g.validate();
    return g;
}

void GridCoeffs::validate() const {
    if (depth < 1 || height < 1 || width < 1)
        throw std::invalid_argument("grid: non-positive dimensions");
    if (!(k > 0.0 && k < 0.5))
        throw std::invalid_argument("grid: k must lie in (0, 0.5)");
    if (raw.size() != cell_count() * 9)
        throw std::invalid_argument("grid: coefficient count mismatch");
    for (float v : raw)
        if (!std::isfinite(v)) throw std::invalid_argument("grid: non-finite coefficient");
}

GridCoeffs default_grid_for(int image_height, int image_width) {
    const int gh = (image_height + 15) / 16;
    const int gw = (image_width + 15) / 16;
    return GridCoeffs::zeros(8, std::max(gh, 1), std::max(gw, 1));
}

Mat3 compose_matrix(const std::array<double, 3>& d, const std::array<double, 6>& a_off) {
    // a_off slots: A12, A13, A21, A23, A31, A32
    return Mat3{d[0],            d[0] * a_off[0], d[0] * a_off[1],
                d[1] * a_off[2], d[1],            d[1] * a_off[3],
                d[2] * a_off[4], d[2] * a_off[5], d[2]};
}

Mat3 build_matrix(std::span<const double> d_hat, std::span<const double> a_hat, double k) {
    if (d_hat.size() != 3 || a_hat.size() != 6)
        throw std::invalid_argument("build_matrix: expected 3 gains and 6 mixing slots");
    if (!(k > 0.0 && k < 0.5)) throw std::invalid_argument("build_matrix: k outside (0, 0.5)");
    check_finite(d_hat, "build_matrix");
    check_finite(a_hat, "build_matrix");

    std::array<double, 3> d;
    for (int i = 0; i < 3; ++i) d[i] = std::exp(std::tanh(d_hat[i]));
    std::array<double, 6> a;
    for (int i = 0; i < 6; ++i) a[i] = k * std::tanh(a_hat[i]);
    return compose_matrix(d, a);
}

Mat3 invert_cell(const Mat3& m) {
    const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                       m[1] * (m[3] * m[8] - m[5] * m[6]) +
                       m[2] * (m[3] * m[7] - m[4] * m[6]);
    if (det == 0.0 || !std::isfinite(det))
        throw std::runtime_error("invert_cell: singular matrix (internal invariant violated)");
    const double inv_det = 1.0 / det;
    Mat3 inv{(m[4] * m[8] - m[5] * m[7]) * inv_det, (m[2] * m[7] - m[1] * m[8]) * inv_det,
             (m[1] * m[5] - m[2] * m[4]) * inv_det, (m[5] * m[6] - m[3] * m[8]) * inv_det,
             (m[0] * m[8] - m[2] * m[6]) * inv_det, (m[2] * m[3] - m[0] * m[5]) * inv_det,
             (m[3] * m[7] - m[4] * m[6]) * inv_det, (m[1] * m[6] - m[0] * m[7]) * inv_det,
             (m[0] * m[4] - m[1] * m[3]) * inv_det};

    double max_resid = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int l = 0; l < 3; ++l) acc += inv[i * 3 + l] * m[l * 3 + j];
            max_resid = std::max(max_resid, std::abs(acc - (i == j ? 1.0 : 0.0)));
        }
    if (max_resid >= 1e-10)
        throw std::runtime_error("invert_cell: inverse residual bound violated");
    return inv;
}

MaterializedGrid materialize(const GridCoeffs& grid) {
    grid.validate();
    MaterializedGrid out;
    out.depth = grid.depth;
    out.height = grid.height;
    out.width = grid.width;
    out.mats.resize(grid.cell_count() * 9);

    for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
        const float* c = grid.raw.data() + cell * 9;
        const std::array<double, 3> d_hat{c[0], c[1], c[2]};
        const std::array<double, 6> a_hat{c[3], c[4], c[5], c[6], c[7], c[8]};
        const Mat3 m = build_matrix(d_hat, a_hat, grid.k);
        std::copy(m.begin(), m.end(), out.mats.begin() + static_cast<std::ptrdiff_t>(cell * 9));
    }
    return out;
}

Mat3 slice(const MaterializedGrid& grid, double x, double y, double lum, int image_width,
           int image_height) {
    if (x < 0 || x >= image_width || y < 0 || y >= image_height)
        throw std::out_of_range("slice: pixel coordinates outside image");
    const AxisSample sx = axis_sample(x * grid.width / image_width, grid.width);
    const AxisSample sy = axis_sample(y * grid.height / image_height, grid.height);
    const AxisSample sz = axis_sample(lum * grid.depth, grid.depth);

    Mat3 out{};
    for (int dz = 0; dz < 2; ++dz) {
        const double wz = dz ? sz.frac : 1.0 - sz.frac;
        const int z = dz ? sz.hi : sz.lo;
        for (int dy = 0; dy < 2; ++dy) {
            const double wy = dy ? sy.frac : 1.0 - sy.frac;
            const int yy = dy ? sy.hi : sy.lo;
            for (int dx = 0; dx < 2; ++dx) {
                const double w = wz * wy * (dx ? sx.frac : 1.0 - sx.frac);
                const int xx = dx ? sx.hi : sx.lo;
                const double* m = grid.mats.data() + grid.cell_index(z, yy, xx) * 9;
                for (int i = 0; i < 9; ++i) out[i] += w * m[i];
            }
        }
    }
    return out;
}

LinearRawImage render(const MaterializedGrid& grid, const LinearRawImage& mapped,
                      std::span<const float> lum) {
    const int h = mapped.height();
    const int w = mapped.width();
    if (lum.size() != mapped.pixel_count())
        throw std::invalid_argument("render: luminance map dimension mismatch");

    LinearRawImage out(h, w, mapped.meta());
    const float* rp = mapped.plane(0).data();
    const float* gp = mapped.plane(1).data();
    const float* bp = mapped.plane(2).data();
    float* ro = out.plane(0).data();
    float* go = out.plane(1).data();
    float* bo = out.plane(2).data();

    // x-axis cell/weight tables are shared by every row
    std::vector<AxisSample> xs(static_cast<std::size_t>(w));
    for (int x = 0; x < w; ++x)
        xs[static_cast<std::size_t>(x)] = axis_sample(static_cast<double>(x) * grid.width / w,
                                                      grid.width);

    const std::size_t zstride = static_cast<std::size_t>(grid.height) * grid.width * 9;
    for (int y = 0; y < h; ++y) {
        const AxisSample sy = axis_sample(static_cast<double>(y) * grid.height / h, grid.height);
        const double* row_lo = grid.mats.data() + static_cast<std::size_t>(sy.lo) * grid.width * 9;
        const double* row_hi = grid.mats.data() + static_cast<std::size_t>(sy.hi) * grid.width * 9;
        const double wy1 = sy.frac;
        const double wy0 = 1.0 - wy1;
        const std::size_t base = static_cast<std::size_t>(y) * w;

        for (int x = 0; x < w; ++x) {
            const std::size_t p = base + x;
            const AxisSample& sx = xs[static_cast<std::size_t>(x)];
            const AxisSample sz = axis_sample(static_cast<double>(lum[p]) * grid.depth, grid.depth);
            const double wx1 = sx.frac;
            const double wx0 = 1.0 - wx1;
            const double wz1 = sz.frac;
            const double wz0 = 1.0 - wz1;

            const double* c00 = row_lo + static_cast<std::size_t>(sz.lo) * zstride + sx.lo * 9;
            const double* c01 = row_lo + static_cast<std::size_t>(sz.lo) * zstride + sx.hi * 9;
            const double* c10 = row_hi + static_cast<std::size_t>(sz.lo) * zstride + sx.lo * 9;
            const double* c11 = row_hi + static_cast<std::size_t>(sz.lo) * zstride + sx.hi * 9;
            const double* d00 = row_lo + static_cast<std::size_t>(sz.hi) * zstride + sx.lo * 9;
            const double* d01 = row_lo + static_cast<std::size_t>(sz.hi) * zstride + sx.hi * 9;
            const double* d10 = row_hi + static_cast<std::size_t>(sz.hi) * zstride + sx.lo * 9;
            const double* d11 = row_hi + static_cast<std::size_t>(sz.hi) * zstride + sx.hi * 9;

            const double w000 = wz0 * wy0 * wx0, w001 = wz0 * wy0 * wx1;
            const double w010 = wz0 * wy1 * wx0, w011 = wz0 * wy1 * wx1;
            const double w100 = wz1 * wy0 * wx0, w101 = wz1 * wy0 * wx1;
            const double w110 = wz1 * wy1 * wx0, w111 = wz1 * wy1 * wx1;

            double m[9];
            for (int i = 0; i < 9; ++i)
                m[i] = w000 * c00[i] + w001 * c01[i] + w010 * c10[i] + w011 * c11[i] +
                       w100 * d00[i] + w101 * d01[i] + w110 * d10[i] + w111 * d11[i];

            const double r = rp[p], g = gp[p], b = bp[p];
            ro[p] = static_cast<float>(std::clamp(m[0] * r + m[1] * g + m[2] * b, 0.0, 1.0));
            go[p] = static_cast<float>(std::clamp(m[3] * r + m[4] * g + m[5] * b, 0.0, 1.0));
            bo[p] = static_cast<float>(std::clamp(m[6] * r + m[7] * g + m[8] * b, 0.0, 1.0));
        }
    }
    return out;
}

LinearRawImage apply_grid(const GridCoeffs& grid, const LinearRawImage& mapped,
                          std::span<const float> lum) {
    return render(materialize(grid), mapped, lum);
}

void write_grid(const GridCoeffs& grid, const std::filesystem::path& path) {
    grid.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("grid: cannot open for writing: " + path.string());

    const std::string header =
        nlohmann::json{{"depth", grid.depth}, {"height", grid.height}, {"width", grid.width},
                       {"k", grid.k}}
            .dump();
    os.write("RTGR", 4);
    const std::uint32_t len = static_cast<std::uint32_t>(header.size());
    unsigned char lb[4] = {static_cast<unsigned char>(len), static_cast<unsigned char>(len >> 8),
                           static_cast<unsigned char>(len >> 16),
                           static_cast<unsigned char>(len >> 24)};
    os.write(reinterpret_cast<const char*>(lb), 4);
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    os.write(reinterpret_cast<const char*>(grid.raw.data()),
             static_cast<std::streamsize>(grid.raw.size() * sizeof(float)));
    if (!os) throw std::runtime_error("grid: write failed");
}

GridCoeffs read_grid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("grid: cannot open: " + path.string());

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RTGR", 4) != 0) throw std::runtime_error("grid: bad magic");
    unsigned char lb[4];
    is.read(reinterpret_cast<char*>(lb), 4);
    if (!is) throw std::runtime_error("grid: truncated header");
    const std::uint32_t len = std::uint32_t(lb[0]) | std::uint32_t(lb[1]) << 8 |
                              std::uint32_t(lb[2]) << 16 | std::uint32_t(lb[3]) << 24;
    std::string header(len, '\0');
    is.read(header.data(), len);
    if (!is) throw std::runtime_error("grid: truncated header");

    GridCoeffs grid;
    try {
        const auto j = nlohmann::json::parse(header);
        grid.depth = j.at("depth").get<int>();
        grid.height = j.at("height").get<int>();
        grid.width = j.at("width").get<int>();
        grid.k = j.at("k").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("grid: bad header: ") + e.what());
    }
    if (grid.depth < 1 || grid.height < 1 || grid.width < 1)
        throw std::runtime_error("grid: bad dimensions");

    grid.raw.resize(grid.cell_count() * 9);
    is.read(reinterpret_cast<char*>(grid.raw.data()),
            static_cast<std::streamsize>(grid.raw.size() * sizeof(float)));
    if (is.gcount() != static_cast<std::streamsize>(grid.raw.size() * sizeof(float)))
        throw std::runtime_error("grid: truncated payload");
    grid.validate();
    return grid;
}

}  // namespace rawtone
