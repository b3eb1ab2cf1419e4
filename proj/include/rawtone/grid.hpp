#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "rawtone/raster.hpp"

namespace rawtone {

/// Row-major 3x3 matrix.
using Mat3 = std::array<double, 9>;

/// Low-resolution grid of raw cell coefficients. Each cell holds 9 values:
/// d_hat (3 gains, pre-activation) then a_hat (6 off-diagonal mixing slots
/// in row-major order A12, A13, A21, A23, A31, A32). Cell storage is
/// depth-major, then row-major: index = (d * height + y) * width + x.
struct GridCoeffs {
    int depth = 8;    // luminance bins G_d
    int height = 1;   // spatial cells G_h
    int width = 1;    // spatial cells G_w
    double k = 0.05;  // mixing activation bound, must stay in (0, 0.5)
    std::vector<float> raw;

    static GridCoeffs zeros(int depth, int height, int width, double k = 0.05);

    std::size_t cell_count() const {
        return static_cast<std::size_t>(depth) * height * width;
    }
    std::size_t cell_index(int d, int y, int x) const {
        return (static_cast<std::size_t>(d) * height + y) * width + x;
    }
    std::span<float> cell(int d, int y, int x) {
        return {raw.data() + cell_index(d, y, x) * 9, 9};
    }
    std::span<const float> cell(int d, int y, int x) const {
        return {raw.data() + cell_index(d, y, x) * 9, 9};
    }
    void validate() const;
};

/// Default spatial resolution for an image: ceil(dim / 16), with 8
/// luminance bins.
GridCoeffs default_grid_for(int image_height, int image_width);

/// M = D(I + A) with d = exp(tanh(d_hat)) and off-diagonal
/// A_ij = k * tanh(a_hat_ij). Row i is the gain d_i times a unit-diagonal
/// mixing vector; the result is strictly diagonally dominant for k < 0.5.
Mat3 build_matrix(std::span<const double> d_hat, std::span<const double> a_hat, double k);

/// Post-activation composition from gains d and off-diagonal entries a_off
/// (same slot order as a_hat). Used by build_matrix after the activations.
Mat3 compose_matrix(const std::array<double, 3>& d, const std::array<double, 6>& a_off);

/// Inverse of a cell matrix. Valid cells are invertible by construction;
/// a residual |M_inv * M - I|_max >= 1e-10 is an internal failure.
Mat3 invert_cell(const Mat3& m);

/// Grid with all cell matrices materialized (9 doubles per cell, row-major
/// 3x3, same cell order as GridCoeffs).
struct MaterializedGrid {
    int depth = 0;
    int height = 0;
    int width = 0;
    std::vector<double> mats;

    std::size_t cell_index(int d, int y, int x) const {
        return (static_cast<std::size_t>(d) * height + y) * width + x;
    }
};

MaterializedGrid materialize(const GridCoeffs& grid);

/// Trilinear slice at pixel (x, y) with luminance lum in [0, 1], for an
/// image of size image_width x image_height. Continuous coordinates are
/// (x * G_w / W, y * G_h / H, lum * G_d), vertex-aligned with edge-clamped
/// cell indices.
Mat3 slice(const MaterializedGrid& grid, double x, double y, double lum, int image_width,
           int image_height);

/// Pointwise rendering: out(p) = clip_[0,1](M(p) * mapped(p)). `lum` has
/// one entry per pixel, row-major.
LinearRawImage render(const MaterializedGrid& grid, const LinearRawImage& mapped,
                      std::span<const float> lum);

/// materialize + render.
LinearRawImage apply_grid(const GridCoeffs& grid, const LinearRawImage& mapped,
                          std::span<const float> lum);

/// Grid container: magic "RTGR", u32 LE JSON header length, JSON header
/// {depth, height, width, k}, then f32 LE raw coefficients (9 per cell).
void write_grid(const GridCoeffs& grid, const std::filesystem::path& path);
GridCoeffs read_grid(const std::filesystem::path& path);

}  // namespace rawtone
