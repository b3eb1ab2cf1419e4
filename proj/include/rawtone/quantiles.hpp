#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rawtone/raster.hpp"

namespace rawtone {

/// 3 x Q per-channel empirical quantiles, rows non-decreasing.
struct QuantileDescriptor {
    int q = 64;
    std::array<std::vector<double>, 3> values;
};

/// Quantile convention used throughout: linear interpolation between order
/// statistics. For rank r in 1..Q the position is h = (N-1) * r / Q and
/// q_r = x_(floor(h)) + frac(h) * (x_(floor(h)+1) - x_(floor(h))); r = Q
/// yields the channel maximum.
std::vector<double> hard_quantile_row(std::span<const double> samples, int q);
QuantileDescriptor hard_quantiles(const LinearRawImage& image, int q);

/// Smoothed surrogate built from pairwise-logistic soft ranks
///   s_j = sum_k sigmoid((x_j - x_k) / tau)
/// and a Gaussian rank kernel with width h = max(1, N / (4 Q)) around the
/// targets r * N / Q:
///   q_r = sum_j w_rj x_j,  w_rj proportional to exp(-(s_j - rN/Q)^2 / (2 h^2)).
/// Smooth in every sample; O(N^2).
std::vector<double> soft_quantile_row(std::span<const double> samples, int q, double tau);

enum class QuantileMode { kHard, kSoft };

/// Hard mode uses every pixel. Soft mode uses a deterministic strided
/// subsample of at most `subsample_cap` pixels per channel (stride =
/// ceil(N / cap)), keeping the O(N^2) soft path bounded and reproducible.
QuantileDescriptor descriptor_for_image(const LinearRawImage& image, int q, QuantileMode mode,
                                        std::size_t subsample_cap = 4096, double tau = 1e-3);

std::string descriptor_to_csv(const QuantileDescriptor& d);
nlohmann::json descriptor_to_json(const QuantileDescriptor& d);

}  // namespace rawtone
