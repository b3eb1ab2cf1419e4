#include "rawtone/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rawtone {

std::vector<double> hard_quantile_row(std::span<const double> samples, int q) {
    if (q < 1) throw std::invalid_argument("hard_quantiles: Q < 1");
    if (samples.empty()) throw std::invalid_argument("hard_quantiles: empty sample set");

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    std::vector<double> row(static_cast<std::size_t>(q));
    for (int r = 1; r <= q; ++r) {
        const double h = static_cast<double>(n - 1) * r / q;
        const auto lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        const std::size_t hi = std::min(lo + 1, n - 1);
        row[static_cast<std::size_t>(r - 1)] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    }
    return row;
}

QuantileDescriptor hard_quantiles(const LinearRawImage& image, int q) {
    if (image.pixel_count() == 0) throw std::invalid_argument("hard_quantiles: empty image");
    QuantileDescriptor d;
    d.q = q;
    for (int c = 0; c < 3; ++c) {
        auto plane = image.plane(c);
        std::vector<double> samples(plane.begin(), plane.end());
        d.values[c] = hard_quantile_row(samples, q);
    }
    return d;
}

std::vector<double> soft_quantile_row(std::span<const double> samples, int q, double tau) {
    if (q < 1) throw std::invalid_argument("soft_quantiles: Q < 1");
    if (tau <= 0.0) throw std::invalid_argument("soft_quantiles: tau <= 0");
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("soft_quantiles: need at least 2 samples");

    // pairwise logistic soft ranks
    std::vector<double> ranks(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double z = (samples[j] - samples[k]) / tau;
            // guard exp overflow; the logistic saturates anyway
            if (z > 36.0)
                s += 1.0;
            else if (z >= -36.0)
                s += 1.0 / (1.0 + std::exp(-z));
        }
        ranks[j] = s;
    }

    const double h = std::max(1.0, static_cast<double>(n) / (4.0 * q));
    const double inv_two_h2 = 1.0 / (2.0 * h * h);

    std::vector<double> row(static_cast<std::size_t>(q));
    for (int r = 1; r <= q; ++r) {
        const double target = static_cast<double>(n) * r / q;
        double wsum = 0.0, acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = ranks[j] - target;
            const double w = std::exp(-d * d * inv_two_h2);
            wsum += w;
            acc += w * samples[j];
        }
        row[static_cast<std::size_t>(r - 1)] = acc / wsum;
    }
    return row;
}

QuantileDescriptor descriptor_for_image(const LinearRawImage& image, int q, QuantileMode mode,
                                        std::size_t subsample_cap, double tau) {
    if (mode == QuantileMode::kHard) return hard_quantiles(image, q);
    if (subsample_cap < static_cast<std::size_t>(q))
        throw std::invalid_argument("descriptor: subsample cap below Q");

    const std::size_t n = image.pixel_count();
    const std::size_t stride = (n + subsample_cap - 1) / subsample_cap;

    QuantileDescriptor d;
    d.q = q;
    for (int c = 0; c < 3; ++c) {
        auto plane = image.plane(c);
        std::vector<double> samples;
        samples.reserve(subsample_cap);
        for (std::size_t i = 0; i < n && samples.size() < subsample_cap; i += stride)
            samples.push_back(plane[i]);
        d.values[c] = soft_quantile_row(samples, q, tau);
    }
    return d;
}

std::string descriptor_to_csv(const QuantileDescriptor& d) {
    std::ostringstream os;
    os.precision(12);
    for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < d.q; ++r) os << (r ? "," : "") << d.values[c][static_cast<std::size_t>(r)];
        os << "\n";
    }
    return os.str();
}

nlohmann::json descriptor_to_json(const QuantileDescriptor& d) {
    return nlohmann::json{{"Q", d.q},
                          {"channels", {d.values[0], d.values[1], d.values[2]}}};
}

}  // namespace rawtone
