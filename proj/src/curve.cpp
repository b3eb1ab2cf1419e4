#include "rawtone/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rawtone {

namespace {

double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

void check_channel(int c) {
    if (c < 0 || c > 2) throw std::invalid_argument("curve: channel outside {0,1,2}");
}

}  // namespace

double bezier_eval(std::span<const double> points, double t) {
    if (points.size() < 2) throw std::invalid_argument("bezier_eval: need degree >= 1");
    t = clamp01(t);
    std::vector<double> work(points.begin(), points.end());
    for (std::size_t level = work.size() - 1; level > 0; --level)
        for (std::size_t i = 0; i < level; ++i)
            work[i] = (1.0 - t) * work[i] + t * work[i + 1];
    return work[0];
}

double bezier_derivative(std::span<const double> points, double t) {
    if (points.size() < 2) throw std::invalid_argument("bezier_derivative: need degree >= 1");
    t = clamp01(t);
    const auto n = points.size() - 1;
    std::vector<double> diffs(n);
    for (std::size_t i = 0; i < n; ++i) diffs[i] = points[i + 1] - points[i];
    if (diffs.size() == 1) return static_cast<double>(n) * diffs[0];
    std::vector<double>& work = diffs;
    for (std::size_t level = work.size() - 1; level > 0; --level)
        for (std::size_t i = 0; i < level; ++i)
            work[i] = (1.0 - t) * work[i] + t * work[i + 1];
    return static_cast<double>(n) * work[0];
}

std::vector<double> bernstein_weights(int degree, double t) {
    if (degree < 1) throw std::invalid_argument("bernstein_weights: degree < 1");
    t = clamp01(t);
    // iterative de-Casteljau-style accumulation, stable for the degrees used here
    std::vector<double> w(static_cast<std::size_t>(degree) + 1, 0.0);
    w[0] = 1.0;
    for (int level = 1; level <= degree; ++level) {
        for (int i = level; i > 0; --i) w[i] = t * w[i - 1] + (1.0 - t) * w[i];
        w[0] *= (1.0 - t);
    }
    return w;
}

bool points_ordered(std::span<const double> points) {
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (points[i] > points[i + 1]) return false;
    return true;
}

void CurveParams::derive_points() {
    const int n = degree_;
    for (int c = 0; c < 3; ++c) {
        points_[c].assign(static_cast<std::size_t>(n) + 1, 0.0);
        points_[c][0] = 0.0;
        points_[c][static_cast<std::size_t>(n)] = 1.0;
        for (int i = 1; i < n; ++i)
            points_[c][static_cast<std::size_t>(i)] =
                clamp01(static_cast<double>(i) / n + 0.5 * std::tanh(residuals_[c][i - 1]));
    }
}

CurveParams CurveParams::identity(int degree) {
    std::array<std::vector<double>, 3> zeros;
    for (auto& ch : zeros) ch.assign(static_cast<std::size_t>(std::max(degree - 1, 0)), 0.0);
    return from_residuals(degree, zeros);
}

CurveParams CurveParams::from_residuals(int degree,
                                        const std::array<std::vector<double>, 3>& residuals) {
    if (degree < kMinDegree || degree > kMaxDegree)
        throw std::invalid_argument("curve: degree outside supported range");
    for (const auto& ch : residuals)
        if (ch.size() != static_cast<std::size_t>(degree - 1))
            throw std::invalid_argument("curve: wrong residual count");
    CurveParams p;
    p.degree_ = degree;
    p.residuals_ = residuals;
    p.derive_points();
    return p;
}

CurveParams CurveParams::from_control_points(const std::array<std::vector<double>, 3>& points) {
    const std::size_t count = points[0].size();
    if (count < 2) throw std::invalid_argument("curve: need at least 2 control points");
    const int degree = static_cast<int>(count) - 1;
    constexpr double kMaxDev = 0.5 - 1e-12;

    std::array<std::vector<double>, 3> residuals;
    for (int c = 0; c < 3; ++c) {
        if (points[c].size() != count) throw std::invalid_argument("curve: ragged control points");
        if (points[c].front() != 0.0 || points[c].back() != 1.0)
            throw std::invalid_argument("curve: endpoints must be pinned to 0 and 1");
        residuals[c].resize(count - 2);
        for (std::size_t i = 1; i + 1 < count; ++i) {
            const double dev = std::clamp(
                points[c][i] - static_cast<double>(i) / degree, -kMaxDev, kMaxDev);
            residuals[c][i - 1] = std::atanh(2.0 * dev);
        }
    }
    return from_residuals(degree, residuals);
}

double eval_curve(const CurveParams& params, int channel, double t) {
    check_channel(channel);
    return bezier_eval(params.control_points(channel), t);
}

double curve_derivative(const CurveParams& params, int channel, double t) {
    check_channel(channel);
    return bezier_derivative(params.control_points(channel), t);
}

std::vector<double> grad_wrt_controls(const CurveParams& params, int channel, double t) {
    check_channel(channel);
    return bernstein_weights(params.degree(), t);
}

LinearRawImage apply_curve(const CurveParams& params, const LinearRawImage& image) {
    LinearRawImage out(image.height(), image.width(), image.meta());
    for (int c = 0; c < 3; ++c) {
        auto src = image.plane(c);
        auto dst = out.plane(c);
        const auto points = params.control_points(c);
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i] = static_cast<float>(bezier_eval(points, src[i]));
    }
    return out;
}

bool is_monotone(const CurveParams& params, int channel) {
    check_channel(channel);
    return points_ordered(params.control_points(channel));
}

CurveParams isotonic_projection(const CurveParams& params) {
    std::array<std::vector<double>, 3> points;
    for (int c = 0; c < 3; ++c) {
        auto pts = params.control_points(c);
        points[c].assign(pts.begin(), pts.end());
        std::sort(points[c].begin() + 1, points[c].end() - 1);
    }
    return CurveParams::from_control_points(points);
}

nlohmann::json curve_to_json(const CurveParams& params) {
    nlohmann::json res = nlohmann::json::array();
    for (int c = 0; c < 3; ++c) {
        auto r = params.residuals(c);
        res.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return nlohmann::json{{"degree", params.degree()}, {"residuals", res}};
}

CurveParams curve_from_json(const nlohmann::json& j) {
    const int degree = j.at("degree").get<int>();
    auto res = j.at("residuals");
    if (!res.is_array() || res.size() != 3)
        throw std::invalid_argument("curve: residuals must have 3 channels");
    std::array<std::vector<double>, 3> residuals;
    for (int c = 0; c < 3; ++c) residuals[c] = res[c].get<std::vector<double>>();
    return CurveParams::from_residuals(degree, residuals);
}

}  // namespace rawtone
