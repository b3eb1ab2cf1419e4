#pragma once

#include <array>
#include <span>
#include <vector>

#include <json.hpp>

#include "rawtone/raster.hpp"

namespace rawtone {

// ---- Bernstein/Bezier kernels on raw control points ----
// Inputs t outside [0, 1] are clamped: the Bernstein basis is a convex
// combination only on [0, 1].

/// De Casteljau evaluation of a 1-D Bezier with the given control points.
double bezier_eval(std::span<const double> points, double t);

/// Closed-form derivative: degree * sum of B_{n-1,i}(t) * (p_{i+1} - p_i),
/// evaluated with De Casteljau on the difference points.
double bezier_derivative(std::span<const double> points, double t);

/// Bernstein basis weights B_{n,i}(t), i = 0..degree. Non-negative, sum 1.
std::vector<double> bernstein_weights(int degree, double t);

bool points_ordered(std::span<const double> points);

/// Per-channel degree-n Bezier tone curve with residual-anchored control
/// points: p_0 = 0, p_n = 1, and interior
///   p_i = clip_[0,1](i/n + tanh(delta_i) / 2).
/// Residuals are the stored representation; control points are always
/// rederived from them.
class CurveParams {
public:
    static constexpr int kMinDegree = 1;
    static constexpr int kMaxDegree = 16;

    /// Identity curve (all residuals zero).
    static CurveParams identity(int degree);

    /// residuals[c] must have degree - 1 entries per channel.
    static CurveParams from_residuals(int degree,
                                      const std::array<std::vector<double>, 3>& residuals);

    /// Inverts the anchoring map. Interior deviations |p_i - i/n| are
    /// clamped just inside 1/2 (the open range of tanh/2), so extreme
    /// points are reproduced only approximately.
    static CurveParams from_control_points(const std::array<std::vector<double>, 3>& points);

    int degree() const { return degree_; }
    std::span<const double> residuals(int c) const { return residuals_[c]; }
    std::span<const double> control_points(int c) const { return points_[c]; }

private:
    CurveParams() = default;
    void derive_points();

    int degree_ = 0;
    std::array<std::vector<double>, 3> residuals_;
    std::array<std::vector<double>, 3> points_;
};

double eval_curve(const CurveParams& params, int channel, double t);
double curve_derivative(const CurveParams& params, int channel, double t);

/// d eval / d p_i = B_{n,i}(t): the Bernstein weight vector.
std::vector<double> grad_wrt_controls(const CurveParams& params, int channel, double t);

/// Per-pixel, per-channel curve evaluation. Zero residuals reproduce the
/// input exactly.
LinearRawImage apply_curve(const CurveParams& params, const LinearRawImage& image);

/// True iff the channel's control points are non-decreasing (sufficient
/// condition for a non-decreasing curve).
bool is_monotone(const CurveParams& params, int channel);

/// Optional projection onto the ordered regime: sorts each channel's
/// interior control points. Off by default everywhere; callers opt in.
CurveParams isotonic_projection(const CurveParams& params);

nlohmann::json curve_to_json(const CurveParams& params);
CurveParams curve_from_json(const nlohmann::json& j);

}  // namespace rawtone
