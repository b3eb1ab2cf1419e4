#include "rawtone/numerics.hpp"

#include <cmath>
#include <sstream>

namespace rawtone {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ splitmix64(index + 1));
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

LsqSolution solve_lsq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() < a.cols()) throw std::invalid_argument("solve_lsq: need m >= n");
    if (a.rows() != b.rows()) throw std::invalid_argument("solve_lsq: row mismatch");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();

    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double rank_tol = smax * a.rows() * std::numeric_limits<double>::epsilon();
    if (!(smin > rank_tol)) {
        std::ostringstream msg;
        msg << "solve_lsq: rank-deficient system, singular values [";
        for (int i = 0; i < sv.size(); ++i) msg << (i ? ", " : "") << sv(i);
        msg << "]";
        throw RankDeficientError(msg.str(), sv);
    }

    LsqSolution out;
    out.x = svd.solve(b);
    out.residual_fro = (a * out.x - b).norm();
    out.condition = smax / smin;
    out.singular_values = sv;
    return out;
}

namespace {

FiniteDiffReport check_impl(
    const std::function<std::vector<double>(std::span<const double>)>& f,
    std::span<const double> x, const Eigen::MatrixXd& jacobian, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_diff_check: h <= 0");
    std::vector<double> pt(x.begin(), x.end());

    FiniteDiffReport rep;
    for (std::size_t j = 0; j < pt.size(); ++j) {
        const double orig = pt[j];
        pt[j] = orig + h;
        std::vector<double> fp = f(pt);
        pt[j] = orig - h;
        std::vector<double> fm = f(pt);
        pt[j] = orig;
        if (fp.size() != static_cast<std::size_t>(jacobian.rows()) || fm.size() != fp.size())
            throw std::invalid_argument("finite_diff_check: output size mismatch");
        for (std::size_t i = 0; i < fp.size(); ++i) {
            if (!std::isfinite(fp[i]) || !std::isfinite(fm[i]))
                throw std::runtime_error("finite_diff_check: non-finite function value");
            const double fd = (fp[i] - fm[i]) / (2.0 * h);
            const double an = jacobian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            const double rel = std::abs(an - fd) / std::max(std::abs(fd), 1e-8);
            if (rel > rep.max_rel_error) {
                rep.max_rel_error = rel;
                rep.worst_coord = j;
            }
        }
    }
    return rep;
}

}  // namespace

FiniteDiffReport finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> x,
                                   std::span<const double> analytic_grad,
                                   double h) {
    if (analytic_grad.size() != x.size())
        throw std::invalid_argument("finite_diff_check: gradient size mismatch");
    Eigen::MatrixXd jac(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) jac(0, static_cast<Eigen::Index>(j)) = analytic_grad[j];
    auto wrap = [&f](std::span<const double> p) { return std::vector<double>{f(p)}; };
    return check_impl(wrap, x, jac, h);
}

FiniteDiffReport finite_diff_check(
    const std::function<std::vector<double>(std::span<const double>)>& f,
    std::span<const double> x, const Eigen::MatrixXd& jacobian, double h) {
    if (jacobian.cols() != static_cast<Eigen::Index>(x.size()))
        throw std::invalid_argument("finite_diff_check: jacobian column mismatch");
    return check_impl(f, x, jacobian, h);
}

}  // namespace rawtone
