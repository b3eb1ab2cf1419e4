#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace rawtone {

/// Deterministic seedable generator. The engine is std::mt19937_64, whose
/// output stream is fully specified by the C++ standard; all distribution
/// transforms below are implemented explicitly so that identical seeds yield
/// identical streams on every platform and compiler. This identity is part
/// of the provenance/replay contract.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi); degenerate lo == hi returns lo exactly.
    double uniform(double lo, double hi) {
        if (!(lo <= hi)) throw std::invalid_argument("uniform: lo > hi");
        return lo + uniform01() * (hi - lo);
    }

    /// Normal(mu, sigma) via Box-Muller; consumes exactly two draws.
    double normal(double mu, double sigma) {
        if (sigma < 0.0) throw std::invalid_argument("normal: sigma < 0");
        double u1 = uniform01();
        double u2 = uniform01();
        // avoid log(0)
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double z = r * std::cos(6.283185307179586476925286766559 * u2);
        return mu + sigma * z;
    }

    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: empty range");
        auto idx = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

    template <typename T>
    const T& uniform_choice(const std::vector<T>& items) {
        return items.at(uniform_index(items.size()));
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Per-item seed derivation for batch runs: stable across platforms and
/// independent of processing order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// FNV-1a 64-bit, used for content hashes in manifests and provenance.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(std::string_view s);

struct LsqSolution {
    Eigen::MatrixXd x;                  // n x k, minimizes |A x - B|_F
    double residual_fro = 0.0;
    double condition = 1.0;             // sigma_max / sigma_min
    Eigen::VectorXd singular_values;
};

class RankDeficientError : public std::runtime_error {
public:
    RankDeficientError(std::string msg, Eigen::VectorXd sv)
        : std::runtime_error(std::move(msg)), singular_values(std::move(sv)) {}
    Eigen::VectorXd singular_values;
};

/// Least squares min |A x - B|_F via SVD. Requires m >= n and full column
/// rank; otherwise throws RankDeficientError carrying the singular values.
LsqSolution solve_lsq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct FiniteDiffReport {
    double max_rel_error = 0.0;
    std::size_t worst_coord = 0;
};

/// Central-difference check of an analytic gradient of a scalar function.
/// Relative error uses the finite-difference value as reference with an
/// absolute floor of 1e-8 in the denominator.
FiniteDiffReport finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> x,
                                   std::span<const double> analytic_grad,
                                   double h);

/// Vector-valued variant; `jacobian(i, j)` is d f_i / d x_j.
FiniteDiffReport finite_diff_check(
    const std::function<std::vector<double>(std::span<const double>)>& f,
    std::span<const double> x,
    const Eigen::MatrixXd& jacobian,
    double h);

}  // namespace rawtone
