#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rawtone/numerics.hpp"

using namespace rawtone;

namespace {

// independent least-squares oracle: normal equations with an explicit
// 3x3 inverse (adjugate), deliberately avoiding Eigen's solvers
Eigen::MatrixXd pinv_solve_3(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    REQUIRE(a.cols() == 3);
    Eigen::Matrix3d ata = a.transpose() * a;
    const double det = ata(0, 0) * (ata(1, 1) * ata(2, 2) - ata(1, 2) * ata(2, 1)) -
                       ata(0, 1) * (ata(1, 0) * ata(2, 2) - ata(1, 2) * ata(2, 0)) +
                       ata(0, 2) * (ata(1, 0) * ata(2, 1) - ata(1, 1) * ata(2, 0));
    REQUIRE(std::abs(det) > 1e-12);
    Eigen::Matrix3d inv;
    inv(0, 0) = (ata(1, 1) * ata(2, 2) - ata(1, 2) * ata(2, 1)) / det;
    inv(0, 1) = (ata(0, 2) * ata(2, 1) - ata(0, 1) * ata(2, 2)) / det;
    inv(0, 2) = (ata(0, 1) * ata(1, 2) - ata(0, 2) * ata(1, 1)) / det;
    inv(1, 0) = (ata(1, 2) * ata(2, 0) - ata(1, 0) * ata(2, 2)) / det;
    inv(1, 1) = (ata(0, 0) * ata(2, 2) - ata(0, 2) * ata(2, 0)) / det;
    inv(1, 2) = (ata(0, 2) * ata(1, 0) - ata(0, 0) * ata(1, 2)) / det;
    inv(2, 0) = (ata(1, 0) * ata(2, 1) - ata(1, 1) * ata(2, 0)) / det;
    inv(2, 1) = (ata(0, 1) * ata(2, 0) - ata(0, 0) * ata(2, 1)) / det;
    inv(2, 2) = (ata(0, 0) * ata(1, 1) - ata(0, 1) * ata(1, 0)) / det;
    return inv * (a.transpose() * b);
}

}  // namespace

TEST_CASE("solve_lsq identity system") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd b(4, 2);
    b << 1, 2, 3, 4, 5, 6, 7, 8;
    const LsqSolution sol = solve_lsq(a, b);
    CHECK((sol.x - b).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sol.residual_fro == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("solve_lsq recovers exact solution of consistent system") {
    SeededRng rng(1);
    Eigen::MatrixXd a(10, 3), x0(3, 2);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) x0(i, j) = rng.uniform(-2.0, 2.0);
    const LsqSolution sol = solve_lsq(a, a * x0);
    CHECK((sol.x - x0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("solve_lsq matches pseudo-inverse oracle on random 24x3 systems") {
    SeededRng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd a(24, 3), b(24, 3);
        for (int i = 0; i < 24; ++i)
            for (int j = 0; j < 3; ++j) {
                a(i, j) = rng.uniform(0.05, 2.0);
                b(i, j) = rng.uniform(0.05, 2.0);
            }
        const LsqSolution sol = solve_lsq(a, b);
        const Eigen::MatrixXd x_oracle = pinv_solve_3(a, b);
        const double oracle_residual = (a * x_oracle - b).norm();
        CHECK(std::abs(sol.residual_fro - oracle_residual) < 1e-8);
        CHECK((sol.x - x_oracle).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("solve_lsq rejects rank-deficient systems with singular values") {
    Eigen::MatrixXd a(5, 3);
    for (int i = 0; i < 5; ++i) {
        a(i, 0) = i + 1.0;
        a(i, 1) = 2.0 * (i + 1.0);  // collinear
        a(i, 2) = 0.5;
    }
    Eigen::MatrixXd b = Eigen::MatrixXd::Ones(5, 1);
    CHECK_THROWS_AS(solve_lsq(a, b), RankDeficientError);
    try {
        solve_lsq(a, b);
    } catch (const RankDeficientError& e) {
        CHECK(e.singular_values.size() == 3);
        CHECK(e.singular_values(2) < 1e-10 * e.singular_values(0));
    }
}

TEST_CASE("finite differences on a quadratic are near-exact") {
    auto f = [](std::span<const double> p) { return p[0] * p[0]; };
    const double x[1] = {3.0};
    const double g[1] = {6.0};
    const auto rep = finite_diff_check(f, std::span<const double>(x, 1),
                                       std::span<const double>(g, 1), 1e-4);
    CHECK(rep.max_rel_error < 1e-9);
}

TEST_CASE("finite_diff_check flags a wrong gradient instead of masking it") {
    auto f = [](std::span<const double> p) { return p[0] * p[0]; };
    const double x[1] = {3.0};
    const double g[1] = {12.0};  // off by 2x
    const auto rep = finite_diff_check(f, std::span<const double>(x, 1),
                                       std::span<const double>(g, 1), 1e-4);
    CHECK(rep.max_rel_error == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("uniform degenerate range returns the endpoint") {
    SeededRng rng(3);
    CHECK(rng.uniform(5.0, 5.0) == 5.0);
    CHECK_THROWS_AS(rng.uniform(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("uniform draws have the right mean and decile spread") {
    SeededRng rng(42);
    const int n = 1000000;
    double sum = 0.0;
    int deciles[10] = {};
    for (int i = 0; i < n; ++i) {
        const double v = rng.uniform(0.0, 1.0);
        sum += v;
        int d = static_cast<int>(v * 10.0);
        if (d > 9) d = 9;
        ++deciles[d];
    }
    CHECK(std::abs(sum / n - 0.5) < 0.002);
    // binomial sigma = sqrt(n * 0.1 * 0.9) = 300; 3-sigma band
    for (int d = 0; d < 10; ++d) CHECK(std::abs(deciles[d] - 100000) < 900);
}

TEST_CASE("normal with zero sigma is the mean") {
    SeededRng rng(4);
    CHECK(rng.normal(0.0, 0.0) == 0.0);
    CHECK(rng.normal(2.5, 0.0) == 2.5);
    CHECK_THROWS_AS(rng.normal(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("normal draws match moments") {
    SeededRng rng(5);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal(1.0, 2.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean - 1.0) < 0.02);
    CHECK(std::abs(var - 4.0) < 0.08);
}

TEST_CASE("seed derivation is stable and spread") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("fnv1a64 matches the reference vector") {
    // standard FNV-1a test vector
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
}
