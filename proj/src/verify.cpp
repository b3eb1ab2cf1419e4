#include "rawtone/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "rawtone/adapter.hpp"
#include "rawtone/curve.hpp"
#include "rawtone/grid.hpp"
#include "rawtone/numerics.hpp"
#include "rawtone/quantiles.hpp"
#include "rawtone/raster.hpp"
#include "rawtone/sim.hpp"
#include "rawtone/spectral.hpp"

namespace rawtone {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

CheckResult check(std::string name, bool pass, std::string detail) {
    return CheckResult{std::move(name), pass, std::move(detail)};
}

// ---- shared generators ----

LinearRawImage random_image(SeededRng& rng, int h, int w) {
    LinearRawImage img(h, w);
    for (float& v : img.data()) v = static_cast<float>(rng.uniform01());
    return img;
}

GridCoeffs random_grid(SeededRng& rng, int gd, int gh, int gw, double amplitude) {
    GridCoeffs g = GridCoeffs::zeros(gd, gh, gw);
    for (float& v : g.raw) v = static_cast<float>(rng.uniform(-amplitude, amplitude));
    return g;
}

bool planes_bit_equal(const LinearRawImage& a, const LinearRawImage& b) {
    return a.height() == b.height() && a.width() == b.width() &&
           std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(float)) == 0;
}

/// Independent trilinear gather written from the coordinate definition;
/// deliberately not calling slice().
Mat3 naive_slice(const MaterializedGrid& g, double px, double py, double lum, int w, int h) {
    const double cx = px * g.width / w;
    const double cy = py * g.height / h;
    const double cz = lum * g.depth;

    auto corner = [](double c, int dim, int which) {
        if (dim == 1) return 0;
        int lo = static_cast<int>(std::floor(c));
        if (lo < 0) lo = 0;
        if (lo > dim - 2) lo = dim - 2;
        return which == 0 ? lo : lo + 1;
    };
    auto weight = [](double c, int dim, int which) {
        if (dim == 1) return which == 0 ? 1.0 : 0.0;
        int lo = static_cast<int>(std::floor(c));
        if (lo < 0) lo = 0;
        if (lo > dim - 2) lo = dim - 2;
        double f = c - lo;
        if (f < 0) f = 0;
        if (f > 1) f = 1;
        return which == 0 ? 1.0 - f : f;
    };

    Mat3 out{};
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                const double wgt = weight(cz, g.depth, dz) * weight(cy, g.height, dy) *
                                   weight(cx, g.width, dx);
                const std::size_t idx =
                    g.cell_index(corner(cz, g.depth, dz), corner(cy, g.height, dy),
                                 corner(cx, g.width, dx));
                for (int i = 0; i < 9; ++i) out[i] += wgt * g.mats[idx * 9 + i];
            }
    return out;
}

// =====================================================================
// acceptance criteria
// =====================================================================

CheckResult acc_identity_at_init() {
    const auto t0 = Clock::now();
    SeededRng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int h = 8 + static_cast<int>(rng.uniform_index(121));
        const int w = 8 + static_cast<int>(rng.uniform_index(121));
        const LinearRawImage img = random_image(rng, h, w);
        AdapterParams params;
        params.curve = CurveParams::identity(8);
        params.grid = default_grid_for(h, w);
        const LinearRawImage out = apply_adapter(img, params);
        if (!planes_bit_equal(img, out))
            return check("identity-at-init", false,
                         "bit mismatch at trial " + std::to_string(trial));
    }
    const double dt = seconds_since(t0);
    return check("identity-at-init", dt < 5.0,
                 "100 images bit-equal, " + fmt(dt) + " s (budget 5 s)");
}

CheckResult acc_gradient_fidelity() {
    const auto t0 = Clock::now();
    SeededRng rng(202);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(15));
        // residual bound atanh(1/(2n)) keeps every draw strictly monotone
        // with derivative >= 1/2, so the relative-error metric stays
        // meaningful (at derivative zeros the h^2 truncation term dominates
        // any denominator floor)
        const double bound = std::atanh(1.0 / (2.0 * n));
        std::array<std::vector<double>, 3> res;
        for (auto& ch : res) {
            ch.resize(static_cast<std::size_t>(n - 1));
            for (double& d : ch) d = rng.uniform(-bound, bound);
        }
        const CurveParams params = CurveParams::from_residuals(n, res);
        const int c = static_cast<int>(rng.uniform_index(3));
        // keep t +- h inside [0,1]: the eval clamps its argument, which
        // would corrupt the finite difference at the boundary
        const double t = rng.uniform(2e-4, 1.0 - 2e-4);

        const double analytic = curve_derivative(params, c, t);
        const double x[1] = {t};
        const double g[1] = {analytic};
        auto f = [&](std::span<const double> p) { return eval_curve(params, c, p[0]); };
        const auto rep = finite_diff_check(f, std::span<const double>(x, 1),
                                           std::span<const double>(g, 1), 1e-4);
        worst = std::max(worst, rep.max_rel_error);

        // control-point gradient: Bernstein weights vs finite differences,
        // vector-relative (tiny basis weights sit below the h^2 cancellation
        // noise of any central difference, so per-coordinate ratios are
        // meaningless there)
        const auto pts = params.control_points(c);
        std::vector<double> p(pts.begin(), pts.end());
        const auto weights = grad_wrt_controls(params, c, t);
        double fd_scale = 0.0, grad_dev = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double orig = p[i];
            p[i] = orig + 1e-4;
            const double fp = bezier_eval(p, t);
            p[i] = orig - 1e-4;
            const double fm = bezier_eval(p, t);
            p[i] = orig;
            const double fd = (fp - fm) / 2e-4;
            fd_scale = std::max(fd_scale, std::abs(fd));
            grad_dev = std::max(grad_dev, std::abs(fd - weights[i]));
        }
        worst = std::max(worst, grad_dev / std::max(fd_scale, 1e-8));
    }
    const double dt = seconds_since(t0);
    const bool pass = worst < 1e-5 && dt < 10.0;
    return check("gradient-fidelity", pass,
                 "max rel err " + fmt(worst) + " (tol 1e-5), " + fmt(dt) + " s (budget 10 s)");
}

CheckResult acc_monotonicity() {
    SeededRng rng(303);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(15));
        std::vector<double> pts(static_cast<std::size_t>(n) + 1);
        pts.front() = 0.0;
        pts.back() = 1.0;
        for (int i = 1; i < n; ++i) pts[static_cast<std::size_t>(i)] = rng.uniform01();
        std::sort(pts.begin(), pts.end());
        for (int i = 0; i <= 1023; ++i) {
            const double t = static_cast<double>(i) / 1023.0;
            worst = std::min(worst, bezier_derivative(pts, t));
        }
    }
    return check("ordered-monotonicity", worst >= -1e-12,
                 "min derivative over 1000 ordered draws: " + fmt(worst));
}

CheckResult acc_dia_soundness() {
    const auto t0 = Clock::now();
    SeededRng rng(404);
    const double k = 0.05;
    double worst_gain_lo = 1e9, worst_gain_hi = 0.0;
    for (int trial = 0; trial < 100000; ++trial) {
        double d_hat[3], a_hat[6];
        for (double& v : d_hat) v = rng.uniform(-6.0, 6.0);
        for (double& v : a_hat) v = rng.uniform(-6.0, 6.0);
        const Mat3 m = build_matrix(std::span<const double>(d_hat, 3),
                                    std::span<const double>(a_hat, 6), k);
        for (int i = 0; i < 3; ++i) {
            const double diag = std::abs(m[i * 3 + i]);
            double off = 0.0;
            for (int j = 0; j < 3; ++j)
                if (j != i) off += std::abs(m[i * 3 + j]);
            if (off >= diag)
                return check("dia-soundness", false, "diagonal dominance violated");
            worst_gain_lo = std::min(worst_gain_lo, m[i * 3 + i]);
            worst_gain_hi = std::max(worst_gain_hi, m[i * 3 + i]);
        }
        try {
            invert_cell(m);  // enforces the 1e-10 residual bound internally
        } catch (const std::exception& e) {
            return check("dia-soundness", false, e.what());
        }
    }
    const double dt = seconds_since(t0);
    const bool gains_ok =
        worst_gain_lo >= std::exp(-1.0) - 1e-9 && worst_gain_hi <= std::exp(1.0) + 1e-9;
    return check("dia-soundness", gains_ok && dt < 30.0,
                 "1e5 draws, gains in [" + fmt(worst_gain_lo) + ", " + fmt(worst_gain_hi) +
                     "], " + fmt(dt) + " s (budget 30 s)");
}

CheckResult acc_slicing_oracle() {
    SeededRng rng(505);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int gd = 2 + static_cast<int>(rng.uniform_index(7));
        const int gh = 2 + static_cast<int>(rng.uniform_index(5));
        const int gw = 2 + static_cast<int>(rng.uniform_index(5));
        const int h = 8 + static_cast<int>(rng.uniform_index(57));
        const int w = 8 + static_cast<int>(rng.uniform_index(57));
        const GridCoeffs grid = random_grid(rng, gd, gh, gw, 2.0);
        const LinearRawImage img = random_image(rng, h, w);
        const std::vector<float> lum = luminance_map(img);

        const MaterializedGrid mg = materialize(grid);
        const LinearRawImage fast = render(mg, img, lum);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t p = static_cast<std::size_t>(y) * w + x;
                const Mat3 m = naive_slice(mg, x, y, lum[p], w, h);
                const double in[3] = {img.plane(0)[p], img.plane(1)[p], img.plane(2)[p]};
                for (int c = 0; c < 3; ++c) {
                    const double want = std::clamp(
                        m[c * 3] * in[0] + m[c * 3 + 1] * in[1] + m[c * 3 + 2] * in[2], 0.0, 1.0);
                    worst = std::max(worst,
                                     std::abs(want - static_cast<double>(fast.plane(c)[p])));
                }
            }
    }

    // vertex reproduction: queries exactly at grid nodes return the node
    SeededRng rng2(506);
    const GridCoeffs grid = random_grid(rng2, 8, 3, 4, 2.0);
    const MaterializedGrid mg = materialize(grid);
    const int w = grid.width * 16, h = grid.height * 16;
    for (int d = 0; d < grid.depth; ++d)
        for (int gy = 0; gy < grid.height; ++gy)
            for (int gx = 0; gx < grid.width; ++gx) {
                const Mat3 got = slice(mg, gx * 16, gy * 16, static_cast<double>(d) / grid.depth,
                                       w, h);
                const double* want = mg.mats.data() + mg.cell_index(d, gy, gx) * 9;
                for (int i = 0; i < 9; ++i)
                    if (got[i] != want[i])
                        return check("slicing-oracle", false, "vertex value not exact");
            }

    return check("slicing-oracle", worst < 1e-6,
                 "max |fast - naive| = " + fmt(worst) + " over 50 pairs; vertices exact");
}

CheckResult acc_quantile_contracts() {
    SeededRng rng(606);
    // hard affine equivariance at 1e-12, in the double sample domain
    double worst_affine = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> samples(512);
        for (double& v : samples) v = rng.uniform01();
        const double a = rng.uniform(0.5, 3.0);
        const double b = rng.uniform(-0.5, 0.5);
        std::vector<double> mapped(samples);
        for (double& v : mapped) v = a * v + b;
        const auto q1 = hard_quantile_row(mapped, 64);
        const auto q0 = hard_quantile_row(samples, 64);
        for (int r = 0; r < 64; ++r)
            worst_affine = std::max(worst_affine,
                                    std::abs(q1[static_cast<std::size_t>(r)] -
                                             (a * q0[static_cast<std::size_t>(r)] + b)));
    }

    // soft -> hard at tau = 1e-3 on well-separated data (strictly
    // increasing, spacing shrinking toward the ends)
    const int n = 1025;
    std::vector<double> ramp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / (n - 1);
        ramp[static_cast<std::size_t>(i)] = (std::sin((u - 0.5) * M_PI) + 1.0) / 2.0;
    }
    const auto hard = hard_quantile_row(ramp, 64);
    const auto soft = soft_quantile_row(ramp, 64, 1e-3);
    double worst_soft = 0.0;
    for (int r = 0; r < 64; ++r)
        worst_soft = std::max(worst_soft, std::abs(hard[static_cast<std::size_t>(r)] -
                                                   soft[static_cast<std::size_t>(r)]));

    // hard row monotonicity over 500 random images
    bool mono = true;
    for (int trial = 0; trial < 500 && mono; ++trial) {
        const LinearRawImage img = random_image(rng, 16, 16);
        const QuantileDescriptor d = hard_quantiles(img, 64);
        for (int c = 0; c < 3 && mono; ++c)
            for (int r = 0; r + 1 < 64; ++r)
                if (d.values[c][static_cast<std::size_t>(r)] >
                    d.values[c][static_cast<std::size_t>(r) + 1]) {
                    mono = false;
                    break;
                }
    }

    const bool pass = worst_affine < 1e-12 && worst_soft < 1e-3 && mono;
    return check("quantile-contracts", pass,
                 "affine dev " + fmt(worst_affine) + " (tol 1e-12), soft-hard dev " +
                     fmt(worst_soft) + " (tol 1e-3), rows monotone: " + (mono ? "yes" : "no"));
}

CheckResult acc_ccm_identity(const VerifyOptions& opt) {
    const SpectralTables tables = load_spectral_tables(resolve_data_dir(opt.data_dir));
    const CameraSensitivity mean = mean_sensitivity(tables.cameras);
    const PatchResponse pa = colorchecker_response(mean, tables.d65, tables.reflectance);
    const CcmFit fit = fit_ccm(pa, pa);
    const double ccm_dev = (fit.m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();

    // neutral-parameter chain vs a stage-composed per-pixel oracle
    SimParams params;
    params.u = 0.0;
    params.alpha = 1.0;
    params.delta_uv = 0.0;
    params.tint_gains = {1.0, 1.0, 1.0};
    params.crosstalk = Eigen::Matrix3d::Zero();
    params.black_offset = {0.0, 0.0, 0.0};
    params.ccm = fit.m;
    params.target_sensitivity = mean;
    params.illuminant = tables.d65;
    params.wb_target = target_wb_gains(mean, tables.d65);
    params.s_sat = 1.0;
    params.bits = 16;

    SimStageToggles toggles;
    toggles.rolloff = false;
    toggles.quantize = false;

    SeededRng rng(707);
    const LinearRawImage img = random_image(rng, 32, 32);
    const SimResult result = apply_sim(img, params, toggles);

    const std::array<double, 3> wb_src = gray_world_gains(img);
    double worst = 0.0;
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        double x[3];
        for (int c = 0; c < 3; ++c) x[c] = static_cast<double>(img.plane(c)[p]) * wb_src[c];
        double y[3];
        for (int c = 0; c < 3; ++c)
            y[c] = params.ccm(c, 0) * x[0] + params.ccm(c, 1) * x[1] + params.ccm(c, 2) * x[2];
        for (int c = 0; c < 3; ++c) {
            const double want = std::max(y[c] / params.wb_target[c], 0.0);
            worst = std::max(worst,
                             std::abs(want - static_cast<double>(result.image.plane(c)[p])));
        }
    }

    const bool pass = ccm_dev < 1e-10 && worst < 1e-6;
    return check("ccm-identity", pass,
                 "|M - I| = " + fmt(ccm_dev) + " (tol 1e-10), chain dev " + fmt(worst) +
                     " (tol 1e-6)");
}

CheckResult acc_planck_spectral(const VerifyOptions& opt) {
    const Spectrum warm = planck_spd(2500.0);
    const Spectrum cool = planck_spd(20000.0);
    bool norm_exact = false;
    for (double v : warm) norm_exact |= (v == 1.0);
    bool norm_exact2 = false;
    for (double v : cool) norm_exact2 |= (v == 1.0);

    bool warm_up = true, cool_down = true;
    for (int i = 0; i + 1 < kSpectrumSize; ++i) {
        if (!(warm[i + 1] > warm[i])) warm_up = false;
        if (!(cool[i + 1] < cool[i])) cool_down = false;
    }

    const SpectralTables tables = load_spectral_tables(resolve_data_dir(opt.data_dir));
    const CameraSensitivity mean = mean_sensitivity(tables.cameras);
    double blue_peak = 0.0;
    for (double v : mean.channels[2]) blue_peak = std::max(blue_peak, v);
    const bool blue_ok = blue_peak >= 0.6 && blue_peak <= 1.0;

    const bool pass = norm_exact && norm_exact2 && warm_up && cool_down && blue_ok;
    return check("planck-spectral-sanity", pass,
                 std::string("2500K rising: ") + (warm_up ? "yes" : "no") +
                     ", 20000K falling: " + (cool_down ? "yes" : "no") +
                     ", mean blue peak " + fmt(blue_peak) + " in [0.6, 1.0]");
}

CheckResult acc_determinism_lattice(const VerifyOptions& opt) {
    const SpectralTables tables = load_spectral_tables(resolve_data_dir(opt.data_dir));
    const PcaModel pca = fit_pca(tables.cameras);
    const CameraSensitivity mean = mean_sensitivity(tables.cameras);
    const PatchResponse pa = colorchecker_response(mean, tables.d65, tables.reflectance);

    SimConfig config;
    SeededRng rng_img(808);
    const LinearRawImage img = random_image(rng_img, 24, 24);

    auto run = [&](std::uint64_t seed) {
        SeededRng rng(seed);
        const SimParams p = sample_params(config, pca, pa, tables.reflectance, rng);
        return apply_sim(img, p, config.toggles, seed, pca_model_hash(pca));
    };
    const SimResult a = run(42);
    const SimResult b = run(42);
    const bool det = planes_bit_equal(a.image, b.image) && a.provenance == b.provenance;

    // lattice membership of the quantization operator (double path)
    SeededRng rng(909);
    double worst = 0.0;
    for (int bits : {10, 12, 14, 16}) {
        const double levels = static_cast<double>((1 << bits) - 1);
        for (int i = 0; i < 10000; ++i) {
            const double s_sat = rng.uniform(0.9, 1.0);
            const double q = quantize(rng.uniform(0.0, 1.2), bits, s_sat);
            const double scaled = q * levels;
            worst = std::max(worst, std::abs(scaled - std::round(scaled)));
        }
    }

    const bool pass = det && worst < 1e-9;
    return check("determinism-lattice", pass,
                 std::string("seed replay byte-identical: ") + (det ? "yes" : "no") +
                     ", lattice dev " + fmt(worst) + " (tol 1e-9)");
}

CheckResult acc_tint_exposure_pins() {
    const std::array<double, 3> g = tint_gain(0.04, 15.0);
    const bool tint_ok = g[0] == 0.7 && g[1] == 1.0 && g[2] == 0.4;
    const bool mired_ok = (1e6 / 50.0 == 20000.0) && (1e6 / 400.0 == 2500.0);
    return check("tint-exposure-pins", tint_ok && mired_ok,
                 "tint_gain(0.04, 15) = (" + fmt(g[0]) + ", " + fmt(g[1]) + ", " + fmt(g[2]) +
                     "), mired endpoints 20000 K / 2500 K");
}

CheckResult acc_throughput() {
    SeededRng rng(111);
    const GridCoeffs grid = random_grid(rng, 8, 16, 16, 1.0);
    const MaterializedGrid mg = materialize(grid);

    struct Size {
        int w, h;
    };
    const Size sizes[4] = {{640, 480}, {1280, 960}, {2560, 1920}, {4096, 3072}};
    double per_pixel_ns[4];
    double big_ms = 0.0;

    for (int s = 0; s < 4; ++s) {
        const LinearRawImage img = random_image(rng, sizes[s].h, sizes[s].w);
        const std::vector<float> lum = luminance_map(img);
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = Clock::now();
            const LinearRawImage out = render(mg, img, lum);
            const double dt = seconds_since(t0);
            best = std::min(best, dt);
            if (out.plane(0)[0] > 2.0f) return check("throughput-scaling", false, "bad output");
        }
        per_pixel_ns[s] = best * 1e9 / (static_cast<double>(sizes[s].w) * sizes[s].h);
        if (s == 3) big_ms = best * 1e3;
    }

    std::vector<double> sorted(per_pixel_ns, per_pixel_ns + 4);
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[1] + sorted[2]);
    bool linear = true;
    for (double v : per_pixel_ns)
        if (v < 0.85 * median || v > 1.15 * median) linear = false;

    std::ostringstream detail;
    detail << "per-pixel ns: ";
    for (int s = 0; s < 4; ++s) detail << (s ? ", " : "") << fmt(per_pixel_ns[s]);
    detail << "; 4096x3072 frame: " << fmt(big_ms) << " ms (soft target 500 ms, reported only)";
    return check("throughput-scaling", linear, detail.str());
}

// =====================================================================
// module suites
// =====================================================================

std::vector<CheckResult> suite_raster() {
    std::vector<CheckResult> out;
    SeededRng rng(1);

    {  // normalization monotone in counts
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            RasterMeta meta;
            meta.bit_depth = 12;
            meta.black_level = {64, 64, 64};
            meta.white_level = 4000;
            std::vector<std::uint32_t> counts(3);
            double prev = -1.0;
            for (std::uint32_t v = 0; v <= 4095; v += 37) {
                counts[0] = counts[1] = counts[2] = v;
                const LinearRawImage img = normalize_raw(counts, 1, 1, meta);
                if (img.at(0, 0, 0) < prev) ok = false;
                prev = img.at(0, 0, 0);
            }
        }
        out.push_back(check("normalize-monotone", ok, "non-decreasing in counts"));
    }
    {  // RAWF byte-level round trip
        const auto dir = std::filesystem::temp_directory_path();
        const auto p1 = dir / "rawtone_verify_a.rawf";
        const auto p2 = dir / "rawtone_verify_b.rawf";
        LinearRawImage img = random_image(rng, 8, 8);
        img.meta().sensor_name = "verify";
        img.meta().sidecar["note"] = "round-trip";
        write_rawf(img, p1);
        const LinearRawImage back = read_rawf(p1);
        write_rawf(back, p2);
        std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
        std::stringstream b1, b2;
        b1 << f1.rdbuf();
        b2 << f2.rdbuf();
        const bool ok = planes_bit_equal(img, back) && b1.str() == b2.str() && !b1.str().empty();
        std::filesystem::remove(p1);
        std::filesystem::remove(p2);
        out.push_back(check("rawf-byte-round-trip", ok, "write-read-write byte identity"));
    }
    {  // bayer cell locality
        RasterMeta meta;
        meta.bit_depth = 10;
        meta.white_level = 1000;
        meta.sidecar["cfa"] = "RGGB";
        std::vector<std::uint32_t> mosaic(8 * 8);
        for (auto& v : mosaic) v = static_cast<std::uint32_t>(rng.uniform_index(1001));
        const LinearRawImage base = pack_bayer_rggb(mosaic, 8, 8, meta);
        mosaic[7 * 8 + 7] = (mosaic[7 * 8 + 7] + 500) % 1001;  // distant cell
        const LinearRawImage poked = pack_bayer_rggb(mosaic, 8, 8, meta);
        bool ok = true;
        for (int c = 0; c < 3; ++c)
            if (base.at(c, 0, 0) != poked.at(c, 0, 0)) ok = false;
        if (base.at(2, 3, 3) == poked.at(2, 3, 3)) ok = false;  // poked cell did change
        out.push_back(check("bayer-locality", ok, "output depends only on its 2x2 cell"));
    }
    return out;
}

std::vector<CheckResult> suite_curve() {
    std::vector<CheckResult> out;
    SeededRng rng(2);

    {  // partition of unity
        double worst = 0.0;
        for (int n = 1; n <= 16; ++n)
            for (int i = 0; i <= 1023; ++i) {
                const double t = static_cast<double>(i) / 1023.0;
                const auto w = bernstein_weights(n, t);
                double sum = 0.0;
                for (double v : w) {
                    if (v < 0.0) worst = std::max(worst, -v);
                    sum += v;
                }
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        out.push_back(check("bernstein-partition-of-unity", worst < 1e-12,
                            "max deviation " + fmt(worst)));
    }
    {  // endpoint pinning
        bool ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 2 + static_cast<int>(rng.uniform_index(15));
            std::array<std::vector<double>, 3> res;
            for (auto& ch : res) {
                ch.resize(static_cast<std::size_t>(n - 1));
                for (double& d : ch) d = rng.uniform(-3.0, 3.0);
            }
            const CurveParams params = CurveParams::from_residuals(n, res);
            for (int c = 0; c < 3; ++c)
                if (eval_curve(params, c, 0.0) != 0.0 || eval_curve(params, c, 1.0) != 1.0)
                    ok = false;
        }
        out.push_back(check("endpoint-pinning", ok, "g(0) = 0 and g(1) = 1 exactly"));
    }
    {  // boundedness within [min p, max p]
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const int n = 2 + static_cast<int>(rng.uniform_index(15));
            std::array<std::vector<double>, 3> res;
            for (auto& ch : res) {
                ch.resize(static_cast<std::size_t>(n - 1));
                for (double& d : ch) d = rng.uniform(-3.0, 3.0);
            }
            const CurveParams params = CurveParams::from_residuals(n, res);
            for (int c = 0; c < 3; ++c) {
                const auto pts = params.control_points(c);
                const double lo = *std::min_element(pts.begin(), pts.end());
                const double hi = *std::max_element(pts.begin(), pts.end());
                for (int i = 0; i <= 256; ++i) {
                    const double v = eval_curve(params, c, i / 256.0);
                    if (v < lo - 1e-12 || v > hi + 1e-12) ok = false;
                }
            }
        }
        out.push_back(check("eval-bounded-by-controls", ok, "outputs within control hull"));
    }
    out.push_back(acc_monotonicity());
    out.push_back(acc_gradient_fidelity());
    {  // zero residuals: exact identity map
        const CurveParams id = CurveParams::identity(8);
        const LinearRawImage img = random_image(rng, 16, 16);
        const LinearRawImage mapped = apply_curve(id, img);
        out.push_back(check("identity-curve-exact", planes_bit_equal(img, mapped),
                            "delta = 0 reproduces input bits"));
    }
    return out;
}

std::vector<CheckResult> suite_grid() {
    std::vector<CheckResult> out;
    SeededRng rng(3);

    {  // identity at init
        const GridCoeffs grid = GridCoeffs::zeros(8, 4, 4);
        const LinearRawImage img = random_image(rng, 32, 32);
        const std::vector<float> lum = luminance_map(img);
        const LinearRawImage mapped = apply_grid(grid, img, lum);
        out.push_back(check("grid-identity-at-init", planes_bit_equal(img, mapped),
                            "zero coefficients give identity"));
    }
    {  // gain-mixing decoupling at the post-activation level
        bool ok = true;
        for (int trial = 0; trial < 100 && ok; ++trial) {
            std::array<double, 3> d;
            std::array<double, 6> a;
            std::array<double, 3> c;
            for (double& v : d) v = rng.uniform(0.4, 2.7);
            for (double& v : a) v = rng.uniform(-0.05, 0.05);
            for (double& v : c) v = rng.uniform(0.25, 4.0);
            const Mat3 base = compose_matrix(d, a);
            const Mat3 scaled = compose_matrix({c[0] * d[0], c[1] * d[1], c[2] * d[2]}, a);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double want = c[static_cast<std::size_t>(i)] * base[i * 3 + j];
                    if (std::abs(scaled[i * 3 + j] - want) > 1e-12 * std::abs(want) + 1e-300)
                        ok = false;
                }
        }
        out.push_back(check("gain-mixing-decoupling", ok,
                            "scaling d multiplies rows; mixing slots untouched"));
    }
    {  // slicing weights: non-negative, sum to one
        double worst = 0.0;
        const MaterializedGrid mg = [&] {
            GridCoeffs g = GridCoeffs::zeros(5, 3, 4);
            return materialize(g);
        }();
        // with identity cells, the sliced diagonal equals the weight sum
        for (int trial = 0; trial < 2000; ++trial) {
            const double x = rng.uniform(0.0, 63.999);
            const double y = rng.uniform(0.0, 47.999);
            const double l = rng.uniform01();
            const Mat3 m = slice(mg, x, y, l, 64, 48);
            worst = std::max(worst, std::abs(m[0] - 1.0));
            worst = std::max(worst, std::abs(m[4] - 1.0));
            worst = std::max(worst, std::abs(m[8] - 1.0));
        }
        out.push_back(check("slice-weights-sum-one", worst < 1e-12,
                            "max |sum - 1| = " + fmt(worst)));
    }
    {  // slicing reproduces affine coefficient fields at interior points
        GridCoeffs grid = GridCoeffs::zeros(4, 5, 6);
        // affine raw field would not survive the activations; build an
        // affine materialized field directly instead
        MaterializedGrid mg;
        mg.depth = 4;
        mg.height = 5;
        mg.width = 6;
        mg.mats.resize(grid.cell_count() * 9);
        const double a0 = 0.3, ad = 0.11, ah = -0.07, aw = 0.05;
        for (int d = 0; d < 4; ++d)
            for (int y = 0; y < 5; ++y)
                for (int x = 0; x < 6; ++x)
                    for (int i = 0; i < 9; ++i)
                        mg.mats[mg.cell_index(d, y, x) * 9 + static_cast<std::size_t>(i)] =
                            a0 + ad * d + ah * y + aw * x + 0.01 * i;
        double worst = 0.0;
        const int w = 6 * 10, h = 5 * 10;
        for (int trial = 0; trial < 500; ++trial) {
            const double px = rng.uniform(0.0, w - 1.0);
            const double py = rng.uniform(0.0, h - 1.0);
            const double l = rng.uniform(0.05, 0.95);
            const double cd = l * 4, cy = py * 5.0 / h, cx = px * 6.0 / w;
            if (cd > 3.0 || cy > 4.0 || cx > 5.0) continue;  // stay interior
            const Mat3 m = slice(mg, px, py, l, w, h);
            for (int i = 0; i < 9; ++i) {
                const double want = a0 + ad * cd + ah * cy + aw * cx + 0.01 * i;
                worst = std::max(worst, std::abs(m[i] - want));
            }
        }
        out.push_back(check("slice-affine-exact", worst < 1e-6,
                            "max affine reconstruction error " + fmt(worst)));
    }
    {  // luminance sensitivity along the depth axis
        GridCoeffs grid = GridCoeffs::zeros(4, 2, 2);
        for (int d = 0; d < 4; ++d)
            for (int y = 0; y < 2; ++y)
                for (int x = 0; x < 2; ++x) grid.cell(d, y, x)[0] = static_cast<float>(d);
        const MaterializedGrid mg = materialize(grid);
        const Mat3 lo = slice(mg, 5, 5, 0.1, 32, 32);
        const Mat3 hi = slice(mg, 5, 5, 0.9, 32, 32);
        out.push_back(check("luminance-sensitivity", lo[0] != hi[0],
                            "same pixel, different luminance samples different matrices"));
    }
    out.push_back(acc_dia_soundness());
    out.push_back(acc_slicing_oracle());
    return out;
}

std::vector<CheckResult> suite_quantiles() {
    std::vector<CheckResult> out;
    SeededRng rng(4);
    out.push_back(acc_quantile_contracts());
    {  // constant shift moves every hard quantile by the shift
        std::vector<double> samples(300);
        for (double& v : samples) v = rng.uniform01();
        const auto q0 = hard_quantile_row(samples, 32);
        std::vector<double> shifted(samples);
        for (double& v : shifted) v += 0.25;
        const auto q1 = hard_quantile_row(shifted, 32);
        double worst = 0.0;
        for (std::size_t r = 0; r < q0.size(); ++r)
            worst = std::max(worst, std::abs(q1[r] - q0[r] - 0.25));
        out.push_back(check("shift-encodes-offset", worst < 1e-12,
                            "spacings invariant to constant shift, dev " + fmt(worst)));
    }
    {  // soft -> hard deviation non-increasing over tau = 1e-1, 1e-2, 1e-3
        const int n = 1025;
        std::vector<double> ramp(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double u = static_cast<double>(i) / (n - 1);
            ramp[static_cast<std::size_t>(i)] = (std::sin((u - 0.5) * M_PI) + 1.0) / 2.0;
        }
        const auto hard = hard_quantile_row(ramp, 64);
        double prev = 1e9;
        bool ok = true;
        std::string devs;
        for (double tau : {1e-1, 1e-2, 1e-3}) {
            const auto soft = soft_quantile_row(ramp, 64, tau);
            double dev = 0.0;
            for (std::size_t r = 0; r < hard.size(); ++r)
                dev = std::max(dev, std::abs(hard[r] - soft[r]));
            if (dev > prev) ok = false;
            prev = dev;
            devs += (devs.empty() ? "" : ", ") + fmt(dev);
        }
        out.push_back(check("soft-hard-tau-monotone", ok, "deviations: " + devs));
    }
    {  // soft row monotonicity on distinct samples at tau <= 1e-3
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            std::vector<double> samples(257);
            for (double& v : samples) v = rng.uniform01();
            std::sort(samples.begin(), samples.end());
            const auto soft = soft_quantile_row(samples, 64, 1e-3);
            for (std::size_t r = 0; r + 1 < soft.size(); ++r)
                if (soft[r] > soft[r + 1] + 1e-6) ok = false;
        }
        out.push_back(check("soft-row-monotone", ok, "within 1e-6 at tau = 1e-3"));
    }
    return out;
}

std::vector<CheckResult> suite_adapter() {
    std::vector<CheckResult> out;
    SeededRng rng(5);
    out.push_back(acc_identity_at_init());

    {  // order sensitivity: luminance from the unmapped input is load-bearing
        GridCoeffs grid = GridCoeffs::zeros(4, 2, 2);
        for (int d = 0; d < 4; ++d)
            for (int y = 0; y < 2; ++y)
                for (int x = 0; x < 2; ++x)
                    grid.cell(d, y, x)[0] = static_cast<float>(d) - 1.5f;  // varies along depth
        std::array<std::vector<double>, 3> res;
        for (auto& ch : res) ch.assign(7, 1.0);  // strongly non-identity curve
        AdapterParams params{CurveParams::from_residuals(8, res), grid};

        const LinearRawImage img = random_image(rng, 16, 16);
        const LinearRawImage correct = apply_adapter(img, params);
        // wrong order: luminance from the curve-mapped image
        const LinearRawImage mapped = apply_curve(params.curve, img);
        const LinearRawImage wrong = apply_grid(params.grid, mapped, luminance_map(mapped));
        out.push_back(check("luminance-order-sensitivity", !planes_bit_equal(correct, wrong),
                            "swapping the luminance source changes the output"));
    }
    {  // pointwise locality under a spatially constant grid
        GridCoeffs grid = GridCoeffs::zeros(3, 1, 1);
        for (int d = 0; d < 3; ++d)
            for (int i = 0; i < 9; ++i) grid.cell(d, 0, 0)[i] = 0.2f * static_cast<float>(d - 1);
        std::array<std::vector<double>, 3> res;
        for (auto& ch : res) ch.assign(7, 0.3);
        AdapterParams params{CurveParams::from_residuals(8, res), grid};

        LinearRawImage img = random_image(rng, 8, 8);
        const LinearRawImage base = apply_adapter(img, params);
        img.at(0, 7, 7) = img.at(0, 7, 7) > 0.5f ? 0.1f : 0.9f;
        const LinearRawImage poked = apply_adapter(img, params);
        bool ok = true;
        for (int c = 0; c < 3; ++c)
            if (base.at(c, 0, 0) != poked.at(c, 0, 0)) ok = false;
        out.push_back(check("pointwise-locality", ok,
                            "distant perturbation does not leak (constant grid)"));
    }
    {  // outputs always within [0, 1]
        bool ok = true;
        for (int trial = 0; trial < 10 && ok; ++trial) {
            AdapterParams params;
            std::array<std::vector<double>, 3> res;
            for (auto& ch : res) {
                ch.resize(7);
                for (double& d : ch) d = rng.uniform(-3.0, 3.0);
            }
            params.curve = CurveParams::from_residuals(8, res);
            params.grid = random_grid(rng, 4, 3, 3, 4.0);
            const LinearRawImage img = random_image(rng, 12, 12);
            const LinearRawImage mapped = apply_adapter(img, params);
            for (float v : mapped.data())
                if (!(v >= 0.0f && v <= 1.0f)) ok = false;
        }
        out.push_back(check("output-bounds", ok, "all outputs in [0, 1]"));
    }
    return out;
}

std::vector<CheckResult> suite_spectral(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    const SpectralTables tables = load_spectral_tables(resolve_data_dir(opt.data_dir));

    {  // PCA reconstruction error is monotone in rank
        const PcaModel pca = fit_pca(tables.cameras);
        bool ok = true;
        for (const auto& cam : tables.cameras) {
            for (int c = 0; c < 3; ++c) {
                const auto& ch = pca.channels[c];
                Eigen::Matrix<double, kSpectrumSize, 1> x;
                for (int l = 0; l < kSpectrumSize; ++l) x(l) = cam.channels[c][l];
                const Eigen::Matrix<double, kSpectrumSize, 1> std_x =
                    (x - ch.mean).cwiseQuotient(ch.scale);
                const Eigen::Vector2d z = ch.components.transpose() * std_x;
                const double r1 = (std_x - ch.components.col(0) * z(0)).norm();
                const double r2 = (std_x - ch.components * z).norm();
                if (r2 > r1 + 1e-12) ok = false;
            }
        }
        out.push_back(check("pca-rank-monotone", ok, "two components never fit worse than one"));
    }
    {  // Planck positivity over the sampled temperature range
        bool ok = true;
        for (double t = 2000.0; t <= 25000.0; t += 500.0) {
            const Spectrum spd = planck_spd(t);
            for (double v : spd)
                if (!(v > 0.0) || !std::isfinite(v)) ok = false;
        }
        out.push_back(check("planck-positive-finite", ok, "T in [2000, 25000] K"));
    }
    {  // response linearity in the sensitivity (pre-normalization)
        SeededRng rng(6);
        CameraSensitivity s1, s2;
        for (int c = 0; c < 3; ++c)
            for (int l = 0; l < kSpectrumSize; ++l) {
                s1.channels[c][l] = rng.uniform01();
                s2.channels[c][l] = rng.uniform01();
            }
        const double a = 0.7, b = 1.9;
        CameraSensitivity mix;
        for (int c = 0; c < 3; ++c)
            for (int l = 0; l < kSpectrumSize; ++l)
                mix.channels[c][l] = a * s1.channels[c][l] + b * s2.channels[c][l];

        auto raw_response = [&](const CameraSensitivity& s) {
            Eigen::Matrix<double, 24, 3> p;
            for (int patch = 0; patch < 24; ++patch)
                for (int c = 0; c < 3; ++c) {
                    double acc = 0.0;
                    for (int l = 0; l < kSpectrumSize; ++l)
                        acc += tables.reflectance(l, patch) * tables.d65[l] * s.channels[c][l];
                    p(patch, c) = acc * kLambdaStepNm;
                }
            return p;
        };
        const double dev =
            (raw_response(mix) - (a * raw_response(s1) + b * raw_response(s2))).cwiseAbs().maxCoeff();
        out.push_back(check("response-linearity", dev < 1e-10, "max deviation " + fmt(dev)));
    }
    {  // fit residual never above the identity matrix's residual
        SeededRng rng(7);
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            PatchResponse pa, pb;
            for (int p = 0; p < 24; ++p)
                for (int c = 0; c < 3; ++c) {
                    pa.p(p, c) = rng.uniform(0.05, 1.5);
                    pb.p(p, c) = rng.uniform(0.05, 1.5);
                }
            const CcmFit fit = fit_ccm(pa, pb);
            const double id_resid = (pa.p - pb.p).norm();
            if (fit.residual > id_resid + 1e-9) ok = false;
        }
        out.push_back(check("ccm-optimality", ok, "residual <= identity-matrix residual"));
    }
    {  // sampled coefficients stay inside the observed box
        const PcaModel pca = fit_pca(tables.cameras);
        SeededRng rng(8);
        bool ok = true;
        for (int trial = 0; trial < 10000 && ok; ++trial) {
            for (int c = 0; c < 3; ++c) {
                const auto& ch = pca.channels[c];
                for (int j = 0; j < 2; ++j) {
                    const double z =
                        std::clamp(rng.normal(ch.coeff_mean(j), ch.coeff_std(j)), ch.coeff_min(j),
                                   ch.coeff_max(j));
                    if (z < ch.coeff_min(j) || z > ch.coeff_max(j)) ok = false;
                }
            }
        }
        // and the full sampled curve honors the sensitivity invariants
        for (int trial = 0; trial < 100 && ok; ++trial) {
            const CameraSensitivity cam = sample_sensitivity(pca, rng);
            for (int c = 0; c < 3; ++c) {
                double peak = 0.0;
                for (double v : cam.channels[c]) {
                    if (v < 0.0) ok = false;
                    peak = std::max(peak, v);
                }
                if (std::abs(peak - 1.0) > 1e-6) ok = false;
            }
        }
        out.push_back(check("sampled-coeffs-in-hull", ok,
                            "draws clipped to the per-axis camera extrema"));
    }
    out.push_back(acc_planck_spectral(opt));
    out.push_back(acc_ccm_identity(opt));
    return out;
}

std::vector<CheckResult> suite_sim(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    const SpectralTables tables = load_spectral_tables(resolve_data_dir(opt.data_dir));
    const PcaModel pca = fit_pca(tables.cameras);
    const CameraSensitivity mean = mean_sensitivity(tables.cameras);
    const PatchResponse pa = colorchecker_response(mean, tables.d65, tables.reflectance);
    SimConfig config;

    auto sampled_params = [&](std::uint64_t seed) {
        SeededRng rng(seed);
        return sample_params(config, pca, pa, tables.reflectance, rng);
    };

    {  // pointwise purity with pinned gains
        const SimParams params = sampled_params(11);
        SimStageToggles toggles;
        toggles.wb_source = false;  // pins the only content-dependent gains
        SeededRng rng(12);
        LinearRawImage img = random_image(rng, 8, 8);
        const SimResult base = apply_sim(img, params, toggles);
        img.at(1, 7, 7) = img.at(1, 7, 7) > 0.5f ? 0.05f : 0.95f;
        const SimResult poked = apply_sim(img, params, toggles);
        bool ok = true;
        for (int c = 0; c < 3; ++c)
            if (base.image.at(c, 0, 0) != poked.image.at(c, 0, 0)) ok = false;
        out.push_back(check("pointwise-purity", ok,
                            "distant pixel perturbation does not leak (gains pinned)"));
    }
    {  // output bounds
        SeededRng rng(13);
        bool ok = true;
        for (int trial = 0; trial < 5 && ok; ++trial) {
            const SimParams params = sampled_params(100 + static_cast<std::uint64_t>(trial));
            const LinearRawImage img = random_image(rng, 12, 12);
            const SimResult r = apply_sim(img, params, SimStageToggles{});
            for (float v : r.image.data())
                if (!(v >= 0.0f && v <= 1.0f)) ok = false;
        }
        out.push_back(check("sim-output-bounds", ok, "final values in [0, 1]"));
    }
    {  // exposure monotonicity with all else pinned (beta = 0: a positive
       // offset plus a negative matrix response can legally shrink under
       // larger alpha)
        SimParams params = sampled_params(21);
        params.black_offset = {0.0, 0.0, 0.0};
        SeededRng rng(14);
        const LinearRawImage img = random_image(rng, 8, 8);
        SimParams lo = params, hi = params;
        lo.alpha = 0.8;
        hi.alpha = 1.7;
        const SimResult a = apply_sim(img, lo, SimStageToggles{});
        const SimResult b = apply_sim(img, hi, SimStageToggles{});
        bool ok = true;
        for (std::size_t i = 0; i < a.image.data().size(); ++i)
            if (b.image.data()[i] < a.image.data()[i]) ok = false;
        out.push_back(check("exposure-monotone", ok, "larger alpha never darkens a pixel"));
    }
    {  // determinism of the full param + apply path
        SeededRng rng(15);
        const LinearRawImage img = random_image(rng, 10, 10);
        auto run = [&](std::uint64_t seed) {
            SeededRng r(seed);
            const SimParams p = sample_params(config, pca, pa, tables.reflectance, r);
            return apply_sim(img, p, config.toggles, seed, pca_model_hash(pca));
        };
        const SimResult a = run(77);
        const SimResult b = run(77);
        out.push_back(check("sim-determinism",
                            planes_bit_equal(a.image, b.image) && a.provenance == b.provenance,
                            "identical seed gives identical image and provenance"));
    }
    {  // disabling a stage equals the identity for that stage
        const SimParams params = sampled_params(31);
        SeededRng rng(16);
        const LinearRawImage img = random_image(rng, 8, 8);
        SimStageToggles none;
        none.wb_source = none.color_matrix = none.wb_target = false;
        none.clip_negative = none.rolloff = none.quantize = false;
        const SimResult empty = apply_sim(img, params, none);
        bool ok = planes_bit_equal(empty.image, img);

        // single-stage runs match hand-computed per-pixel maps
        SimStageToggles only_rolloff = none;
        only_rolloff.rolloff = true;
        const SimResult r = apply_sim(img, params, only_rolloff);
        for (std::size_t i = 0; i < img.pixel_count() && ok; ++i)
            for (int c = 0; c < 3; ++c) {
                const double want = rolloff(img.plane(c)[i], params.s_sat);
                if (std::abs(want - r.image.plane(c)[i]) > 1e-7) ok = false;
            }
        out.push_back(check("stage-toggles-compose", ok,
                            "disabled stages are identity; single stages match scalar ops"));
    }
    out.push_back(acc_determinism_lattice(opt));
    out.push_back(acc_tint_exposure_pins());
    out.push_back(acc_ccm_identity(opt));
    return out;
}

std::vector<CheckResult> suite_numerics() {
    std::vector<CheckResult> out;
    SeededRng rng(17);

    {  // solver sanity vs the zero and identity candidates
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            Eigen::MatrixXd a(24, 3), b(24, 3);
            for (int i = 0; i < 24; ++i)
                for (int j = 0; j < 3; ++j) {
                    a(i, j) = rng.uniform(0.05, 2.0);
                    b(i, j) = rng.uniform(0.05, 2.0);
                }
            const LsqSolution sol = solve_lsq(a, b);
            if (sol.residual_fro > b.norm() + 1e-9) ok = false;                 // X = 0
            if (sol.residual_fro > (a - b).norm() + 1e-9) ok = false;           // X = I
            const double recomputed = (a * sol.x - b).norm();
            if (std::abs(recomputed - sol.residual_fro) >
                1e-9 * std::max(1.0, sol.residual_fro))
                ok = false;
        }
        out.push_back(check("lsq-residual-sanity", ok,
                            "residual recomputes and beats trivial candidates"));
    }
    {  // finite-difference error shrinks with h for smooth functions
        auto f = [](std::span<const double> p) { return std::sin(p[0]) * std::exp(0.3 * p[0]); };
        const double x0 = 0.7;
        const double analytic = std::cos(x0) * std::exp(0.3 * x0) +
                                0.3 * std::sin(x0) * std::exp(0.3 * x0);
        double prev = 1e9;
        bool ok = true;
        for (double h : {1e-2, 1e-3, 1e-4}) {
            const double x[1] = {x0};
            const double g[1] = {analytic};
            const auto rep = finite_diff_check(f, std::span<const double>(x, 1),
                                               std::span<const double>(g, 1), h);
            if (rep.max_rel_error > prev * 1.5) ok = false;  // allows round-off floor wiggle
            prev = rep.max_rel_error;
        }
        out.push_back(check("fd-error-decreasing", ok, "central-difference order visible"));
    }
    {  // rng stream stability: golden first draws for seed 42
        SeededRng golden(42);
        // frozen from the first run of this implementation (regression
        // contract, not external truth)
        const double expect[16] = {
            0.75515553295453897,  0.63903139385469743,  0.7521452007480266,
            0.13627268363243705,  0.90326896642837828,  0.094068311762837031,
            0.57457030410826393,  0.37288769945618483,  0.27387410173717075,
            0.39027088141429356,  0.012382771132014692, 0.52370558897433983,
            0.6852712867224986,   0.63733814239871289,  0.82654975580241552,
            0.94569848660247902};
        bool ok = true;
        for (double e : expect) {
            if (golden.uniform01() != e) ok = false;
        }
        out.push_back(check("rng-golden-stream", ok, "seed 42 first 16 draws pinned"));
    }
    return out;
}

std::vector<CheckResult> suite_acceptance(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    out.push_back(acc_identity_at_init());
    out.push_back(acc_gradient_fidelity());
    out.push_back(acc_monotonicity());
    out.push_back(acc_dia_soundness());
    out.push_back(acc_slicing_oracle());
    out.push_back(acc_quantile_contracts());
    out.push_back(acc_ccm_identity(opt));
    out.push_back(acc_planck_spectral(opt));
    out.push_back(acc_determinism_lattice(opt));
    out.push_back(acc_tint_exposure_pins());
    out.push_back(acc_throughput());
    return out;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
    return {"raster", "curve", "grid", "quantiles", "adapter",
            "spectral", "sim",  "numerics", "acceptance"};
}

SuiteResult run_verify_suite(const std::string& name, const VerifyOptions& options) {
    SuiteResult result;
    result.suite = name;
    if (name == "raster")
        result.checks = suite_raster();
    else if (name == "curve")
        result.checks = suite_curve();
    else if (name == "grid")
        result.checks = suite_grid();
    else if (name == "quantiles")
        result.checks = suite_quantiles();
    else if (name == "adapter")
        result.checks = suite_adapter();
    else if (name == "spectral")
        result.checks = suite_spectral(options);
    else if (name == "sim")
        result.checks = suite_sim(options);
    else if (name == "numerics")
        result.checks = suite_numerics();
    else if (name == "acceptance")
        result.checks = suite_acceptance(options);
    else
        throw std::invalid_argument("unknown verify suite: " + name);
    return result;
}

std::vector<SuiteResult> run_all_suites(const VerifyOptions& options) {
    std::vector<SuiteResult> results;
    for (const auto& name : verify_suite_names()) results.push_back(run_verify_suite(name, options));
    return results;
}

nlohmann::json verify_report_json(const std::vector<SuiteResult>& results) {
    nlohmann::json suites = nlohmann::json::array();
    bool all = true;
    for (const auto& suite : results) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : suite.checks) {
            checks.push_back(nlohmann::json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
            all = all && c.pass;
        }
        suites.push_back(nlohmann::json{{"suite", suite.suite},
                                        {"pass", suite.all_pass()},
                                        {"checks", checks}});
    }
    return nlohmann::json{{"version", RAWTONE_VERSION}, {"pass", all}, {"suites", suites}};
}

}  // namespace rawtone
