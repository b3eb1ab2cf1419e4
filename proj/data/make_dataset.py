#!/usr/bin/env python3
"""Regenerates the spectral data tables in this directory.

Outputs (33-point wavelength grid, 400-720 nm at 10 nm steps):
  d65.csv                      CIE standard illuminant D65 relative SPD
  colorchecker_reflectance.csv 24-patch reflectance chart (synthetic, see below)
  camera_sensitivities.csv     28-camera RGB spectral sensitivity set (synthetic)

The D65 column is the CIE published 10 nm table. The chart and camera tables
are synthetic stand-ins generated from parametric models of typical patch
reflectances and CMOS RGB responses: this build environment has no access to
measured chart/camera databases, and the loaders accept any conforming CSV,
so measured data can be dropped in without code changes. Generation is
seeded and deterministic.
"""

import math
import random

WAVELENGTHS = [400 + 10 * i for i in range(33)]

# CIE D65 relative SPD, 10 nm table, normalized to 100 at 560 nm.
D65 = [
    82.7549, 91.486, 93.4318, 86.6823, 104.865, 117.008, 117.812, 114.861,
    115.923, 108.811, 109.354, 107.802, 104.790, 107.689, 104.405, 104.046,
    100.000, 96.3342, 95.788, 88.6856, 90.0062, 89.5991, 87.6987, 83.2886,
    83.6992, 80.0268, 80.2146, 82.2778, 78.2842, 69.7213, 71.6091, 74.349,
    61.604,
]


def sig(lam, center, width):
    return 1.0 / (1.0 + math.exp(-(lam - center) / width))


def gauss(lam, center, width):
    return math.exp(-0.5 * ((lam - center) / width) ** 2)


def skew_gauss(lam, center, width_left, width_right):
    w = width_left if lam < center else width_right
    return math.exp(-0.5 * ((lam - center) / w) ** 2)


# 24 patches in the classic chart order: 18 chromatic + 6 neutrals.
PATCHES = [
    ("dark_skin",      lambda l: 0.06 + 0.18 * sig(l, 585, 40)),
    ("light_skin",     lambda l: 0.24 + 0.36 * sig(l, 575, 35)),
    ("blue_sky",       lambda l: 0.08 + 0.28 * (1 - sig(l, 525, 30))),
    ("foliage",        lambda l: 0.05 + 0.16 * gauss(l, 540, 35) + 0.06 * sig(l, 680, 20)),
    ("blue_flower",    lambda l: 0.10 + 0.32 * (1 - sig(l, 545, 40)) + 0.18 * sig(l, 645, 30)),
    ("bluish_green",   lambda l: 0.10 + 0.40 * (1 - sig(l, 575, 35))),
    ("orange",         lambda l: 0.05 + 0.55 * sig(l, 585, 18)),
    ("purplish_blue",  lambda l: 0.06 + 0.34 * (1 - sig(l, 500, 25)) + 0.10 * sig(l, 680, 25)),
    ("moderate_red",   lambda l: 0.06 + 0.45 * sig(l, 610, 20)),
    ("purple",         lambda l: 0.05 + 0.18 * (1 - sig(l, 460, 25)) + 0.22 * sig(l, 650, 25)),
    ("yellow_green",   lambda l: 0.06 + 0.45 * sig(l, 525, 22)),
    ("orange_yellow",  lambda l: 0.06 + 0.55 * sig(l, 565, 18)),
    ("blue",           lambda l: 0.05 + 0.30 * (1 - sig(l, 480, 18))),
    ("green",          lambda l: 0.05 + 0.35 * gauss(l, 530, 30)),
    ("red",            lambda l: 0.04 + 0.55 * sig(l, 625, 15)),
    ("yellow",         lambda l: 0.06 + 0.60 * sig(l, 545, 20)),
    ("magenta",        lambda l: 0.07 + 0.35 * (1 - sig(l, 500, 25)) + 0.45 * sig(l, 600, 25)),
    ("cyan",           lambda l: 0.05 + 0.32 * (1 - sig(l, 555, 22))),
    ("white_95",       lambda l: 0.90),
    ("neutral_80",     lambda l: 0.59),
    ("neutral_65",     lambda l: 0.36),
    ("neutral_50",     lambda l: 0.19),
    ("neutral_35",     lambda l: 0.09),
    ("black_20",       lambda l: 0.031),
]


def make_camera(rng):
    # Typical CMOS channel responses: skewed main lobe plus filter leakage.
    r_mu = rng.uniform(585, 615)
    r = [
        skew_gauss(l, r_mu, rng.uniform(30, 45), rng.uniform(22, 38))
        for l in WAVELENGTHS
    ]
    r2_amp, r2_mu, r2_w = rng.uniform(0.0, 0.12), rng.uniform(440, 470), rng.uniform(14, 24)
    r = [v + r2_amp * gauss(l, r2_mu, r2_w) for v, l in zip(r, WAVELENGTHS)]

    g_mu = rng.uniform(515, 545)
    g = [
        skew_gauss(l, g_mu, rng.uniform(35, 55), rng.uniform(30, 45))
        for l in WAVELENGTHS
    ]

    b_mu = rng.uniform(440, 485)
    b = [
        skew_gauss(l, b_mu, rng.uniform(18, 32), rng.uniform(24, 46))
        for l in WAVELENGTHS
    ]
    b2_amp, b2_mu = rng.uniform(0.0, 0.15), rng.uniform(515, 545)
    b = [v + b2_amp * gauss(l, b2_mu, rng.uniform(16, 26)) for v, l in zip(b, WAVELENGTHS)]

    leak = rng.uniform(0.002, 0.01)
    channels = []
    for ch in (r, g, b):
        ch = [max(v + leak, 0.0) for v in ch]
        peak = max(ch)
        channels.append([v / peak for v in ch])
    return channels


def main():
    with open("d65.csv", "w") as f:
        f.write("wavelength,power\n")
        for l, p in zip(WAVELENGTHS, D65):
            f.write(f"{l},{p}\n")

    with open("colorchecker_reflectance.csv", "w") as f:
        f.write("wavelength," + ",".join(name for name, _ in PATCHES) + "\n")
        for l in WAVELENGTHS:
            row = [f"{min(max(fn(l), 0.02), 0.95):.6f}" for _, fn in PATCHES]
            f.write(f"{l}," + ",".join(row) + "\n")

    rng = random.Random(20210414)
    cams = [make_camera(rng) for _ in range(28)]
    with open("camera_sensitivities.csv", "w") as f:
        for i, (r, g, b) in enumerate(cams):
            f.write(f"# camera: synthcam_{i + 1:02d}\n")
            f.write("wavelength,R,G,B\n")
            for j, l in enumerate(WAVELENGTHS):
                f.write(f"{l},{r[j]:.6f},{g[j]:.6f},{b[j]:.6f}\n")

    # sanity: blue peak of the channel-wise mean curve
    mean_b = [sum(c[2][j] for c in cams) / len(cams) for j in range(33)]
    print(f"mean-sensitivity blue peak: {max(mean_b):.4f}")


if __name__ == "__main__":
    main()
