import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from ratelab import kernels
from ratelab.extremal import ExtremalId, build_extremal
from ratelab.field import GridSpec, SampledField, lp_norm, sample, zeros
from ratelab.omega import UsageError
from ratelab.spectral import (
    SharpCutoffWarning,
    SpectralField,
    band_leak,
    convolve,
    dyadic_blocks,
    forward_transform,
    fourier_block,
    fourier_error,
    fourier_partial_sum,
    inverse_transform,
    q_block,
    sharp_by_convolution,
    sharp_sum,
    sigma,
    sigma_by_convolution,
    vallee_error,
    vallee_partial_sum,
    young_check,
)

G = GridSpec.dyadic(1, 64, 5)


def rel(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).max() / max(np.abs(np.asarray(b)).max(), 1e-300))


def trig_field(grid, coeffs, radius):
    # random real trigonometric polynomial with frequencies on the lattice up to radius
    ks = np.arange(1, len(coeffs) + 1) * (radius / len(coeffs))
    return sample(lambda x: sum(c * np.cos(k * x + c) for c, k in zip(coeffs, ks)), grid)


def test_gaussian_pair():
    g = GridSpec(1, 30.0, 1201)
    F = forward_transform(sample(lambda x: np.exp(-x * x / 2), g))
    lam = F.frequencies
    assert np.abs(F.values - np.exp(-lam * lam / 2)).max() < 1e-6


def test_zero_transforms():
    z = zeros(G)
    assert np.all(forward_transform(z).values == 0)
    assert np.all(inverse_transform(SpectralField(G, np.zeros(G.shape, complex))).values == 0)


def test_narrow_gaussian_through_trapezoid():
    # sigma_1 of a unit-mass narrow bump is (2/pi)^{1/2} (2 pi)^{-1/2} V_1
    g = GridSpec.dyadic(1, 64, 6)
    eps = 0.02
    bump = sample(lambda x: np.exp(-x * x / (2 * eps * eps)) / (eps * math.sqrt(2 * math.pi)), g)
    out = sigma(bump, 0).values
    target = math.sqrt(2 / math.pi) / math.sqrt(2 * math.pi) * kernels.vallee_1d(0, g.axis(), g.period)
    assert rel(out, target) < 1e-3


def test_convolve_approximate_identity_and_zero():
    g = GridSpec(1, 20.0, 2001)
    eps = 0.01
    bump = sample(lambda x: np.exp(-x * x / (2 * eps * eps)), g)
    mass = lp_norm(bump, 1)
    f = sample(lambda x: np.exp(-x * x / 4), g)
    c = convolve(bump, f)
    assert rel(c.values, f.values * mass / math.sqrt(2 * math.pi)) < 1e-3
    assert np.all(convolve(f, zeros(g)).values == 0)
    with pytest.raises(UsageError):
        convolve(f, zeros(GridSpec(1, 10.0, 2001)))


def test_convolve_matches_direct_sum():
    g = GridSpec(1, 6.0, 61, periodic=True)
    rng = np.random.default_rng(0)
    a = rng.normal(size=61) + 1j * rng.normal(size=61)
    b = rng.normal(size=61)
    N, h = g.N, g.h
    # index shift: node i is x_i = (i - M) h, so (x_i - x_j) sits at index i - j + M
    M = g.M
    direct = np.array([sum(a[(i - j + M) % N] * b[j] for j in range(N)) for i in range(N)])
    direct *= h / math.sqrt(2 * math.pi)
    out = convolve(SampledField(g, a), SampledField(g, b)).values
    assert rel(out, direct) < 1e-12


def test_young_example():
    g = GridSpec.dyadic(1, 8, 5)
    v = kernels.sample_kernel(kernels.KernelId("vallee", 1), g)
    d2 = kernels.sample_kernel(kernels.KernelId("dirichlet", 2), g)
    r = young_check(v, d2, 2)
    assert r["passed"] and r["slack"] > 0


def test_sigma_examples():
    v = kernels.sample_kernel(kernels.KernelId("vallee", 1), G)  # spectrum inside |lam| <= 4
    assert rel(sigma(v, 2).values, v.values) < 1e-8
    high = sample(lambda x: np.cos(40 * x), G)
    assert np.abs(sigma(high, 3).values).max() < 1e-12
    assert np.all(sigma(zeros(G), 2).values == 0)
    with pytest.raises(UsageError):
        sigma(v, 7)


def test_sigma_convolution_cross_check():
    for s in range(6):
        f = kernels.sample_kernel(kernels.KernelId("fn-block", 2), G)
        diff = np.abs(sigma_by_convolution(f, s).values - sigma(f, s).values).max()
        assert diff < 1e-6 * f.max_abs()


def test_q_block_examples():
    n = 2
    f = build_extremal(ExtremalId("f-next", n), G)
    ref = lp_norm(f, math.inf)
    for s in range(6):
        qs = lp_norm(q_block(f, s), math.inf)
        if s not in (n, n + 1, n + 2):
            assert qs < 1e-8 * ref
    low = kernels.sample_kernel(kernels.KernelId("vallee", 0), G)  # inside 2^{s-1} for s = 2
    assert lp_norm(q_block(low, 3), math.inf) < 1e-12
    f = trig_field(G, [0.3, -1.0, 0.5], 30.0)
    total = sum((q_block(f, s) for s in range(1, 6)), q_block(f, 0))
    assert rel(total.values, sigma(f, 5).values) < 1e-12


def test_partial_sum_examples():
    f = trig_field(G, [1.0, 0.2, -0.7, 0.1], 50.0)
    assert rel(vallee_partial_sum(f, 0).values, sigma(f, 0).values) < 1e-14
    for n in range(6):
        assert rel(vallee_partial_sum(f, n).values, sigma(f, n).values) < 1e-10


def test_vallee_error_examples():
    v = kernels.sample_kernel(kernels.KernelId("vallee", 1), G)
    assert vallee_error(v, 3, math.inf) < 1e-8 * lp_norm(v, math.inf)
    prev = None
    for n in range(2, 6):
        f1 = build_extremal(ExtremalId("f-next", n), G)
        assert vallee_error(f1, n, math.inf) == pytest.approx(lp_norm(f1, math.inf), rel=1e-12)
    f1 = build_extremal(ExtremalId("f-next", 2), G)
    for n in range(1, 6):
        e = vallee_error(f1, n, 2)
        if prev is not None:
            assert e <= prev * (1 + 1e-6)
        prev = e


def test_sharp_examples():
    f = trig_field(G, [1.0, 0.5], 8.0)
    assert fourier_error(f, 3, 2) < 1e-8 * lp_norm(f, 2)
    g = trig_field(G, [1.0, 0.5, 0.25, 2.0], 60.0)
    for s in range(1, 7):
        blk = fourier_block(g, s)
        if lp_norm(blk, 2) > 1e-12:
            lam = np.abs(G.frequencies())
            F = np.abs(forward_transform(blk).values) ** 2
            outside = F[(lam <= 2.0 ** (s - 1) * (1 + 1e-12)) | (lam > 2.0**s * (1 + 1e-12))].sum()
            assert outside < 1e-20 * F.sum()
    for n in range(2, 6):
        F2 = build_extremal(ExtremalId("Fn-dirichlet", n), G)
        assert lp_norm(fourier_partial_sum(F2, n - 1), math.inf) < 1e-8 * lp_norm(F2, math.inf)
        band = forward_transform(F2)
        lam = np.abs(band.frequencies)
        mass = np.abs(band.values) ** 2
        inside = (lam >= 2.0**n - 1e-12) & (lam <= 2.0 ** (n + 1) + 1e-12)
        assert mass[~inside].sum() < 1e-20 * mass.sum()


def test_sharp_warns_on_endpoints():
    f = trig_field(G, [1.0], 4.0)
    with pytest.warns(SharpCutoffWarning):
        fourier_error(f, 2, math.inf)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fourier_error(f, 2, 2)


def test_sharp_convolution_cross_check():
    f = trig_field(G, [1.0, -0.4, 0.3], 30.0)
    for s in range(5):
        diff = np.abs(sharp_by_convolution(f, s).values - sharp_sum(f, s).values).max()
        assert diff < 1e-8 * f.max_abs()


def test_dyadic_block_localization():
    f = sample(lambda x: np.exp(-x * x / 8) * np.cos(3 * x), G)
    ref = lp_norm(f, 2) ** 2
    for flavor in ("vallee-q", "fourier-f"):
        b = dyadic_blocks(f, 5, flavor)
        assert b.leaks(reference=ref).max() < 1e-8
        assert rel(b.total().values, (sigma(f, 5) if flavor == "vallee-q" else sharp_sum(f, 5)).values) < 1e-12
    leaks = dyadic_blocks(f, 4).leaks()
    assert leaks[:-1].max() < 1e-8


def test_block_csv(tmp_path):
    f = trig_field(G, [1.0, 0.5], 20.0)
    dyadic_blocks(f, 4).write_csv(tmp_path / "b.csv", 2)
    lines = (tmp_path / "b.csv").read_text().splitlines()
    assert lines[0] == "s,norm,band_energy_leak" and len(lines) == 6


def test_tensor_ops_match_full():
    g = GridSpec.dyadic(2, 16, 3)
    f = kernels.sample_kernel(kernels.KernelId("fn-block", 2, 2), g)
    full = SampledField(g, f.values)
    for s in range(3):
        assert rel(sigma(f, s).values, sigma(full, s).values) < 1e-12
        assert band_leak(f, 0, 8.0) == pytest.approx(band_leak(full, 0, 8.0), abs=1e-14)


@given(hnp.arrays(np.float64, G.N, elements=st.floats(-1, 1)))
def test_round_trip_and_plancherel(arr):
    f = SampledField(G, arr.astype(complex))
    F = forward_transform(f)
    back = inverse_transform(F)
    assert np.abs(back.values - f.values).max() <= 1e-10 * max(1.0, np.abs(arr).max())
    assert F.l2_norm() == pytest.approx(lp_norm(f, 2), rel=1e-8, abs=1e-300)


@given(
    a=st.floats(-3, 3), b=st.floats(-3, 3), s=st.integers(0, 5),
    c1=st.lists(st.floats(-1, 1), min_size=1, max_size=5),
    c2=st.lists(st.floats(-1, 1), min_size=1, max_size=5),
)
def test_sigma_linear(a, b, s, c1, c2):
    f = trig_field(G, c1, 40.0)
    g = trig_field(G, c2, 20.0)
    lhs = sigma(a * f + b * g, s).values
    rhs = a * sigma(f, s).values + b * sigma(g, s).values
    scale = max(1.0, np.abs(rhs).max())
    assert np.abs(lhs - rhs).max() < 1e-10 * scale
