import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ratelab import kernels
from ratelab.besov import (
    BesovParams,
    PreconditionError,
    besov_decomposition_breakdown,
    besov_integral_breakdown,
    besov_norm_decomposition,
    besov_norm_integral,
    difference_by_binomial,
    difference_window,
    direction_set,
    modulus_of_continuity,
    multi_difference,
    nikolskii_check,
    sequence_norm,
)
from ratelab.extremal import ExtremalId, build_extremal
from ratelab.field import GridSpec, lp_norm, sample, zeros
from ratelab.omega import DomainError, ModulusSpec, UsageError

OM = ModulusSpec("power", 1.5, l=2, alpha=1.0, gamma=0.25)
PARAMS = BesovParams(2.0, 1.0, OM)
G = GridSpec.dyadic(1, 64, 4)


def test_params_validation():
    with pytest.raises(DomainError):
        BesovParams(0.5, 1.0, OM)
    with pytest.raises(UsageError):
        BesovParams(2.0, 1.0, ModulusSpec("power", 1.0, l=2, alpha=1.5))
    assert BesovParams(2.0, math.inf, OM).l == 2


def test_difference_examples():
    g = GridSpec(1, 10.0, 201)
    h = 0.3
    window = difference_window(g, h, 3)
    quad = sample(lambda x: x * x, g)
    d2 = multi_difference(quad, h, 2)
    w2 = difference_window(g, h, 2)
    assert np.allclose(d2.values[w2], 2 * h * h, atol=1e-12)
    lin = multi_difference(sample(lambda x: x, g), h, 1)
    assert np.allclose(lin.values[difference_window(g, h, 1)], h, atol=1e-12)
    d3 = multi_difference(quad, h, 3)
    assert np.abs(d3.values[window]).max() < 1e-11


def test_difference_step_guard():
    g = GridSpec(1, 4.0, 81)
    with pytest.raises(UsageError):
        multi_difference(sample(lambda x: x, g), 1.5, 1)


@given(l=st.integers(1, 4), k=st.integers(1, 20), frac=st.booleans())
def test_recursion_matches_binomial(l, k, frac):
    f = sample(lambda x: np.exp(-x * x / 4) * np.cos(2 * x), G)
    h = k * G.h + (0.37 * G.h if frac else 0.0)
    a = multi_difference(f, h, l).values
    b = difference_by_binomial(f, h, l).values
    assert np.abs(a - b).max() < 1e-10 * 2**l


def test_modulus_sin():
    g = GridSpec.dyadic(1, 4, 3)
    f = sample(np.sin, g)
    t = math.pi / 2
    got = modulus_of_continuity(f, t, 1, math.inf)
    # dense scan oracle over steps |h| <= t and points x
    hs = np.linspace(-t, t, 801)
    xs = np.linspace(-math.pi, math.pi, 2001)
    oracle = max(np.abs(np.sin(xs + h) - np.sin(xs)).max() for h in hs)
    assert got == pytest.approx(oracle, rel=1e-2)
    assert got == pytest.approx(math.sqrt(2), rel=1e-2)


def test_modulus_constant_and_monotone():
    g = GridSpec(1, 8.0, 161)
    one = sample(lambda x: np.ones_like(x), g)
    # off-lattice radii go through the spectral shift, hence round-off only
    assert modulus_of_continuity(one, 0.5, 2, 2) < 1e-13
    f = sample(lambda x: np.exp(-x * x), g)
    ts = [0.05, 0.1, 0.2, 0.4, 0.8, 1.6]
    vals = [modulus_of_continuity(f, t, 2, 2) for t in ts]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_direction_set():
    assert direction_set(1).shape == (2, 1)
    d2 = direction_set(2)
    assert d2.shape == (2 * 2 + 4 + 16, 2)
    assert np.allclose(np.linalg.norm(d2, axis=1), 1.0)
    assert np.array_equal(direction_set(3), direction_set(3))


def test_norms_of_zero():
    z = zeros(G)
    assert besov_norm_integral(z, PARAMS) == 0.0
    assert besov_norm_decomposition(z, PARAMS) == 0.0


def test_three_block_terms_for_fnext():
    n = 2
    f = build_extremal(ExtremalId("f-next", n), G)
    bd = besov_decomposition_breakdown(f, PARAMS)
    c = np.array(bd.contribution)
    big = np.nonzero(c > 1e-12 * c.max())[0].tolist()
    assert big == [n, n + 1, n + 2]


def test_breakdowns_and_csv(tmp_path):
    f = sample(lambda x: np.exp(-x * x / 2), G)
    bi = besov_integral_breakdown(f, PARAMS)
    assert bi.index[0] == -2 and bi.directions == 2
    assert set(bi.truncation) == {"small_t", "large_t"}
    assert bi.cumulative[-1] == pytest.approx(sum(bi.contribution))
    bi.write_csv(tmp_path / "b.csv")
    rows = list(csv.reader(open(tmp_path / "b.csv")))
    assert rows[0] == ["index", "contribution", "cumulative"]
    assert len(rows) == len(bi.index) + 1


@given(c=st.floats(0.01, 100), theta=st.sampled_from([1.0, 2.0, math.inf]))
def test_homogeneity(c, theta):
    params = BesovParams(2.0, theta, OM)
    f = sample(lambda x: np.exp(-x * x / 2) * (1 + 0.3 * np.cos(5 * x)), G)
    for norm in (besov_norm_integral, besov_norm_decomposition):
        assert norm(c * f, params) == pytest.approx(c * norm(f, params), rel=1e-8)


@given(a=st.floats(-2, 2), b=st.floats(-2, 2))
def test_triangle(a, b):
    f = sample(lambda x: np.exp(-x * x / 2), G)
    g = kernels.sample_kernel(kernels.KernelId("vallee", 2), G)
    for norm in (besov_norm_integral, besov_norm_decomposition):
        lhs = norm(a * f + b * g, PARAMS)
        rhs = norm(a * f, PARAMS) + norm(b * g, PARAMS)
        assert lhs <= rhs * (1 + 1e-8) + 1e-300


@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=20))
def test_sequence_norm_monotone(seq):
    a, b, c = (sequence_norm(seq, t) for t in (1.0, 2.0, math.inf))
    assert a >= b * (1 - 1e-12) and b >= c * (1 - 1e-12)


def test_theta_monotone_on_norms():
    f = build_extremal(ExtremalId("F1", 3, p=2.0, omega=OM), G)
    vals = [besov_norm_decomposition(f, BesovParams(2.0, t, OM)) for t in (1.0, 1.5, 2.0, 4.0, math.inf)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))


def test_nikolskii_examples():
    g = GridSpec.dyadic(1, 16, 6)
    m = 4
    dm = kernels.sample_kernel(kernels.KernelId("dirichlet", m), g)
    r = nikolskii_check(dm, 2, math.inf, m)
    assert r.passed
    assert r.lhs == pytest.approx(m, rel=1e-2)
    assert r.rhs == pytest.approx(2 * math.sqrt(m) * math.sqrt(m * math.pi), rel=2e-2)
    v = kernels.sample_kernel(kernels.KernelId("vallee", 2), g)
    r = nikolskii_check(v, 1, 2, 8.0)
    assert r.passed and r.slack > 0
    r = nikolskii_check(v, 2, 2, 8.0)
    assert r.slack_factor == pytest.approx(2.0)


def test_nikolskii_precondition():
    v = kernels.sample_kernel(kernels.KernelId("vallee", 2), G)
    with pytest.raises(PreconditionError):
        nikolskii_check(v, 1, 2, 4.0)
    with pytest.raises(DomainError):
        nikolskii_check(v, 2, 1, 8.0)


def test_integral_vs_decomposition_band():
    for fam in ("F1", "F2"):
        ratios = []
        for n in range(2, 6):
            eid = ExtremalId(fam, n, p=2.0, omega=OM)
            g = GridSpec.dyadic(1, 2 * eid.spectral_radius(), 4)
            f = build_extremal(eid, g)
            flavor = "fourier-f" if eid.dirichlet else "vallee-q"
            ratios.append(besov_norm_integral(f, PARAMS) / besov_norm_decomposition(f, PARAMS, flavor))
        assert max(ratios) / min(ratios) <= 10
