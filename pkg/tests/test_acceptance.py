"""Acceptance criteria 1-9, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also printed when output is captured.
"""

import math
import shutil
import subprocess
import sys
import time

import numpy as np
import pytest

from ratelab import kernels
from ratelab.besov import (
    BesovParams,
    besov_norm_decomposition,
    besov_norm_integral,
    nikolskii_check,
    sequence_norm,
)
from ratelab.extremal import ExtremalId, build_extremal, extremal_norm_scan
from ratelab.field import GridSpec, assemble, lp_norm, sample, sample_tensor
from ratelab.harness import ExperimentConfig, run_rate_experiment
from ratelab.omega import ModulusSpec
from ratelab.spectral import (
    dyadic_blocks,
    forward_transform,
    fourier_partial_sum,
    sigma,
    vallee_partial_sum,
    young_check,
)

P_SET = (1.0, 2.0, 4.0, math.inf)
OM = ModulusSpec("power", 1.5, l=2, alpha=1.0, gamma=0.25)


@pytest.fixture
def verdict(capsys):
    def emit(number, title, passed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})")
        assert passed, f"criterion {number}: {detail}"

    return emit


def _rel(a, b):
    return float(np.abs(a - b).max() / np.abs(b).max())


def test_criterion_1_kernel_identities(verdict):
    t0 = time.perf_counter()
    g = GridSpec(1, 64 * math.pi, 2**15 + 1)
    masses = [kernels.kernel_l1_mass(s, g) for s in range(6)]
    mass_err = max(abs(m - 1) for m, _ in masses)
    ab = [a for _, a in masses]
    spec_err = 0.0
    for s in range(6):
        v = kernels.sample_kernel(kernels.KernelId("vallee", s), g, periodize=False)
        F = forward_transform(v).values.real
        spec_err = max(spec_err, float(np.abs(F - kernels.mu_1d(s, g.frequencies())).max()))
    elapsed = time.perf_counter() - t0
    ok = mass_err <= 1e-2 and spec_err <= 1e-2 and max(ab) / min(ab) <= 1.5 and elapsed < 10
    verdict(1, "kernel identities", ok,
            f"mass err {mass_err:.2e}, DFT err {spec_err:.2e}, abs-mass ratio {max(ab) / min(ab):.4f}, "
            f"{elapsed:.1f}s")


def test_criterion_2_operator_structure(verdict):
    t0 = time.perf_counter()
    g = GridSpec.dyadic(1, 64, 6)
    repro = 0.0
    for s in range(5):
        # V_{2^s} has spectrum in [-2^{s+1}, 2^{s+1}], inside the plateau of sigma_{2^{s+1}}
        v = kernels.sample_kernel(kernels.KernelId("vallee", s), g)
        repro = max(repro, _rel(sigma(v, s + 1).values, v.values))
    leak, tele = 0.0, 0.0
    for f in (sample(lambda x: np.exp(-x * x / 8) * np.cos(3 * x), g),
              sample(lambda x: 1 / (1 + x * x), g),
              sample(lambda x: np.exp(-np.abs(x)), g)):
        leak = max(leak, float(dyadic_blocks(f, 5).leaks(reference=lp_norm(f, 2) ** 2).max()))
        for n in range(5):
            tele = max(tele, _rel(vallee_partial_sum(f, n).values, sigma(f, n).values))
    elapsed = time.perf_counter() - t0
    ok = repro <= 1e-8 and leak < 1e-8 and tele <= 1e-10 and elapsed < 30
    verdict(2, "operator structure", ok,
            f"reproduction {repro:.2e}, leak {leak:.2e}, telescoping {tele:.2e}, {elapsed:.1f}s")


def test_criterion_3_lower_bound_mechanism(verdict):
    g = GridSpec.dyadic(1, 2.0**7, 5)
    worst = 0.0
    for n in range(2, 6):
        f1 = build_extremal(ExtremalId("F1", n, p=2.0, omega=OM), g)
        worst = max(worst, lp_norm(vallee_partial_sum(f1, n - 1), math.inf) / lp_norm(f1, math.inf))
        f2 = build_extremal(ExtremalId("F2", n, p=2.0, omega=OM), g)
        worst = max(worst, lp_norm(fourier_partial_sum(f2, n - 1), math.inf) / lp_norm(f2, math.inf))
    verdict(3, "V_{n-1}(F1), S_{n-1}(F2) vanish", worst <= 1e-8, f"max relative residue {worst:.2e}")


def test_criterion_4_extremal_asymptotics(verdict):
    worst, parts = 0.0, []
    for fam, ps in (("f-next", (math.inf, 1.0, 2.0, 4.0)), ("Fn-dirichlet", (2.0, math.inf))):
        for p in ps:
            for d in (1, 2):
                tb = extremal_norm_scan(fam, p=p, d=d)
                worst = max(worst, tb.stability)
                parts.append(tb.stability)
    verdict(4, "extremal norm ratios", worst <= 1.5, f"{len(parts)} scans, worst stability {worst:.4f}")


def test_criterion_5_rate_reproduction(verdict):
    t0 = time.perf_counter()
    c1 = run_rate_experiment(ExperimentConfig(theorem="C1", p=2.0, omega_r=1.5))
    t3 = run_rate_experiment(ExperimentConfig(theorem="T3-pqinf", omega_r=1.2))
    t1 = run_rate_experiment(ExperimentConfig(
        theorem="T1", p=2.0, omega_kind="power-log", omega_r=1.5, omega_beta=1.0, omega_alpha=1.0))
    elapsed = time.perf_counter() - t0
    ok = (
        abs(c1.slope - (-1.0)) <= 0.15
        and abs(t3.slope - (-1.2)) <= 0.15
        and t1.stability <= 2.0
        and elapsed < 300
    )
    verdict(5, "rate reproduction", ok,
            f"C1 slope {c1.slope:.4f}, T3 slope {t3.slope:.4f}, T1 log stability {t1.stability:.4f}, "
            f"{elapsed:.0f}s")


def _band_limited(d):
    g = GridSpec.dyadic(d, 64, 4 if d == 1 else 3)
    for s in range(6):
        yield 2.0 ** (s + 1), kernels.sample_kernel(kernels.KernelId("vallee", s, d), g)
    for n in range(1, 5):
        yield 2.0 ** (n + 1), kernels.sample_kernel(kernels.KernelId("fn-block", n, d), g)


def test_criterion_6_inequalities(verdict):
    nik = math.inf
    for d in (1, 2):
        for nu, f in _band_limited(d):
            for p1 in P_SET:
                for p2 in P_SET:
                    if p1 <= p2:
                        nik = min(nik, nikolskii_check(f, p1, p2, nu).slack)
    young = math.inf
    fields_ = [f for _, f in _band_limited(1)]
    for g1 in fields_:
        for g2 in fields_:
            for p in P_SET:
                young = min(young, young_check(g1, g2, p)["slack"])
    verdict(6, "Young and Nikolskii", nik >= 0 and young >= 0,
            f"min Nikolskii slack {nik:.3g}, min Young slack {young:.3g}")


def test_criterion_7_norm_machinery(verdict):
    g = GridSpec.dyadic(1, 64, 5)
    fields_ = [build_extremal(ExtremalId(fam, n, p=2.0, omega=OM), g) for fam in ("F1", "F2") for n in (2, 3, 4)]
    fields_ += [sample(lambda x: np.exp(-x * x / 2), g), sample(lambda x: 1 / (1 + x * x) ** 2, g)]
    chain = True
    for f in fields_:
        blocks = dyadic_blocks(f)
        s = np.arange(len(blocks.blocks))
        for p in (1.0, 2.0, math.inf):
            seq = blocks.norms(p) / OM(2.0**-s)
            a, b, c = (sequence_norm(seq, th) for th in (1.0, 2.0, math.inf))
            chain = chain and a >= b >= c

    bands = []
    for theta in (1.0, 2.0, math.inf):
        params = BesovParams(2.0, theta, OM)
        for fam in ("F1", "F2"):
            ratios = []
            for n in range(2, 6):
                eid = ExtremalId(fam, n, p=2.0, omega=OM)
                f = build_extremal(eid, GridSpec.dyadic(1, 2 * eid.spectral_radius(), 4))
                flavor = "fourier-f" if eid.dirichlet else "vallee-q"
                ratios.append(besov_norm_integral(f, params) / besov_norm_decomposition(f, params, flavor))
            bands.append(max(ratios) / min(ratios))

    params = BesovParams(2.0, 2.0, OM)
    homog = 0.0
    for f in fields_[:1] + fields_[-1:]:
        for c in (0.01, 3.0, 250.0):
            for norm in (besov_norm_integral, besov_norm_decomposition):
                homog = max(homog, abs(norm(c * f, params) / (c * norm(f, params)) - 1))
    ok = chain and max(bands) <= 10 and homog <= 1e-8
    verdict(7, "norm machinery", ok,
            f"chain {'exact' if chain else 'broken'}, worst band {max(bands):.3f}, homogeneity {homog:.1e}")


def _brute_dk(k, x):
    sq = math.sqrt(2 / math.pi)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = sq * 2 * np.sin(x / 2) * np.cos((2 * k + 1) * x / 2) / x
    return np.where(x == 0, sq, val)


def test_criterion_8_oracle_equivalence(verdict):
    rng = np.random.default_rng(7)
    tele = 0.0
    for d in (1, 2):
        for n in range(1, 5):
            pts = rng.uniform(-6, 6, size=(25, d))
            pts[0] = 0.0
            ks = range(2**n, 2 ** (n + 1))
            brute = np.ones(len(pts))
            for j in range(d):
                brute *= sum(_brute_dk(k, pts[:, j]) for k in ks)
            fast = np.array([kernels.fn_block(n, p) for p in pts])
            tele = max(tele, float(np.abs(fast - brute).max() / 2 ** (n * d)))
    g2 = GridSpec(2, 8.0, 201)
    tens = 0.0
    for rules in ([lambda x: np.exp(-x * x), lambda x: 1 / (1 + x * x)],
                  [lambda x: np.cos(x) * np.exp(-x * x / 4), lambda x: np.exp(-np.abs(x))]):
        t = sample_tensor(rules, g2)
        full = assemble(t)
        for p in P_SET:
            tens = max(tens, abs(lp_norm(t, p) - lp_norm(full, p)) / lp_norm(full, p))
    verdict(8, "oracle equivalence", tele <= 1e-10 and tens <= 1e-8,
            f"F_n vs D_k sum {tele:.1e}, tensor vs full {tens:.1e}")


def test_criterion_9_determinism(verdict, tmp_path):
    cfg = tmp_path / "c1.cfg"
    cfg.write_text("theorem = C1\np = 2\nomega_r = 1.5\nperiod_exponent = 6\nn_range = 2..6\n")
    exe = shutil.which("ratelab")
    cmd = [exe] if exe else [sys.executable, "-m", "ratelab.cli"]
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        proc = subprocess.run(cmd + ["rates", "--config", str(cfg), "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append((out / "rates.csv").read_bytes())
    verdict(9, "byte-identical CSV", outs[0] == outs[1] and len(outs[0]) > 0,
            f"{len(outs[0])} bytes per run")
