"""Named property suites at pinned desk-scale parameters.

Each suite is a function returning ``(check, passed, detail)`` triples.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .besov import BesovParams, besov_norm_decomposition, besov_norm_integral, nikolskii_check, sequence_norm
from .extremal import ExtremalId, build_extremal, extremal_norm_scan
from .field import GridSpec, assemble, lp_norm, sample, sample_tensor
from .omega import ModulusSpec, check_phi
from .spectral import (
    dyadic_blocks,
    forward_transform,
    fourier_partial_sum,
    sigma,
    vallee_partial_sum,
    young_check,
)

P_SET = (1.0, 2.0, 4.0, math.inf)


def _rel(a, b):
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def suite_omega():
    out = []
    for spec in (ModulusSpec("power", 1.5, l=2, alpha=1.0, gamma=0.25),
                 ModulusSpec("power-log", 1.5, 1.0, l=2, alpha=1.0, gamma=0.25)):
        reps = check_phi(spec)
        out.append((f"Phi class {spec.describe()}", all(r.passed for r in reps),
                    " ".join(f"{r.condition}={r.constant:.3g}" for r in reps)))
    bad = ModulusSpec("power", 1.0, l=2, alpha=1.5, gamma=0.5)
    out.append(("S^alpha rejects alpha > r", not check_phi(bad)[1].passed, ""))
    return out


def suite_field():
    g = GridSpec(1, 12.0, 2001)
    gauss = sample(lambda x: np.exp(-x * x), g)
    err = abs(lp_norm(gauss, 1) - math.sqrt(math.pi))
    out = [("trapezoid Gaussian mass", err < 1e-10, f"err={err:.2e}")]
    g2 = GridSpec(2, 8.0, 201)
    t = sample_tensor([lambda x: np.exp(-x * x), lambda x: 1 / (1 + x * x)], g2)
    worst = max(abs(lp_norm(t, p) - lp_norm(assemble(t), p)) / lp_norm(t, p) for p in P_SET)
    out.append(("tensor norms equal full-grid norms", worst < 1e-8, f"rel={worst:.2e}"))
    return out


def suite_kernels():
    out = []
    g = GridSpec(1, 64 * math.pi, 2**15 + 1)
    masses = [kernels.kernel_l1_mass(s, g) for s in range(6)]
    worst = max(abs(m - 1) for m, _ in masses)
    out.append(("pi^-1 int V = 1, s=0..5", worst < 1e-2, f"max err={worst:.2e}"))
    ab = [a for _, a in masses]
    out.append(("abs-mass ratio <= 1.5", max(ab) / min(ab) <= 1.5, f"ratio={max(ab) / min(ab):.4f}"))
    worst = 0.0
    for s in range(6):
        v = kernels.sample_kernel(kernels.KernelId("vallee", s), g, periodize=False)
        F = forward_transform(v).values.real
        worst = max(worst, float(np.abs(F - kernels.mu_1d(s, g.frequencies())).max()))
    out.append(("DFT of V_{2^s} matches mu_{2^s}", worst < 1e-2, f"max err={worst:.2e}"))
    x = np.linspace(-5, 5, 41)
    brute = sum(kernels.dk_1d(k, x) for k in range(8, 16))
    e = _rel(kernels.fn_1d(3, x), brute)
    out.append(("telescoped F_3 equals D_k sum", e < 1e-10, f"rel={e:.2e}"))
    return out


def suite_spectral():
    out = []
    g = GridSpec.dyadic(1, 64, 6)
    v = kernels.sample_kernel(kernels.KernelId("vallee", 2), g)
    e = _rel(sigma(v, 3).values, v.values)
    out.append(("sigma_{2^s} reproduces band-limited fields", e < 1e-8, f"rel={e:.2e}"))
    f = sample(lambda x: np.exp(-x * x / 8) * np.cos(3 * x), g)
    leak = float(dyadic_blocks(f, 4).leaks(reference=lp_norm(f, 2) ** 2).max())
    out.append(("q_s localized to [2^{s-1}, 2^{s+1}]", leak < 1e-8, f"leak={leak:.2e}"))
    e = max(_rel(vallee_partial_sum(f, n).values, sigma(f, n).values) for n in range(5))
    out.append(("V_n(f) = sigma_{2^n}(f)", e < 1e-10, f"rel={e:.2e}"))
    worst = 0.0
    for n in range(2, 6):
        f1 = build_extremal(ExtremalId("f-next", n), g)
        worst = max(worst, lp_norm(vallee_partial_sum(f1, n - 1), math.inf) / lp_norm(f1, math.inf))
        f2 = build_extremal(ExtremalId("Fn-dirichlet", n), g)
        worst = max(worst, lp_norm(fourier_partial_sum(f2, n - 1), math.inf) / lp_norm(f2, math.inf))
    out.append(("V_{n-1} and S_{n-1} annihilate the witnesses", worst < 1e-8, f"rel={worst:.2e}"))
    return out


def suite_extremal():
    out = []
    for fam, ps in (("f-next", (math.inf, 1.0, 2.0, 4.0)), ("Fn-dirichlet", (2.0, math.inf))):
        for p in ps:
            for d in (1, 2):
                tb = extremal_norm_scan(fam, p=p, d=d)
                out.append((f"{fam} p={p:g} d={d} ratio stability", tb.passed, f"{tb.stability:.4f}"))
    return out


def _block_sequences():
    g = GridSpec.dyadic(1, 64, 5)
    om = ModulusSpec("power", 1.5, l=2, alpha=1.0, gamma=0.25)
    fields_ = [build_extremal(ExtremalId("F1", n, p=2.0, omega=om), g) for n in (2, 3, 4)]
    fields_.append(sample(lambda x: np.exp(-x * x / 2), g))
    for f in fields_:
        blocks = dyadic_blocks(f)
        for p in (1.0, 2.0, math.inf):
            s = np.arange(len(blocks.blocks))
            yield blocks.norms(p) / om(2.0**-s)


def suite_embedding():
    ok, worst = True, 0.0
    for seq in _block_sequences():
        a, b, c = (sequence_norm(seq, th) for th in (1.0, 2.0, math.inf))
        ok = ok and a >= b >= c
        worst = max(worst, c / a if a else 0.0)
    return [("l^theta chain theta=1 >= 2 >= inf", ok, f"max inf/1 ratio={worst:.3f}")]


def _band_limited_fields(d=1):
    g = GridSpec.dyadic(d, 64, 4 if d == 1 else 3)
    for s in range(6):
        yield 2.0 ** (s + 1), kernels.sample_kernel(kernels.KernelId("vallee", s, d), g)
    for n in range(1, 5):
        yield 2.0 ** (n + 1), kernels.sample_kernel(kernels.KernelId("fn-block", n, d), g)


def suite_nikolskii():
    out = []
    for d in (1, 2):
        worst, ok = math.inf, True
        for nu, f in _band_limited_fields(d):
            for p1 in P_SET:
                for p2 in P_SET:
                    if p1 <= p2:
                        r = nikolskii_check(f, p1, p2, nu)
                        ok = ok and r.slack >= 0
                        worst = min(worst, r.slack_factor)
        out.append((f"Nikolskii d={d}", ok, f"min rhs/lhs={worst:.3f}"))
    return out


def suite_young():
    ok, worst = True, math.inf
    fields_ = [f for _, f in _band_limited_fields(1)]
    for i, g1 in enumerate(fields_[:6]):
        for g2 in fields_[i::3]:
            for p in P_SET:
                r = young_check(g1, g2, p)
                ok = ok and r["slack"] >= 0
                worst = min(worst, r["slack"])
    return [("Young ||g1*g2||_p <= (2pi)^{-d/2} ||g1||_1 ||g2||_p", ok, f"min slack={worst:.3g}")]


def suite_equivalence():
    om = ModulusSpec("power", 1.5, l=2, alpha=1.0, gamma=0.25)
    out = []
    for theta in (1.0, math.inf):
        params = BesovParams(2.0, theta, om)
        for fam in ("F1", "F2"):
            ratios = []
            for n in range(2, 6):
                eid = ExtremalId(fam, n, p=2.0, omega=om)
                g = GridSpec.dyadic(1, 2 * eid.spectral_radius(), 4)
                f = build_extremal(eid, g)
                flavor = "fourier-f" if eid.dirichlet else "vallee-q"
                ratios.append(besov_norm_integral(f, params) / besov_norm_decomposition(f, params, flavor))
            band = max(ratios) / min(ratios)
            out.append((f"integral/decomposition band {fam} theta={theta:g}", band <= 10, f"band={band:.3f}"))
    return out


SUITES = {
    "omega": suite_omega,
    "field": suite_field,
    "kernels": suite_kernels,
    "spectral": suite_spectral,
    "extremal": suite_extremal,
    "embedding": suite_embedding,
    "nikolskii": suite_nikolskii,
    "young": suite_young,
    "equivalence": suite_equivalence,
}
