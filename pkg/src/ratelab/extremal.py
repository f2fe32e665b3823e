"""Extremal witnesses for the lower bounds and their norm asymptotics.

All families are coordinate products built from ``f_{n+1} = V_{2^{n+1}} -
V_{2^n}`` or from the telescoped Dirichlet block ``F_n``; ``normalizer`` fills
the slot of the class constant and defaults to 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .besov import BesovParams, besov_decomposition_breakdown
from .field import GridSpec, SampledField, lp_norm
from .omega import ModulusSpec, UsageError, eval_omega
from .spectral import dyadic_blocks

FAMILIES = ("f-next", "F1", "F2", "F3", "F4", "Fn-dirichlet")
_DIRICHLET = ("F2", "Fn-dirichlet")


@dataclass(frozen=True)
class ExtremalId:
    family: str
    n: int
    d: int = 1
    p: float | None = None
    omega: ModulusSpec | None = None
    normalizer: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UsageError(f"unknown extremal family {self.family!r}")
        if self.n < 1:
            raise UsageError("extremal level n must be >= 1")
        if self.family in ("F1", "F2", "F3", "F4") and self.omega is None:
            raise UsageError(f"{self.family} needs omega")
        if self.family in ("F1", "F2") and self.p is None:
            raise UsageError(f"{self.family} needs p")

    @property
    def dirichlet(self) -> bool:
        return self.family in _DIRICHLET

    def spectral_radius(self) -> float:
        return 2.0 ** (self.n + 1) if self.dirichlet else 2.0 ** (self.n + 2)

    def support(self) -> tuple[float, float]:
        """Band ``[lo, hi]`` of ``max_j |lam_j|`` holding the spectrum."""
        if self.dirichlet:
            return 2.0**self.n, 2.0 ** (self.n + 1)
        return 2.0**self.n, 2.0 ** (self.n + 2)

    def scale(self) -> float:
        """Scalar in front of the base function (``f_{n+1}`` or ``F_n``)."""
        n, d = self.n, self.d
        if self.family in ("f-next", "Fn-dirichlet"):
            return self.normalizer
        om = eval_omega(self.omega, 2.0**-n)
        if self.family == "F3":
            return self.normalizer * om * 2.0 ** (-n * d)
        if self.family == "F4":
            return self.normalizer * om
        inv_p = 0.0 if self.p == math.inf else 1.0 / self.p
        return self.normalizer * om * 2.0 ** (-n * d * (1 - inv_p))

    def base_kernel(self) -> kernels.KernelId:
        if self.dirichlet:
            return kernels.KernelId("fn-block", self.n, self.d)
        return kernels.KernelId("f-next", self.n, self.d)


def build_extremal(eid: ExtremalId, grid: GridSpec, periodize: bool | None = None) -> SampledField:
    """Sample the witness on ``grid`` as a tensor field.

    Periodic grids sample the periodized witness (exact on the torus).
    """
    if eid.d != grid.d:
        raise UsageError("extremal dimension differs from grid dimension")
    grid.require_resolves(eid.spectral_radius(), f"extremal {eid.family}")
    base = kernels.sample_kernel(eid.base_kernel(), grid, periodize)
    return eid.scale() * base


# -- norm scans ------------------------------------------------------------

def theory_norm(family: str, n: int, p: float, d: int = 1) -> float:
    """Order of ``||f_{n+1}||_p`` or ``||F_n||_p``: ``2^{nd(1 - 1/p)}``."""
    inv_p = 0.0 if p == math.inf else 1.0 / p
    return 2.0 ** (n * d * (1 - inv_p))


@dataclass
class ScanTable:
    family: str
    d: int
    p: float
    rows: list = field(default_factory=list)
    grid: dict = field(default_factory=dict)
    limit: float = 1.5

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r["ratio"] for r in self.rows])

    @property
    def stability(self) -> float:
        r = self.ratios
        return float(r.max() / r.min())

    @property
    def passed(self) -> bool:
        return self.stability <= self.limit

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["family", "d", "n", "p", "norm", "theory", "ratio"])
            for r in self.rows:
                w.writerow([self.family, self.d, r["n"], self.p, repr(r["norm"]), repr(r["theory"]), repr(r["ratio"])])


def default_n_range(d: int) -> range:
    return range(2, 7) if d == 1 else range(2, 5)


def extremal_norm_scan(
    family: str,
    n_range=None,
    p: float = math.inf,
    d: int = 1,
    period_exponent: int = 6,
    oversample: float = 2.0,
    limit: float = 1.5,
) -> ScanTable:
    """Measured ``||.||_p`` against ``2^{nd(1-1/p)}`` over ``n_range`` on one
    grid that resolves the top level.  d > 1 runs through tensor factors."""
    if family not in ("f-next", "Fn-dirichlet"):
        raise UsageError("norm scans cover f-next and Fn-dirichlet")
    ns = list(default_n_range(d) if n_range is None else n_range)
    probe = ExtremalId(family, max(ns), d)
    grid = GridSpec.dyadic(d, probe.spectral_radius(), period_exponent, oversample)
    table = ScanTable(family, d, p, grid=grid.describe(), limit=limit)
    for n in ns:
        f = build_extremal(ExtremalId(family, n, d), grid)
        nrm = lp_norm(f, p)
        th = theory_norm(family, n, p, d)
        row = {"n": n, "norm": nrm, "theory": th, "ratio": nrm / th}
        if p == math.inf:
            # the peak is expected at the origin; record where it actually is
            peaks = [int(np.argmax(np.abs(fac.values))) for fac in f.tensor_factors]
            row["peak_at_origin"] = all(i == grid.M for i in peaks)
        table.rows.append(row)
    return table


# -- class membership ------------------------------------------------------

@dataclass
class MembershipReport:
    family: str
    n: int
    flavor: str
    norm: float
    unit_normalizer: float
    block_norms: list
    terms: list
    expected_blocks: list
    nonzero_blocks: list
    leak: float
    passed: bool


def expected_blocks(eid: ExtremalId, flavor: str, s_max: int) -> list[int]:
    """Blocks whose band overlaps the witness spectrum.

    Trapezoid blocks vanish at their breakpoints, so an open overlap is
    required; sharp-cutoff blocks keep boundary bins, so touching counts.
    """
    lo, hi = eid.support()
    out = []
    for s in range(s_max + 1):
        b_lo = 0.0 if s == 0 else 2.0 ** (s - 1)
        if flavor == "vallee-q":
            if b_lo < hi and lo < 2.0 ** (s + 1):
                out.append(s)
        elif b_lo <= hi and lo <= 2.0**s:
            out.append(s)
    return out


def class_membership_check(
    eid: ExtremalId,
    params: BesovParams,
    grid: GridSpec | None = None,
    flavor: str | None = None,
    leak_tol: float = 1e-6,
) -> MembershipReport:
    """Decomposition norm of the witness and the normalizer giving norm 1.

    The Dirichlet families default to the sharp-cutoff blocks ``f_(s)``,
    the others to ``q_s``.
    """
    if flavor is None:
        flavor = "fourier-f" if eid.dirichlet else "vallee-q"
    if grid is None:
        grid = GridSpec.dyadic(eid.d, 2 * eid.spectral_radius(), 4)
    f = build_extremal(eid, grid)
    blocks = dyadic_blocks(f, flavor=flavor)
    bd = besov_decomposition_breakdown(f, params, blocks=blocks)
    norms = np.array(blocks.norms(params.p))
    weights = eval_omega(params.omega, 2.0 ** -np.arange(len(norms)))
    expected = expected_blocks(eid, flavor, len(norms) - 1)
    energy = np.array([lp_norm(b, 2) ** 2 for b in blocks.blocks])
    outside = [s for s in range(len(norms)) if s not in expected]
    total = energy.sum()
    leak = float(energy[outside].sum() / total) if total > 0 else 0.0
    nonzero = [int(s) for s in np.nonzero(norms > 1e-8 * norms.max())[0]] if norms.max() > 0 else []
    return MembershipReport(
        eid.family, eid.n, flavor, bd.norm,
        eid.normalizer / bd.norm if bd.norm > 0 else math.inf,
        norms.tolist(), (norms / weights).tolist(), expected, nonzero, leak, leak < leak_tol,
    )
