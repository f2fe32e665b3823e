"""Generalized Nikol'skii-Besov norms, multiple differences, and the
Nikolskii different-metrics inequality."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import binom
from scipy.stats import qmc

from .field import SampledField, lp_norm
from .omega import DomainError, ModulusSpec, UsageError, check_phi, eval_omega
from .spectral import _fwd, _inv, _spectrum_of, dyadic_blocks, top_level


class PreconditionError(ValueError):
    """A field does not satisfy an operation's spectral precondition."""


@dataclass(frozen=True)
class BesovParams:
    p: float
    theta: float
    omega: ModulusSpec
    l: int | None = None
    check_class: bool = True

    def __post_init__(self):
        for name in ("p", "theta"):
            v = getattr(self, name)
            if not (v == math.inf or v >= 1):
                raise DomainError(f"{name} must lie in [1, inf]")
        if self.l is None:
            object.__setattr__(self, "l", self.omega.l)
        if self.l < 1:
            raise UsageError("difference order l must be positive")
        if self.check_class and self.omega.kind != "user-table":
            failed = [r.condition for r in check_phi(self.omega) if not r.passed]
            if failed:
                raise UsageError(f"omega {self.omega.describe()} fails {', '.join(failed)}")


# -- differences and moduli of smoothness ----------------------------------

def _lattice_shift(grid, h):
    k = np.asarray(h, dtype=float) / grid.h
    kr = np.round(k)
    if np.all(np.abs(k - kr) < 1e-9):
        return kr.astype(int)
    return None


def _check_step(grid, h):
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if h.size == 1 and grid.d > 1:
        h = np.repeat(h, grid.d)
    if h.size != grid.d:
        raise UsageError("step vector has the wrong dimension")
    if np.linalg.norm(h) > grid.L / 4:
        raise UsageError("|h| > L/4: wrap-around would contaminate the difference")
    return h


def multi_difference(f: SampledField, h, l: int) -> SampledField:
    """``Delta_h^l f`` by ``l``-fold application of ``Delta_h f = f(. + h) - f``.

    Shifts wrap periodically.  Steps on the node lattice use exact index
    rolls; other steps use the spectral shift ``exp(i lam . h)``, which is exact
    for band-limited periodic fields.  See :func:`difference_window` for the
    nodes untouched by the wrap.
    """
    if l < 1:
        raise UsageError("difference order must be >= 1")
    grid = f.grid
    h = _check_step(grid, h)
    vals = np.asarray(f.values, dtype=complex)
    shift = _lattice_shift(grid, h)
    if shift is not None:
        axes = tuple(range(grid.d))
        for _ in range(l):
            vals = np.roll(vals, tuple(-shift), axis=axes) - vals
        return SampledField(grid, vals)
    lam = grid.frequencies()
    phase = np.ones([1] * grid.d, dtype=complex)
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = grid.N
        phase = phase * np.exp(1j * lam * h[ax]).reshape(shape)
    F = _fwd(vals, grid.h)
    step = phase - 1.0
    for _ in range(l):
        F = F * step
    return SampledField(grid, _inv(F, grid.h))


def difference_by_binomial(f: SampledField, h, l: int) -> SampledField:
    """``sum_j (-1)^{l-j} C(l, j) f(x + j h)``: the closed form of the recursion."""
    h = _check_step(f.grid, h)
    out = None
    for j in range(l + 1):
        shifted = f if j == 0 else _shift(f, j * h)
        term = (-1) ** (l - j) * binom(l, j) * shifted.values
        out = term if out is None else out + term
    return SampledField(f.grid, out)


def _shift(f, h):
    grid = f.grid
    shift = _lattice_shift(grid, h)
    if shift is not None:
        return SampledField(grid, np.roll(f.values, tuple(-shift), axis=tuple(range(grid.d))))
    lam = grid.frequencies()
    F = _fwd(np.asarray(f.values, dtype=complex), grid.h)
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = grid.N
        F = F * np.exp(1j * lam * h[ax]).reshape(shape)
    return SampledField(grid, _inv(F, grid.h))


def difference_window(grid, h, l: int) -> tuple[slice, ...]:
    """Index window of nodes whose ``l``-fold difference never wraps."""
    h = _check_step(grid, h)
    out = []
    for hj in h:
        k = int(math.ceil(abs(hj) * l / grid.h - 1e-9))
        out.append(slice(0, grid.N - k) if hj >= 0 else slice(k, grid.N))
    return tuple(out)


def direction_set(d: int, count: int | None = None) -> np.ndarray:
    """Deterministic unit directions: signed axes, sign diagonals, then a
    Halton fill.  Default count is ``2d + 2^d + 16``; d = 1 has only two."""
    if count is None:
        count = 2 * d + 2**d + 16
    if count < 1:
        raise UsageError("need at least one direction")
    dirs = []
    for j in range(d):
        for sgn in (1.0, -1.0):
            e = np.zeros(d)
            e[j] = sgn
            dirs.append(e)
    if d > 1:
        for signs in np.ndindex(*([2] * d)):
            v = np.array([1.0 if s == 0 else -1.0 for s in signs])
            dirs.append(v / np.sqrt(d))
        pts = qmc.Halton(d=max(d - 1, 1), scramble=False).random(64)
        for u in pts:
            if d == 2:
                a = 2 * np.pi * u[0]
                v = np.array([np.cos(a), np.sin(a)])
            else:
                z = 2 * u[0] - 1
                a = 2 * np.pi * u[1]
                rho = np.sqrt(1 - z * z)
                v = np.array([rho * np.cos(a), rho * np.sin(a), z])
            dirs.append(v)
    uniq = []
    for v in dirs:
        if not any(np.allclose(v, w) for w in uniq):
            uniq.append(v)
    return np.array(uniq[: min(count, len(uniq))])


def modulus_of_continuity(f: SampledField, t: float, l: int, p: float, directions: int | None = None) -> float:
    """Lower bound for ``sup_{|h| <= t} ||Delta_h^l f||_p`` over sampled steps:
    each direction at radii ``t, t/2, t/4``."""
    if t <= 0:
        raise DomainError("t must be positive")
    best = 0.0
    for e in direction_set(f.grid.d, directions):
        for rad in (t, t / 2, t / 4):
            best = max(best, lp_norm(multi_difference(f, rad * e, l), p))
    return best


# -- norms -----------------------------------------------------------------

@dataclass
class NormBreakdown:
    """Per-index contributions of a norm computation.

    For ``theta < inf`` contributions are the summands of ``sum^theta`` and
    ``cumulative`` their running sum; for ``theta = inf`` they are the ratios
    and ``cumulative`` the running max.
    """

    kind: str
    norm: float
    index: list
    contribution: list
    cumulative: list
    lp_part: float = 0.0
    truncation: dict = field(default_factory=dict)
    directions: int = 0

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "contribution", "cumulative"])
            for i, c, cum in zip(self.index, self.contribution, self.cumulative):
                w.writerow([i, repr(float(c)), repr(float(cum))])


def sequence_norm(seq, theta: float) -> float:
    """``l^theta`` norm of a nonnegative sequence."""
    a = np.abs(np.asarray(seq, dtype=float))
    if a.size == 0:
        return 0.0
    if theta == math.inf:
        return float(a.max())
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * np.sum((a / m) ** theta) ** (1.0 / theta))


def _geometric_tail(terms):
    # sum of the continuation of a geometrically decaying sequence
    if len(terms) < 2 or terms[-1] <= 0 or terms[-2] <= 0:
        return 0.0
    rho = terms[-1] / terms[-2]
    return float(terms[-1] * rho / (1 - rho)) if rho < 1 else math.inf


def besov_integral_breakdown(f: SampledField, params: BesovParams, directions: int | None = None) -> NormBreakdown:
    """Modulus-of-smoothness form: ``||f||_p`` plus the ``dt/t`` integral of
    ``(Omega_l(f,t)_p / Omega(t))^theta`` on ``t_j = 2^-j``, ``j = -2..J``."""
    grid = f.grid
    J = top_level(grid) + 2
    js = list(range(-2, J + 1))
    ratios = []
    for j in js:
        t = 2.0**-j
        om = eval_omega(params.omega, t)
        if om <= 0:
            raise DomainError(f"Omega({t:g}) = 0")
        ratios.append(modulus_of_continuity(f, t, params.l, params.p, directions) / om)
    ratios = np.array(ratios)
    lp_part = lp_norm(f, params.p)
    ndir = len(direction_set(grid.d, directions))
    if params.theta == math.inf:
        semi = float(ratios.max())
        contrib = ratios
        cum = np.maximum.accumulate(ratios)
        trunc = {"small_t": float(ratios[-1]), "large_t": float(ratios[0])}
    else:
        contrib = ratios**params.theta * math.log(2)
        cum = np.cumsum(contrib)
        semi = float(cum[-1] ** (1 / params.theta))
        trunc = {
            "small_t": _geometric_tail(list(contrib)),
            "large_t": _geometric_tail(list(contrib[::-1])),
        }
    return NormBreakdown(
        "integral", lp_part + semi, js, contrib.tolist(), cum.tolist(), lp_part, trunc, ndir
    )


def besov_norm_integral(f: SampledField, params: BesovParams, directions: int | None = None) -> float:
    return besov_integral_breakdown(f, params, directions).norm


def besov_decomposition_breakdown(f: SampledField, params: BesovParams, flavor: str = "vallee-q", blocks=None) -> NormBreakdown:
    """Dyadic form ``|| (Omega(2^-s)^-1 ||q_s(f)||_p)_s ||_{l^theta}``."""
    if blocks is None:
        blocks = dyadic_blocks(f, flavor=flavor)
    norms = blocks.norms(params.p)
    s = np.arange(len(norms))
    weights = eval_omega(params.omega, 2.0**-s)
    terms = norms / weights
    total = sequence_norm(terms, params.theta)
    if params.theta == math.inf:
        contrib, cum = terms, np.maximum.accumulate(terms)
    else:
        contrib = terms**params.theta
        cum = np.cumsum(contrib)
    return NormBreakdown(
        f"decomposition/{blocks.flavor}", total, s.tolist(), contrib.tolist(), cum.tolist(),
        truncation={"top_block_term": float(terms[-1]) if terms.size else 0.0},
    )


def besov_norm_decomposition(f: SampledField, params: BesovParams, flavor: str = "vallee-q") -> float:
    return besov_decomposition_breakdown(f, params, flavor).norm


# -- Nikolskii inequality --------------------------------------------------

@dataclass
class CheckReport:
    name: str
    lhs: float
    rhs: float
    slack: float
    slack_factor: float
    passed: bool
    detail: dict = field(default_factory=dict)


def spectral_excess(f: SampledField, nu) -> np.ndarray:
    """Per-axis relative spectral energy beyond ``|lam_j| > nu_j``."""
    grid = f.grid
    nu = np.broadcast_to(np.asarray(nu, dtype=float), (grid.d,))
    lam = np.abs(grid.frequencies())
    tol = 1e-9 * grid.dlam
    if f.is_tensor and f._values is None:
        # marginals of a product spectrum are the factor spectra up to scale
        out = []
        for ax, fac in enumerate(f.tensor_factors):
            e = np.abs(_spectrum_of(fac)) ** 2
            out.append(float(e[lam > nu[ax] + tol].sum() / e.sum()) if e.sum() else 0.0)
        return np.array(out)
    E = np.abs(_spectrum_of(f)) ** 2
    total = E.sum()
    out = []
    for ax in range(grid.d):
        other = tuple(i for i in range(grid.d) if i != ax)
        marg = E.sum(axis=other) if other else E
        out.append(float(marg[lam > nu[ax] + tol].sum() / total) if total else 0.0)
    return np.array(out)


def nikolskii_check(g: SampledField, p1: float, p2: float, nu, band_tol: float = 1e-10) -> CheckReport:
    """``||g||_{p2} <= 2^d (prod nu_j)^{1/p1 - 1/p2} ||g||_{p1}`` for ``g`` of
    exponential type ``nu``."""
    if not (1 <= p1 <= p2):
        raise DomainError("need 1 <= p1 <= p2 <= inf")
    d = g.grid.d
    nu = np.broadcast_to(np.asarray(nu, dtype=float), (d,))
    excess = spectral_excess(g, nu)
    if np.any(excess > band_tol):
        raise PreconditionError(
            f"field is not band-limited to nu={nu.tolist()} (excess energy {excess.max():.3g})"
        )
    inv = lambda p: 0.0 if p == math.inf else 1.0 / p
    lhs = lp_norm(g, p2)
    rhs = 2**d * float(np.prod(nu)) ** (inv(p1) - inv(p2)) * lp_norm(g, p1)
    return CheckReport(
        "nikolskii", lhs, rhs, rhs - lhs, rhs / lhs if lhs else math.inf, lhs <= rhs,
        {"p1": p1, "p2": p2, "nu": nu.tolist(), "excess": excess.tolist()},
    )
