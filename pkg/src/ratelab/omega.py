"""Functions of modulus-of-continuity type and their class checks.

A :class:`ModulusSpec` describes a nonnegative, nondecreasing function
``Omega`` with ``Omega(0) = 0``.  The three checks below sample the growth
condition ``Omega(n t) <= C1 n**l Omega(t)`` and the two Bari-Stechkin
conditions on a finite grid and report the worst constant seen.  Because the
conditions quantify over a continuum, a condition "passes" when its empirical
constant is finite and stays put (within 5 %) under a 2x grid refinement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

KINDS = ("power", "power-log", "user-table")

#: allowed growth of an empirical constant under 2x refinement
STABILITY_GROWTH = 1.05


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(ValueError):
    """An operation was called with an inconsistent or empty configuration."""


@dataclass(frozen=True)
class ModulusSpec:
    """Parameterized function of modulus-of-continuity type.

    ``power`` is ``t**r``; ``power-log`` is ``t**r * (log2+ (1/t))**beta`` with
    ``log2+ u = max(1, log2 u)``; ``user-table`` interpolates ``table``
    (pairs ``(t, value)``) linearly and supports evaluation only.
    """

    kind: str = "power"
    r: float = 1.0
    beta: float = 0.0
    l: int = 2
    alpha: float = 0.5
    gamma: float = 0.5
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown modulus kind {self.kind!r}")
        if self.kind != "user-table" and self.r <= 0:
            raise UsageError("exponent r must be positive")
        if self.l < 1:
            raise UsageError("modulus order l must be a positive integer")
        if self.alpha <= 0:
            raise UsageError("alpha must be positive")
        if not 0 < self.gamma < self.l:
            raise UsageError("gamma must lie in (0, l)")
        if self.kind == "user-table":
            if len(self.table) < 2:
                raise UsageError("user-table needs at least two (t, value) pairs")
            ts = [t for t, _ in self.table]
            if sorted(ts) != ts or ts[0] != 0.0:
                raise UsageError("user-table must start at t = 0 and be sorted")

    def __call__(self, t):
        return eval_omega(self, t)

    def describe(self) -> str:
        if self.kind == "power":
            return f"t^{self.r:g}"
        if self.kind == "power-log":
            return f"t^{self.r:g} (log2+ 1/t)^{self.beta:g}"
        return f"table[{len(self.table)}]"


def log2_plus(u):
    """``max(1, log2 u)`` for ``u > 0``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        return np.maximum(1.0, np.log2(u))


def eval_omega(spec: ModulusSpec, t):
    """Evaluate ``Omega(t)``; scalar in, float out, arrays elementwise."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("Omega is defined for t >= 0 only")
    out = np.zeros_like(arr)
    pos = arr > 0
    tp = arr[pos]
    if spec.kind == "power":
        out[pos] = tp**spec.r
    elif spec.kind == "power-log":
        # log2+(1/t) written as max(1, -log2 t) so tiny t cannot overflow
        out[pos] = tp**spec.r * np.maximum(1.0, -np.log2(tp)) ** spec.beta
    else:
        ts, vs = np.array(spec.table).T
        out[pos] = np.interp(tp, ts, vs, right=vs[-1])
    if np.ndim(t) == 0:
        return float(out)
    return out


@dataclass
class ConditionReport:
    """Outcome of one sampled class condition.

    ``constant`` is the worst ratio seen on ``grid`` (1.0 for an exactly
    monotone ratio); ``refined_constant`` is the same quantity on the 2x
    refined grid.  The pass rule is a stability heuristic, not a proof.
    """

    condition: str
    constant: float
    refined_constant: float
    positive: bool
    monotone: bool
    passed: bool
    grid: list[float] = field(default_factory=list)
    note: str = "heuristic: constant must be finite and grow <= 5% under 2x refinement"


def dyadic_grid(j_max: int = 24, j_min: int = 0) -> np.ndarray:
    """Ascending grid ``{2**-j : j_min <= j <= j_max}``."""
    return 2.0 ** -np.arange(j_max, j_min - 1, -1, dtype=float)


def refine_grid(grid: Sequence[float]) -> np.ndarray:
    """Double a positive grid: geometric midpoints plus a copy shifted one
    log-span further toward zero."""
    g = np.asarray(grid, dtype=float)
    u = np.log2(g)
    mids = (u[:-1] + u[1:]) / 2
    span = u.max() - u.min()
    shifted = u - (span if span > 0 else 1.0)
    return 2.0 ** np.unique(np.concatenate([u, mids, shifted]))


def _validate_tau(grid, name):
    g = np.asarray(grid, dtype=float)
    if g.size == 0:
        raise UsageError(f"{name}: empty grid")
    if np.any(np.diff(g) < 0):
        raise UsageError(f"{name}: grid must be sorted ascending")
    return g


def _basic_flags(spec, grid):
    vals = eval_omega(spec, grid)
    positive = bool(eval_omega(spec, 0.0) == 0.0 and np.all(vals > 0))
    monotone = bool(np.all(np.diff(vals) >= -1e-12 * np.abs(vals[1:])))
    return positive, monotone


def _require_parametric(spec, name):
    if spec.kind == "user-table":
        raise UsageError(f"{name}: class checks are not supported for user-table moduli")


def _psi_constant(spec, grid, n_max):
    ns = np.arange(1, n_max + 1, dtype=float)
    top = eval_omega(spec, np.outer(ns, grid))
    bottom = ns[:, None] ** spec.l * eval_omega(spec, grid)[None, :]
    return float(np.max(top / bottom))


def check_psi_l(spec: ModulusSpec, t_grid: Sequence[float], n_max: int = 16) -> ConditionReport:
    """Empirical ``C1 = sup Omega(n t) / (n**l Omega(t))`` over ``n <= n_max``.

    Refinement doubles both the t-grid and ``n_max``.
    """
    _require_parametric(spec, "check_psi_l")
    g = _validate_tau(t_grid, "check_psi_l")
    if np.any(g <= 0):
        raise DomainError("check_psi_l: grid points must be positive")
    if n_max < 1:
        raise UsageError("check_psi_l: n_max must be positive")
    positive, monotone = _basic_flags(spec, g)
    c = _psi_constant(spec, g, n_max)
    c2 = _psi_constant(spec, refine_grid(g), 2 * n_max)
    passed = positive and monotone and np.isfinite(c) and c2 <= STABILITY_GROWTH * c
    return ConditionReport("Psi_l", c, c2, positive, monotone, bool(passed), g.tolist())


def _almost_increasing_constant(ratio):
    # sup over tau1 <= tau2 of ratio(tau1) / ratio(tau2)
    prefix = np.maximum.accumulate(ratio)
    return float(np.max(prefix / ratio))


def _almost_decreasing_constant(ratio):
    # sup over tau1 <= tau2 of ratio(tau2) / ratio(tau1)
    prefix = np.minimum.accumulate(ratio)
    return float(np.max(ratio / prefix))


def _bari_stechkin(spec, tau_grid, exponent, increasing, name):
    _require_parametric(spec, name)
    g = _validate_tau(tau_grid, name)
    if np.any(g <= 0) or np.any(g > 1):
        raise DomainError(f"{name}: grid values must lie in (0, 1]")
    positive, monotone = _basic_flags(spec, g)
    worst = _almost_increasing_constant if increasing else _almost_decreasing_constant

    def const(grid):
        return worst(eval_omega(spec, grid) / grid**exponent)

    c = const(g)
    c2 = const(refine_grid(g))
    passed = positive and monotone and np.isfinite(c) and c2 <= STABILITY_GROWTH * c
    return ConditionReport(name, c, c2, positive, monotone, bool(passed), g.tolist())


def check_s_alpha(spec: ModulusSpec, tau_grid: Sequence[float] | None = None) -> ConditionReport:
    """``Omega(tau)/tau**alpha`` almost increasing on (0, 1]."""
    grid = dyadic_grid() if tau_grid is None else tau_grid
    return _bari_stechkin(spec, grid, spec.alpha, True, "S^alpha")


def check_s_l(spec: ModulusSpec, tau_grid: Sequence[float] | None = None) -> ConditionReport:
    """``Omega(tau)/tau**(l - gamma)`` almost decreasing on (0, 1].

    The reported constant is the reciprocal of the multiplier in the
    almost-decreasing inequality, so 1.0 again means exactly monotone.
    """
    grid = dyadic_grid() if tau_grid is None else tau_grid
    return _bari_stechkin(spec, grid, spec.l - spec.gamma, False, "S_l")


def check_phi(spec: ModulusSpec, grid: Sequence[float] | None = None, n_max: int = 16):
    """All three checks; returns the list of reports."""
    g = dyadic_grid() if grid is None else grid
    return [check_psi_l(spec, g, n_max), check_s_alpha(spec, g), check_s_l(spec, g)]
