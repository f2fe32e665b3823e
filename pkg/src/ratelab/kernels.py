"""Closed-form kernels: de la Vallee Poussin, its trapezoid spectrum,
Dirichlet, the modified Dirichlet ``D_k`` and the telescoped block ``F_n``.

Every per-axis factor is written as a product of ``sin(u)/u`` terms, e.g.

    (cos a x - cos b x) / x**2 = (b**2 - a**2)/2 * sinc((a+b)x/2) * sinc((b-a)x/2)

so removable singularities need no branch and nothing cancels near 0.

With ``period=P`` the functions return the periodization
``sum_m k(x + m P)`` in closed form.  This requires every frequency in the
numerator to be a multiple of ``2 pi / P`` and then uses

    sum_m (x + m P)**-2 = (pi/P)**2 / sin(pi x / P)**2
    sum_m (x + m P)**-1 = (pi/P) cot(pi x / P)      (symmetric summation)

The periodized kernels are trigonometric polynomials on the cell whose
discrete Fourier coefficients equal the continuum transform at the frequency
nodes, which is what lets the spectral operators annihilate exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .field import GridSpec, SampledField, lp_norm, sample_tensor
from .omega import UsageError

CONSTANTS = {
    # plateau of the trapezoid transform, per axis
    "mu_plateau": math.sqrt(math.pi / 2),
    # prefactor of D_k and F_n, per axis
    "dk_scale": math.sqrt(2 / math.pi),
    # sigma = (2/pi)^{d/2} (V * f), per axis
    "sigma_scale": math.sqrt(2 / math.pi),
    # kernel masses are normalized by pi^{-d}, per axis
    "mass_scale": 1 / math.pi,
    # unitary transform / convolution factor (2 pi)^{-d/2}, per axis
    "unitary": 1 / math.sqrt(2 * math.pi),
}

FAMILIES = ("vallee", "mu", "dirichlet", "dk", "fn-block", "f-next")


def _sinc(u):
    """``sin(u)/u`` with value 1 at 0."""
    return np.sinc(np.asarray(u, dtype=float) / np.pi)


def _check_period(period, freqs):
    for f in freqs:
        k = f * period / (2 * math.pi)
        if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
            raise UsageError(
                f"period {period:g} is not commensurate with frequency {f:g}; "
                "use GridSpec.dyadic"
            )


def _inv_square_factor(x, period):
    # (pi x/P)^2 / sin^2(pi x/P): turns x**-2 into its lattice sum
    return 1.0 / np.sinc(np.asarray(x, dtype=float) / period) ** 2


def _inv_linear_factor(x, period):
    # (pi x/P) cot(pi x/P): turns x**-1 into its symmetric lattice sum
    x = np.asarray(x, dtype=float)
    return np.cos(np.pi * x / period) / np.sinc(x / period)


# -- per-axis factors ------------------------------------------------------

def cos_difference(a, b, x, period=None):
    """``(cos a x - cos b x) / x**2`` (or its periodization)."""
    x = np.asarray(x, dtype=float)
    out = (b * b - a * a) / 2 * _sinc((a + b) * x / 2) * _sinc((b - a) * x / 2)
    if period is not None:
        _check_period(period, (a, b))
        out = out * _inv_square_factor(x, period)
    return out


def sin_difference(a, b, x, period=None):
    """``(sin b x - sin a x) / x`` (or its periodization)."""
    x = np.asarray(x, dtype=float)
    out = (b - a) * np.cos((a + b) * x / 2) * _sinc((b - a) * x / 2)
    if period is not None:
        _check_period(period, (a, b))
        out = out * _inv_linear_factor(x, period)
    return out


def vallee_1d(s: int, x, period=None):
    a = 2.0**s
    return cos_difference(a, 2 * a, x, period) / a


def fnext_1d(n: int, x, period=None):
    """``V_{2^{n+1}}(x) - V_{2^n}(x)``."""
    return vallee_1d(n + 1, x, period) - vallee_1d(n, x, period)


def mu_1d(s: int, lam):
    a = 2.0**s
    lam = np.abs(np.asarray(lam, dtype=float))
    ramp = np.clip((2 * a - lam) / a, 0.0, 1.0)
    return CONSTANTS["mu_plateau"] * ramp


def dirichlet_1d(m: float, x, period=None):
    x = np.asarray(x, dtype=float)
    out = m * _sinc(m * x)
    if period is not None:
        _check_period(period, (m,))
        out = out * _inv_linear_factor(x, period)
    return out


def dk_1d(k: int, x, period=None):
    return CONSTANTS["dk_scale"] * sin_difference(k, k + 1, x, period)


def fn_1d(n: int, x, period=None):
    return CONSTANTS["dk_scale"] * sin_difference(2.0**n, 2.0 ** (n + 1), x, period)


# -- d-dimensional kernels -------------------------------------------------

def _points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    return x


def _product(factor, x, params):
    x = _points(x)
    out = np.ones(x.shape[:-1])
    for j in range(x.shape[-1]):
        out = out * factor(params[j], x[..., j])
    return out if out.ndim else float(out)


def vallee_kernel(s: int, x, period=None):
    """``V_{2^s}(x)``: product over axes of ``(cos 2^s x - cos 2^{s+1} x) / (2^s x^2)``.

    ``x`` is a point (or array of points, last axis = d); a scalar is a 1-D point.
    """
    if s < 0:
        raise UsageError("s must be nonnegative")
    d = _points(x).shape[-1]
    return _product(lambda s_, xj: vallee_1d(s_, xj, period), x, [s] * d)


def mu_spectrum(s: int, lam):
    """Trapezoid transform of ``V_{2^s}``: plateau ``sqrt(pi/2)`` per axis up
    to ``2^s``, linear ramp to zero at ``2^{s+1}``."""
    if s < 0:
        raise UsageError("s must be nonnegative")
    d = _points(lam).shape[-1]
    return _product(mu_1d, lam, [s] * d)


def dirichlet_kernel(m: float, x, period=None):
    """``D_m(x) = prod sin(m x_j) / x_j``, value ``m`` per axis at 0."""
    if m <= 0:
        raise UsageError("m must be positive")
    d = _points(x).shape[-1]
    return _product(lambda m_, xj: dirichlet_1d(m_, xj, period), x, [m] * d)


def dk_kernel(k: Sequence[int] | int, x, period=None):
    """``D_k(x) = prod sqrt(2/pi) * 2 sin(x_j/2) cos((2k_j+1) x_j/2) / x_j``."""
    pts = _points(x)
    ks = np.atleast_1d(np.asarray(k, dtype=int))
    if ks.size == 1 and pts.shape[-1] > 1:
        ks = np.repeat(ks, pts.shape[-1])
    if ks.size != pts.shape[-1]:
        raise UsageError("dk_kernel needs one k per axis")
    if np.any(ks < 0):
        raise UsageError("k must be nonnegative")
    return _product(lambda k_, xj: dk_1d(int(k_), xj, period), x, list(ks))


def fn_block(n: int, x, period=None):
    """Telescoped ``F_n(x) = sum_{k in [2^n, 2^{n+1})^d} D_k(x)``
    = ``prod sqrt(2/pi) (sin 2^{n+1} x_j - sin 2^n x_j) / x_j``."""
    if n < 0:
        raise UsageError("n must be nonnegative")
    d = _points(x).shape[-1]
    return _product(lambda n_, xj: fn_1d(n_, xj, period), x, [n] * d)


@dataclass(frozen=True)
class KernelId:
    """Names one kernel: ``family`` plus its integer parameter."""

    family: str
    param: int
    d: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UsageError(f"unknown kernel family {self.family!r}")
        if self.param < 0 or (self.family == "dirichlet" and self.param == 0):
            raise UsageError("kernel parameter out of range")

    def spectral_radius(self) -> float:
        p = self.param
        return {
            "vallee": 2.0 ** (p + 1),
            "mu": 2.0 ** (p + 1),
            "dirichlet": float(p),
            "dk": float(p + 1),
            "fn-block": 2.0 ** (p + 1),
            "f-next": 2.0 ** (p + 2),
        }[self.family]

    def factor(self, period=None):
        """The per-axis 1-D rule."""
        p = self.param
        if self.family == "vallee":
            return lambda x: vallee_1d(p, x, period)
        if self.family == "mu":
            return lambda lam: mu_1d(p, lam)
        if self.family == "dirichlet":
            return lambda x: dirichlet_1d(p, x, period)
        if self.family == "dk":
            return lambda x: dk_1d(p, x, period)
        if self.family == "fn-block":
            return lambda x: fn_1d(p, x, period)
        return lambda x: fnext_1d(p, x, period)


def sample_kernel(kid: KernelId, grid: GridSpec, periodize: bool | None = None) -> SampledField:
    """Sample a kernel on ``grid`` as a tensor field.

    By default periodic grids get the periodized kernel and plain grids the
    kernel itself.  ``mu`` is sampled as a function of the node coordinate.
    """
    if kid.d != grid.d:
        raise UsageError("kernel dimension differs from grid dimension")
    if periodize is None:
        periodize = grid.periodic
    if periodize and not grid.periodic:
        raise UsageError("periodization needs a periodic grid")
    if kid.family != "mu":
        grid.require_resolves(kid.spectral_radius(), f"{kid.family} kernel")
    period = grid.period if (periodize and kid.family != "mu") else None
    return sample_tensor(kid.factor(period), grid)


def kernel_l1_mass(s: int, grid: GridSpec) -> tuple[float, float]:
    """``(pi^-d int V_{2^s}, pi^-d int |V_{2^s}|)`` over the truncated grid."""
    grid.require_resolves(2.0 ** (s + 1), "kernel_l1_mass")
    ax = grid.axis_grid()
    v = sample_tensor(lambda x: vallee_1d(s, x), ax)
    w = ax.weights_1d()
    signed = float(np.sum(w * v.values.real)) / math.pi
    absolute = lp_norm(v, 1) / math.pi
    return signed**grid.d, absolute**grid.d
