"""Discrete Fourier analysis on the grid and the dyadic operators built on it.

Conventions (per axis): the transform of samples ``f_j`` at ``x_j`` is

    F(lam_k) = (2 pi)^{-1/2} h sum_j f_j exp(-i lam_k x_j),   lam_k = k * 2 pi / (N h)

and the inverse uses ``(2 pi)^{-1/2} dlam``; the pair is unitary for the
equal-weight quadrature.  Convolution carries the same ``(2 pi)^{-d/2}``
factor, so ``forward(g1 * g2) = forward(g1) forward(g2)``.

``sigma(f, s)`` is the multiplier ``(2/pi)^{d/2} mu_{2^s}``, whose plateau is 1;
``q_block`` and ``vallee_partial_sum`` are built from it.  The sharp-cutoff
sums ``S_{2^s}`` use the closed box ``|lam_j| <= 2^s``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .field import GridSpec, SampledField, lp_norm
from .omega import UsageError

_SHIFT = np.fft.ifftshift
_UNSHIFT = np.fft.fftshift


class SharpCutoffWarning(UserWarning):
    """Sharp-cutoff partial sums are not uniformly bounded on L_1 or L_inf."""


@dataclass(frozen=True)
class SpectralField:
    """Transform values at the centred frequency nodes of ``grid``."""

    grid: GridSpec
    values: np.ndarray

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies()

    def l2_norm(self) -> float:
        a = np.abs(self.values)
        top = float(a.max())
        if top == 0.0:
            return 0.0
        return top * float(np.sqrt(np.sum((a / top) ** 2) * self.grid.dlam**self.grid.d))


def _fwd(arr, h):
    d = arr.ndim
    return (h / math.sqrt(2 * math.pi)) ** d * _UNSHIFT(np.fft.fftn(_SHIFT(arr)))


def _inv(arr, h):
    d = arr.ndim
    return (math.sqrt(2 * math.pi) / h) ** d * _UNSHIFT(np.fft.ifftn(_SHIFT(arr)))


def _spectrum_of(f: SampledField) -> np.ndarray:
    # fields are immutable, so the transform is cached on the instance
    sp = getattr(f, "_spectrum", None)
    if sp is None:
        sp = _fwd(np.asarray(f.values, dtype=complex), f.grid.h)
        sp.setflags(write=False)
        f._spectrum = sp
    return sp


def forward_transform(f: SampledField) -> SpectralField:
    return SpectralField(f.grid, _spectrum_of(f))


def inverse_transform(F: SpectralField) -> SampledField:
    return SampledField(F.grid, _inv(F.values, F.grid.h))


# -- multipliers -----------------------------------------------------------

def sigma_multiplier_1d(s: int, lam) -> np.ndarray:
    """Normalized trapezoid ``sqrt(2/pi) mu_{2^s}``: 1 on ``|lam| <= 2^s``."""
    return kernels.CONSTANTS["sigma_scale"] * kernels.mu_1d(s, lam)


def box_multiplier_1d(s: int, lam) -> np.ndarray:
    """Closed-box indicator ``|lam| <= 2^s`` (boundary bin kept with weight 1)."""
    edge = 2.0**s
    lam = np.abs(np.asarray(lam, dtype=float))
    return (lam <= edge * (1 + 1e-12)).astype(float)


def apply_separable(f: SampledField, factor: Callable[[np.ndarray], np.ndarray]) -> SampledField:
    """Apply the multiplier ``prod_j factor(lam_j)``.

    Tensor fields stay tensor fields (the multiplier is applied per factor).
    """
    grid = f.grid
    m1 = np.asarray(factor(grid.frequencies()), dtype=float)
    if f.is_tensor and f._values is None:
        facs = [
            SampledField(fac.grid, _inv(m1 * _spectrum_of(fac), grid.h))
            for fac in f.tensor_factors
        ]
        return SampledField(grid, tensor_factors=facs)
    F = _spectrum_of(f)
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = grid.N
        F = F * m1.reshape(shape)
    return SampledField(grid, _inv(F, grid.h))


def convolve(g1: SampledField, g2: SampledField) -> SampledField:
    """``(2 pi)^{-d/2} int g1(x - u) g2(u) du`` with periodic wrap."""
    if g1.grid != g2.grid:
        raise UsageError("convolve: fields live on different grids")
    F = forward_transform(g1).values * forward_transform(g2).values
    return inverse_transform(SpectralField(g1.grid, F))


def young_check(g1: SampledField, g2: SampledField, p: float) -> dict:
    """Both sides of ``||g1 * g2||_p <= (2 pi)^{-d/2} ||g1||_1 ||g2||_p``."""
    d = g1.grid.d
    lhs = lp_norm(convolve(g1, g2), p)
    rhs = (2 * math.pi) ** (-d / 2) * lp_norm(g1, 1) * lp_norm(g2, p)
    return {"p": p, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs, "passed": lhs <= rhs * (1 + 1e-12)}


# -- de la Vallee Poussin operators ----------------------------------------

def _require_level(grid: GridSpec, s: int, what: str):
    if s < 0:
        raise UsageError(f"{what}: level must be nonnegative")
    grid.require_resolves(2.0 ** (s + 1), what)


def sigma(f: SampledField, s: int) -> SampledField:
    """de la Vallee Poussin smoothing ``sigma_{2^s}(f)`` as a spectral multiplier."""
    _require_level(f.grid, s, "sigma")
    return apply_separable(f, lambda lam: sigma_multiplier_1d(s, lam))


def sigma_by_convolution(f: SampledField, s: int) -> SampledField:
    """Cross-check path ``(2/pi)^{d/2} (V_{2^s} * f)``."""
    _require_level(f.grid, s, "sigma")
    v = kernels.sample_kernel(kernels.KernelId("vallee", s, f.grid.d), f.grid)
    return kernels.CONSTANTS["sigma_scale"] ** f.grid.d * convolve(v, f)


def q_block(f: SampledField, s: int) -> SampledField:
    """``q_0 = sigma_1``, ``q_s = sigma_{2^s} - sigma_{2^{s-1}}``."""
    if s == 0:
        return sigma(f, 0)
    return sigma(f, s) - sigma(f, s - 1)


def vallee_partial_sum(f: SampledField, n: int) -> SampledField:
    """``V_n(f) = sum_{s<=n} q_s(f)``.

    Summed block by block; an unassembled tensor field goes straight to
    ``sigma(f, n)``, which is the same operator.
    """
    if n < 0:
        raise UsageError("partial sum order must be nonnegative")
    if f.is_tensor and f._values is None and f.grid.d > 1:
        return sigma(f, n)
    total = q_block(f, 0)
    for s in range(1, n + 1):
        total = total + q_block(f, s)
    return total


def _difference_norm(f, g, q):
    return lp_norm(f - g, q)


def vallee_error(f: SampledField, n: int, q: float) -> float:
    """``E_n(f)_q = ||f - V_{n-1}(f)||_q``."""
    if n < 1:
        raise UsageError("vallee_error needs n >= 1")
    return _difference_norm(f, vallee_partial_sum(f, n - 1), q)


# -- sharp-cutoff (Fourier) operators --------------------------------------

def sharp_sum(f: SampledField, s: int) -> SampledField:
    """``S_{2^s}(f)``: closed-box cutoff at ``2^s``."""
    if s < 0:
        raise UsageError("sharp_sum: level must be nonnegative")
    f.grid.require_resolves(2.0**s, "sharp_sum")
    return apply_separable(f, lambda lam: box_multiplier_1d(s, lam))


def sharp_by_convolution(f: SampledField, s: int) -> SampledField:
    """Cross-check path ``pi^{-d} int f(t) D_{2^s}(x - t) dt``."""
    d = f.grid.d
    dk = kernels.sample_kernel(kernels.KernelId("dirichlet", 2**s, d), f.grid)
    return (math.sqrt(2 * math.pi) / math.pi) ** d * convolve(dk, f)


def fourier_block(f: SampledField, s: int) -> SampledField:
    """``f_(0) = S_1 f``, ``f_(s) = S_{2^s} f - S_{2^{s-1}} f``."""
    if s == 0:
        return sharp_sum(f, 0)
    return sharp_sum(f, s) - sharp_sum(f, s - 1)


def fourier_partial_sum(f: SampledField, n: int) -> SampledField:
    """``S_n(f) = sum_{s<=n} f_(s)``."""
    if n < 0:
        raise UsageError("partial sum order must be nonnegative")
    if f.is_tensor and f._values is None and f.grid.d > 1:
        return sharp_sum(f, n)
    total = fourier_block(f, 0)
    for s in range(1, n + 1):
        total = total + fourier_block(f, s)
    return total


def fourier_error(f: SampledField, n: int, q: float) -> float:
    """``E'_n(f)_q = ||f - S_n(f)||_q``; warns for ``q`` in {1, inf}."""
    if q == 1 or q == math.inf:
        warnings.warn(
            f"sharp-cutoff error in L_{q}: partial sums are not uniformly bounded there",
            SharpCutoffWarning,
            stacklevel=2,
        )
    return _difference_norm(f, fourier_partial_sum(f, n), q)


# -- spectral localization -------------------------------------------------

def _axis_energy(fac: SampledField) -> np.ndarray:
    return np.abs(_spectrum_of(fac)) ** 2


def band_energy(f: SampledField, lo: float, hi: float) -> tuple[float, float]:
    """``(energy with lo <= max_j |lam_j| <= hi, total energy)``.

    Energies are sums of ``|F|^2`` over frequency nodes; a relative slack of
    ``1e-9`` bins keeps nodes that sit exactly on a breakpoint inside.
    """
    grid = f.grid
    lam = np.abs(grid.frequencies())
    tol = 1e-9 * grid.dlam
    inner = lam < lo - tol  # strictly inside the excluded core
    outer = lam <= hi + tol
    if f.is_tensor and f._values is None:
        e = [_axis_energy(fac) for fac in f.tensor_factors]
        total = float(np.prod([ei.sum() for ei in e]))
        in_hi = float(np.prod([ei[outer].sum() for ei in e]))
        in_lo = float(np.prod([ei[inner].sum() for ei in e])) if lo > 0 else 0.0
        return in_hi - in_lo, total
    E = np.abs(_spectrum_of(f)) ** 2
    mesh = np.meshgrid(*([lam] * grid.d), indexing="ij", sparse=True)
    mx = mesh[0]
    for m in mesh[1:]:
        mx = np.maximum(mx, m)
    mask = (mx <= hi + tol) & (mx >= lo - tol)
    return float(E[np.broadcast_to(mask, E.shape)].sum()), float(E.sum())


def band_leak(f: SampledField, lo: float, hi: float) -> float:
    """Relative spectral energy outside ``lo <= max_j |lam_j| <= hi``."""
    inside, total = band_energy(f, lo, hi)
    if total == 0:
        return 0.0
    return max(0.0, total - inside) / total


def max_spectral_radius(f: SampledField, rel_tol: float = 1e-12) -> np.ndarray:
    """Per-axis largest ``|lam|`` carrying more than ``rel_tol`` of the energy."""
    grid = f.grid
    lam = np.abs(grid.frequencies())
    E = np.abs(_spectrum_of(f)) ** 2
    total = E.sum()
    radii = []
    for ax in range(grid.d):
        other = tuple(i for i in range(grid.d) if i != ax)
        marg = E.sum(axis=other) if other else E
        order = np.argsort(lam)[::-1]
        tail = np.cumsum(marg[order])
        beyond = order[tail > rel_tol * total]
        radii.append(float(lam[beyond[0]]) if beyond.size else 0.0)
    return np.array(radii)


# -- dyadic decompositions -------------------------------------------------

@dataclass
class DyadicBlocks:
    """Blocks ``q_s(f)`` (``vallee-q``) or ``f_(s)`` (``fourier-f``), s = 0..s_max."""

    blocks: list
    flavor: str

    def band(self, s: int) -> tuple[float, float]:
        if self.flavor == "vallee-q":
            return (0.0 if s == 0 else 2.0 ** (s - 1), 2.0 ** (s + 1))
        return (0.0 if s == 0 else 2.0 ** (s - 1), 2.0**s)

    def norms(self, p: float) -> np.ndarray:
        return np.array([lp_norm(b, p) for b in self.blocks])

    def leaks(self, reference: float | None = None) -> np.ndarray:
        """Energy outside each block's band, relative to the block itself or,
        with ``reference``, to that energy (use the input's energy so that
        round-off blocks of size 1e-16 do not register as leaks)."""
        if reference is None:
            return np.array([band_leak(b, *self.band(s)) for s, b in enumerate(self.blocks)])
        out = []
        for s, b in enumerate(self.blocks):
            inside, total = band_energy(b, *self.band(s))
            out.append(max(0.0, total - inside) / reference if reference > 0 else 0.0)
        return np.array(out)

    def total(self) -> SampledField:
        out = self.blocks[0]
        for b in self.blocks[1:]:
            out = out + b
        return out

    def write_csv(self, path, p: float) -> None:
        """Rows ``(s, norm, band_energy_leak)``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "norm", "band_energy_leak"])
            for s, (nrm, leak) in enumerate(zip(self.norms(p), self.leaks())):
                w.writerow([s, repr(float(nrm)), repr(float(leak))])


def top_level(grid: GridSpec, flavor: str = "vallee-q") -> int:
    """Largest s whose block operator the grid resolves."""
    reach = 1 if flavor == "vallee-q" else 0
    return int(math.floor(math.log2(grid.nyquist) + 1e-12)) - reach


def dyadic_blocks(f: SampledField, s_max: int | None = None, flavor: str = "vallee-q") -> DyadicBlocks:
    if flavor not in ("vallee-q", "fourier-f"):
        raise UsageError(f"unknown block flavor {flavor!r}")
    if s_max is None:
        s_max = top_level(f.grid, flavor)
    smooth = sigma if flavor == "vallee-q" else sharp_sum
    # consecutive differences of one pass of smoothings; same blocks as
    # q_block / fourier_block without recomputing each smoothing twice
    sm = [smooth(f, s) for s in range(s_max + 1)]
    blocks = [sm[0]] + [sm[s] - sm[s - 1] for s in range(1, s_max + 1)]
    return DyadicBlocks(blocks, flavor)
