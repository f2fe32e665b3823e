"""Uniform grids on [-L, L]^d, sampled fields, and L_p norms.

Two grid flavours share one node set ``x_j = -L + j h``:

* plain grids (``periodic=False``) integrate with the composite trapezoid
  rule over [-L, L];
* periodic grids treat the nodes as one cell of period ``P = N h`` and
  integrate with the equal-weight trapezoid rule of a periodic integrand.
  :meth:`GridSpec.dyadic` builds periodic grids whose frequency lattice
  ``2 pi / P`` divides every dyadic breakpoint, which is what the spectral
  operators need to be exact.

A :class:`SampledField` may carry ``tensor_factors`` (one 1-D field per axis);
then ``values`` is assembled lazily and norms use the product structure.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .omega import DomainError, UsageError

#: refuse to assemble full grids with more nodes than this
MAX_NODES = 2**24
MAX_NODES_3D = 129**3


@dataclass(frozen=True)
class GridSpec:
    d: int
    L: float
    N: int
    periodic: bool = False

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise UsageError("dimension must be 1, 2 or 3")
        if self.N < 3 or self.N % 2 == 0:
            raise UsageError("N must be an odd integer >= 3 so that 0 is a node")
        if self.L <= 0:
            raise UsageError("half-width L must be positive")

    @classmethod
    def dyadic(cls, d: int, radius: float, period_exponent: int = 6, oversample: float = 2.0):
        """Periodic grid of period ``2 pi 2**m`` resolving spectral ``radius``.

        ``h <= pi / (oversample * radius)`` with ``N`` rounded up to an odd
        3-5-7-smooth size; the frequency spacing is
        ``2**-m`` so every ``2**s`` with ``s >= -m`` is a frequency node.
        """
        if period_exponent < 0:
            raise UsageError("period exponent must be nonnegative")
        period = 2 * math.pi * 2.0**period_exponent
        n_need = oversample * period * radius / math.pi
        N = odd_smooth(int(math.ceil(n_need - 1e-9)))
        h = period / N
        return cls(d, (N - 1) * h / 2, N, periodic=True)

    @property
    def h(self) -> float:
        return 2 * self.L / (self.N - 1)

    @property
    def M(self) -> int:
        return (self.N - 1) // 2

    @property
    def period(self) -> float:
        return self.N * self.h

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def n_nodes(self) -> int:
        return self.N**self.d

    @property
    def nyquist(self) -> float:
        """Largest spectral radius the grid resolves, ``pi / h``."""
        return math.pi / self.h

    @property
    def dlam(self) -> float:
        """Frequency spacing ``2 pi / (N h)``."""
        return 2 * math.pi / self.period

    def axis(self) -> np.ndarray:
        return (np.arange(self.N) - self.M) * self.h

    def frequencies(self) -> np.ndarray:
        """Per-axis frequency nodes in ascending (centred) order."""
        return (np.arange(self.N) - self.M) * self.dlam

    def axis_grid(self) -> "GridSpec":
        return GridSpec(1, self.L, self.N, self.periodic)

    def with_dim(self, d: int) -> "GridSpec":
        return GridSpec(d, self.L, self.N, self.periodic)

    def weights_1d(self) -> np.ndarray:
        w = np.full(self.N, self.h)
        if not self.periodic:
            w[0] = w[-1] = self.h / 2
        return w

    def resolves(self, radius: float) -> bool:
        return radius <= self.nyquist * (1 + 1e-12)

    def require_resolves(self, radius: float, what: str = "field"):
        if not self.resolves(radius):
            raise UsageError(
                f"{what}: spectral radius {radius:g} exceeds grid Nyquist {self.nyquist:g}"
            )

    def aligned(self, frequency: float) -> bool:
        """Whether ``frequency`` is an integer multiple of the frequency spacing."""
        k = frequency / self.dlam
        return self.periodic and abs(k - round(k)) < 1e-9 * max(1.0, abs(k))

    def bin_quantization(self, frequency: float) -> float:
        """Distance from ``frequency`` to the nearest frequency node."""
        k = frequency / self.dlam
        return abs(k - round(k)) * self.dlam

    def tail_bound(self) -> float:
        """Per-axis relative tail estimate ``2 / L`` for fields decaying like x**-2."""
        return self.d * 2.0 / self.L

    def describe(self) -> dict:
        return {
            "d": self.d,
            "L": self.L,
            "N": self.N,
            "h": self.h,
            "periodic": self.periodic,
            "period": self.period,
            "nyquist": self.nyquist,
            "tail_bound": self.tail_bound(),
        }


def odd_smooth(n: int) -> int:
    """Smallest odd ``3^a 5^b 7^c >= max(n, 3)``; FFTs of these sizes stay fast."""
    n = max(n, 3)
    best = 7 ** math.ceil(math.log(n, 7) + 1e-12)
    p3 = 1
    while p3 < best:
        p35 = p3
        while p35 < best:
            m = p35
            while m < n:
                m *= 7
            best = min(best, m)
            p35 *= 5
        p3 *= 3
    return best


def _check_assemble(grid: GridSpec):
    limit = MAX_NODES_3D if grid.d == 3 else MAX_NODES
    if grid.n_nodes > limit:
        raise UsageError(
            f"full grid of {grid.N}^{grid.d} nodes exceeds the desk-scale limit; "
            "use the tensor path"
        )


class SampledField:
    """Complex samples of a function on a :class:`GridSpec`.

    Treated as immutable: operations return new fields.
    """

    def __init__(self, grid: GridSpec, values=None, tensor_factors: Sequence["SampledField"] | None = None):
        self.grid = grid
        if tensor_factors is not None:
            tensor_factors = list(tensor_factors)
            if len(tensor_factors) != grid.d:
                raise UsageError("need one tensor factor per axis")
            ax = grid.axis_grid()
            for fac in tensor_factors:
                if fac.grid != ax:
                    raise UsageError("tensor factor lives on a different 1-D grid")
        if values is None and tensor_factors is None:
            raise UsageError("SampledField needs values or tensor factors")
        if values is not None:
            values = np.asarray(values).view()
            if values.shape != grid.shape:
                raise UsageError(f"values shape {values.shape} != grid shape {grid.shape}")
            values.setflags(write=False)
        self._values = values
        self.tensor_factors = tensor_factors

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            if self.grid.d == 1:
                self._values = self.tensor_factors[0].values
            else:
                _check_assemble(self.grid)
                out = self.tensor_factors[0].values
                for fac in self.tensor_factors[1:]:
                    out = np.multiply.outer(out, fac.values)
                out.setflags(write=False)
                self._values = out
        return self._values

    @property
    def is_tensor(self) -> bool:
        return self.tensor_factors is not None

    def __repr__(self):
        kind = "tensor" if self.is_tensor else "full"
        return f"SampledField({kind}, d={self.grid.d}, N={self.grid.N}, L={self.grid.L:.6g})"

    def _same_grid(self, other):
        if not isinstance(other, SampledField):
            return NotImplemented
        if other.grid != self.grid:
            raise UsageError("fields live on different grids")
        return True

    def __add__(self, other):
        if self._same_grid(other) is NotImplemented:
            return NotImplemented
        return SampledField(self.grid, self.values + other.values)

    def __sub__(self, other):
        if self._same_grid(other) is NotImplemented:
            return NotImplemented
        return SampledField(self.grid, self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, SampledField):
            return NotImplemented
        if self.is_tensor:
            facs = list(self.tensor_factors)
            facs[0] = SampledField(facs[0].grid, c * facs[0].values)
            if self.grid.d == 1:
                return SampledField(self.grid, facs[0].values, tensor_factors=facs)
            return SampledField(self.grid, tensor_factors=facs)
        return SampledField(self.grid, c * self.values)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def max_abs(self) -> float:
        if self.is_tensor:
            return float(np.prod([np.abs(f.values).max() for f in self.tensor_factors]))
        return float(np.abs(self.values).max())

    def real(self) -> "SampledField":
        return SampledField(self.grid, self.values.real.astype(complex))


def zeros(grid: GridSpec) -> SampledField:
    return SampledField(grid, np.zeros(grid.shape, dtype=complex))


def sample(rule: Callable, grid: GridSpec) -> SampledField:
    """Evaluate ``rule(x_1, ..., x_d)`` on broadcastable coordinate arrays."""
    ax = grid.axis()
    coords = np.meshgrid(*([ax] * grid.d), indexing="ij", sparse=True)
    vals = np.broadcast_to(np.asarray(rule(*coords), dtype=complex), grid.shape).copy()
    return SampledField(grid, vals)


def sample_tensor(rules: Callable | Sequence[Callable], grid: GridSpec) -> SampledField:
    """Separable sampling: one 1-D rule per axis (or one shared rule)."""
    if callable(rules):
        rules = [rules] * grid.d
    if len(rules) != grid.d:
        raise UsageError("need one rule per axis")
    ax_grid = grid.axis_grid()
    ax = ax_grid.axis()
    cache = {}
    facs = []
    for rule in rules:
        if id(rule) not in cache:
            cache[id(rule)] = SampledField(ax_grid, np.asarray(rule(ax), dtype=complex))
        facs.append(cache[id(rule)])
    if grid.d == 1:
        return SampledField(grid, facs[0].values, tensor_factors=facs)
    return SampledField(grid, tensor_factors=facs)


def _check_p(p):
    if not (p == math.inf or p >= 1):
        raise DomainError(f"L_p norm needs p >= 1 or p = inf, got {p}")


def lp_norm(f: SampledField, p: float) -> float:
    """Trapezoid-rule ``L_p`` norm over the grid; ``p = inf`` is the node max."""
    _check_p(p)
    if f.is_tensor and f._values is None:
        return tensor_norm(f.tensor_factors, p)
    a = np.abs(f.values)
    top = float(a.max())
    if p == math.inf or top == 0.0:
        return top
    w = f.grid.weights_1d()
    # scale by the max so |f|^p neither underflows nor overflows
    acc = (a / top) ** p
    # fixed axis order keeps the quadrature reproducible
    for _ in range(f.grid.d):
        acc = np.tensordot(acc, w, axes=([0], [0]))
    return top * float(acc) ** (1.0 / p)


def tensor_norm(factors: Sequence[SampledField], p: float) -> float:
    """``||prod g_j||_p = prod ||g_j||_p`` for 1-D factors on one grid."""
    _check_p(p)
    if not factors:
        raise UsageError("tensor_norm needs at least one factor")
    g0 = factors[0].grid
    for fac in factors:
        if fac.grid.d != 1 or fac.grid != g0:
            raise UsageError("tensor factors must share one 1-D grid")
    return float(np.prod([lp_norm(fac, p) for fac in factors]))


def assemble(f: SampledField) -> SampledField:
    """Return the same field with full values and no factor metadata."""
    return SampledField(f.grid, f.values)


# -- serialization ---------------------------------------------------------

_HEADER = struct.Struct("<qqd")


def save_binary(f: SampledField, path) -> None:
    """Header ``(d, N, L)`` as little-endian int64, int64, float64, then
    row-major complex128 samples."""
    vals = np.ascontiguousarray(f.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(f.grid.d, f.grid.N, f.grid.L))
        fh.write(vals.tobytes(order="C"))


def load_binary(path, periodic: bool = False) -> SampledField:
    """Inverse of :func:`save_binary`; the periodic flag is not stored."""
    raw = Path(path).read_bytes()
    d, N, L = _HEADER.unpack_from(raw)
    grid = GridSpec(int(d), float(L), int(N), periodic)
    vals = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if vals.size != grid.n_nodes:
        raise UsageError("binary payload does not match header")
    return SampledField(grid, vals.reshape(grid.shape).astype(complex))


def export_csv(f: SampledField, path, axis: int = 0) -> None:
    """Write the 1-D slice through the origin along ``axis`` as x,re,im."""
    vals = f.values
    idx = [f.grid.M] * f.grid.d
    idx[axis] = slice(None)
    line = vals[tuple(idx)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im"])
        for x, v in zip(f.grid.axis(), line):
            w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
