"""Rate experiments, reports and the named property suites.

A rate experiment builds the matching extremal witness at each level ``n``
on one shared periodic grid, scales it to unit decomposition norm, measures
the approximation error and compares it with the theoretical order.
"""

from __future__ import annotations

import csv
import json
import math
import platform
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .besov import BesovParams
from .extremal import ExtremalId, build_extremal, class_membership_check
from .field import MAX_NODES, GridSpec
from .omega import ModulusSpec, UsageError, eval_omega
from .spectral import SharpCutoffWarning, fourier_error, vallee_error

THEOREMS = ("T1", "T2", "T3-pq11", "T3-pqinf", "C1")

#: witness family and error flavour per theorem
_WITNESS = {
    "T1": ("F1", "vallee"),
    "T2": ("F2", "fourier"),
    "C1": ("F2", "fourier"),
    "T3-pqinf": ("F3", "vallee"),
    "T3-pq11": ("F4", "vallee"),
}


class ConfigError(UsageError):
    """Invalid or infeasible experiment configuration."""


def _parse_float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return math.inf
    return float(t)


def _parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        v = int(text)
        return v, v
    return int(lo), int(hi)


def _fmt(v) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, tuple):
        return f"{v[0]}..{v[1]}"
    return str(v)


@dataclass(frozen=True)
class ExperimentConfig:
    """One rate experiment.

    ``n_range = None`` means 2..6 in d = 1 and 2..4 otherwise.  Omega
    parameters left as ``None`` default to ``alpha = (r + d/p)/2``,
    ``l = floor(r) + 1``, ``gamma = (l - r)/2``.  ``period_exponent = None``
    picks the smallest period whose tail estimate is below ``tail_tol``.
    """

    theorem: str
    d: int = 1
    p: float | None = None
    q: float | None = None
    theta: float = 1.0
    omega_kind: str = "power"
    omega_r: float = 1.5
    omega_beta: float = 0.0
    omega_l: int | None = None
    omega_alpha: float | None = None
    omega_gamma: float | None = None
    n_range: tuple[int, int] | None = None
    period_exponent: int | None = None
    oversample: float = 2.0
    tail_tol: float = 1e-3
    stability_factor: float = 2.0
    slope_tol: float = 0.15
    normalize: bool = True
    output: str = "rates"

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ConfigError(f"unknown theorem {self.theorem!r}; expected one of {', '.join(THEOREMS)}")
        # fill the exponent pair the theorem fixes
        if self.theorem == "T3-pq11":
            pair = (1.0, 1.0)
        elif self.theorem == "T3-pqinf":
            pair = (math.inf, math.inf)
        else:
            pair = (self.p, math.inf)
        p = pair[0] if self.p is None else self.p
        q = pair[1] if self.q is None else self.q
        if p is None:
            raise ConfigError(f"{self.theorem} needs p")
        object.__setattr__(self, "p", float(p))
        object.__setattr__(self, "q", float(q))
        if self.n_range is None:
            object.__setattr__(self, "n_range", (2, 6) if self.d == 1 else (2, 4))
        object.__setattr__(self, "n_range", tuple(int(v) for v in self.n_range))
        self.validate()

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        th, d, p, q = self.theorem, self.d, self.p, self.q
        if d not in (1, 2, 3):
            raise ConfigError("d must be 1, 2 or 3")
        lo, hi = self.n_range
        if lo < 1 or hi < lo:
            raise ConfigError(f"n_range {lo}..{hi} must satisfy 1 <= lo <= hi")
        inv_p = 0.0 if p == math.inf else 1.0 / p
        if th == "T1":
            if q != math.inf:
                raise ConfigError("T1 requires q = inf")
            if not 1 <= p < math.inf:
                raise ConfigError("T1 requires 1 <= p < inf")
        if th in ("T2", "C1"):
            if not 1 < p < math.inf:
                raise ConfigError(f"{th} requires 1 < p < inf")
            if q != math.inf:
                raise ConfigError(f"{th} measures errors in L_inf (q = inf)")
        if th.startswith("T3") and (p, q) not in ((1.0, 1.0), (math.inf, math.inf)):
            raise ConfigError("T3 requires (p, q) = (1, 1) or (inf, inf)")
        if th == "C1":
            if self.omega_kind != "power":
                raise ConfigError("C1 concerns Omega(t) = t^r (omega_kind = power)")
            if not self.omega_r > d * inv_p:
                raise ConfigError("C1 requires r > d/p")
        if not (self.theta == math.inf or self.theta >= 1):
            raise ConfigError("theta must lie in [1, inf]")
        omega = self.omega()
        if th in ("T1", "T2") and not omega.alpha > d * inv_p:
            # the boundary alpha = d/p is outside the hypotheses; refuse it
            raise ConfigError(f"{th} requires alpha > d/p (alpha = {omega.alpha:g}, d/p = {d * inv_p:g})")
        grid = self.grid()
        if d >= 2 and grid.n_nodes > MAX_NODES:
            raise ConfigError(
                f"grid {grid.N}^{d} = {grid.n_nodes} nodes exceeds {MAX_NODES}; "
                "lower n_range or period_exponent"
            )
        if d == 1 and grid.N > MAX_NODES:
            raise ConfigError(f"grid of {grid.N} nodes exceeds {MAX_NODES}")

    # -- derived objects ----------------------------------------------------

    def omega(self) -> ModulusSpec:
        r = self.omega_r
        inv_p = 0.0 if self.p == math.inf else 1.0 / self.p
        l = self.omega_l if self.omega_l is not None else math.floor(r) + 1
        alpha = self.omega_alpha if self.omega_alpha is not None else (r + self.d * inv_p) / 2
        gamma = self.omega_gamma if self.omega_gamma is not None else (l - r) / 2
        try:
            return ModulusSpec(self.omega_kind, r, self.omega_beta, l, alpha, gamma)
        except UsageError as exc:
            raise ConfigError(str(exc)) from exc

    def params(self) -> BesovParams:
        try:
            return BesovParams(self.p, self.theta, self.omega())
        except UsageError as exc:
            raise ConfigError(str(exc)) from exc

    def resolved_period_exponent(self) -> int:
        if self.period_exponent is not None:
            return self.period_exponent
        # half-width pi 2^m; tail estimate 2 d / L
        m = 0
        while 2 * self.d / (math.pi * 2.0**m) > self.tail_tol:
            m += 1
        return m

    def grid(self) -> GridSpec:
        radius = 2.0 ** (self.n_range[1] + 2)
        return GridSpec.dyadic(self.d, radius, self.resolved_period_exponent(), self.oversample)

    def levels(self) -> list[int]:
        return list(range(self.n_range[0], self.n_range[1] + 1))

    # -- text format --------------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        types = {f.name: f for f in fields(cls)}
        kw = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep:
                raise ConfigError(f"line {lineno}: expected key = value")
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in kw:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            try:
                kw[key] = _convert(key, value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
        if "theorem" not in kw:
            raise ConfigError("config needs a theorem")
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                lines.append(f"{f.name} = {_fmt(v)}")
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {k: _fmt(v) if v is not None else None for k, v in asdict(self).items()}


_INT_KEYS = {"d", "omega_l", "period_exponent"}
_FLOAT_KEYS = {"p", "q", "theta", "omega_r", "omega_beta", "omega_alpha", "omega_gamma",
               "oversample", "tail_tol", "stability_factor", "slope_tol"}


def _convert(key: str, value: str):
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return _parse_float(value)
    if key == "n_range":
        return _parse_range(value)
    if key == "normalize":
        v = value.lower()
        if v not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(value)
        return v in ("true", "1", "yes")
    return value


# -- reports ----------------------------------------------------------------

def lsq_slope(x, y) -> float:
    """Least-squares slope of ``y`` against ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


@dataclass
class RateReport:
    theorem: str
    config: dict
    rows: list = field(default_factory=list)
    slope: float | None = None
    theory_slope: float | None = None
    deviation: float | None = None
    slope_defined: bool = False
    stability: float | None = None
    stability_factor: float = 2.0
    slope_tol: float = 0.15
    passed: bool = False
    environment: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def finalize(self) -> "RateReport":
        """Sort rows and recompute the fitted quantities."""
        self.rows.sort(key=lambda r: r["n"])
        if not self.rows:
            self.slope = self.theory_slope = self.deviation = self.stability = None
            self.slope_defined = False
            self.passed = False
            return self
        ratios = np.array([r["ratio"] for r in self.rows])
        self.stability = float(ratios.max() / ratios.min())
        ok = self.stability <= self.stability_factor
        if len(self.rows) >= 2:
            ns = [r["n"] for r in self.rows]
            self.slope = lsq_slope(ns, np.log2([r["error"] for r in self.rows]))
            self.theory_slope = lsq_slope(ns, np.log2([r["theory"] for r in self.rows]))
            self.deviation = abs(self.slope - self.theory_slope)
            self.slope_defined = True
            ok = ok and self.deviation <= self.slope_tol
        else:
            self.slope = self.theory_slope = self.deviation = None
            self.slope_defined = False
        self.passed = bool(ok)
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RateReport":
        return cls(**data)


def theory_value(config: ExperimentConfig, n: int) -> float:
    om = eval_omega(config.omega(), 2.0**-n)
    if config.theorem.startswith("T3"):
        return om
    inv_p = 1.0 / config.p
    if config.theorem == "C1":
        return 2.0 ** (-n * (config.omega_r - config.d * inv_p))
    return om * 2.0 ** (n * config.d * inv_p)


def _environment(config: ExperimentConfig, grid: GridSpec) -> dict:
    env = grid.describe()
    env.update(
        period_exponent=config.resolved_period_exponent(),
        omega=config.omega().describe(),
        witness=_WITNESS[config.theorem][0],
        numpy=np.__version__,
        python=platform.python_version(),
    )
    return env


def run_rate_experiment(config: ExperimentConfig) -> RateReport:
    """Measure the approximation error of the normalized witness over ``n_range``."""
    family, kind = _WITNESS[config.theorem]
    params = config.params()
    grid = config.grid()
    report = RateReport(
        config.theorem, config.as_dict(),
        stability_factor=config.stability_factor, slope_tol=config.slope_tol,
        environment=_environment(config, grid),
    )
    memberships = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SharpCutoffWarning)
        for n in config.levels():
            eid = ExtremalId(family, n, config.d, config.p, params.omega)
            normalizer = 1.0
            if config.normalize:
                mem = class_membership_check(eid, params, grid=grid)
                normalizer = mem.unit_normalizer
                memberships.append({"n": n, "norm": mem.norm, "normalizer": normalizer, "leak": mem.leak})
            f = build_extremal(ExtremalId(family, n, config.d, config.p, params.omega, normalizer), grid)
            if kind == "vallee":
                err = vallee_error(f, n, config.q)
            else:
                err = fourier_error(f, n, config.q)
            th = theory_value(config, n)
            report.rows.append({"n": n, "error": err, "theory": th, "ratio": err / th})
    report.environment["membership"] = memberships
    report.warnings = sorted({str(w.message) for w in caught if issubclass(w.category, SharpCutoffWarning)})
    return report.finalize()


def upper_bound_probe(config: ExperimentConfig, width: float = 1.0) -> list[dict]:
    """Error of a Gaussian of the given width scaled to unit decomposition
    norm, against ``theory * stability_factor`` at each level."""
    from .besov import besov_norm_decomposition
    from .field import sample

    _, kind = _WITNESS[config.theorem]
    params = config.params()
    grid = config.grid()
    flavor = "fourier-f" if kind == "fourier" else "vallee-q"
    g = sample(lambda *xs: np.exp(-sum(x * x for x in xs) / (2 * width * width)), grid)
    g = (1.0 / besov_norm_decomposition(g, params, flavor)) * g
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SharpCutoffWarning)
        for n in config.levels():
            err = vallee_error(g, n, config.q) if kind == "vallee" else fourier_error(g, n, config.q)
            bound = theory_value(config, n) * config.stability_factor
            rows.append({"n": n, "error": err, "bound": bound, "passed": err <= bound})
    return rows


CSV_HEADER = ("n", "error", "theory", "ratio")


def emit_report(report: RateReport, fmt: str, out_dir, stem: str = "rates") -> Path:
    """Write ``report`` as ``csv``, ``json`` or ``plotdata`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out / f"{stem}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in report.rows:
                w.writerow([r["n"], repr(float(r["error"])), repr(float(r["theory"])), repr(float(r["ratio"]))])
    elif fmt == "json":
        path = out / f"{stem}.json"
        path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    elif fmt == "plotdata":
        path = out / f"{stem}.dat"
        lines = ["# measured: n log2_error"]
        lines += [f"{r['n']} {math.log2(r['error'])!r}" for r in report.rows]
        # theory shifted by the mean log-ratio so the two lines overlay
        shift = float(np.mean([math.log2(r["ratio"]) for r in report.rows])) if report.rows else 0.0
        lines += ["", "", "# theory: n log2_theory_shifted"]
        lines += [f"{r['n']} {math.log2(r['theory']) + shift!r}" for r in report.rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        raise UsageError(f"unknown report format {fmt!r}")
    return path


# -- property suites --------------------------------------------------------

@dataclass
class SuiteResult:
    suite: str
    check: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteSummary:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [f"[{'PASS' if r.passed else 'FAIL'}] {r.suite}: {r.check} {r.detail}".rstrip() for r in self.results]


def run_property_suite(selection=None) -> SuiteSummary:
    """Run the named suites (all when ``selection`` is empty)."""
    from . import suites

    names = list(selection or suites.SUITES)
    unknown = [s for s in names if s not in suites.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(suites.SUITES)}")
    summary = SuiteSummary()
    for name in names:
        for check, passed, detail in suites.SUITES[name]():
            summary.results.append(SuiteResult(name, check, bool(passed), detail))
    return summary
