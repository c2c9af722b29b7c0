"""Power-law characterization of front curves and comparison with measurements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ExperimentDataError

DEFAULT_WINDOW_START = 1.0  # minutes; skips the initial transient layer and log(0)


@dataclass(frozen=True)
class Record:
    t: float
    front: float
    length: float = math.nan
    area: float = math.nan


@dataclass(frozen=True)
class ExperimentSeries:
    """Measured front positions for one material, starting at ``t = 0``."""

    records: tuple[Record, ...]
    material: str

    def __post_init__(self):
        recs = tuple(self.records)
        object.__setattr__(self, "records", recs)
        if not recs:
            raise ExperimentDataError("experiment series is empty")
        if recs[0].t != 0 or recs[0].front != 0:
            raise ExperimentDataError("series must start with t=0 and front=0")
        ts = [r.t for r in recs]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ExperimentDataError("measurement times must be strictly increasing")

    def __len__(self):
        return len(self.records)

    @property
    def t(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    @property
    def front(self) -> np.ndarray:
        return np.array([r.front for r in self.records])

    def append(self, record: Record) -> "ExperimentSeries":
        """Return a copy with an extra (later) measurement."""
        return ExperimentSeries(self.records + (record,), self.material)


@dataclass(frozen=True)
class FitResult:
    gamma: float
    window: tuple[float, float]
    rmse_log: float
    n_points: int
    log_prefactor: float = 0.0
    with_intercept: bool = False

    @property
    def regime(self) -> str:
        return classify(self.gamma)


def classify(gamma: float) -> str:
    if gamma > 0.5:
        return "super-diffusive"
    if gamma < 0.5:
        return "sub-diffusive"
    return "diffusive"


def fit_power_law(t, s, window: tuple[float, float | None] = (DEFAULT_WINDOW_START, None),
                  intercept: bool = False) -> FitResult:
    """Least-squares fit of ``log s = gamma log t (+ c)`` on ``window``.

    The default model is ``s = t**gamma`` without a prefactor. With
    ``intercept=True`` the fit is ``s = C t**gamma`` and the result is
    invariant to rescaling ``s``.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if t.shape != s.shape or t.ndim != 1:
        raise ValueError("t and s must be 1-D arrays of equal length")
    lo, hi = window
    hi = t.max() if hi is None else hi
    if not lo > 0:
        raise ValueError(f"fit window must exclude t <= 0, got start {lo}")
    if hi < lo:
        raise ValueError("fit window end precedes its start")
    sel = (t >= lo) & (t <= hi)
    if np.any(s[sel] <= 0):
        raise ValueError("front positions must be positive inside the fit window")
    n = int(sel.sum())
    if n < 3:
        raise ValueError(f"need at least 3 points in the fit window, got {n}")
    lt = np.log(t[sel])
    ls = np.log(s[sel])
    if intercept:
        lt_mean = lt.mean()
        gamma = float(np.sum((lt - lt_mean) * (ls - ls.mean())) / np.sum((lt - lt_mean) ** 2))
        c = float(ls.mean() - gamma * lt_mean)
    else:
        gamma = float(np.dot(lt, ls) / np.dot(lt, lt))
        c = 0.0
    resid = ls - (gamma * lt + c)
    return FitResult(
        gamma=gamma,
        window=(float(lo), float(hi)),
        rmse_log=float(np.sqrt(np.mean(resid**2))),
        n_points=n,
        log_prefactor=c,
        with_intercept=intercept,
    )


@dataclass(frozen=True)
class ComparisonRow:
    t: float
    measured: float
    simulated: float
    beyond_span: bool

    @property
    def error(self) -> float:
        return self.simulated - self.measured


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    material: str = ""

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows if not r.beyond_span])

    @property
    def max_error(self) -> float:
        e = self.errors
        return float(np.max(np.abs(e))) if e.size else math.nan

    @property
    def rmse(self) -> float:
        e = self.errors
        return float(np.sqrt(np.mean(e**2))) if e.size else math.nan

    @property
    def n_flagged(self) -> int:
        return sum(r.beyond_span for r in self.rows)


def compare(t, s, series: ExperimentSeries) -> ComparisonReport:
    """Interpolate the simulated front (linearly in t) at each measurement time.

    Measurements outside the simulated time span are flagged and left out
    of the error statistics; nothing is extrapolated.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if len(series) == 0:
        raise ValueError("empty experiment series")
    rows = []
    for rec in series.records:
        outside = rec.t < t[0] or rec.t > t[-1]
        sim = math.nan if outside else float(np.interp(rec.t, t, s))
        rows.append(ComparisonRow(rec.t, rec.front, sim, outside))
    return ComparisonReport(tuple(rows), series.material)


@dataclass(frozen=True)
class GammaTable:
    a0_values: tuple[float, ...]
    sigma_coeffs: tuple[float, ...]
    gamma: np.ndarray  # rows follow a0_values, columns sigma_coeffs
    window: tuple[float, float]

    def __getitem__(self, key: tuple[float, float]) -> float:
        a0, c = key
        return float(self.gamma[self.a0_values.index(a0), self.sigma_coeffs.index(c)])

    def format(self, digits: int = 8) -> str:
        head = "a0 \\ sigma".ljust(12) + "".join(f"s/{c:g}".rjust(digits + 6) for c in self.sigma_coeffs)
        lines = [head]
        for a0, row in zip(self.a0_values, self.gamma):
            lines.append(f"{a0:<12g}" + "".join(f"{g:.{digits}f}".rjust(digits + 6) for g in row))
        lines.append(f"fit window: t in [{self.window[0]:g}, {self.window[1]:g}] min")
        return "\n".join(lines)


def gamma_table(points: Sequence, window: tuple[float, float | None] = (DEFAULT_WINDOW_START, None),
                intercept: bool = False) -> GammaTable:
    """Fit every sweep point and arrange the exponents by ``(a0, sigma_coeff)``.

    ``points`` are :class:`swellfront.engine.SweepPoint` objects (anything
    with ``a0``, ``sigma_coeff``, ``result.t`` and ``result.s``).
    """
    a0s: list[float] = []
    cs: list[float] = []
    for p in points:
        if p.result is None:
            raise ValueError(f"sweep point a0={p.a0:g}, sigma_coeff={p.sigma_coeff:g} failed: {p.error}")
        if p.a0 not in a0s:
            a0s.append(p.a0)
        if p.sigma_coeff not in cs:
            cs.append(p.sigma_coeff)
    g = np.full((len(a0s), len(cs)), np.nan)
    spans = []
    for p in points:
        fit = fit_power_law(p.result.t, p.result.s, window, intercept=intercept)
        g[a0s.index(p.a0), cs.index(p.sigma_coeff)] = fit.gamma
        spans.append(fit.window)
    win = (min(w[0] for w in spans), max(w[1] for w in spans))
    return GammaTable(tuple(a0s), tuple(cs), g, win)
