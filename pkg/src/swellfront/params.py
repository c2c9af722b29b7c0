"""Physical and dimensionless model parameters.

Units follow the calibration data: millimetres, minutes and grams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ParameterError

ReservoirData = Union[float, Sequence[Sequence[float]]]


def _normalize_reservoir(b: ReservoirData) -> tuple[tuple[float, float], ...]:
    if np.isscalar(b):
        return ((0.0, float(b)),)
    pts = tuple((float(t), float(v)) for t, v in b)
    if not pts:
        raise ParameterError("reservoir series is empty")
    times = [t for t, _ in pts]
    if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
        raise ParameterError("reservoir series times must be strictly increasing")
    return pts


@dataclass(frozen=True)
class SwellingLaw:
    """Linear swelling threshold ``sigma(s) = s / coeff`` in gram/mm^3.

    ``coeff = inf`` switches swelling off (``sigma == 0``), which recovers
    the one-phase Stefan problem with kinetic condition.
    """

    coeff: float = 10.0

    def __post_init__(self):
        if not (self.coeff > 0):
            raise ParameterError(f"swelling coefficient must be positive, got {self.coeff}")

    @property
    def slope(self) -> float:
        return 0.0 if math.isinf(self.coeff) else 1.0 / self.coeff

    def __call__(self, s):
        return s * self.slope


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional model inputs (defaults: dense-rubber calibration values).

    ``b`` is either a constant reservoir concentration or a sequence of
    ``(t, b)`` pairs interpolated piecewise-linearly (held constant outside
    the given range).
    """

    D: float = 3.66e-4
    beta: float = 0.564
    a0: float = 500.0
    s0: float = 0.01
    m0: float = 0.1
    b: ReservoirData = 1.0
    H: float = 2.5
    sigma_coeff: float = 10.0
    ell: float = 20.0
    x_ref: float = 10.0
    m_ref: float = 0.1
    T: float = 40.0

    def __post_init__(self):
        if not np.isscalar(self.b):
            object.__setattr__(self, "b", _normalize_reservoir(self.b))
        self.validate()

    def validate(self) -> None:
        checks = [
            (self.D > 0, "D must be positive"),
            (self.beta >= 0, "beta must be non-negative"),
            (self.a0 > 0, "a0 must be positive"),
            (self.H > 0, "H must be positive"),
            (self.m_ref > 0, "m_ref must be positive"),
            (self.x_ref > 0, "x_ref must be positive"),
            (self.m0 >= 0, "m0 must be non-negative"),
            (self.T > 0, "T must be positive"),
            (0 < self.s0 < self.ell, "need 0 < s0 < ell"),
            (self.sigma_coeff > 0, "sigma_coeff must be positive or inf"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ParameterError(msg)
        for t, v in self.reservoir:
            if not (math.isfinite(t) and math.isfinite(v)):
                raise ParameterError("reservoir series must be finite")

    @property
    def reservoir(self) -> tuple[tuple[float, float], ...]:
        return _normalize_reservoir(self.b)

    @property
    def swelling(self) -> SwellingLaw:
        return SwellingLaw(self.sigma_coeff)

    @property
    def t_ref(self) -> float:
        """Diffusive time scale ``x_ref**2 / D`` in minutes."""
        return self.x_ref**2 / self.D


@dataclass(frozen=True)
class DimensionlessParams:
    Bi: float
    A0: float
    H: float
    h0: float
    T_star: float
    ell_star: float
    u0: float
    sigma_slope: float
    b_times: tuple[float, ...] = field(default=(0.0,))
    b_values: tuple[float, ...] = field(default=(0.0,))

    def b_star(self, tau):
        return np.interp(tau, self.b_times, self.b_values)

    def sigma_star(self, h):
        """Scaled swelling threshold ``sigma(x_ref * h) / m_ref``."""
        return self.sigma_slope * h

    def equilibrium(self) -> tuple[float, float]:
        """Stationary concentration and front ``(u*, h*)`` for a constant reservoir.

        ``h*`` is ``inf`` when swelling is switched off.
        """
        u_star = self.b_values[-1] / self.H
        h_star = math.inf if self.sigma_slope == 0 else u_star / self.sigma_slope
        return u_star, h_star


def nondimensionalize(p: PhysicalParams) -> DimensionlessParams:
    p.validate()
    if p.s0 > p.x_ref:
        raise ParameterError("s0 must not exceed x_ref (scaled initial front above 1)")
    t_ref = p.t_ref
    res = p.reservoir
    return DimensionlessParams(
        Bi=p.beta * p.x_ref / p.D,
        A0=(p.x_ref / p.D) * p.m_ref * p.a0,
        H=p.H,
        h0=p.s0 / p.x_ref,
        T_star=p.T * p.D / p.x_ref**2,
        ell_star=p.ell / p.x_ref,
        u0=p.m0 / p.m_ref,
        sigma_slope=p.x_ref * p.swelling.slope / p.m_ref,
        b_times=tuple(t / t_ref for t, _ in res),
        b_values=tuple(v / p.m_ref for _, v in res),
    )


@dataclass(frozen=True)
class PhysicalSnapshot:
    """Concentration profile on the moving physical grid ``x_j = s * y_j``."""

    t: float
    s: float
    x: np.ndarray
    m: np.ndarray

    def profile(self, x):
        """Piecewise-linear concentration at arbitrary ``x`` in ``[0, s]``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x > self.s * (1 + 1e-12)):
            raise ValueError("x outside [0, s]")
        return np.interp(x, self.x, self.m)


def to_physical(tau: float, alpha, h: float, p: PhysicalParams) -> PhysicalSnapshot:
    if not h > 0:
        raise ValueError(f"front position must be positive, got h={h}")
    alpha = np.asarray(alpha, dtype=float)
    y = np.linspace(0.0, 1.0, alpha.size)
    s = p.x_ref * h
    return PhysicalSnapshot(t=tau * p.t_ref, s=s, x=s * y, m=p.m_ref * alpha)
