"""Full simulation runs: physical config in, physical front curve out."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import IntegrationError, ParameterError
from .fem import FemSystem, assemble
from .integrator import FAILURE, IntegratorConfig, Trajectory, integrate
from .params import DimensionlessParams, PhysicalParams, PhysicalSnapshot, nondimensionalize, to_physical

log = logging.getLogger(__name__)

# (a0, sigma_coeff) per material; every other parameter is shared
MATERIALS = {
    "dense": {"a0": 500.0, "sigma_coeff": 10.0},
    "foam": {"a0": 2000.0, "sigma_coeff": 50.0},
}


@dataclass(frozen=True)
class RunConfig:
    """One simulation run.

    ``output_times`` (minutes) default to ``n_output`` evenly spaced points
    on ``[0, T]``; ``profile_times`` default to ``0, T/4, T/2, T``.
    """

    physical: PhysicalParams = field(default_factory=PhysicalParams)
    N: int = 100
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    output_times: tuple[float, ...] | None = None
    profile_times: tuple[float, ...] | None = None
    n_output: int = 401

    def __post_init__(self):
        for name in ("output_times", "profile_times"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(float(t) for t in v))
        if int(self.N) != self.N or self.N < 2:
            raise ParameterError("N must be an integer >= 2")
        if self.n_output < 2:
            raise ParameterError("n_output must be at least 2")
        T = self.physical.T
        for t in self.times() + self.snapshot_times():
            if not (0.0 <= t <= T):
                raise ParameterError(f"output time {t} outside [0, T={T}]")
        ot = self.times()
        if any(b <= a for a, b in zip(ot, ot[1:])):
            raise ParameterError("output_times must be strictly increasing")

    def times(self) -> tuple[float, ...]:
        if self.output_times is not None:
            return self.output_times
        return tuple(np.linspace(0.0, self.physical.T, self.n_output).tolist())

    def snapshot_times(self) -> tuple[float, ...]:
        if self.profile_times is not None:
            return self.profile_times
        T = self.physical.T
        return (0.0, 0.25 * T, 0.5 * T, T)

    def with_material(self, material: str) -> "RunConfig":
        try:
            overrides = MATERIALS[material]
        except KeyError:
            raise ParameterError(f"unknown material {material!r}") from None
        return replace(self, physical=replace(self.physical, **overrides))


@dataclass
class RunResult:
    config: RunConfig
    dimensionless: DimensionlessParams
    t: np.ndarray
    s: np.ndarray
    profiles: list[PhysicalSnapshot]
    trajectory: Trajectory
    system: FemSystem

    @property
    def front_curve(self) -> np.ndarray:
        """``(n, 2)`` array of ``(t [min], s [mm])``."""
        return np.column_stack([self.t, self.s])

    @property
    def reason(self) -> str:
        return self.trajectory.reason

    @property
    def Bi(self) -> float:
        return self.dimensionless.Bi

    @property
    def A0(self) -> float:
        return self.dimensionless.A0


def run(cfg: RunConfig) -> RunResult:
    """Nondimensionalize, assemble, integrate and map back to physical units.

    Raises :class:`IntegrationError` (with the time and front reached) if
    the integrator fails. A front that reaches ``ell`` truncates the curve
    and is reported through ``RunResult.reason``.
    """
    p = cfg.physical
    dim = nondimensionalize(p)
    sys = assemble(cfg.N)
    out_t = np.asarray(cfg.times())
    prof_t = np.asarray(cfg.snapshot_times())
    all_t = np.union1d(out_t, prof_t)
    tau = all_t * p.D / p.x_ref**2
    icfg = replace(cfg.integrator, sample_times=tuple(tau))
    traj = integrate(sys, dim, icfg)
    if traj.reason == FAILURE:
        h = float(traj.final_state[-1]) if traj.final_state.size else float("nan")
        raise IntegrationError(f"a0={p.a0:g}, sigma_coeff={p.sigma_coeff:g}: {traj.message}",
                               tau=traj.final_tau, h=h)
    n = traj.tau.size
    reached = all_t[:n]
    keep = np.isin(reached, out_t)
    # report the requested times rather than tau * t_ref round-trips
    profiles = [
        replace(to_physical(traj.tau[i], traj.alpha[i], traj.h[i], p), t=float(reached[i]))
        for i in np.flatnonzero(np.isin(reached, prof_t))
    ]
    return RunResult(
        config=cfg,
        dimensionless=dim,
        t=reached[keep].copy(),
        s=p.x_ref * traj.h[keep],
        profiles=profiles,
        trajectory=traj,
        system=sys,
    )


@dataclass
class SweepPoint:
    a0: float
    sigma_coeff: float
    result: RunResult | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.result is not None


def sweep(grid: Sequence[tuple[float, float]], base: RunConfig, workers: int = 1) -> list[SweepPoint]:
    """Run ``base`` once per ``(a0, sigma_coeff)`` pair, in grid order.

    A failing point is recorded with its error message and does not stop
    the sweep. The compiled kernels release the GIL, so ``workers > 1``
    runs points on threads.
    """
    grid = [(float(a), float(c)) for a, c in grid]
    if not grid:
        raise ParameterError("sweep grid is empty")

    def one(point):
        a0, c = point
        try:
            cfg = replace(base, physical=replace(base.physical, a0=a0, sigma_coeff=c))
            return SweepPoint(a0, c, result=run(cfg))
        except (IntegrationError, ParameterError) as exc:
            log.warning("sweep point a0=%g sigma_coeff=%g failed: %s", a0, c, exc)
            return SweepPoint(a0, c, error=str(exc))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, grid))
    return [one(pt) for pt in grid]
