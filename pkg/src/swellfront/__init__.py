"""Finite-element simulation of diffusant fronts penetrating swelling rubber."""

from .analysis import ExperimentSeries, FitResult, Record, classify, compare, fit_power_law, gamma_table
from .config import format_meta, load_config
from .datafiles import ingest_experiment
from .engine import MATERIALS, RunConfig, RunResult, SweepPoint, run, sweep
from .errors import (
    ConfigError,
    ExperimentDataError,
    IntegrationError,
    ParameterError,
    PivotBreakdown,
)
from .fem import FemSystem, Mesh, Tridiagonal, assemble, rhs, thomas_solve
from .integrator import IntegratorConfig, Trajectory, integrate
from .params import (
    DimensionlessParams,
    PhysicalParams,
    PhysicalSnapshot,
    SwellingLaw,
    nondimensionalize,
    to_physical,
)

__version__ = "0.1.0"

__all__ = [
    "ExperimentSeries",
    "FitResult",
    "Record",
    "classify",
    "compare",
    "fit_power_law",
    "gamma_table",
    "format_meta",
    "load_config",
    "ingest_experiment",
    "MATERIALS",
    "RunConfig",
    "RunResult",
    "SweepPoint",
    "run",
    "sweep",
    "ConfigError",
    "ExperimentDataError",
    "IntegrationError",
    "ParameterError",
    "PivotBreakdown",
    "FemSystem",
    "Mesh",
    "Tridiagonal",
    "assemble",
    "rhs",
    "thomas_solve",
    "IntegratorConfig",
    "Trajectory",
    "integrate",
    "DimensionlessParams",
    "PhysicalParams",
    "PhysicalSnapshot",
    "SwellingLaw",
    "nondimensionalize",
    "to_physical",
]
