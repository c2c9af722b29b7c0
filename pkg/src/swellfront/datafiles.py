"""Reading the measurement file and writing result tables.

The measurement file is semicolon separated with a header naming the columns
``t, FR, FF, LR, LF, AR, AF`` in any order (R = dense rubber, F = foam;
F/L/A = front, submerged length, swollen area). Output tables are plain
comma-separated files with 12 significant digits.
"""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analysis import ExperimentSeries, Record
from .errors import ExperimentDataError

EXPERIMENT_COLUMNS = ("t", "FR", "FF", "LR", "LF", "AR", "AF")
FLOAT_FMT = ".12g"


def packaged_experiment() -> Path:
    """Path of the bundled measurement file."""
    return Path(str(resources.files("swellfront") / "data" / "exp.csv"))


def ingest_experiment(path: str | Path) -> tuple[ExperimentSeries, ExperimentSeries]:
    """Parse a measurement file into ``(dense, foam)`` series."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh, delimiter=";") if any(c.strip() for c in r)]
    except OSError as exc:
        raise ExperimentDataError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise ExperimentDataError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    missing = [c for c in EXPERIMENT_COLUMNS if c not in header]
    if missing:
        raise ExperimentDataError(f"{path}: missing column(s) {', '.join(missing)}")
    col = {name: header.index(name) for name in EXPERIMENT_COLUMNS}
    data = {name: [] for name in EXPERIMENT_COLUMNS}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ExperimentDataError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
        for name, j in col.items():
            try:
                data[name].append(float(row[j]))
            except ValueError:
                raise ExperimentDataError(f"{path}:{lineno}: non-numeric {name} cell {row[j]!r}") from None
    t = data["t"]
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ExperimentDataError(f"{path}: times must be strictly increasing")

    def series(f, l, a, tag):
        recs = tuple(Record(*vals) for vals in zip(t, data[f], data[l], data[a]))
        return ExperimentSeries(recs, tag)

    return series("FR", "LR", "AR", "dense"), series("FF", "LF", "AF", "foam")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), FLOAT_FMT)
    return str(v)


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])
    return path


def read_table(path: str | Path) -> dict[str, np.ndarray]:
    """Read a numeric table written by :func:`write_table` into columns."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ExperimentDataError(f"{path}: empty table")
    header, body = rows[0], rows[1:]
    try:
        cols = np.array([[float(c) for c in r] for r in body], dtype=float).reshape(len(body), len(header))
    except ValueError as exc:
        raise ExperimentDataError(f"{path}: {exc}") from None
    return {name: cols[:, j] for j, name in enumerate(header)}


def read_front(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    cols = read_table(path)
    if "t" not in cols or "s" not in cols:
        raise ExperimentDataError(f"{path}: front table needs columns t and s")
    return cols["t"], cols["s"]
