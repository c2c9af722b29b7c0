"""Command-line front end.

    swellfront simulate  [--config C] [--material M] [--set key=value ...]
    swellfront sweep     [--a0 ...] [--sigma ...] [--workers W]
    swellfront fit       [--front front.csv] [--window-start 1] [--intercept]
    swellfront compare   [--data exp.csv]
    swellfront dimensionless

Every subcommand accepts ``--config``/``--material``/``--set`` and writes
into ``--outdir`` (default: current directory).

Exit codes: 0 success, 2 bad configuration or parameters, 3 bad input data,
4 integration failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import analysis
from .config import format_meta, load_config
from .datafiles import ingest_experiment, packaged_experiment, read_front, write_table
from .engine import run, sweep
from .errors import ConfigError, ExperimentDataError, IntegrationError, ParameterError
from .params import nondimensionalize

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INTEGRATION = 0, 2, 3, 4

SWEEP_GRIDS = {
    "dense": ((100.0, 500.0, 1000.0), (20.0, 10.0, 5.0)),
    "foam": ((500.0, 1000.0, 2000.0), (100.0, 50.0, 25.0)),
}

log = logging.getLogger("swellfront")


def _window(args) -> tuple[float, float | None]:
    return (args.window_start, args.window_end)


def _material(args) -> str:
    if args.material:
        return args.material
    return args.config if args.config in SWEEP_GRIDS else "dense"


def cmd_simulate(args, cfg, out: Path) -> int:
    res = run(cfg)
    write_table(out / "front.csv", ("t", "s"), zip(res.t, res.s))
    write_table(
        out / "profiles.csv",
        ("t", "x", "m"),
        ((p.t, x, m) for p in res.profiles for x, m in zip(p.x, p.m)),
    )
    (out / "run.meta").write_text(format_meta(cfg))
    print(f"{res.reason}: s(T={res.t[-1]:g} min) = {res.s[-1]:.6g} mm "
          f"[{res.trajectory.n_accepted} steps, {res.trajectory.n_rejected} rejected]")
    return EXIT_OK


def cmd_sweep(args, cfg, out: Path) -> int:
    a0s, cs = SWEEP_GRIDS[_material(args)]
    a0s = tuple(args.a0) if args.a0 else a0s
    cs = tuple(args.sigma) if args.sigma else cs
    points = sweep([(a, c) for a in a0s for c in cs], cfg, workers=args.workers)
    rows = []
    for p in points:
        if p.ok:
            fit = analysis.fit_power_law(p.result.t, p.result.s, _window(args), intercept=args.intercept)
            rows.append((p.a0, p.sigma_coeff, fit.gamma, fit.window[0], fit.window[1], fit.rmse_log, "ok"))
        else:
            rows.append((p.a0, p.sigma_coeff, float("nan"), float("nan"), float("nan"), float("nan"), p.error))
    write_table(out / "gamma_table.csv",
                ("a0", "sigma_coeff", "gamma", "window_start", "window_end", "rmse_log", "status"), rows)
    failed = [p for p in points if not p.ok]
    if failed:
        for p in failed:
            print(f"failed: a0={p.a0:g} sigma_coeff={p.sigma_coeff:g}: {p.error}", file=sys.stderr)
        return EXIT_INTEGRATION
    print(analysis.gamma_table(points, _window(args), intercept=args.intercept).format())
    return EXIT_OK


def cmd_fit(args, cfg, out: Path) -> int:
    if args.front:
        t, s = read_front(args.front)
    else:
        res = run(cfg)
        t, s = res.t, res.s
    try:
        fit = analysis.fit_power_law(t, s, _window(args), intercept=args.intercept)
    except ValueError as exc:
        raise ExperimentDataError(str(exc)) from None
    write_table(
        out / "fit.csv",
        ("gamma", "window_start", "window_end", "rmse_log", "n_points", "log_prefactor", "regime"),
        [(fit.gamma, fit.window[0], fit.window[1], fit.rmse_log, fit.n_points, fit.log_prefactor, fit.regime)],
    )
    print(f"gamma = {fit.gamma:.8f} on t in [{fit.window[0]:g}, {fit.window[1]:g}] min ({fit.regime})")
    return EXIT_OK


def cmd_compare(args, cfg, out: Path) -> int:
    dense, foam = ingest_experiment(args.data or packaged_experiment())
    series = foam if _material(args) == "foam" else dense
    res = run(cfg)
    rep = analysis.compare(res.t, res.s, series)
    write_table(
        out / "compare.csv",
        ("t", "measured", "simulated", "error", "beyond_span", "rmse", "max_error"),
        ((r.t, r.measured, r.simulated, r.error, r.beyond_span, rep.rmse, rep.max_error) for r in rep.rows),
    )
    print(f"{series.material}: rmse = {rep.rmse:.4g} mm, max error = {rep.max_error:.4g} mm"
          + (f", {rep.n_flagged} point(s) beyond simulated span" if rep.n_flagged else ""))
    return EXIT_OK


def cmd_dimensionless(args, cfg, out: Path) -> int:
    d = nondimensionalize(cfg.physical)
    print(f"Bi = {d.Bi:.6e}")
    print(f"A0 = {d.A0:.6e}")
    print(f"T* = {d.T_star:.6e}")
    print(f"h0 = {d.h0:.6e}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "compare": cmd_compare,
    "dimensionless": cmd_dimensionless,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file (TOML, flat dotted keys) or preset name: dense, foam")
    common.add_argument("--material", choices=sorted(SWEEP_GRIDS), help="material preset for a0 and sigma")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key, e.g. physical.T=5000 (repeatable)")
    common.add_argument("--outdir", type=Path, default=Path("."))
    common.add_argument("-v", "--verbose", action="store_true")

    fitopts = argparse.ArgumentParser(add_help=False)
    fitopts.add_argument("--window-start", type=float, default=analysis.DEFAULT_WINDOW_START,
                         help="first time (min) in the log-log fit (default: %(default)s)")
    fitopts.add_argument("--window-end", type=float, default=None, help="last time (min) in the fit")
    fitopts.add_argument("--intercept", action="store_true", help="fit s = C t^gamma instead of s = t^gamma")

    ap = argparse.ArgumentParser(prog="swellfront", description="Moving-front diffusion in swelling rubber")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run one simulation")
    p = sub.add_parser("sweep", parents=[common, fitopts], help="gamma table over (a0, sigma) grid")
    p.add_argument("--a0", type=float, nargs="+")
    p.add_argument("--sigma", type=float, nargs="+", help="swelling coefficients c in sigma = s/c")
    p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("fit", parents=[common, fitopts], help="power-law fit of a front curve")
    p.add_argument("--front", type=Path, help="front.csv to fit (default: simulate first)")
    p = sub.add_parser("compare", parents=[common], help="compare simulated front with measurements")
    p.add_argument("--data", type=Path, help="semicolon-separated measurement file (default: bundled)")
    sub.add_parser("dimensionless", parents=[common], help="print the dimensionless groups")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config, args.material, args.overrides)
        args.outdir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, cfg, args.outdir)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExperimentDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except IntegrationError as exc:
        print(f"error: integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
