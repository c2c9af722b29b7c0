"""Flat ``section.key = value`` run configuration and the ``run.meta`` echo.

Config files are TOML restricted to three sections (``physical``, ``run``,
``integrator``) and may be written either as ``[section]`` tables or as
dotted keys. ``derived.*`` entries are informational and ignored on input,
so a ``run.meta`` file can be fed back as a config.
"""

from __future__ import annotations

import math
import sys
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Iterable, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import MATERIALS, RunConfig
from .errors import ConfigError
from .integrator import IntegratorConfig
from .params import PhysicalParams, nondimensionalize

RUN_KEYS = ("N", "n_output", "output_times", "profile_times")
PHYSICAL_KEYS = tuple(f.name for f in fields(PhysicalParams))
# sample times are derived from the output grid for each run
INTEGRATOR_KEYS = tuple(f.name for f in fields(IntegratorConfig) if f.name != "sample_times")
KNOWN_KEYS = (
    tuple(f"physical.{k}" for k in PHYSICAL_KEYS)
    + tuple(f"run.{k}" for k in RUN_KEYS)
    + tuple(f"integrator.{k}" for k in INTEGRATOR_KEYS)
)


def _flatten(doc: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat = {}
    for k, v in doc.items():
        key = f"{prefix}{k}"
        if isinstance(v, Mapping):
            flat.update(_flatten(v, key + "."))
        else:
            flat[key] = v
    return flat


def parse_config_text(text: str) -> dict[str, Any]:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from None
    flat = {k: v for k, v in _flatten(doc).items() if not k.startswith("derived.")}
    unknown = sorted(set(flat) - set(KNOWN_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return flat


def read_config_file(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text)


def parse_override(item: str) -> tuple[str, Any]:
    """Parse ``key=value``; the value uses TOML syntax, bare words are strings."""
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    if key not in KNOWN_KEYS:
        raise ConfigError(f"unknown config key: {key}")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key, value


def build_config(values: Mapping[str, Any], base: RunConfig | None = None) -> RunConfig:
    """Apply flat ``values`` on top of ``base`` (default: the dense calibration run)."""
    base = base or RunConfig()
    groups: dict[str, dict[str, Any]] = {"physical": {}, "run": {}, "integrator": {}}
    for key, v in values.items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key: {key}")
        section, name = key.split(".", 1)
        groups[section][name] = v
    try:
        physical = replace(base.physical, **groups["physical"])
        integrator = replace(base.integrator, **groups["integrator"])
        return replace(base, physical=physical, integrator=integrator, **groups["run"])
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from None


def load_config(source: str | Path | None = None, material: str | None = None,
                overrides: Iterable[str] = ()) -> RunConfig:
    """Resolve a run configuration.

    Precedence, lowest to highest: built-in defaults, ``material`` preset,
    ``source`` (a preset name or a config file path), ``overrides``.
    """
    cfg = RunConfig()
    if material is not None:
        cfg = cfg.with_material(material)
    if source is not None:
        if str(source) in MATERIALS and not Path(source).exists():
            cfg = cfg.with_material(str(source))
        else:
            cfg = build_config(read_config_file(source), cfg)
    ov = dict(parse_override(o) for o in overrides)
    return build_config(ov, cfg) if ov else cfg


# --- run.meta ----------------------------------------------------------------


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        # repr round-trips exactly; TOML spells the specials inf/-inf/nan
        return repr(v) if math.isfinite(v) else {math.inf: "inf", -math.inf: "-inf"}.get(v, "nan")
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def config_items(cfg: RunConfig) -> list[tuple[str, Any]]:
    items: list[tuple[str, Any]] = []
    for k in PHYSICAL_KEYS:
        items.append((f"physical.{k}", getattr(cfg.physical, k)))
    for k in RUN_KEYS:
        v = getattr(cfg, k)
        if v is not None:
            items.append((f"run.{k}", v))
    for k in INTEGRATOR_KEYS:
        v = getattr(cfg.integrator, k)
        if v is not None:
            items.append((f"integrator.{k}", v))
    return items


def format_meta(cfg: RunConfig, extra: Mapping[str, Any] | None = None) -> str:
    """Flat ``key = value`` echo of ``cfg`` plus its dimensionless groups."""
    dim = nondimensionalize(cfg.physical)
    lines = [f"{k} = {_fmt(v)}" for k, v in config_items(cfg)]
    derived = {"Bi": dim.Bi, "A0": dim.A0, "T_star": dim.T_star, "h0": dim.h0}
    derived.update(extra or {})
    lines += [f"derived.{k} = {_fmt(v)}" for k, v in derived.items()]
    return "\n".join(lines) + "\n"


def config_from_meta(text: str) -> RunConfig:
    """Rebuild the exact configuration echoed in a ``run.meta`` file."""
    return build_config(parse_config_text(text), RunConfig())
