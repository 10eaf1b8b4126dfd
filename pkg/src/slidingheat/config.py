"""Flat ``key = value`` run configuration with dotted keys.

Example::

    c0 = 0.5
    nx = 11                    # or: dx = 0.1
    dt = 1e-4
    horizon = 3
    z0 = 0, 0, 0, 10           # ascending polynomial coefficients; mode:<k>; table:<csv>
    disturbance.kind = sinusoid
    disturbance.amplitude = 2
    disturbance.omega = 1
    gains.K = 2.5

Lines starting with ``#`` or ``;`` are comments. Relative file paths resolve
against the directory of the config file.
"""
from __future__ import annotations

import ast
import configparser
from dataclasses import replace
from pathlib import Path

import numpy as np

from .disturbance import DisturbanceSpec
from .heat_sim import ConfigError, InitialProfile, SimConfig

_SECTION = "run"

_TOP = {
    "c0": float, "nx": int, "dt": float, "horizon": float, "law": str,
    "selection": str, "scheme": str, "branch": int, "snapshot_stride": int,
}
_NESTED = {
    "gains": {"K": float, "alpha": float, "beta": float, "v0": float},
    "reach": {"band": float, "dwell": float, "decay_offset": float},
    "reduced": {"dt": float, "sigma0": float, "w0": float},
    "disturbance": {"kind": str, "amplitude": float, "omega": float, "phase": float,
                    "kd": float, "c": float},
}
_OPTIONAL = {"reduced.sigma0", "reduced.w0", "disturbance.kd", "disturbance.c"}
_SPECIAL = {"dx", "z0", "z0.scale", "disturbance.table"}


def known_keys() -> list[str]:
    keys = list(_TOP) + sorted(_SPECIAL)
    for group, sub in _NESTED.items():
        keys.extend(f"{group}.{k}" for k in sub)
    return keys


def _literal(raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    if text.lower() in ("none", "null", ""):
        return None
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _cast(key: str, typ, raw):
    value = _literal(raw)
    if value is None:
        if key in _OPTIONAL:
            return None
        raise ConfigError(f"{key} may not be empty")
    try:
        if typ is int:
            if float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
        if typ is float:
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot read {raw!r} as {typ.__name__}") from None


def _read_table(path, base_dir: Path | None) -> tuple[np.ndarray, np.ndarray]:
    p = Path(path)
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    try:
        data = np.loadtxt(p, delimiter=",", ndmin=2, comments="#")
    except ValueError:
        data = np.loadtxt(p, delimiter=",", ndmin=2, skiprows=1, comments="#")
    if data.shape[1] < 2:
        raise ConfigError(f"{p}: table needs two columns")
    return data[:, 0], data[:, 1]


def _profile(raw, base_dir: Path | None, scale: float) -> InitialProfile:
    value = _literal(raw)
    if isinstance(value, InitialProfile):
        return replace(value, scale=scale)
    if isinstance(value, (int, float)):
        value = (value,)
    if isinstance(value, (list, tuple)):
        return InitialProfile("poly", tuple(float(c) for c in value), scale=scale)
    text = str(value).strip()
    if text == "zero":
        return InitialProfile("poly", (0.0,), scale=scale)
    if text.startswith("mode:"):
        return InitialProfile("mode", branch=int(text[5:]), scale=scale)
    if text.startswith("table:"):
        x, z = _read_table(text[6:], base_dir)
        return InitialProfile("table", table_x=tuple(x), table_z=tuple(z), scale=scale)
    raise ConfigError(f"z0: cannot read {raw!r}")


def apply_overrides(config: SimConfig, overrides: dict, base_dir: Path | None = None) -> SimConfig:
    """Return ``config`` with dotted-key ``overrides`` applied (values may be
    strings as read from a file, or Python values)."""
    top: dict = {}
    nested: dict[str, dict] = {g: {} for g in _NESTED}
    z0_raw = None
    z0_scale = None
    table = None
    for key, raw in overrides.items():
        if key in _TOP:
            top[key] = _cast(key, _TOP[key], raw)
        elif key == "dx":
            dx = _cast(key, float, raw)
            n = round(1.0 / dx)
            if abs(n * dx - 1.0) > 1e-9:
                raise ConfigError(f"dx={dx} does not divide [0, 1]")
            top["nx"] = n + 1
        elif key == "z0":
            z0_raw = raw
        elif key == "z0.scale":
            z0_scale = _cast(key, float, raw)
        elif key == "disturbance.table":
            table = _read_table(raw, base_dir) if isinstance(raw, (str, Path)) else raw
        elif "." in key and key.split(".", 1)[0] in _NESTED:
            group, name = key.split(".", 1)
            if name not in _NESTED[group]:
                raise ConfigError(f"unknown config key {key!r}")
            nested[group][name] = _cast(key, _NESTED[group][name], raw)
        else:
            raise ConfigError(f"unknown config key {key!r}")

    if z0_raw is not None or z0_scale is not None:
        scale = config.z0.scale if z0_scale is None else z0_scale
        top["z0"] = _profile(z0_raw if z0_raw is not None else config.z0, base_dir, scale)
    for group in ("gains", "reach", "reduced"):
        if nested[group]:
            top[group] = replace(getattr(config, group), **nested[group])
    dist = nested["disturbance"]
    if dist or table is not None:
        base = config.disturbance
        params = dict(kind=base.kind, amplitude=base.amplitude, omega=base.omega,
                      phase=base.phase, table_t=base.table_t, table_d=base.table_d,
                      kd=base.kd, c=base.c)
        params.update(dist)
        if table is not None:
            params["table_t"], params["table_d"] = tuple(table[0]), tuple(table[1])
            if "kind" not in dist:
                params["kind"] = "table"
        try:
            top["disturbance"] = DisturbanceSpec(**params)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return replace(config, **top)


def parse_text(text: str) -> dict[str, str]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    parser.read_string(f"[{_SECTION}]\n{text}")
    return dict(parser[_SECTION])


def load_config(path=None, overrides: dict | None = None,
                base: SimConfig | None = None) -> SimConfig:
    """Config from ``path`` (defaults for anything unset), then ``overrides``."""
    config = base if base is not None else SimConfig()
    if path is not None:
        path = Path(path)
        config = apply_overrides(config, parse_text(path.read_text()), path.parent)
    if overrides:
        config = apply_overrides(config, overrides, Path(path).parent if path else None)
    return config


def _num(x) -> str:
    return repr(float(x))


def dump_config(config: SimConfig) -> str:
    """Flat key/value echo of ``config``; re-loadable unless it holds tables."""
    z0 = config.z0
    if z0.kind == "poly":
        z0_text = ", ".join(_num(c) for c in z0.coeffs)
    elif z0.kind == "mode":
        z0_text = f"mode:{z0.branch}"
    else:
        z0_text = "table:<inline>"
    d = config.disturbance
    lines = [
        f"c0 = {_num(config.c0)}",
        f"nx = {config.nx}",
        f"dt = {_num(config.dt)}",
        f"horizon = {_num(config.horizon)}",
        f"z0 = {z0_text}",
        f"z0.scale = {_num(z0.scale)}",
        f"branch = {config.branch}",
        f"law = {config.law}",
        f"selection = {config.selection}",
        f"scheme = {config.scheme}",
        f"snapshot_stride = {config.snapshot_stride}",
        f"disturbance.kind = {d.kind}",
        f"disturbance.amplitude = {_num(d.amplitude)}",
        f"disturbance.omega = {_num(d.omega)}",
        f"disturbance.phase = {_num(d.phase)}",
    ]
    if d.kind == "table":
        lines.append("# disturbance.table = <inline samples>")
    if d.kd is not None:
        lines.append(f"disturbance.kd = {_num(d.kd)}")
    if d.c is not None:
        lines.append(f"disturbance.c = {_num(d.c)}")
    g = config.gains
    lines += [
        f"gains.K = {_num(g.K)}",
        f"gains.alpha = {_num(g.alpha)}",
        f"gains.beta = {_num(g.beta)}",
        f"gains.v0 = {_num(g.v0)}",
        f"reach.band = {_num(config.reach.band)}",
        f"reach.dwell = {_num(config.reach.dwell)}",
        f"reach.decay_offset = {_num(config.reach.decay_offset)}",
        f"reduced.dt = {_num(config.reduced.dt)}",
    ]
    if config.reduced.sigma0 is not None:
        lines.append(f"reduced.sigma0 = {_num(config.reduced.sigma0)}")
    if config.reduced.w0 is not None:
        lines.append(f"reduced.w0 = {_num(config.reduced.w0)}")
    return "\n".join(lines) + "\n"
