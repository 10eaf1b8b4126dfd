"""Experiment runs, trajectory metrics, CSV export and parameter sweeps."""
from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .config import apply_overrides, dump_config
from .controllers import GainError
from .heat_sim import BlowUpError, SimConfig, TrajectoryRecord, sigma_defect, simulate
from .reduced_ode import detect_reaching_time

TRAJECTORY_HEADER = ("t", "sigma", "u", "aux", "norm_z")
MIN_FIT_SAMPLES = 10


@dataclass(frozen=True)
class Metrics:
    t_reach: float
    reach_bound: float
    post_reach_sigma_sup: float
    decay_rate: float
    chattering_index: float
    sigma_defect: float
    gains_valid: bool
    reached: bool
    bound_ok: bool

    @property
    def passed(self) -> bool:
        return self.gains_valid and self.reached and self.bound_ok

    @classmethod
    def header(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def row(self) -> tuple:
        return tuple(getattr(self, name) for name in self.header())


def fit_decay_rate(t, norms, window: tuple[float, float] | None = None) -> float:
    """Least-squares slope of ``-log ||z||`` over ``window`` (seconds)."""
    t = np.asarray(t, dtype=float)
    norms = np.asarray(norms, dtype=float)
    mask = np.ones(t.shape, dtype=bool)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
    if mask.sum() < MIN_FIT_SAMPLES:
        raise ValueError(f"decay window holds {mask.sum()} samples, need {MIN_FIT_SAMPLES}")
    y = norms[mask]
    if np.any(y <= 0):
        raise ValueError("norms must be positive on the fit window")
    slope = np.polyfit(t[mask], np.log(y), 1)[0]
    return float(-slope)


def chattering_index(u, dt: float, window: tuple[float, float] | None = None) -> float:
    """Total variation of ``u`` per second; ``u[k]`` is taken at ``k * dt``."""
    u = np.asarray(u, dtype=float)
    k0, k1 = 0, u.size - 1
    if window is not None:
        k0 = max(int(round(window[0] / dt)), 0)
        k1 = min(int(round(window[1] / dt)), u.size - 1)
    if k1 <= k0:
        return 0.0
    return float(np.sum(np.abs(np.diff(u[k0:k1 + 1]))) / ((k1 - k0) * dt))


def _gains_valid(config: SimConfig) -> bool:
    try:
        return all(c.passed for c in config.controller().validate(config.disturbance))
    except GainError:
        return False


def compute_metrics(config: SimConfig, t, sigma, u, aux, norm_z) -> Metrics:
    """Metrics from the recorded series plus the run configuration only."""
    t = np.asarray(t, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    u = np.asarray(u, dtype=float)
    norm_z = np.asarray(norm_z, dtype=float)
    pair = config.eigenpair()
    gains_valid = _gains_valid(config)

    series = TrajectoryRecord(config, t, sigma, u, np.asarray(aux, dtype=float), norm_z)
    t_reach = detect_reaching_time(series, config.reach.band, config.reach.dwell)
    reached = t_reach is not None

    reach_bound = math.nan
    if config.law == "smc" and gains_valid:
        margin = config.gains.K - config.disturbance.K_d * abs(pair.b_star_phi)
        reach_bound = float(abs(sigma[0]) / margin)

    post_sup = decay = chatter = math.nan
    if reached:
        k = int(np.searchsorted(t, t_reach))
        post_sup = float(np.max(np.abs(sigma[k:])))
        chatter = chattering_index(u, config.dt, (t_reach, t[-1]))
    start = (t_reach if reached else 0.0) + config.reach.decay_offset
    try:
        decay = fit_decay_rate(t, norm_z, (start, t[-1]))
    except ValueError:
        decay = math.nan

    defect = float(np.max(np.abs(sigma_defect(series)))) if config.scheme == "explicit" else math.nan
    bound_ok = reached and (config.law != "smc" or t_reach <= reach_bound)
    return Metrics(
        t_reach=t_reach if reached else math.nan,
        reach_bound=reach_bound,
        post_reach_sigma_sup=post_sup,
        decay_rate=decay,
        chattering_index=chatter,
        sigma_defect=defect,
        gains_valid=gains_valid,
        reached=reached,
        bound_ok=bool(bound_ok),
    )


def run_experiment(config: SimConfig, controller=None) -> TrajectoryRecord:
    record = simulate(config, controller)
    metrics = compute_metrics(config, record.t, record.sigma, record.u, record.aux, record.norm_z)
    return replace(record, metrics=metrics)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def export(record: TrajectoryRecord, out_dir, write_field: bool = True) -> list[Path]:
    """Write ``trajectory.csv``, ``metrics.csv``, ``run.cfg`` and, when the record
    has snapshots and ``write_field`` is set, ``field.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "trajectory.csv"
    data = np.column_stack([record.t, record.sigma, record.u, record.aux, record.norm_z])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(TRAJECTORY_HEADER),
               comments="")
    written.append(path)

    if write_field and record.has_snapshots:
        path = out / "field.csv"
        x = record.config.grid.x
        n_snap = record.snapshots.shape[0]
        data = np.column_stack([
            np.repeat(record.snapshot_t[:n_snap], x.size),
            np.tile(x, n_snap),
            record.snapshots.ravel(),
        ])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="t,x,z", comments="")
        written.append(path)

    if record.metrics is not None:
        path = out / "metrics.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(Metrics.header())
            writer.writerow([_fmt(v) for v in record.metrics.row()])
        written.append(path)

    path = out / "run.cfg"
    path.write_text(dump_config(record.config))
    written.append(path)
    return written


def load_trajectory(path) -> dict[str, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return {name: data[:, i] for i, name in enumerate(header)}


def read_metrics(path) -> dict[str, str]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return dict(zip(rows[0], rows[1]))


def metrics_from_export(trajectory_csv, config: SimConfig) -> Metrics:
    cols = load_trajectory(trajectory_csv)
    return compute_metrics(config, *(cols[name] for name in TRAJECTORY_HEADER))


def _invalid_metrics() -> Metrics:
    nan = math.nan
    return Metrics(nan, nan, nan, nan, nan, nan, gains_valid=False, reached=False,
                   bound_ok=False)


def _grid_points(grid: dict) -> list[dict]:
    keys = list(grid)
    if not keys:
        return []
    return [dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys))]


def _sweep_row(base: SimConfig, point: dict) -> dict:
    row = dict(point)
    try:
        config = apply_overrides(base, point)
        if not _gains_valid(config):
            metrics = _invalid_metrics()
            row.update(asdict(metrics), error="gain conditions violated")
            return row
        metrics = run_experiment(config).metrics
        row.update(asdict(metrics), error="")
    except (GainError, BlowUpError, ValueError) as exc:
        row.update(error=f"{type(exc).__name__}: {exc}")
    return row


def sweep(base: SimConfig, grid: dict, workers: int = 1) -> list[dict]:
    """One metrics row per point of the Cartesian product of ``grid``.

    Keys are dotted config keys. Rows come back in grid order; a failing point
    records its error and the sweep carries on.
    """
    points = _grid_points(grid)
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_row, itertools.repeat(base), points))
    return [_sweep_row(base, p) for p in points]


def write_sweep(rows: list[dict], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    keys: list[str] = []
    for row in rows:
        keys.extend(k for k in row if k not in keys)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(keys)
        for row in rows:
            writer.writerow([_fmt(row.get(k, "")) for k in keys])
    return path
