"""Method-of-lines simulator for the boundary-controlled heat equation.

    z_t = z_xx on (0, 1),   z_x(t, 0) = c0 z(t, 0),   z_x(t, 1) = u(t) + d(t)

Space: second-order central differences with ghost nodes eliminated through the
boundary conditions. Time: forward Euler (default) or backward Euler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .controllers import (
    GainError,
    OpenLoop,
    SlidingModeController,
    SuperTwistingController,
)
from .disturbance import DisturbanceSpec
from .spectral import Grid, sample_eigenfunction, solve_eigenvalue

SCHEMES = ("explicit", "implicit")
LAWS = ("smc", "st", "open")


class BlowUpError(RuntimeError):
    def __init__(self, t: float):
        super().__init__(f"non-finite state at t={t:.6g}")
        self.t = t


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InitialProfile:
    """``poly``: coefficients in ascending powers of x; ``mode``: eigenfunction of
    ``branch``; ``table``: (x, z) samples, linearly interpolated."""

    kind: str = "poly"
    coeffs: tuple = (0.0, 0.0, 0.0, 10.0)
    branch: int = 0
    table_x: tuple = field(default=(), repr=False)
    table_z: tuple = field(default=(), repr=False)
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("poly", "mode", "table"):
            raise ConfigError(f"unknown initial profile kind {self.kind!r}")
        if self.kind == "table" and len(self.table_x) != len(self.table_z):
            raise ConfigError("initial-profile table needs matching x/z columns")

    def sample(self, grid: Grid, c0: float) -> np.ndarray:
        x = grid.x
        if self.kind == "poly":
            values = np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs, dtype=float))
        elif self.kind == "mode":
            values = sample_eigenfunction(solve_eigenvalue(c0, self.branch), grid).values
        else:
            values = np.interp(x, self.table_x, self.table_z)
        return self.scale * np.broadcast_to(values, x.shape).astype(float)

    def describe(self) -> str:
        if self.kind == "poly":
            text = ",".join(f"{c:g}" for c in self.coeffs)
        elif self.kind == "mode":
            text = f"mode:{self.branch}"
        else:
            text = "table"
        return text if self.scale == 1.0 else f"{self.scale:g}*[{text}]"


@dataclass(frozen=True)
class Gains:
    K: float = 2.5
    alpha: float = 2.2
    beta: float = 2.5
    v0: float = 0.0


@dataclass(frozen=True)
class ReachSettings:
    band: float = 1e-3
    dwell: float = 0.05
    decay_offset: float = 0.2


@dataclass(frozen=True)
class ReducedSettings:
    dt: float = 1e-5
    sigma0: float | None = None
    w0: float | None = None


@dataclass(frozen=True)
class SimConfig:
    """One fully determined closed-loop run. Defaults reproduce the reference
    experiment: c0 = 0.5, dx = 0.1, dt = 1e-4, z0 = 10 x^3, d = 2 sin t."""

    c0: float = 0.5
    nx: int = 11
    dt: float = 1e-4
    horizon: float = 3.0
    z0: InitialProfile = InitialProfile()
    disturbance: DisturbanceSpec = DisturbanceSpec.sinusoid(2.0, 1.0)
    law: str = "smc"
    gains: Gains = Gains()
    selection: str = "implicit"
    scheme: str = "explicit"
    branch: int = 1
    snapshot_stride: int = 100
    reach: ReachSettings = ReachSettings()
    reduced: ReducedSettings = ReducedSettings()

    def __post_init__(self):
        if self.nx < 3:
            raise ConfigError(f"need at least 3 grid nodes, got nx={self.nx}")
        if not self.dt > 0 or not self.horizon > 0:
            raise ConfigError("dt and horizon must be positive")
        if not self.c0 >= 0:
            raise ConfigError("c0 must be non-negative")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if self.law not in LAWS:
            raise ConfigError(f"law must be one of {LAWS}")
        if self.selection not in ("implicit", "explicit"):
            raise ConfigError("selection must be 'implicit' or 'explicit'")
        if self.scheme == "explicit" and self.dt > 0.5 * self.dx ** 2:
            raise ConfigError(
                f"explicit scheme unstable: dt={self.dt:g} > dx^2/2={0.5 * self.dx ** 2:g}"
            )

    @property
    def grid(self) -> Grid:
        return Grid(self.nx)

    @property
    def dx(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def eigenpair(self):
        return solve_eigenvalue(self.c0, self.branch)

    def controller(self):
        pair = self.eigenpair()
        if self.law == "smc":
            from .controllers import SmcGains
            return SlidingModeController(pair, SmcGains(self.gains.K), self.selection)
        if self.law == "st":
            from .controllers import StGains, StState
            return SuperTwistingController(pair, StGains(self.gains.alpha, self.gains.beta),
                                           StState(self.gains.v0))
        return OpenLoop(pair)


@dataclass(frozen=True)
class FieldState:
    t: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise BlowUpError(self.t)
        object.__setattr__(self, "values", values)


def operator_matrix(grid: Grid, c0: float) -> np.ndarray:
    """Discrete ``A_h`` (zero boundary input) acting on nodal values."""
    n, h = grid.n_nodes, grid.dx
    A = np.zeros((n, n))
    idx = np.arange(1, n - 1)
    A[idx, idx - 1] = A[idx, idx + 1] = 1.0 / h ** 2
    A[idx, idx] = -2.0 / h ** 2
    A[0, 0] = -2.0 / h ** 2 - 2.0 * c0 / h
    A[0, 1] = 2.0 / h ** 2
    A[-1, -1] = -2.0 / h ** 2
    A[-1, -2] = 2.0 / h ** 2
    return A


def input_vector(grid: Grid) -> np.ndarray:
    """Column through which the boundary flux ``u + d`` enters ``A_h``."""
    b = np.zeros(grid.n_nodes)
    b[-1] = 2.0 / grid.dx
    return b


def _implicit_operators(grid: Grid, c0: float, dt: float):
    lhs = np.eye(grid.n_nodes) - dt * operator_matrix(grid, c0)
    M = np.linalg.inv(lhs)
    return M, M @ (dt * input_vector(grid))


def build_initial_state(config: SimConfig) -> FieldState:
    return FieldState(0.0, config.z0.sample(config.grid, config.c0))


def step(state: FieldState, u: float, d: float, config: SimConfig) -> FieldState:
    """Advance one time step with boundary flux ``u + d``."""
    z = np.ascontiguousarray(state.values, dtype=float)
    out = np.empty_like(z)
    if config.scheme == "explicit":
        kernels.explicit_heat_step(z, out, config.dx, config.dt, config.c0, float(u + d))
    else:
        M, q = _implicit_operators(config.grid, config.c0, config.dt)
        kernels.implicit_heat_step(z, out, M, q, float(u + d))
    t = state.t + config.dt
    if not np.all(np.isfinite(out)):
        raise BlowUpError(t)
    return FieldState(t, out)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Closed-loop time series on one time axis.

    ``aux`` is the sign selection for SMC, the integrator ``v`` for ST and zero
    for the open loop. ``metrics`` is attached by the harness.
    """

    config: SimConfig
    t: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    aux: np.ndarray = field(repr=False)
    norm_z: np.ndarray = field(repr=False)
    snapshot_t: np.ndarray | None = field(default=None, repr=False)
    snapshots: np.ndarray | None = field(default=None, repr=False)
    metrics: object = None

    @property
    def law(self) -> str:
        return self.config.law

    @property
    def has_snapshots(self) -> bool:
        return self.snapshots is not None and len(self.snapshots) > 0


def _controller_params(controller):
    """Flatten a controller into kernel scalars."""
    if isinstance(controller, SlidingModeController):
        return (kernels.LAW_SMC, controller.gains.K, 0.0, 0.0, 0.0,
                controller.selection == "explicit")
    if isinstance(controller, SuperTwistingController):
        g = controller.gains
        return (kernels.LAW_ST, 0.0, g.alpha, g.beta, controller.initial.v, False)
    if isinstance(controller, OpenLoop):
        return (kernels.LAW_OPEN, 0.0, 0.0, 0.0, 0.0, False)
    raise TypeError(f"unsupported controller {controller!r}")


def simulate(config: SimConfig, controller=None) -> TrajectoryRecord:
    """Run the closed loop. ``controller`` defaults to ``config.controller()``.

    Gains are checked against the disturbance bounds before the first step;
    a failing check raises :class:`GainError`.
    """
    if controller is None:
        controller = config.controller()
    failed = [c for c in controller.validate(config.disturbance) if not c.passed]
    if failed:
        raise GainError("; ".join(
            f"{c.condition}: {c.lhs:.6g} <= {c.rhs:.6g}" for c in failed))

    grid = config.grid
    pair = controller.pair
    w = grid.weights
    phi = pair(grid.x)
    wphi = w * phi
    waphi = w * (operator_matrix(grid, config.c0) @ phi)
    if config.scheme == "implicit":
        M, q = _implicit_operators(grid, config.c0, config.dt)
    else:
        M, q = np.zeros((1, 1)), np.zeros(1)

    n_steps = config.n_steps
    stride = int(config.snapshot_stride)
    n_snap = n_steps // stride + 1 if stride > 0 else 0
    t = np.empty(n_steps + 1)
    sigma = np.empty(n_steps + 1)
    u = np.empty(n_steps + 1)
    aux = np.empty(n_steps + 1)
    norm_z = np.empty(n_steps + 1)
    snaps = np.empty((max(n_snap, 1), grid.n_nodes))

    law, K, alpha, beta, v0, explicit = _controller_params(controller)
    z0 = build_initial_state(config).values
    status = kernels.closed_loop(
        z0, grid.dx, config.dt, config.c0, n_steps, config.scheme == "implicit", M, q,
        w, wphi, waphi, pair.lam, pair.b_star_phi,
        law, K, alpha, beta, v0, explicit,
        *config.disturbance.kernel_args(),
        stride, t, sigma, u, aux, norm_z, snaps,
    )
    if status >= 0:
        raise BlowUpError(status * config.dt)
    snapshot_t = t[::stride].copy() if stride > 0 else None
    return TrajectoryRecord(
        config, t, sigma, u, aux, norm_z,
        snapshot_t=snapshot_t,
        snapshots=snaps[:n_snap].copy() if stride > 0 else None,
    )


def sigma_defect(record: TrajectoryRecord) -> np.ndarray:
    """Per-step defect of the discrete sliding-variable dynamics,

        (sigma[k+1] - sigma[k]) / dt - (lam sigma[k] + B*phi (u[k] + d[k])),

    computed from the recorded series alone.
    """
    cfg = record.config
    pair = cfg.eigenpair()
    d = cfg.disturbance(record.t[:-1])
    rate = np.diff(record.sigma) / cfg.dt
    return rate - (pair.lam * record.sigma[:-1] + pair.b_star_phi * (record.u[:-1] + d))


def l2_norm_nodal(values: np.ndarray, grid: Grid) -> float:
    return math.sqrt(float(np.dot(grid.weights, values * values)))
