"""Scalar Filippov dynamics of the sliding variable.

These are the reference solutions the PDE loop is checked against:

    SMC:  sigma' in B*phi d(t) - K sign(sigma)
    ST:   sigma' = -alpha |sigma|^(1/2) sign(sigma) + w,
          w'    in B*phi d'(t) - beta sign(sigma)

with ``w = B*phi d + v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .controllers import GainError, StGains, validate_smc_gains, validate_st_gains
from .disturbance import DisturbanceSpec


@dataclass(frozen=True)
class ReducedTrajectory:
    law: str
    t: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    selection: np.ndarray = field(repr=False)
    w: np.ndarray | None = field(default=None, repr=False)
    t_reach: float | None = None

    @property
    def reached(self) -> bool:
        return self.t_reach is not None


def _n_steps(horizon: float, dt: float) -> int:
    if not dt > 0 or not horizon > 0:
        raise ValueError("dt and horizon must be positive")
    return int(round(horizon / dt))


def detect_reaching_time(traj, band: float, dwell: float) -> float | None:
    """First time after which ``|sigma|`` (and ``|w|`` when present) stays within
    ``band`` to the end of the record, provided that lasts at least ``dwell``.

    ``None`` means not reached.
    """
    if not (band > 0 and dwell > 0):
        raise ValueError("band and dwell must be positive")
    t = np.asarray(traj.t)
    outside = ~(np.abs(traj.sigma) <= band)
    w = getattr(traj, "w", None)
    if w is not None:
        outside |= ~(np.abs(w) <= band)
    hits = np.flatnonzero(outside)
    if hits.size == 0:
        k = 0
    else:
        k = hits[-1] + 1
        if k >= t.size:
            return None
    if t[-1] - t[k] < dwell * (1 - 1e-12):
        return None
    return float(t[k])


def reaching_time_bound(sigma0: float, K: float, disturbance: DisturbanceSpec,
                        b_star_phi: float) -> float:
    """Worst-case reaching time ``|sigma0| / (K - K_d |B*phi|)``."""
    check = validate_smc_gains(K, disturbance, b_star_phi)
    if not check.passed:
        raise GainError(f"reaching margin {check.margin:.6g} is not positive")
    return abs(sigma0) / check.margin


def smc_closed_form(sigma0: float, K: float, b_star_phi: float, d: float, t):
    """Exact Filippov solution for a constant disturbance with ``K > |B*phi d|``.

    ``|sigma|`` falls linearly at rate ``K - B*phi d sign(sigma0)`` and stays
    at zero afterwards.
    """
    t = np.asarray(t, dtype=float)
    s0 = math.copysign(1.0, sigma0) if sigma0 != 0 else 0.0
    rate = K - b_star_phi * d * s0
    return s0 * np.maximum(abs(sigma0) - rate * t, 0.0)


def simulate_smc_reduced(sigma0: float, K: float, b_star_phi: float,
                         disturbance: DisturbanceSpec, dt: float = 1e-5,
                         horizon: float = 3.0, selection: str = "implicit",
                         band: float = 1e-12, dwell: float | None = None) -> ReducedTrajectory:
    check = validate_smc_gains(K, disturbance, b_star_phi)
    if not check.passed:
        raise GainError(f"{check.condition} fails: {check.lhs:.6g} <= {check.rhs:.6g}")
    n = _n_steps(horizon, dt)
    t = np.empty(n + 1)
    sigma = np.empty(n + 1)
    s = np.empty(n + 1)
    kernels.reduced_smc(float(sigma0), float(K), float(b_star_phi),
                        *disturbance.kernel_args(), float(dt), n,
                        selection == "explicit", t, sigma, s)
    traj = ReducedTrajectory("smc", t, sigma, s)
    t_r = detect_reaching_time(traj, band, dwell if dwell is not None else 10 * dt)
    return ReducedTrajectory("smc", t, sigma, s, t_reach=t_r)


def simulate_st_reduced(sigma0: float, w0: float, alpha: float, beta: float,
                        b_star_phi: float, disturbance: DisturbanceSpec,
                        dt: float = 1e-5, horizon: float = 5.0,
                        band: float | None = None, dwell: float | None = None) -> ReducedTrajectory:
    """Explicit Euler on the super-twisting pair; default band is ``10 dt``."""
    gains = StGains(alpha, beta)
    failed = [c for c in validate_st_gains(gains, disturbance, b_star_phi) if not c.passed]
    if failed:
        raise GainError("; ".join(c.condition for c in failed))
    if not disturbance.has_derivative:
        raise ValueError("super-twisting reduction needs an analytic d'(t)")
    n = _n_steps(horizon, dt)
    t = np.empty(n + 1)
    sigma = np.empty(n + 1)
    w = np.empty(n + 1)
    s = np.empty(n + 1)
    kind, a, omega, phase, _, _ = disturbance.kernel_args()
    kernels.reduced_st(float(sigma0), float(w0), float(alpha), float(beta), float(b_star_phi),
                       kind, a, omega, phase, float(dt), n, t, sigma, w, s)
    traj = ReducedTrajectory("st", t, sigma, s, w)
    t_r = detect_reaching_time(traj, band if band is not None else 10 * dt,
                               dwell if dwell is not None else 0.05)
    return ReducedTrajectory("st", t, sigma, s, w, t_reach=t_r)


def integrator_state(traj: ReducedTrajectory, b_star_phi: float,
                     disturbance: DisturbanceSpec) -> np.ndarray:
    """Recover the controller integrator ``v = w - B*phi d``."""
    if traj.w is None:
        raise ValueError("only super-twisting trajectories carry w")
    return traj.w - b_star_phi * disturbance(traj.t)
