"""Sliding-mode and super-twisting boundary feedback on the sliding variable.

Both laws act on ``sigma = <phi, z>`` for an eigenpair ``(lam, phi)`` and
divide by the boundary trace ``B*phi = phi(1)``:

    SMC:  u = -(lam sigma + K s) / B*phi,                 s in sign(sigma)
    ST:   u = (-lam sigma - alpha |sigma|^(1/2) s + v) / B*phi,
          v' = -beta s
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import kernels
from .disturbance import DisturbanceSpec
from .spectral import Eigenpair

SELECTIONS = ("implicit", "explicit")


class GainError(ValueError):
    """Gains violate the condition that guarantees finite-time reaching."""


class DegenerateTraceError(ValueError):
    """``B*phi == 0``: the control law is undefined."""


@dataclass(frozen=True)
class GainCheck:
    law: str
    condition: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        return self.lhs > self.rhs

    def __bool__(self):
        return self.passed

    def row(self) -> tuple:
        return (self.law, self.condition, self.lhs, self.rhs, self.margin, self.passed)


@dataclass(frozen=True)
class SmcGains:
    K: float

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError(f"K must be positive, got {self.K}")

    def rescaled(self, c: float) -> "SmcGains":
        """Gains for the eigenfunction ``c * phi`` (``K/|B*phi|`` preserved)."""
        return SmcGains(abs(c) * self.K)


@dataclass(frozen=True)
class StGains:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"alpha and beta must be positive, got {self.alpha}, {self.beta}")

    def rescaled(self, c: float) -> "StGains":
        """Gains for the eigenfunction ``c * phi``; both conditions keep their sign."""
        return StGains(math.sqrt(abs(c)) * self.alpha, abs(c) * self.beta)


@dataclass(frozen=True)
class StState:
    v: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.v):
            raise ValueError("super-twisting integrator state must be finite")


def _check_trace(b_star_phi: float) -> None:
    if b_star_phi == 0:
        raise DegenerateTraceError("B*phi = 0, the eigenfunction trace cannot carry control")


def validate_smc_gains(K: float, disturbance: DisturbanceSpec, b_star_phi: float) -> GainCheck:
    """``K > K_d |B*phi|``; the margin is the guaranteed reaching rate."""
    _check_trace(b_star_phi)
    return GainCheck("smc", "K > Kd*|B*phi|", float(K), disturbance.K_d * abs(b_star_phi))


def validate_st_gains(gains: StGains, disturbance: DisturbanceSpec,
                      b_star_phi: float) -> tuple[GainCheck, GainCheck]:
    _check_trace(b_star_phi)
    C = disturbance.C
    if C is None:
        raise GainError("super-twisting needs a certified derivative bound C on the disturbance")
    bc = abs(b_star_phi) * C
    return (
        GainCheck("st", "beta > |B*phi|*C", gains.beta, bc),
        GainCheck("st", "alpha > sqrt(beta + |B*phi|*C)", gains.alpha,
                  math.sqrt(gains.beta + bc)),
    )


def smc_control(sigma: float, pair: Eigenpair, gains: SmcGains, selection: float,
                feedforward: float = 0.0) -> float:
    """``u = Lz - (lam sigma + K s) / B*phi``; ``feedforward`` is the ``Lz`` term."""
    return feedforward - (pair.lam * sigma + gains.K * selection) / pair.b_star_phi


def st_control(sigma: float, state: StState, pair: Eigenpair, gains: StGains,
               selection: float | None = None, feedforward: float = 0.0) -> float:
    """Continuous super-twisting law. ``selection`` only matters at ``sigma == 0``,
    where the ``|sigma|^(1/2)`` factor kills it anyway."""
    s = kernels.sign_of(sigma) if selection is None else selection
    root = math.sqrt(abs(sigma))
    return feedforward + (-pair.lam * sigma - gains.alpha * root * s + state.v) / pair.b_star_phi


def sign_step(sigma: float, drift: float, gain: float, dt: float) -> tuple[float, float]:
    """One implicit step of ``sigma' = drift - gain * s``; returns ``(s, sigma_next)``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    s, nxt = kernels.sign_step(float(sigma), float(drift), float(gain), float(dt))
    return float(s), float(nxt)


def st_integrator_step(state: StState, selection: float, gains: StGains, dt: float) -> StState:
    if abs(selection) > 1.0:
        raise ValueError(f"selection {selection} outside [-1, 1]")
    return replace(state, v=state.v - dt * gains.beta * selection)


@dataclass(frozen=True)
class SlidingModeController:
    pair: Eigenpair
    gains: SmcGains
    selection: str = "implicit"

    law = "smc"

    def __post_init__(self):
        if self.selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")
        _check_trace(self.pair.b_star_phi)

    def validate(self, disturbance: DisturbanceSpec) -> list[GainCheck]:
        return [validate_smc_gains(self.gains.K, disturbance, self.pair.b_star_phi)]


@dataclass(frozen=True)
class SuperTwistingController:
    pair: Eigenpair
    gains: StGains
    initial: StState = StState()

    law = "st"

    def __post_init__(self):
        _check_trace(self.pair.b_star_phi)

    def validate(self, disturbance: DisturbanceSpec) -> list[GainCheck]:
        return list(validate_st_gains(self.gains, disturbance, self.pair.b_star_phi))


@dataclass(frozen=True)
class OpenLoop:
    """``u = 0``; sigma is still measured against ``pair``."""

    pair: Eigenpair

    law = "open"

    def validate(self, disturbance: DisturbanceSpec) -> list[GainCheck]:
        return []
