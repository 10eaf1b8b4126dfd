"""Boundary disturbance signals with their certified bounds.

``K_d`` bounds ``|d(t)|`` and ``C`` bounds ``|d'(t)|``. For the analytic
kinds both are derived from the parameters; a ``table`` disturbance carries
whatever the user certifies.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("zero", "constant", "sinusoid", "table")
KIND_CODES = {k: i for i, k in enumerate(KINDS)}


@dataclass(frozen=True)
class DisturbanceSpec:
    kind: str = "zero"
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    table_t: tuple = field(default=(), repr=False)
    table_d: tuple = field(default=(), repr=False)
    kd: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "table":
            t = np.asarray(self.table_t, dtype=float)
            d = np.asarray(self.table_d, dtype=float)
            if t.ndim != 1 or t.shape != d.shape or t.size < 2:
                raise ValueError("table disturbance needs matching 1-D t/d samples (>= 2)")
            if np.any(np.diff(t) <= 0):
                raise ValueError("table times must be strictly increasing")
            if self.kd is None:
                raise ValueError("table disturbance needs a certified kd")
            if np.max(np.abs(d)) > self.kd:
                raise ValueError(f"table exceeds its certified bound kd={self.kd}")
            object.__setattr__(self, "table_t", tuple(t.tolist()))
            object.__setattr__(self, "table_d", tuple(d.tolist()))

    @classmethod
    def zero(cls) -> "DisturbanceSpec":
        return cls("zero")

    @classmethod
    def constant(cls, a: float) -> "DisturbanceSpec":
        return cls("constant", amplitude=a)

    @classmethod
    def sinusoid(cls, a: float, omega: float, phase: float = 0.0) -> "DisturbanceSpec":
        return cls("sinusoid", amplitude=a, omega=omega, phase=phase)

    @classmethod
    def table(cls, t, d, kd: float, c: float | None = None) -> "DisturbanceSpec":
        return cls("table", table_t=tuple(t), table_d=tuple(d), kd=kd, c=c)

    @property
    def K_d(self) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind in ("constant", "sinusoid"):
            return abs(self.amplitude)
        return float(self.kd)

    @property
    def C(self) -> float | None:
        """Derivative bound, ``None`` when not certified."""
        if self.kind in ("zero", "constant"):
            return 0.0
        if self.kind == "sinusoid":
            return abs(self.amplitude * self.omega)
        return self.c

    @property
    def has_derivative(self) -> bool:
        return self.kind != "table"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(t)
        elif self.kind == "constant":
            out = np.full_like(t, self.amplitude)
        elif self.kind == "sinusoid":
            out = self.amplitude * np.sin(self.omega * t + self.phase)
        else:
            out = np.interp(t, self.table_t, self.table_d)
        return float(out) if out.ndim == 0 else out

    def derivative(self, t):
        """Analytic ``d'(t)``; table data has none."""
        t = np.asarray(t, dtype=float)
        if self.kind in ("zero", "constant"):
            out = np.zeros_like(t)
        elif self.kind == "sinusoid":
            out = self.amplitude * self.omega * np.cos(self.omega * t + self.phase)
        else:
            raise ValueError("table disturbance has no analytic derivative")
        return float(out) if out.ndim == 0 else out

    def kernel_args(self):
        """Flat argument tuple understood by the compiled kernels."""
        tab_t = np.asarray(self.table_t if self.kind == "table" else (0.0, 1.0), dtype=float)
        tab_d = np.asarray(self.table_d if self.kind == "table" else (0.0, 0.0), dtype=float)
        return (KIND_CODES[self.kind], float(self.amplitude), float(self.omega),
                float(self.phase), tab_t, tab_d)

    def describe(self) -> str:
        if self.kind == "sinusoid":
            return f"{self.amplitude:g}*sin({self.omega:g}t{self.phase:+g})"
        if self.kind == "constant":
            return f"{self.amplitude:g}"
        return self.kind

