"""Eigenpairs of the Robin/Neumann heat operator and grid quadrature.

The operator is ``z -> z''`` on [0, 1] with ``z'(0) = c0 z(0)`` and
``z'(1) = 0``. Its eigenpairs are ``(lam, phi)`` with ``lam = -r**2``,

    phi(x) = cos(r x) + (c0 / r) sin(r x),      r tan(r) = c0,

and the actuated-boundary trace is ``B*phi = phi(1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

RESIDUAL_TOL = 1e-12


class BracketError(ValueError):
    """The characteristic function does not change sign on the bracket."""


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, 1] with ``n_nodes`` nodes (endpoints included)."""

    n_nodes: int

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError(f"grid needs at least 2 nodes, got {self.n_nodes}")

    @property
    def dx(self) -> float:
        return 1.0 / (self.n_nodes - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_nodes)

    @property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.n_nodes)

    @classmethod
    def from_dx(cls, dx: float) -> "Grid":
        n = round(1.0 / dx)
        if not math.isclose(n * dx, 1.0, rel_tol=1e-9):
            raise ValueError(f"dx={dx} does not divide [0, 1]")
        return cls(n + 1)


def trapezoid_weights(n_nodes: int) -> np.ndarray:
    h = 1.0 / (n_nodes - 1)
    w = np.full(n_nodes, h)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclass(frozen=True)
class SampledFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"expected {self.grid.n_nodes} nodal values, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, func, grid: Grid) -> "SampledFunction":
        values = np.asarray(func(grid.x), dtype=float)
        return cls(grid, np.broadcast_to(values, (grid.n_nodes,)).copy())


@dataclass(frozen=True)
class Eigenpair:
    """One eigenpair of the heat operator.

    ``scale`` multiplies the raw eigenfunction (``phi(0) = scale``); the
    controllers are written so that they do not depend on it once the gains are
    rescaled with it.
    """

    c0: float
    branch: int
    r: float
    scale: float = 1.0

    @property
    def lam(self) -> float:
        return -self.r * self.r

    @property
    def b_star_phi(self) -> float:
        return self.scale * (math.cos(self.r) + self.c0 / self.r * math.sin(self.r))

    @property
    def residual(self) -> float:
        """Characteristic-equation residual ``|r tan r - c0|``."""
        return abs(self.r * math.tan(self.r) - self.c0)

    def scaled(self, c: float) -> "Eigenpair":
        if c == 0:
            raise ValueError("eigenfunction scale must be non-zero")
        return Eigenpair(self.c0, self.branch, self.r, self.scale * c)

    def __call__(self, x):
        return eigenfunction_eval(self, x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        r, c0 = self.r, self.c0
        return self.scale * (-r * np.sin(r * x) + c0 * np.cos(r * x))


def _characteristic(r: float, c0: float) -> float:
    return r * math.tan(r) - c0


def solve_eigenvalue(c0: float, branch: int = 0) -> Eigenpair:
    """Root of ``r tan r = c0`` in ``(branch*pi, branch*pi + pi/2)``.

    On that interval tan is non-negative and ``r tan r`` increases
    monotonically from ``~0`` to ``+inf``, so bisection always converges.

    >>> round(solve_eigenvalue(0.5, 0).lam, 4)
    -0.4268
    """
    if not c0 > 0:
        raise ValueError(f"c0 must be positive, got {c0}")
    if branch < 0 or int(branch) != branch:
        raise ValueError(f"branch must be a non-negative integer, got {branch}")
    branch = int(branch)
    lo = branch * math.pi
    hi = lo + 0.5 * math.pi
    hi -= 1e-12 * max(1.0, hi)
    f_lo, f_hi = _characteristic(lo, c0), _characteristic(hi, c0)
    if not (f_lo < 0.0 < f_hi):
        raise BracketError(
            f"no sign change on ({lo!r}, {hi!r}) for c0={c0}: f={f_lo:.3e}, {f_hi:.3e}"
        )
    r = bisect(_characteristic, lo, hi, args=(c0,), xtol=1e-16, rtol=4 * np.finfo(float).eps,
               maxiter=200)
    pair = Eigenpair(float(c0), branch, float(r))
    if pair.residual >= residual_tolerance(pair):
        raise BracketError(f"bisection stalled with residual {pair.residual:.3e}")
    return pair


def residual_tolerance(pair: Eigenpair) -> float:
    """``RESIDUAL_TOL``, or the float floor ``|f'(r)| ulp(r)`` of ``f = r tan r - c0``
    when that is larger (high branches, large c0)."""
    r = pair.r
    slope = abs(math.tan(r) + r / math.cos(r) ** 2)
    return max(RESIDUAL_TOL, 8.0 * slope * math.ulp(r))


def approximate_eigenvalue(c0: float) -> float:
    """Closed-form approximation ``-2 c0 - pi**2`` to the branch-1 eigenvalue."""
    return -2.0 * c0 - math.pi ** 2


def eigenfunction_eval(pair: Eigenpair, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("eigenfunction is defined on [0, 1]")
    r = pair.r
    out = pair.scale * (np.cos(r * x) + pair.c0 / r * np.sin(r * x))
    return float(out) if out.ndim == 0 else out


def sample_eigenfunction(pair: Eigenpair, grid: Grid) -> SampledFunction:
    return SampledFunction(grid, eigenfunction_eval(pair, grid.x))


def inner_product(f: SampledFunction, g: SampledFunction) -> float:
    """Composite-trapezoid approximation of the L2(0, 1) inner product."""
    if f.grid != g.grid:
        raise GridMismatchError(f"{f.grid} vs {g.grid}")
    return float(np.dot(f.grid.weights, f.values * g.values))


def l2_norm(f: SampledFunction) -> float:
    return math.sqrt(inner_product(f, f))


def eigen_residual(pair: Eigenpair, grid: Grid) -> dict[str, float]:
    """Residual of the sampled eigenfunction under the discrete heat operator.

    Returns the trapezoid-weighted L1 norm ``weighted_l1`` (the norm that
    bounds the sliding-variable defect against ``max|z|``), the max-norm over
    interior nodes, and the max-norm over all nodes. The Robin row at x = 0
    is first-order pointwise, so ``max_all`` converges at O(dx) only.
    """
    from .heat_sim import operator_matrix

    A = operator_matrix(grid, pair.c0)
    phi = sample_eigenfunction(pair, grid).values
    res = A @ phi - pair.lam * phi
    return {
        "weighted_l1": float(np.dot(grid.weights, np.abs(res))),
        "max_interior": float(np.max(np.abs(res[1:-1]))) if grid.n_nodes > 2 else 0.0,
        "max_all": float(np.max(np.abs(res))),
    }
