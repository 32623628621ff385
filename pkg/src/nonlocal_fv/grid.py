"""Mesh construction and projection of prescribed data onto it.

The interval ]a, b[ is split into N cells of width dx with centers
x_j = a + (j - 1/2) dx and interfaces x_{j+1/2} = a + j dx. The time step
obeys the stability cap

    lambda = dt/dx <= 1/3 min{ 1/alpha, 1/(2L + C dx) },

and the horizon T is snapped to a whole number of steps by shrinking dt.
Initial data are projected to cell averages, boundary data to slab averages
(1/dt) integral_{t^n}^{t^{n+1}}; both projections are plain averaging, so
they contract sup norms and total variation and preserve mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    CFLViolation,
    InvalidCellCount,
    InvalidDomain,
    InvalidMesh,
    NegativeDatum,
)
from .fluxes import FluxBounds
from .quadrature import average

__all__ = [
    "Mesh",
    "DataFn",
    "ProblemData",
    "ProjectedData",
    "build_mesh",
    "constant_data",
    "step_data",
    "sine_data",
    "table_data",
    "project_initial",
    "project_boundary",
    "project_all",
]


@dataclass(frozen=True)
class Mesh:
    """Uniform space-time mesh. Construct through build_mesh for validation."""

    a: float
    b: float
    N: int
    dx: float
    dt: float
    lam: float
    alpha: float
    T: float
    n_steps: int
    cfl_limit: Optional[float] = None

    @property
    def cell_centers(self) -> np.ndarray:
        return self.a + (np.arange(1, self.N + 1) - 0.5) * self.dx

    @property
    def interfaces(self) -> np.ndarray:
        return self.a + np.arange(self.N + 1) * self.dx

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


def cfl_cap(alpha: float, bounds: FluxBounds, dx: float) -> float:
    """Largest admissible lambda for the given constants and cell width."""
    return (1.0 / 3.0) * min(1.0 / alpha, 1.0 / (2.0 * bounds.L + bounds.C * dx))


def build_mesh(
    a: float,
    b: float,
    N: int,
    T: float,
    alpha,
    bounds: FluxBounds,
    safety: float = 1.0,
    lam: Optional[float] = None,
) -> Mesh:
    """Build a mesh whose time step satisfies the stability cap.

    alpha is either the string "auto" (resolved to max(L, 1)) or a number,
    auto-raised to L when smaller. With lam=None the step is dt =
    safety * dx * cap, then shrunk so n_steps * dt = T exactly. A fixed lam
    is honored as-is (dt shrunk the same way) and rejected with CFLViolation
    when it exceeds the cap; it is never silently reduced.
    """
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise InvalidDomain(f"domain [{a}, {b}] needs finite a < b")
    if not (isinstance(N, (int, np.integer)) and N >= 1):
        raise InvalidCellCount(f"cell count must be a positive integer, got {N!r}")
    if not (np.isfinite(T) and T > 0):
        raise InvalidMesh(f"horizon T must be positive, got {T!r}")
    if not (0 < safety <= 1):
        raise InvalidMesh(f"cfl_safety must lie in (0, 1], got {safety!r}")

    if alpha == "auto":
        alpha_val = max(bounds.L, 1.0)
    else:
        alpha_val = float(alpha)
        if not (np.isfinite(alpha_val) and alpha_val > 0):
            raise InvalidMesh(f"alpha must be positive, got {alpha!r}")
        alpha_val = max(alpha_val, bounds.L)

    dx = (b - a) / N
    cap = cfl_cap(alpha_val, bounds, dx)

    if lam is None:
        dt_raw = safety * dx * cap
    else:
        lam = float(lam)
        if not (np.isfinite(lam) and lam > 0):
            raise InvalidMesh(f"lambda must be positive, got {lam!r}")
        if lam > cap * (1.0 + 1e-12):
            raise CFLViolation(
                f"lambda = {lam:.6e} exceeds the cap {cap:.6e} "
                f"(alpha={alpha_val:.6g}, L={bounds.L:.6g}, C={bounds.C:.6g}, dx={dx:.6g})"
            )
        dt_raw = lam * dx

    n_steps = max(1, math.ceil(T / dt_raw - 1e-9))
    dt = T / n_steps
    lam_eff = dt / dx
    if lam_eff > cap * (1.0 + 1e-12):
        raise CFLViolation(f"effective lambda = {lam_eff:.6e} exceeds the cap {cap:.6e}")
    return Mesh(
        a=float(a), b=float(b), N=int(N), dx=dx, dt=dt, lam=lam_eff,
        alpha=alpha_val, T=float(T), n_steps=n_steps, cfl_limit=cap,
    )


@dataclass(frozen=True)
class DataFn:
    """One prescribed datum: a vectorized map plus integration metadata.

    breakpoints mark where the map is not smooth so averaging quadrature can
    split panels there (exactness for piecewise-polynomial data). sup is the
    declared sup norm when known in closed form; estimated flags data whose
    norms can only be sampled.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple = ()
    sup: Optional[float] = None
    estimated: bool = False
    kind: str = "callable"
    meta: dict = field(default_factory=dict)

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=float))

    def sup_estimate(self, lo: float, hi: float, n: int = 4096) -> float:
        """Declared sup norm, or a dense-sampling estimate on [lo, hi]."""
        if self.sup is not None:
            return self.sup
        z = np.linspace(lo, hi, n)
        return float(np.max(np.abs(self(z))))


def _as_datafn(data) -> DataFn:
    if isinstance(data, DataFn):
        return data
    if callable(data):
        return DataFn(fn=lambda z: np.asarray(data(z), dtype=float), estimated=True)
    raise TypeError(f"expected DataFn or callable, got {type(data).__name__}")


def constant_data(value: float) -> DataFn:
    value = float(value)
    return DataFn(
        fn=lambda z: np.full(np.shape(z), value),
        sup=abs(value),
        kind="constant",
        meta={"value": value},
    )


def step_data(left: float, right: float, where: float) -> DataFn:
    """Piecewise-constant jump: `left` before `where`, `right` from it on."""
    left, right, where = float(left), float(right), float(where)
    return DataFn(
        fn=lambda z: np.where(np.asarray(z, dtype=float) < where, left, right),
        breakpoints=(where,),
        sup=max(abs(left), abs(right)),
        kind="step",
        meta={"left": left, "right": right, "where": where},
    )


def sine_data(offset: float, amplitude: float, frequency: int, span: tuple[float, float]) -> DataFn:
    """Smooth bump offset + amplitude sin(pi k xi)^2, xi normalized on span."""
    offset, amplitude = float(offset), float(amplitude)
    k = int(frequency)
    lo, hi = float(span[0]), float(span[1])
    if not hi > lo:
        raise InvalidDomain(f"sine span [{lo}, {hi}] has no interior")
    if k < 1:
        raise InvalidMesh(f"sine frequency must be a positive integer, got {frequency!r}")
    if amplitude < 0:
        raise InvalidMesh("sine amplitude must be nonnegative")

    def fn(z):
        xi = (np.asarray(z, dtype=float) - lo) / (hi - lo)
        return offset + amplitude * np.sin(np.pi * k * xi) ** 2

    return DataFn(
        fn=fn,
        sup=offset + amplitude,
        kind="sine",
        meta={"offset": offset, "amplitude": amplitude, "frequency": k, "span": (lo, hi)},
    )


def table_data(points: np.ndarray, values: np.ndarray) -> DataFn:
    """Piecewise-linear interpolant of sample points (clamped extrapolation)."""
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if points.ndim != 1 or points.shape != values.shape or points.size < 2:
        raise InvalidMesh("table data needs matching 1-d arrays with at least two points")
    if not np.all(np.diff(points) > 0):
        raise InvalidMesh("table abscissae must be strictly increasing")
    return DataFn(
        fn=lambda z: np.interp(np.asarray(z, dtype=float), points, values),
        breakpoints=tuple(points),
        sup=float(np.max(np.abs(values))),
        kind="table",
        meta={"n_points": int(points.size)},
    )


@dataclass(frozen=True)
class ProblemData:
    """Initial datum on ]a, b[ and boundary data on [0, T]."""

    initial: DataFn
    left: DataFn
    right: DataFn


@dataclass(frozen=True)
class ProjectedData:
    """Discrete data: cell averages rho0 and slab-averaged traces.

    Traces carry indices 0..n_steps; the trailing slab [T, T + dt] reads the
    datum clamped at T, so the last transition has both of its traces.
    """

    rho0: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        for arr in (self.rho0, self.left, self.right):
            arr.setflags(write=False)


def _check_nonnegative(values: np.ndarray, label: str):
    worst = float(np.min(values))
    if worst < -1e-13:
        raise NegativeDatum(f"{label} takes negative values (min {worst:.3e})")


def project_initial(data, mesh: Mesh) -> np.ndarray:
    """Cell averages of the initial datum, exact across declared breakpoints."""
    data = _as_datafn(data)
    edges = mesh.interfaces
    out = np.empty(mesh.N)
    for j in range(mesh.N):
        out[j] = average(data.fn, edges[j], edges[j + 1], panels=4, breakpoints=data.breakpoints)
    samples = data(np.linspace(mesh.a, mesh.b, 16 * mesh.N + 1))
    _check_nonnegative(np.concatenate([out, samples]), "initial datum")
    return out


def project_boundary(data, mesh: Mesh) -> np.ndarray:
    """Slab averages of a boundary datum for n = 0..n_steps.

    The datum is clamped to [0, T]: the trailing slab, which extends past
    the horizon after snapping, reads the final value.
    """
    data = _as_datafn(data)
    T, dt = mesh.T, mesh.dt
    clamped = lambda s: data.fn(np.minimum(np.asarray(s, dtype=float), T))
    breakpoints = tuple(p for p in data.breakpoints if 0.0 < p < T) + (T,)
    out = np.empty(mesh.n_steps + 1)
    for n in range(mesh.n_steps):
        out[n] = average(clamped, n * dt, (n + 1) * dt, panels=4, breakpoints=breakpoints)
    out[mesh.n_steps] = float(np.asarray(data.fn(np.array([T])))[0])
    samples = data(np.linspace(0.0, T, 16 * mesh.n_steps + 1))
    _check_nonnegative(np.concatenate([out, samples]), "boundary datum")
    return out


def project_all(problem: ProblemData, mesh: Mesh) -> ProjectedData:
    return ProjectedData(
        rho0=project_initial(problem.initial, mesh),
        left=project_boundary(problem.left, mesh),
        right=project_boundary(problem.right, mesh),
    )
