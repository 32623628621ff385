"""Convolution kernels and their boundary-aware discrete form.

A kernel is a C^2 function with compact support and unit integral; it may
take negative values. On a bounded interval the convolution is renormalized
by the window weight W(x) = integral of omega(. - x) over the domain, so the
nonlocal term is a weighted average of the cell values,

    R_{j+1/2} = dx / W_{j+1/2} * sum_k omega^{k-j} rho_k,

with the weight table omega^m either sampled at offset midpoints or averaged
over offset cells. Every operation requires W_{j+1/2} > 0 and fails loudly
otherwise; nothing here assumes omega >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DegenerateSupport,
    InvalidCellCount,
    LengthMismatch,
    NonFiniteValue,
    NonPositiveWindow,
)
from .quadrature import average, simpson

__all__ = [
    "KernelSpec",
    "KernelNorms",
    "DiscreteKernel",
    "triweight",
    "lookahead",
    "kernel_norms",
    "build_discrete_kernel",
    "nonlocal_average",
]


@dataclass(frozen=True)
class KernelSpec:
    """A C^2 kernel with compact support and unit integral.

    Attributes
    ----------
    name : str
        Identifier used in configs and reports.
    support : tuple of float
        Closed interval outside which the kernel vanishes.
    evaluate, derivative1, derivative2 : callable
        Vectorized evaluations of omega, omega', omega''. They must return
        zero outside the support and join C^2-continuously at its endpoints.
    """

    name: str
    support: tuple[float, float]
    evaluate: Callable[[np.ndarray], np.ndarray]
    derivative1: Callable[[np.ndarray], np.ndarray]
    derivative2: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        lo, hi = self.support
        if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
            raise DegenerateSupport(f"kernel support {self.support!r} has no interior")


def triweight(h: float) -> KernelSpec:
    """Symmetric triweight kernel (35/(32h)) (1 - (y/h)^2)^3 on [-h, h]."""
    if not (np.isfinite(h) and h > 0):
        raise DegenerateSupport(f"triweight needs h > 0, got {h!r}")
    amp = 35.0 / (32.0 * h)

    def value(y):
        u = np.asarray(y, dtype=float) / h
        inside = np.abs(u) < 1.0
        core = np.where(inside, 1.0 - u * u, 0.0)
        return amp * core**3

    def d1(y):
        u = np.asarray(y, dtype=float) / h
        inside = np.abs(u) < 1.0
        core = np.where(inside, 1.0 - u * u, 0.0)
        return -(6.0 * amp / h) * u * core**2 * inside

    def d2(y):
        u = np.asarray(y, dtype=float) / h
        inside = np.abs(u) < 1.0
        core = np.where(inside, 1.0 - u * u, 0.0)
        return -(6.0 * amp / (h * h)) * core * (1.0 - 5.0 * u * u) * inside

    return KernelSpec(name="triweight", support=(-h, h), evaluate=value, derivative1=d1, derivative2=d2)


def lookahead(h: float) -> KernelSpec:
    """One-sided kernel (140/h) (u(1-u))^3 with u = y/h on [0, h].

    Weighs only what lies ahead of x. On a bounded interval its window
    weight vanishes at the right endpoint, so discretizations near x = b
    are rejected by the window check; the kernel itself is admissible.
    """
    if not (np.isfinite(h) and h > 0):
        raise DegenerateSupport(f"lookahead needs h > 0, got {h!r}")
    amp = 140.0 / h

    def value(y):
        u = np.asarray(y, dtype=float) / h
        inside = (u > 0.0) & (u < 1.0)
        core = np.where(inside, u * (1.0 - u), 0.0)
        return amp * core**3

    def d1(y):
        u = np.asarray(y, dtype=float) / h
        inside = (u > 0.0) & (u < 1.0)
        g1 = 3.0 * u**2 * (1.0 - u) ** 2 * (1.0 - 2.0 * u)
        return (amp / h) * np.where(inside, g1, 0.0)

    def d2(y):
        u = np.asarray(y, dtype=float) / h
        inside = (u > 0.0) & (u < 1.0)
        g2 = 6.0 * u * (1.0 - u) * (5.0 * u * u - 5.0 * u + 1.0)
        return (amp / (h * h)) * np.where(inside, g2, 0.0)

    return KernelSpec(name="lookahead", support=(0.0, h), evaluate=value, derivative1=d1, derivative2=d2)


@dataclass(frozen=True)
class KernelNorms:
    """Measured kernel norms feeding every a-priori constant.

    sup_w, sup_w1, sup_w2 are the sup norms of omega and its first two
    derivatives; l1_w1, l1_w2 the L1 norms of the derivatives; k_omega the
    minimum window weight min_x integral_a^b omega(y - x) dy over the domain.
    """

    sup_w: float
    sup_w1: float
    sup_w2: float
    l1_w1: float
    l1_w2: float
    k_omega: float


# Sampling resolutions for the measured norms. Fixed so independent
# recomputations using the same rule agree to rounding.
SUP_SAMPLES = 4097
WINDOW_SAMPLES = 1025


def kernel_norms(kernel: KernelSpec, mesh, quadrature_points: int = 2048) -> KernelNorms:
    """Measure the norm bundle of a kernel over the mesh's domain.

    Sup norms are dense-sampled on SUP_SAMPLES points of the support; L1
    norms use composite Simpson with max(quadrature_points, 1024) panels;
    k_omega is the minimum of the window weight over WINDOW_SAMPLES domain
    points (endpoints included), each window integrated by the same Simpson
    rule on the overlap of domain and support.

    Raises NonPositiveWindow if the measured k_omega is not positive.
    """
    s_lo, s_hi = kernel.support
    a, b = float(mesh.a), float(mesh.b)
    panels = max(int(quadrature_points), 1024)

    y = np.linspace(s_lo, s_hi, SUP_SAMPLES)
    sup_w = float(np.max(np.abs(kernel.evaluate(y))))
    sup_w1 = float(np.max(np.abs(kernel.derivative1(y))))
    sup_w2 = float(np.max(np.abs(kernel.derivative2(y))))

    l1_w1 = simpson(lambda t: np.abs(kernel.derivative1(t)), s_lo, s_hi, panels)
    l1_w2 = simpson(lambda t: np.abs(kernel.derivative2(t)), s_lo, s_hi, panels)

    k_omega = np.inf
    for x in np.linspace(a, b, WINDOW_SAMPLES):
        lo = max(a - x, s_lo)
        hi = min(b - x, s_hi)
        w = simpson(kernel.evaluate, lo, hi, panels) if hi > lo else 0.0
        k_omega = min(k_omega, w)
    if not k_omega > 0.0:
        raise NonPositiveWindow(
            f"window weight of kernel {kernel.name!r} reaches {k_omega:.3e} on [{a}, {b}]"
        )
    return KernelNorms(sup_w=sup_w, sup_w1=sup_w1, sup_w2=sup_w2, l1_w1=l1_w1, l1_w2=l1_w2, k_omega=k_omega)


@dataclass(frozen=True)
class DiscreteKernel:
    """Kernel weight table bound to one mesh.

    weights[i] is omega^m for offset m = offsets[i], covering every offset
    k - j with j in {0..N}, k in {1..N}. interface_mass[j] is the window
    weight W_{j+1/2} = dx * sum_k omega^{k-j}, strictly positive by
    construction. mode records how the table was built ("midpoint" samples
    omega((m - 1/2) dx), "cell_average" integrates omega over offset cells).
    """

    mode: str
    dx: float
    n_cells: int
    offsets: np.ndarray
    weights: np.ndarray
    interface_mass: np.ndarray
    _window: np.ndarray = field(repr=False)
    _m_hi: int = field(repr=False)

    def __post_init__(self):
        for arr in (self.offsets, self.weights, self.interface_mass, self._window):
            arr.setflags(write=False)


def _correlate(window: np.ndarray, m_hi: int, n: int, values: np.ndarray) -> np.ndarray:
    # S[j] = sum_{k=1..N} omega^{k-j} values_k for j = 0..N, by direct
    # correlation against the support window (no FFT).
    c = np.convolve(values, window[::-1])
    return c[m_hi - 1 : m_hi + n]


def _windowed_sum(dk: DiscreteKernel, values: np.ndarray) -> np.ndarray:
    return _correlate(dk._window, dk._m_hi, dk.n_cells, values)


def build_discrete_kernel(kernel: KernelSpec, mesh, mode: str = "midpoint") -> DiscreteKernel:
    """Tabulate kernel weights and window weights W_{j+1/2} on a mesh.

    Raises NonPositiveWindow as soon as any W_{j+1/2} <= 0; a one-sided
    kernel on a bounded domain fails here by construction.
    """
    if mode not in ("midpoint", "cell_average"):
        raise ValueError(f"unknown discretization mode {mode!r}")
    n = int(mesh.N)
    if n < 1:
        raise InvalidCellCount(f"mesh must have at least one cell, got N={n}")
    dx = float(mesh.dx)
    s_lo, s_hi = kernel.support

    offsets = np.arange(1 - n, n + 1)
    if mode == "midpoint":
        weights = np.asarray(kernel.evaluate((offsets - 0.5) * dx), dtype=float)
    else:
        weights = np.zeros(offsets.size)
        for i, m in enumerate(offsets):
            lo, hi = (m - 1.0) * dx, m * dx
            if hi <= s_lo or lo >= s_hi:
                continue
            weights[i] = average(kernel.evaluate, lo, hi, panels=1, breakpoints=(s_lo, s_hi))
    if not np.all(np.isfinite(weights)):
        raise NonFiniteValue(f"kernel {kernel.name!r} produced non-finite weights")

    nz = np.nonzero(weights)[0]
    if nz.size:
        m_lo, m_hi = int(offsets[nz[0]]), int(offsets[nz[-1]])
    else:
        m_lo, m_hi = 0, 1
    # Window always spans offsets [min(m_lo,0), max(m_hi,1)] so the
    # correlation below stays in range for every interface index.
    m_lo, m_hi = min(m_lo, 0), max(m_hi, 1)
    window = np.zeros(m_hi - m_lo + 1)
    for m in range(max(m_lo, 1 - n), min(m_hi, n) + 1):
        window[m - m_lo] = weights[m - (1 - n)]

    mass = dx * _correlate(window, m_hi, n, np.ones(n))
    if not np.all(mass > 0.0):
        j_bad = int(np.argmin(mass))
        raise NonPositiveWindow(
            f"W_{{{j_bad}+1/2}} = {mass[j_bad]:.6e} <= 0 for kernel {kernel.name!r} "
            f"(mode={mode}, dx={dx:.6e})"
        )
    return DiscreteKernel(
        mode=mode,
        dx=dx,
        n_cells=n,
        offsets=offsets,
        weights=weights,
        interface_mass=mass,
        _window=window,
        _m_hi=m_hi,
    )


def nonlocal_average(dk: DiscreteKernel, cells: np.ndarray) -> np.ndarray:
    """Weighted averages R_{j+1/2}, j = 0..N, of the cell values.

    Direct correlation against the weight window, renormalized by the
    interface masses. For a nonnegative kernel the result lies in the hull
    of the cell values; signed kernels may leave it.
    """
    cells = np.asarray(cells, dtype=float)
    if cells.shape != (dk.n_cells,):
        raise LengthMismatch(f"expected {dk.n_cells} cell values, got shape {cells.shape}")
    if not np.all(np.isfinite(cells)):
        raise NonFiniteValue("cell values must be finite")
    return dk.dx * _windowed_sum(dk, cells) / dk.interface_mass
