"""Deterministic fixed-rule quadrature helpers.

Two rules cover every integral in the package: composite Simpson on uniform
panels (kernel norms, window weights) and composite 16-point Gauss-Legendre
(cell and slab averages of prescribed data, which may only be piecewise
smooth; panels are split at declared breakpoints so piecewise-polynomial data
integrate exactly).
"""

from __future__ import annotations

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def simpson(f, lo: float, hi: float, panels: int) -> float:
    """Composite Simpson rule with `panels` uniform panels (panels >= 2, even)."""
    if hi <= lo:
        return 0.0
    panels = int(panels)
    if panels % 2:
        panels += 1
    x = np.linspace(lo, hi, panels + 1)
    y = np.asarray(f(x), dtype=float)
    h = (hi - lo) / panels
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def gauss_panel(f, lo: float, hi: float) -> float:
    """16-point Gauss-Legendre on a single panel."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return float(half * np.dot(_GL_WEIGHTS, np.asarray(f(mid + half * _GL_NODES), dtype=float)))


def average(f, lo: float, hi: float, panels: int = 4, breakpoints=()) -> float:
    """Mean value of f over [lo, hi].

    The interval is first split at every breakpoint that falls strictly
    inside, then each piece is subdivided so the total panel count is at
    least `panels`; a 16-point Gauss-Legendre rule integrates each panel.
    Exact for data that are polynomial between breakpoints.
    """
    if hi <= lo:
        raise ValueError("average needs lo < hi")
    cuts = [lo]
    for b in sorted(set(float(b) for b in breakpoints)):
        if lo < b < hi and b - cuts[-1] > 1e-15 * (hi - lo):
            cuts.append(b)
    cuts.append(hi)
    total = 0.0
    for left, right in zip(cuts[:-1], cuts[1:]):
        sub = max(1, int(np.ceil(panels * (right - left) / (hi - lo))))
        edges = np.linspace(left, right, sub + 1)
        for p_lo, p_hi in zip(edges[:-1], edges[1:]):
            total += gauss_panel(f, p_lo, p_hi)
    return total / (hi - lo)
