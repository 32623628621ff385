"""Flux models f(t, x, rho, R) and their measured envelope constants.

A model bundles the flux with its first and second partial derivatives and a
validity box on which sup-norm constants are taken. The constants feeding
the scheme and every a-priori estimate are

    L  >= sup |d_rho f|,
    C  >= sup of |d_x f|, |d_R f|, |d_xx f|, |d_xR f|, |d_RR f| relative to |rho|,
    and the plain sup norms of the mixed derivatives d_rhox f, d_rhoR f.

Models vanishing at rho = 0 are required (f(t, x, 0, R) = 0), which is what
lets the x/R derivatives be dominated by C |rho|. Both L and C are floored
at 1e-6 so the time-step cap stays well defined for degenerate models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import EmptyBox, NonFiniteValue

__all__ = [
    "Box",
    "FluxModel",
    "FluxBounds",
    "BoxAudit",
    "nonlocal_lwr",
    "linear_advection",
    "zero_flux",
    "evaluate_flux",
    "flux_bounds",
    "check_flux_contract",
    "BOUND_FLOOR",
]

BOUND_FLOOR = 1e-6


@dataclass(frozen=True)
class Box:
    """Validity box [t] x [x] x [rho] x [R] for sup-norm evaluation."""

    t: tuple[float, float]
    x: tuple[float, float]
    rho: tuple[float, float]
    R: tuple[float, float]

    def __post_init__(self):
        for name in ("rho", "R"):
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
                raise EmptyBox(f"box.{name} = [{lo}, {hi}] has empty interior")
        for name in ("t", "x"):
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi) and hi >= lo):
                raise EmptyBox(f"box.{name} = [{lo}, {hi}] is not an interval")


@dataclass(frozen=True)
class FluxBounds:
    """Envelope constants of one flux model on one box."""

    L: float
    C: float
    sup_d_rhox: float
    sup_d_rhoR: float
    box: Box


@dataclass(frozen=True)
class FluxModel:
    """Flux and derivative bundle; all callables broadcast over numpy inputs."""

    name: str
    value: Callable
    d_rho: Callable
    d_x: Callable
    d_R: Callable
    d_xx: Callable
    d_xR: Callable
    d_RR: Callable
    d_rhox: Callable
    d_rhoR: Callable
    params: dict = field(default_factory=dict)
    analytic_bounds: Optional[Callable[[Box], "FluxBounds"]] = None
    default_box: Optional[tuple] = None  # ((rho_lo, rho_hi), (R_lo, R_hi))


@dataclass
class BoxAudit:
    """Counts evaluations that fell outside the declared box."""

    outside: int = 0
    total: int = 0


def _shaped(const: float):
    def fn(t, x, rho, R):
        shape = np.broadcast(np.asarray(t), np.asarray(x), np.asarray(rho), np.asarray(R)).shape
        return np.full(shape, const)

    return fn


_zero = _shaped(0.0)


def nonlocal_lwr(v_max: float = 1.0, rho_max: float = 1.0) -> FluxModel:
    """Traffic flux rho v_max (1 - R/rho_max): speed set by the nonlocal average."""
    if not (v_max > 0 and rho_max > 0):
        raise ValueError("nonlocal-lwr needs v_max > 0 and rho_max > 0")
    v, rm = float(v_max), float(rho_max)

    def value(t, x, rho, R):
        return np.asarray(rho) * v * (1.0 - np.asarray(R) / rm)

    def d_rho(t, x, rho, R):
        out = v * (1.0 - np.asarray(R) / rm)
        return np.broadcast_arrays(out, np.asarray(rho))[0]

    def d_R(t, x, rho, R):
        out = -v * np.asarray(rho) / rm
        return np.broadcast_arrays(out, np.asarray(R))[0]

    def bounds(box: Box) -> FluxBounds:
        r_lo, r_hi = box.R
        L = v * max(abs(1.0 - r_lo / rm), abs(1.0 - r_hi / rm))
        return FluxBounds(L=L, C=v / rm, sup_d_rhox=0.0, sup_d_rhoR=v / rm, box=box)

    return FluxModel(
        name="nonlocal-lwr",
        value=value,
        d_rho=d_rho,
        d_x=_zero,
        d_R=d_R,
        d_xx=_zero,
        d_xR=_zero,
        d_RR=_zero,
        d_rhox=_zero,
        d_rhoR=_shaped(-v / rm),
        params={"v_max": v, "rho_max": rm},
        analytic_bounds=bounds,
        default_box=((0.0, rm), (0.0, rm)),
    )


def linear_advection(c: float = 1.0) -> FluxModel:
    """Constant-speed transport f = c rho; blind to x and R."""
    c = float(c)

    def value(t, x, rho, R):
        return c * np.asarray(rho)

    def bounds(box: Box) -> FluxBounds:
        return FluxBounds(L=abs(c), C=0.0, sup_d_rhox=0.0, sup_d_rhoR=0.0, box=box)

    return FluxModel(
        name="linear-advection",
        value=value,
        d_rho=_shaped(c),
        d_x=_zero,
        d_R=_zero,
        d_xx=_zero,
        d_xR=_zero,
        d_RR=_zero,
        d_rhox=_zero,
        d_rhoR=_zero,
        params={"c": c},
        analytic_bounds=bounds,
        default_box=None,
    )


def zero_flux() -> FluxModel:
    """Identically zero flux; the scheme reduces to pure numerical diffusion."""

    def bounds(box: Box) -> FluxBounds:
        return FluxBounds(L=0.0, C=0.0, sup_d_rhox=0.0, sup_d_rhoR=0.0, box=box)

    return FluxModel(
        name="zero-flux",
        value=_zero,
        d_rho=_zero,
        d_x=_zero,
        d_R=_zero,
        d_xx=_zero,
        d_xR=_zero,
        d_RR=_zero,
        d_rhox=_zero,
        d_rhoR=_zero,
        params={},
        analytic_bounds=bounds,
        default_box=None,
    )


BUILTIN_FLUXES = {
    "nonlocal-lwr": nonlocal_lwr,
    "linear-advection": linear_advection,
    "zero-flux": zero_flux,
}


def evaluate_flux(model: FluxModel, t, x, rho, R, box: Optional[Box] = None, audit: Optional[BoxAudit] = None):
    """Evaluate f(t, x, rho, R) with a finiteness check.

    When a box and an audit are supplied, arguments falling outside the box
    are counted on the audit (soft check; the value is still returned).
    """
    out = np.asarray(model.value(t, x, rho, R), dtype=float)
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue(f"flux model {model.name!r} returned non-finite values")
    if box is not None and audit is not None:
        rho_a, R_a = np.asarray(rho, dtype=float), np.asarray(R, dtype=float)
        bad = (rho_a < box.rho[0]) | (rho_a > box.rho[1]) | (R_a < box.R[0]) | (R_a > box.R[1])
        audit.outside += int(np.count_nonzero(bad))
        audit.total += int(np.broadcast(rho_a, R_a).size)
    return out


def _apply_floors(b: FluxBounds) -> FluxBounds:
    return FluxBounds(
        L=max(b.L, BOUND_FLOOR),
        C=max(b.C, BOUND_FLOOR),
        sup_d_rhox=b.sup_d_rhox,
        sup_d_rhoR=b.sup_d_rhoR,
        box=b.box,
    )


def flux_bounds(model: FluxModel, box: Box, samples: int = 4096, seed: int = 0) -> FluxBounds:
    """Envelope constants on the box.

    Uses the model's declared analytic bounds when available; otherwise
    estimates the sup norms from uniform random samples inflated by 1.25.
    Both paths floor L and C at BOUND_FLOOR.
    """
    if model.analytic_bounds is not None:
        return _apply_floors(model.analytic_bounds(box))

    rng = np.random.default_rng(seed)
    n = max(int(samples), 1000)
    t = rng.uniform(box.t[0], box.t[1], n)
    x = rng.uniform(box.x[0], box.x[1], n)
    rho = rng.uniform(box.rho[0], box.rho[1], n)
    R = rng.uniform(box.R[0], box.R[1], n)

    L = np.max(np.abs(model.d_rho(t, x, rho, R)))
    rho_scaled = []
    for deriv in (model.d_x, model.d_R, model.d_xx, model.d_xR, model.d_RR):
        vals = np.abs(np.asarray(deriv(t, x, rho, R), dtype=float))
        mask = np.abs(rho) > 1e-12
        if np.any(mask):
            rho_scaled.append(np.max(vals[mask] / np.abs(rho[mask])))
    C = max(rho_scaled) if rho_scaled else 0.0
    sup_rhox = np.max(np.abs(model.d_rhox(t, x, rho, R)))
    sup_rhoR = np.max(np.abs(model.d_rhoR(t, x, rho, R)))
    return _apply_floors(
        FluxBounds(
            L=1.25 * float(L),
            C=1.25 * float(C),
            sup_d_rhox=1.25 * float(sup_rhox),
            sup_d_rhoR=1.25 * float(sup_rhoR),
            box=box,
        )
    )


def check_flux_contract(model: FluxModel, box: Box, n: int = 1000, seed: int = 0) -> dict:
    """Audit a model against its own derivatives and the rho = 0 root.

    Central finite differences with step cbrt(eps) * scale are compared to
    each declared derivative at n random box points. Returns the worst
    absolute mismatch per derivative plus the largest |f(t, x, 0, R)|.
    """
    rng = np.random.default_rng(seed)
    n = max(int(n), 100)
    t = rng.uniform(box.t[0], box.t[1], n)
    x = rng.uniform(box.x[0], box.x[1], n)
    rho = rng.uniform(box.rho[0], box.rho[1], n)
    R = rng.uniform(box.R[0], box.R[1], n)
    # First differences balance truncation vs rounding at h ~ eps^(1/3);
    # second and mixed differences divide by h^2, so they need h ~ eps^(1/4).
    eps = np.finfo(float).eps
    eps_cb = float(np.cbrt(eps))
    eps_qr = float(eps**0.25)

    def step(vals, scale):
        return scale * np.maximum(1.0, np.abs(vals))

    f = model.value
    hx, hr, hR = step(x, eps_cb), step(rho, eps_cb), step(R, eps_cb)
    kx, kr, kR = step(x, eps_qr), step(rho, eps_qr), step(R, eps_qr)
    report = {}
    report["d_rho"] = np.max(np.abs((f(t, x, rho + hr, R) - f(t, x, rho - hr, R)) / (2 * hr) - model.d_rho(t, x, rho, R)))
    report["d_x"] = np.max(np.abs((f(t, x + hx, rho, R) - f(t, x - hx, rho, R)) / (2 * hx) - model.d_x(t, x, rho, R)))
    report["d_R"] = np.max(np.abs((f(t, x, rho, R + hR) - f(t, x, rho, R - hR)) / (2 * hR) - model.d_R(t, x, rho, R)))
    report["d_xx"] = np.max(
        np.abs((f(t, x + kx, rho, R) - 2 * f(t, x, rho, R) + f(t, x - kx, rho, R)) / kx**2 - model.d_xx(t, x, rho, R))
    )
    report["d_RR"] = np.max(
        np.abs((f(t, x, rho, R + kR) - 2 * f(t, x, rho, R) + f(t, x, rho, R - kR)) / kR**2 - model.d_RR(t, x, rho, R))
    )
    report["d_xR"] = np.max(
        np.abs(
            (f(t, x + kx, rho, R + kR) - f(t, x + kx, rho, R - kR) - f(t, x - kx, rho, R + kR) + f(t, x - kx, rho, R - kR))
            / (4 * kx * kR)
            - model.d_xR(t, x, rho, R)
        )
    )
    report["d_rhox"] = np.max(
        np.abs(
            (f(t, x + kx, rho + kr, R) - f(t, x + kx, rho - kr, R) - f(t, x - kx, rho + kr, R) + f(t, x - kx, rho - kr, R))
            / (4 * kx * kr)
            - model.d_rhox(t, x, rho, R)
        )
    )
    report["d_rhoR"] = np.max(
        np.abs(
            (f(t, x, rho + kr, R + kR) - f(t, x, rho + kr, R - kR) - f(t, x, rho - kr, R + kR) + f(t, x, rho - kr, R - kR))
            / (4 * kr * kR)
            - model.d_rhoR(t, x, rho, R)
        )
    )
    report["zero_root"] = np.max(np.abs(f(t, x, np.zeros(n), R)))
    return {k: float(v) for k, v in report.items()}
