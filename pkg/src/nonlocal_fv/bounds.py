"""A-priori constants: every bound the discrete solution must satisfy.

All constants are composed from three measured inputs: kernel norms,
flux envelope constants, and cumulative norm tables of the projected data.
Working with the projected (discrete) data keeps each estimate both valid
and sharp: cell and slab averaging never increase a sup norm, an L1 norm,
or the total variation, so the discrete tables are dominated by their
continuous counterparts while matching the quantities the scheme actually
consumes.

The chain, with W = kernel norm bundle, (L, C, sup mixed derivatives) the
flux envelope, and alpha the scheme's dissipation:

    cal_l       kernel Lipschitz constant of the renormalized average
    cal_w       curvature constant of the renormalized average
    c1(t)       spatial L1 bound: data L1 plus alpha-weighted boundary L1
    c2(t)       exponential rate of the sup-norm bound
    k1..k4(t)   total-variation recursion constants
    cx(t)       ghost-inclusive total-variation bound
    ct(t)       rate of the L1-in-time continuity bound
    cxt(t)      accumulated space-time variation bound
    r1, rinf    alpha-free L1 / sup bounds (L in place of alpha)
    t1, t2      alpha-free variation constants (r1-substituted)
    tv_bound    alpha-free total-variation bound

Growth factors use expm1 so vanishing rates degrade to the linear-in-time
limit instead of 0/0. Bounds may overflow to +inf for aggressive kernels;
comparisons stay valid (any finite measurement passes an infinite bound).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import LengthMismatch, MissingNorm
from .fluxes import FluxBounds
from .grid import Mesh, ProjectedData
from .kernels import KernelNorms

__all__ = [
    "DataNorms",
    "DataDistances",
    "ConstantsReport",
    "StabilityReport",
    "build_data_norms",
    "build_data_distances",
    "apriori_constants",
    "stability_constants",
]


@dataclass(frozen=True)
class DataNorms:
    """Cumulative norm tables of one projected data set on the step grid.

    Boundary tables come in two conventions, both indexed by step n:
    l1_*/tv_* accumulate slabs m < n resp. jumps m <= n (the natural reading
    of [0, t^n]); sup_* take the maximum over traces m <= n, which covers
    the trace consumed by the transition leaving t^n; maxdata takes traces
    m < n only, matching the sup-norm recursion it feeds.
    """

    t: np.ndarray
    dx: float
    dt: float
    width: float
    l1_o: float
    linf_o: float
    tv0: float
    left: np.ndarray
    right: np.ndarray
    l1_a: np.ndarray
    l1_b: np.ndarray
    tv_a: np.ndarray
    tv_b: np.ndarray
    sup_a: np.ndarray
    sup_b: np.ndarray
    maxdata: np.ndarray

    def __post_init__(self):
        for name in ("t", "left", "right", "l1_a", "l1_b", "tv_a", "tv_b", "sup_a", "sup_b", "maxdata"):
            getattr(self, name).setflags(write=False)


def _cumulative_tables(traces: np.ndarray, dt: float):
    n = traces.size  # n_steps + 1
    l1 = np.concatenate([[0.0], dt * np.cumsum(np.abs(traces[:-1]))])
    tv = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(traces)))])
    sup = np.maximum.accumulate(np.abs(traces))
    past = np.concatenate([[0.0], sup[:-1]])  # max over m < n
    assert l1.size == tv.size == sup.size == n
    return l1, tv, sup, past


def build_data_norms(projected: ProjectedData, mesh: Mesh) -> DataNorms:
    """Tabulate every norm of the projected data the constants chain needs."""
    rho0, left, right = projected.rho0, projected.left, projected.right
    if rho0.size != mesh.N or left.size != mesh.n_steps + 1 or right.size != mesh.n_steps + 1:
        raise LengthMismatch("projected data do not match the mesh")
    linf_o = float(np.max(np.abs(rho0)))
    l1_a, tv_a, sup_a, past_a = _cumulative_tables(left, mesh.dt)
    l1_b, tv_b, sup_b, past_b = _cumulative_tables(right, mesh.dt)
    return DataNorms(
        t=mesh.times,
        dx=mesh.dx,
        dt=mesh.dt,
        width=mesh.b - mesh.a,
        l1_o=float(mesh.dx * np.sum(np.abs(rho0))),
        linf_o=linf_o,
        tv0=float(np.sum(np.abs(np.diff(np.concatenate([[left[0]], rho0, [right[0]]]))))),
        left=left.copy(),
        right=right.copy(),
        l1_a=l1_a,
        l1_b=l1_b,
        tv_a=tv_a,
        tv_b=tv_b,
        sup_a=sup_a,
        sup_b=sup_b,
        maxdata=np.maximum(linf_o, np.maximum(past_a, past_b)),
    )


@dataclass(frozen=True)
class DataDistances:
    """Cumulative L1 distances between two projected data sets."""

    initial_l1: float
    left_l1: np.ndarray
    right_l1: np.ndarray

    def __post_init__(self):
        self.left_l1.setflags(write=False)
        self.right_l1.setflags(write=False)


def build_data_distances(first: ProjectedData, second: ProjectedData, mesh: Mesh) -> DataDistances:
    if first.rho0.size != second.rho0.size or first.left.size != second.left.size:
        raise LengthMismatch("projected data sets live on different meshes")
    left = np.concatenate([[0.0], mesh.dt * np.cumsum(np.abs(first.left[:-1] - second.left[:-1]))])
    right = np.concatenate([[0.0], mesh.dt * np.cumsum(np.abs(first.right[:-1] - second.right[:-1]))])
    return DataDistances(
        initial_l1=float(mesh.dx * np.sum(np.abs(first.rho0 - second.rho0))),
        left_l1=left,
        right_l1=right,
    )


def _phi(z: np.ndarray) -> np.ndarray:
    """(e^z - 1)/z extended by 1 at z = 0; z is nonnegative here."""
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    mask = z > 0.0
    with np.errstate(over="ignore"):
        out[mask] = np.expm1(z[mask]) / z[mask]
    return out


def _exp(z):
    with np.errstate(over="ignore"):
        return np.exp(z)


def kernel_lipschitz(kn: KernelNorms) -> float:
    """cal_l: Lipschitz constant of x -> (J rho)(x) per unit data L1 mass."""
    return kn.sup_w1 / kn.k_omega + kn.sup_w * kn.l1_w1 / kn.k_omega**2


def kernel_curvature(kn: KernelNorms) -> float:
    """cal_w: second-derivative constant of the renormalized average."""
    return (
        2.0 * kn.sup_w2 / kn.k_omega
        + kn.sup_w * kn.l1_w2 / kn.k_omega**2
        + 2.0 * kn.sup_w * kn.l1_w1**2 / kn.k_omega**3
        + 2.0 * kn.sup_w1 * kn.l1_w1 / kn.k_omega**2
    )


@dataclass(frozen=True)
class ConstantsReport:
    """Every a-priori constant, tabulated on the step-time grid."""

    t: np.ndarray
    alpha: float
    flux_l: float
    cal_l: float
    cal_w: float
    c1: np.ndarray
    c2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    k4: np.ndarray
    k2_sub: np.ndarray
    k3_sub: np.ndarray
    cx: np.ndarray
    ct: np.ndarray
    cxt: np.ndarray
    r1: np.ndarray
    rinf: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    tv_bound: np.ndarray
    linf_bound: np.ndarray
    time_diff_bound: np.ndarray
    notes: dict = field(default_factory=dict)

    def time_lipschitz(self, n_from: int, n_to: int, dn: DataNorms) -> float:
        """L1-in-time continuity bound between steps n_from <= n_to.

        tau (ct + 3 L (TV of each boundary datum across the window)), with
        tau the window length; evaluated with this report's alpha inside ct.
        """
        if not 0 <= n_from <= n_to < self.t.size:
            raise MissingNorm(f"window [{n_from}, {n_to}] outside the tabulated grid")
        tau = self.t[n_to] - self.t[n_from]
        window_tv = (dn.tv_a[n_to] - dn.tv_a[n_from]) + (dn.tv_b[n_to] - dn.tv_b[n_from])
        return float(tau * (self.ct[n_to] + 3.0 * self.flux_l * window_tv))

    def as_table(self) -> dict:
        """Flat name -> value mapping (arrays over t, scalars as scalars)."""
        out = {"t": self.t, "alpha": self.alpha, "L": self.flux_l, "cal_L": self.cal_l, "cal_W": self.cal_w}
        for name, key in [
            ("C1", "c1"), ("C2", "c2"), ("K1", "k1"), ("K2", "k2"), ("K3", "k3"), ("K4", "k4"),
            ("K2_sub", "k2_sub"), ("K3_sub", "k3_sub"), ("Cx", "cx"), ("Ct", "ct"), ("Cxt", "cxt"),
            ("R1", "r1"), ("Rinf", "rinf"), ("T1", "t1"), ("T2", "t2"),
            ("tv_bound", "tv_bound"), ("linf_bound", "linf_bound"), ("time_diff_bound", "time_diff_bound"),
        ]:
            out[name] = getattr(self, key)
        return out


def apriori_constants(
    kn: KernelNorms,
    fb: FluxBounds,
    dn: DataNorms,
    alpha: float,
    t_grid: Optional[np.ndarray] = None,
) -> ConstantsReport:
    """Compose the full constants chain on the data-norm time grid."""
    t = dn.t if t_grid is None else np.asarray(t_grid, dtype=float)
    if t.shape != dn.t.shape or not np.allclose(t, dn.t, rtol=1e-12, atol=1e-15):
        raise MissingNorm("t_grid must coincide with the data-norm step grid")
    alpha = float(alpha)
    L, C = fb.L, fb.C
    cal_l = kernel_lipschitz(kn)
    cal_w = kernel_curvature(kn)

    c1 = dn.l1_o + alpha * (dn.l1_a + dn.l1_b)
    c2 = C * (1.0 + cal_l * c1)
    linf_bound = _exp(c2 * t) * dn.maxdata

    k1 = fb.sup_d_rhox + cal_l * c1 * fb.sup_d_rhoR
    k3 = C * c1 * (cal_l**2 * c1 + 0.5 * cal_w)
    k2 = C * c1 * (1.0 + 2.0 * cal_l * c1 + 2.0 * k3)
    k4 = (
        k2
        + 1.5 * C * (1.0 + cal_l * c1) * linf_bound
        + (k3 + 0.5 * C * (1.0 + cal_l * c1)) * dn.sup_a
    )
    tv_data = dn.tv0 + dn.tv_a + dn.tv_b
    cx = _exp(k1 * t) * tv_data + k4 * t * _phi(k1 * t)
    boundary_sup_term = 0.5 * C * (dn.sup_b + cal_l * c1 * dn.sup_a)
    ct = (alpha + L) * cx + C * c1 * (1.0 + cal_l * c1) + boundary_sup_term
    cxt = (
        t * (1.0 + alpha + L) * cx
        + t * C * c1 * (1.0 + cal_l * c1)
        + t * boundary_sup_term
        + dn.dx * (dn.tv_a + dn.tv_b)
    )

    r1 = dn.l1_o + L * (dn.l1_a + dn.l1_b)
    rinf = _exp(t * C * (1.0 + cal_l * r1)) * dn.maxdata
    k3_sub = C * r1 * (cal_l**2 * r1 + 0.5 * cal_w)
    k2_sub = C * r1 * (1.0 + 2.0 * cal_l * r1 + 2.0 * k3_sub)
    t1 = fb.sup_d_rhox + cal_l * r1 * fb.sup_d_rhoR
    t2 = (
        k2_sub
        + 1.5 * C * (1.0 + cal_l * r1) * rinf
        + (k3_sub + 0.5 * C * (1.0 + cal_l * r1)) * dn.sup_a
    )
    tv_bound = _exp(t1 * t) * tv_data + t2 * t * _phi(t1 * t)

    time_diff_bound = dn.dt * ct[:-1] + dn.dx * (
        np.abs(np.diff(dn.left)) + np.abs(np.diff(dn.right))
    )

    return ConstantsReport(
        t=t, alpha=alpha, flux_l=L, cal_l=cal_l, cal_w=cal_w,
        c1=c1, c2=c2, k1=k1, k2=k2, k3=k3, k4=k4, k2_sub=k2_sub, k3_sub=k3_sub,
        cx=cx, ct=ct, cxt=cxt, r1=r1, rinf=rinf, t1=t1, t2=t2,
        tv_bound=tv_bound, linf_bound=linf_bound, time_diff_bound=time_diff_bound,
        notes={"data_norms": "projected (discrete) tables"},
    )


@dataclass(frozen=True)
class StabilityReport:
    """Constants bounding the distance between two runs with different data."""

    t: np.ndarray
    s1: np.ndarray
    j: np.ndarray
    c5: np.ndarray
    pinf: np.ndarray
    hat_k: np.ndarray
    sinf: np.ndarray
    u: np.ndarray
    t3: np.ndarray
    t4: np.ndarray
    a_dist: np.ndarray
    b_growth: np.ndarray
    final_bound: np.ndarray
    notes: dict = field(default_factory=dict)

    def as_table(self) -> dict:
        out = {"t": self.t}
        for name, key in [
            ("S1", "s1"), ("J", "j"), ("C5", "c5"), ("Pinf", "pinf"), ("hatK", "hat_k"),
            ("Sinf", "sinf"), ("U", "u"), ("T3", "t3"), ("T4", "t4"),
            ("A", "a_dist"), ("B", "b_growth"), ("final_bound", "final_bound"),
        ]:
            out[name] = getattr(self, key)
        return out


def stability_constants(
    kn: KernelNorms,
    fb: FluxBounds,
    dn_rho: DataNorms,
    dn_sigma: DataNorms,
    distances: DataDistances,
    alpha: float,
    t_grid: Optional[np.ndarray] = None,
) -> StabilityReport:
    """Gronwall-type distance bound A (1 + B t e^{B t}) between two runs.

    dn_rho / dn_sigma are the norm tables of the reference and perturbed
    data; distances carries their cumulative L1 gaps. alpha is recorded but
    the chain itself only consumes the flux envelope (alpha-free bound).
    """
    t = dn_rho.t if t_grid is None else np.asarray(t_grid, dtype=float)
    if t.shape != dn_rho.t.shape or dn_rho.t.shape != dn_sigma.t.shape:
        raise MissingNorm("both data-norm tables must share the step grid")
    L, C = fb.L, fb.C
    cal_l = kernel_lipschitz(kn)
    cal_w = kernel_curvature(kn)
    ratio = kn.sup_w / kn.k_omega
    width = dn_rho.width

    r1 = dn_rho.l1_o + L * (dn_rho.l1_a + dn_rho.l1_b)
    s1 = dn_sigma.l1_o + L * (dn_sigma.l1_a + dn_sigma.l1_b)
    j = ratio * np.maximum(r1, s1)

    maxdata_sigma = np.maximum(dn_sigma.linf_o, np.maximum(dn_sigma.sup_a, dn_sigma.sup_b))
    c5 = fb.sup_d_rhox + fb.sup_d_rhoR * cal_l * r1
    pinf = _exp(c5 * t) * maxdata_sigma
    hat_k = (
        2.0 * width * C * pinf * (1.0 + r1 * (2.0 * cal_l + cal_l**2 * r1 + cal_w))
        + 0.5 * (3.0 * pinf + dn_sigma.sup_a) * c5
    )
    sinf = _exp(t * C * (1.0 + cal_l * s1)) * maxdata_sigma
    u = maxdata_sigma * _exp(t * C * (1.0 + cal_l * s1) + t * c5)

    t3 = fb.sup_d_rhox + cal_l * np.minimum(r1, s1) * fb.sup_d_rhoR
    t1_s = fb.sup_d_rhox + cal_l * s1 * fb.sup_d_rhoR
    k3_s = C * s1 * (cal_l**2 * s1 + 0.5 * cal_w)
    k2_s = C * s1 * (1.0 + 2.0 * cal_l * s1 + 2.0 * k3_s)
    t2_s = (
        k2_s
        + 1.5 * C * (1.0 + cal_l * s1) * sinf
        + (k3_s + 0.5 * C * (1.0 + cal_l * s1)) * dn_sigma.sup_a
    )
    tv_sigma = dn_sigma.tv0 + dn_sigma.tv_a + dn_sigma.tv_b
    with np.errstate(over="ignore", invalid="ignore"):
        branch_one = hat_k * t * _exp(c5 * t)
        branch_two = t2_s * t * _phi(t1_s * t)
    t4 = _exp(t3 * t) * tv_sigma + np.minimum(branch_one, branch_two)

    a_dist = distances.initial_l1 + L * (distances.left_l1 + distances.right_l1)
    b_growth = (
        width * C * u * (ratio * (1.0 + cal_l * r1) + cal_l)
        + 4.0 * C * u * ratio
        + fb.sup_d_rhoR * ratio * t4
    )
    with np.errstate(over="ignore", invalid="ignore"):
        final_bound = a_dist * (1.0 + b_growth * t * _exp(b_growth * t))

    return StabilityReport(
        t=t, s1=s1, j=j, c5=c5, pinf=pinf, hat_k=hat_k, sinf=sinf, u=u,
        t3=t3, t4=t4, a_dist=a_dist, b_growth=b_growth, final_bound=final_bound,
        notes={
            "alpha": alpha,
            "t4_first_branch": "hatK(t) * t * exp(C5(t) t)",
            "data_norms": "projected (discrete) tables",
        },
    )
