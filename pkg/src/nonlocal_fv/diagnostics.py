"""Per-step measurements: norms, mass balance, and entropy residuals.

Norm conventions: l1, linf, and mass are taken over the N interior cells;
total variation includes the jumps against both ghost values,

    tv = sum_{j=0}^{N} |rho_{j+1} - rho_j|,   rho_0/rho_{N+1} = ghosts,

as does the step-to-step L1 difference. Entropy residuals discretize the
two boundary-aware inequalities: for every reference level k,

    (rho_j^{n+1} - k)^+ - (rho_j^n - k)^+
      + lambda (G_{j+1/2}(rho_j, rho_{j+1}) - G_{j-1/2}(rho_{j-1}, rho_j))
      + lambda sgn^+(rho_j^{n+1} - k) (f(t^n, x_{j+1/2}, k, R_{j+1/2})
                                     - f(t^n, x_{j-1/2}, k, R_{j-1/2}))  <= 0,

with G_{j+1/2}(u, v) = F_{j+1/2}(max(u,k), max(v,k)) - F_{j+1/2}(k, k), and
the mirror inequality with negative parts, L_{j+1/2}(u, v) = F_{j+1/2}(k, k)
- F_{j+1/2}(min(u,k), min(v,k)), and sgn^-. The positive-part inequality
clips from below (values pushed up to k) and the negative-part one clips
from above; that pairing is what the monotonicity argument needs. Residuals
above zero (beyond rounding) falsify the discrete entropy property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import BoundViolation, StateMismatch
from .fluxes import FluxModel, evaluate_flux
from .grid import Mesh
from .solver import SolverState, numerical_flux

__all__ = [
    "MeasuredNorms",
    "DiagnosticsRecord",
    "sgn_plus",
    "sgn_minus",
    "pos_part",
    "neg_part",
    "measure",
    "time_difference",
    "mass_balance_residual",
    "entropy_k_grid",
    "entropy_residuals",
    "compare_bounds",
    "MARGIN_TOLERANCES",
]


def sgn_plus(s):
    """1 where s > 0, else 0."""
    return np.where(np.asarray(s) > 0.0, 1.0, 0.0)


def sgn_minus(s):
    """-1 where s < 0, else 0."""
    return np.where(np.asarray(s) < 0.0, -1.0, 0.0)


def pos_part(s):
    return np.maximum(np.asarray(s), 0.0)


def neg_part(s):
    return np.maximum(-np.asarray(s), 0.0)


@dataclass(frozen=True)
class MeasuredNorms:
    l1: float
    linf: float
    tv: float
    min_cell: float
    mass: float


def measure(state: SolverState, mesh: Mesh) -> MeasuredNorms:
    """Cell norms plus ghost-inclusive total variation of one state."""
    cells = state.cells
    ext = state.extended()
    return MeasuredNorms(
        l1=float(mesh.dx * np.sum(np.abs(cells))),
        linf=float(np.max(np.abs(cells))),
        tv=float(np.sum(np.abs(np.diff(ext)))),
        min_cell=float(np.min(cells)),
        mass=float(mesh.dx * np.sum(cells)),
    )


def _check_consecutive(prev: SolverState, nxt: SolverState):
    if nxt.step != prev.step + 1 or prev.cells.shape != nxt.cells.shape:
        raise StateMismatch(
            f"states at steps {prev.step} and {nxt.step} are not consecutive on one mesh"
        )


def time_difference(prev: SolverState, nxt: SolverState, mesh: Mesh) -> float:
    """Ghost-inclusive L1 distance dx * sum_{j=0}^{N+1} |rho_j^{n+1} - rho_j^n|."""
    _check_consecutive(prev, nxt)
    return float(mesh.dx * np.sum(np.abs(nxt.extended() - prev.extended())))


def mass_balance_residual(prev: SolverState, nxt: SolverState, mesh: Mesh, flux: np.ndarray) -> float:
    """Defect of the discrete mass identity for one transition.

    The update telescopes to mass_next - mass_prev = -dt (F_{N+1/2} - F_{1/2});
    the returned residual is that identity's left-minus-right, which should
    vanish to rounding.
    """
    _check_consecutive(prev, nxt)
    d_mass = mesh.dx * (np.sum(nxt.cells) - np.sum(prev.cells))
    return float(d_mass + mesh.dt * (flux[-1] - flux[0]))


def entropy_k_grid(prev: SolverState, nxt: SolverState, size: int = 32) -> np.ndarray:
    """Reference levels: both states' values plus a uniform sweep.

    The sweep covers [min - delta, max + delta] with delta = 5% of the value
    range, so levels strictly outside the data hull are exercised too.
    """
    values = np.concatenate([prev.extended(), nxt.extended()])
    lo, hi = float(np.min(values)), float(np.max(values))
    delta = 0.05 * (hi - lo)
    sweep = np.linspace(lo - delta, hi + delta, int(size))
    return np.unique(np.concatenate([values, sweep]))


def entropy_residuals(
    prev: SolverState,
    nxt: SolverState,
    mesh: Mesh,
    model: FluxModel,
    k_values: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of both entropy inequalities for one transition.

    Returns arrays of shape (N, len(k_values)); entry [j-1, i] is the
    residual of cell j against level k_i. Nonpositive (up to rounding)
    certifies the inequality.
    """
    _check_consecutive(prev, nxt)
    ext = prev.extended()
    k = np.asarray(k_values, dtype=float)[None, :]
    u = ext[:-1, None]
    v = ext[1:, None]
    x = mesh.interfaces[:, None]
    big_r = prev.interface_R[:, None]
    t, lam, alpha = prev.t, mesh.lam, mesh.alpha

    # Equals F_{j+1/2}(k, k); broadcast in case the flux ignores x and R.
    f_at_k = np.broadcast_to(
        np.asarray(evaluate_flux(model, t, x, k, big_r)), (x.shape[0], k.shape[1]))
    g_flux = numerical_flux(model, t, x, np.maximum(u, k), np.maximum(v, k), big_r, alpha) - f_at_k
    l_flux = f_at_k - numerical_flux(model, t, x, np.minimum(u, k), np.minimum(v, k), big_r, alpha)

    d_plus = nxt.cells[:, None] - k
    d_prev = prev.cells[:, None] - k
    f_shift = f_at_k[1:] - f_at_k[:-1]
    res_plus = (
        pos_part(d_plus) - pos_part(d_prev)
        + lam * (g_flux[1:] - g_flux[:-1])
        + lam * sgn_plus(d_plus) * f_shift
    )
    res_minus = (
        neg_part(d_plus) - neg_part(d_prev)
        + lam * (l_flux[1:] - l_flux[:-1])
        + lam * sgn_minus(d_plus) * f_shift
    )
    return res_plus, res_minus


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One diagnostics row; NaN marks fields without meaning at step 0."""

    step: int
    t: float
    l1: float
    linf: float
    tv: float
    min_cell: float
    mass: float
    time_diff: float = math.nan
    entropy_plus_max: float = math.nan
    entropy_minus_max: float = math.nan
    margin_l1: float = math.nan
    margin_linf: float = math.nan
    margin_tv: float = math.nan
    margin_timediff: float = math.nan
    mass_residual: float = math.nan


MARGIN_TOLERANCES = {
    "l1": 1e-10,
    "linf": 1e-10,
    "tv": 1e-8,
    "timediff": 1e-8,
    "positivity": 1e-12,
}


def compare_bounds(
    record: DiagnosticsRecord,
    constants,
    mode: str = "monitor",
    tolerances: Optional[dict] = None,
) -> tuple[DiagnosticsRecord, list[dict]]:
    """Attach a-priori margins to a record; police them in strict mode.

    Margins are bound minus measured: l1 against c1(t^n), linf against
    e^{c2 t} max-data, tv against cx(t^n), and the step-to-step L1
    difference against its per-transition bound (time_diff_bound[n-1] for
    the transition into step n). Positivity of the minimum cell value is
    checked alongside. Returns the updated record and the list of
    violations; in strict mode the first violation raises BoundViolation.
    """
    tol = dict(MARGIN_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    n = record.step
    margins = {
        "l1": float(constants.c1[n] - record.l1),
        "linf": float(constants.linf_bound[n] - record.linf),
        "tv": float(constants.cx[n] - record.tv),
    }
    if n > 0 and np.isfinite(record.time_diff):
        margins["timediff"] = float(constants.time_diff_bound[n - 1] - record.time_diff)
    record = replace(
        record,
        margin_l1=margins["l1"],
        margin_linf=margins["linf"],
        margin_tv=margins["tv"],
        margin_timediff=margins.get("timediff", math.nan),
    )
    violations = []
    for name, margin in margins.items():
        if margin < -tol[name]:
            violations.append({"step": n, "quantity": name, "margin": margin})
    if record.min_cell < -tol["positivity"]:
        violations.append({"step": n, "quantity": "positivity", "margin": float(record.min_cell)})
    if mode == "strict" and violations:
        worst = violations[0]
        raise BoundViolation(
            f"{worst['quantity']} bound violated at step {worst['step']} "
            f"(margin {worst['margin']:.3e})",
            step=worst["step"],
            quantity=worst["quantity"],
            margin=worst["margin"],
        )
    return record, violations
