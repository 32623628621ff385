"""State representation and the boundary-aware Lax-Friedrichs update.

One step advances the cell averages by

    rho_j^{n+1} = rho_j^n - lambda (F_{j+1/2}(rho_j, rho_{j+1}) - F_{j-1/2}(rho_{j-1}, rho_j)),

with the two-point flux

    F_{j+1/2}(u, v) = 1/2 [ f(t^n, x_{j+1/2}, u, R_{j+1/2})
                          + f(t^n, x_{j+1/2}, v, R_{j+1/2}) - alpha (v - u) ],

where R_{j+1/2} is the renormalized nonlocal average of the current cells
and the ghost values rho_0 = left trace, rho_{N+1} = right trace inject the
boundary data. The stencil never reaches beyond the two ghosts, and R is
recomputed from the cells of the state being advanced, never reused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CFLViolation, LengthMismatch, NonFiniteState, StateMismatch
from .fluxes import FluxModel, evaluate_flux
from .grid import Mesh, ProjectedData
from .kernels import DiscreteKernel, nonlocal_average

__all__ = ["SolverState", "make_state", "numerical_flux", "step", "advance"]


@dataclass(frozen=True)
class SolverState:
    """Cell averages plus ghost values and interface averages at one step.

    interface_R must be the nonlocal average of `cells` on the same mesh;
    make_state enforces that. Arrays are read-only after construction.
    """

    step: int
    t: float
    cells: np.ndarray
    ghost_left: float
    ghost_right: float
    interface_R: np.ndarray

    def __post_init__(self):
        self.cells.setflags(write=False)
        self.interface_R.setflags(write=False)
        if not (
            np.all(np.isfinite(self.cells))
            and np.isfinite(self.ghost_left)
            and np.isfinite(self.ghost_right)
            and np.all(np.isfinite(self.interface_R))
        ):
            raise NonFiniteState(f"state at step {self.step} contains non-finite values")

    def extended(self) -> np.ndarray:
        """Cells with both ghost values attached: indices 0..N+1."""
        return np.concatenate([[self.ghost_left], self.cells, [self.ghost_right]])


def make_state(
    n: int, t: float, cells: np.ndarray, ghost_left: float, ghost_right: float, dk: DiscreteKernel
) -> SolverState:
    """Build a state, computing interface averages fresh from the cells."""
    cells = np.array(cells, dtype=float)
    if not np.all(np.isfinite(cells)):
        raise NonFiniteState(f"state at step {n} contains non-finite cells")
    return SolverState(
        step=int(n),
        t=float(t),
        cells=cells,
        ghost_left=float(ghost_left),
        ghost_right=float(ghost_right),
        interface_R=nonlocal_average(dk, cells),
    )


def numerical_flux(model: FluxModel, t, x, u, v, R, alpha: float):
    """Two-point interface flux: central average plus alpha-dissipation."""
    fu = evaluate_flux(model, t, x, u, R)
    fv = evaluate_flux(model, t, x, v, R)
    return 0.5 * (fu + fv - alpha * (np.asarray(v) - np.asarray(u)))


def _interface_fluxes(state: SolverState, model: FluxModel, mesh: Mesh) -> np.ndarray:
    ext = state.extended()
    return numerical_flux(
        model, state.t, mesh.interfaces, ext[:-1], ext[1:], state.interface_R, mesh.alpha
    )


def advance(
    state: SolverState, dk: DiscreteKernel, model: FluxModel, mesh: Mesh, traces: ProjectedData
) -> tuple[SolverState, np.ndarray]:
    """One update; returns the new state and the N+1 interface fluxes used.

    The new state's ghosts are the traces at the new step index, so it is
    ready for both the next update and ghost-inclusive diagnostics.
    """
    if state.cells.shape != (mesh.N,) or dk.n_cells != mesh.N:
        raise LengthMismatch(
            f"state/kernel/mesh disagree on cell count: {state.cells.shape[0]}, {dk.n_cells}, {mesh.N}"
        )
    if mesh.cfl_limit is not None and mesh.lam > mesh.cfl_limit * (1.0 + 1e-12):
        raise CFLViolation(f"mesh lambda {mesh.lam:.6e} exceeds its cap {mesh.cfl_limit:.6e}")
    n_new = state.step + 1
    if n_new >= traces.left.size:
        raise StateMismatch(f"no boundary trace for step {n_new}")
    flux = _interface_fluxes(state, model, mesh)
    cells = state.cells - mesh.lam * np.diff(flux)
    if not np.all(np.isfinite(cells)):
        raise NonFiniteState(f"update produced non-finite cells at step {n_new}")
    new_state = make_state(
        n_new, n_new * mesh.dt, cells, traces.left[n_new], traces.right[n_new], dk
    )
    return new_state, flux


def step(
    state: SolverState, dk: DiscreteKernel, model: FluxModel, mesh: Mesh, traces: ProjectedData
) -> SolverState:
    """One update of the scheme; see advance for the flux-returning variant."""
    return advance(state, dk, model, mesh, traces)[0]
