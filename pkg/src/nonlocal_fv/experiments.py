"""Grid-refinement and data-perturbation experiments.

convergence_study runs the same problem on a chain of doubling grids with a
shared dt/dx ratio, projects each finer solution onto the next coarser grid
by pairwise cell averaging, and reports L1 differences and observed orders.
stability_experiment solves a base and a perturbed problem on one mesh and
compares the measured final-time L1 distance with the a-priori stability
bound. Level solves run in a thread pool sized by SOLVER_THREADS (defaults
to the machine's CPU count).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace as dc_replace
from typing import Optional, Sequence

import numpy as np

from .bounds import (
    StabilityReport,
    apriori_constants,
    build_data_distances,
    build_data_norms,
    stability_constants,
)
from .config import RunConfig, parse_config
from .driver import RunSetup, Trajectory, assemble, solve
from .errors import ConfigSemantic
from .grid import DataFn, ProblemData, project_all

__all__ = [
    "solver_threads",
    "ConvergenceResult",
    "convergence_study",
    "Perturbation",
    "StabilityResult",
    "stability_experiment",
]


def solver_threads() -> int:
    raw = os.environ.get("SOLVER_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigSemantic(f"SOLVER_THREADS must be an integer, got {raw!r}") from exc
        if n < 1:
            raise ConfigSemantic(f"SOLVER_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ConvergenceResult:
    levels: tuple          # cell counts, coarse to fine
    lam: float             # shared dt/dx ratio (from the coarsest CFL cap)
    dx: tuple
    errors: tuple          # L1 difference between consecutive levels
    orders: tuple          # log2(errors[k] / errors[k+1])
    trajectories: tuple    # one Trajectory per level

    def as_rows(self):
        """(N, dx, error, order) rows; error/order are nan where undefined."""
        rows = []
        for k, n in enumerate(self.levels):
            err = self.errors[k] if k < len(self.errors) else float("nan")
            order = self.orders[k - 1] if 1 <= k <= len(self.orders) else float("nan")
            rows.append((n, self.dx[k], err, order))
        return rows


def _coarsen(cells: np.ndarray) -> np.ndarray:
    # Pairwise cell averages: exact L2 projection onto the mesh of half size.
    return cells.reshape(-1, 2).mean(axis=1)


def convergence_study(cfg_or_source, levels: Sequence[int]) -> ConvergenceResult:
    """Solve on each grid in `levels` (strictly doubling) and compare.

    All levels share the dt/dx ratio the coarsest grid gets from its CFL cap,
    so every refinement halves dx and dt together.
    """
    cfg = cfg_or_source if isinstance(cfg_or_source, RunConfig) else parse_config(cfg_or_source)
    levels = [int(n) for n in levels]
    if len(levels) < 2:
        raise ConfigSemantic(f"need at least two grid levels, got {levels}")
    for coarse, fine in zip(levels, levels[1:]):
        if fine != 2 * coarse:
            raise ConfigSemantic(
                f"grid levels must double ({coarse} -> {fine} does not)")

    coarse_setup = assemble(dc_replace(cfg, n_cells=levels[0]))
    lam = coarse_setup.mesh.lam

    def run_level(n_cells: int) -> Trajectory:
        if n_cells == levels[0]:
            setup = coarse_setup
        else:
            setup = assemble(dc_replace(cfg, n_cells=n_cells), lam=lam)
        return solve(setup, entropy_every=0, output_stride=setup.mesh.n_steps)

    with ThreadPoolExecutor(max_workers=min(solver_threads(), len(levels))) as pool:
        trajectories = list(pool.map(run_level, levels))

    errors = []
    for coarse_traj, fine_traj in zip(trajectories, trajectories[1:]):
        dx = coarse_traj.mesh.dx
        diff = _coarsen(fine_traj.final_cells) - coarse_traj.final_cells
        errors.append(float(dx * np.abs(diff).sum()))
    orders = [float(np.log2(e0 / e1)) for e0, e1 in zip(errors, errors[1:])]

    return ConvergenceResult(
        levels=tuple(levels),
        lam=lam,
        dx=tuple(t.mesh.dx for t in trajectories),
        errors=tuple(errors),
        orders=tuple(orders),
        trajectories=tuple(trajectories),
    )


@dataclass(frozen=True)
class Perturbation:
    eps: float
    target: str = "initial"   # "initial" | "left" | "right"

    def __post_init__(self):
        if self.target not in ("initial", "left", "right"):
            raise ConfigSemantic(
                f"perturbation target must be initial, left, or right, got {self.target!r}")
        if not np.isfinite(self.eps):
            raise ConfigSemantic(f"perturbation size must be finite, got {self.eps}")


def _shifted(fn: DataFn, eps: float) -> DataFn:
    return DataFn(
        fn=lambda s, base=fn.fn: base(s) + eps,
        breakpoints=fn.breakpoints,
        sup=None if fn.sup is None else fn.sup + max(eps, 0.0),
        estimated=fn.estimated,
        kind=fn.kind,
        meta=dict(fn.meta, shifted_by=eps),
    )


@dataclass(frozen=True)
class StabilityResult:
    perturbation: Perturbation
    measured_distance: float     # dx * sum |final difference|
    data_distance: float         # the A term fed to the bound
    bound: float                 # A (1 + B t e^{B t}) at the final time
    report: StabilityReport
    base: Trajectory
    perturbed: Trajectory


def stability_experiment(cfg_or_source, perturbation: Perturbation) -> StabilityResult:
    """Solve base and perturbed problems on one mesh; compare L1 drift to the bound."""
    cfg = cfg_or_source if isinstance(cfg_or_source, RunConfig) else parse_config(cfg_or_source)
    base_setup = assemble(cfg)

    problem = base_setup.problem
    fields = {"initial": problem.initial, "left": problem.left, "right": problem.right}
    fields[perturbation.target] = _shifted(fields[perturbation.target], perturbation.eps)
    perturbed_problem = ProblemData(**fields)

    spans = {"initial": (cfg.a, cfg.b), "left": (0.0, cfg.horizon), "right": (0.0, cfg.horizon)}
    perturbed_sup = max(fn.sup_estimate(*spans[name]) for name, fn in fields.items())
    if perturbed_sup > base_setup.box.rho[1] + 1e-12:
        raise ConfigSemantic(
            f"perturbed data reach {perturbed_sup:g}, above the flux box "
            f"rho range {list(base_setup.box.rho)}")

    projected_p = project_all(perturbed_problem, base_setup.mesh)
    dn_p = build_data_norms(projected_p, base_setup.mesh)
    constants_p = apriori_constants(
        base_setup.kernel_table, base_setup.flux_table, dn_p, base_setup.mesh.alpha)
    setup_p = dc_replace(
        base_setup, problem=perturbed_problem, projected=projected_p,
        data_norms=dn_p, constants=constants_p)

    stride = base_setup.mesh.n_steps
    with ThreadPoolExecutor(max_workers=min(solver_threads(), 2)) as pool:
        base_future = pool.submit(solve, base_setup, entropy_every=0, output_stride=stride)
        pert_future = pool.submit(solve, setup_p, entropy_every=0, output_stride=stride)
        base_traj = base_future.result()
        pert_traj = pert_future.result()

    distances = build_data_distances(base_setup.projected, projected_p, base_setup.mesh)
    report = stability_constants(
        base_setup.kernel_table, base_setup.flux_table,
        base_setup.data_norms, dn_p, distances, base_setup.mesh.alpha)

    diff = pert_traj.final_cells - base_traj.final_cells
    measured = float(base_setup.mesh.dx * np.abs(diff).sum())

    return StabilityResult(
        perturbation=perturbation,
        measured_distance=measured,
        data_distance=float(np.asarray(report.a_dist).reshape(-1)[-1]),
        bound=float(np.asarray(report.final_bound).reshape(-1)[-1]),
        report=report,
        base=base_traj,
        perturbed=pert_traj,
    )
