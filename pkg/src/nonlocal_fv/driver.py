"""Assemble runs from configs and march them to the final time.

assemble() turns a RunConfig into a ready-to-run setup: flux model and its
bound box, mesh under the CFL cap, kernel tables and norms, projected data,
and the full a-priori constants report. solve() then advances the state,
measuring diagnostics every step and comparing them against the precomputed
bounds (recording margins in monitor mode, raising BoundViolation in strict
mode).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .bounds import ConstantsReport, DataNorms, apriori_constants, build_data_norms
from .config import RunConfig, make_datafn, parse_config
from .diagnostics import (
    DiagnosticsRecord,
    compare_bounds,
    entropy_k_grid,
    entropy_residuals,
    mass_balance_residual,
    measure,
    time_difference,
)
from .errors import ConfigSemantic
from .fluxes import BUILTIN_FLUXES, Box, FluxBounds, FluxModel, flux_bounds
from .grid import Mesh, ProblemData, ProjectedData, build_mesh, project_all
from .kernels import (
    DiscreteKernel,
    KernelNorms,
    KernelSpec,
    build_discrete_kernel,
    kernel_norms,
    lookahead,
    triweight,
)
from .solver import SolverState, advance, make_state

__all__ = ["RunSetup", "Trajectory", "assemble", "solve"]

# Entropy residuals are O(N * k_grid) per step; thin the cadence on big grids.
ENTROPY_EVERY_DENSE = 1
ENTROPY_EVERY_SPARSE = 8
ENTROPY_DENSE_LIMIT = 512


def _build_kernel(cfg: RunConfig) -> KernelSpec:
    if cfg.kernel.name == "triweight":
        return triweight(cfg.kernel.h)
    if cfg.kernel.name == "lookahead":
        return lookahead(cfg.kernel.h)
    raise ConfigSemantic(f"unknown kernel {cfg.kernel.name!r}")


@dataclass(frozen=True)
class RunSetup:
    """Everything solve() needs, precomputed once."""

    config: RunConfig
    kernel: KernelSpec
    kernel_table: KernelNorms
    discrete_kernel: DiscreteKernel
    model: FluxModel
    box: Box
    flux_table: FluxBounds
    mesh: Mesh
    problem: ProblemData
    projected: ProjectedData
    data_norms: DataNorms
    constants: ConstantsReport
    warnings: tuple = ()


def assemble(cfg_or_source, lam: Optional[float] = None) -> RunSetup:
    """Build mesh, tables, projections, and constants for a config.

    lam overrides the CFL-derived time step with a fixed ratio dt/dx; the
    cap is still enforced. Raises ConfigSemantic when the data demonstrably
    leave the flux bound box; softer concerns (a nonlocal-mean range that
    may outgrow the box) are recorded as warnings.
    """
    cfg = cfg_or_source if isinstance(cfg_or_source, RunConfig) else parse_config(cfg_or_source)
    warnings: list[str] = []

    kernel = _build_kernel(cfg)
    model = BUILTIN_FLUXES[cfg.flux.name](**cfg.flux.params)

    initial = make_datafn(cfg.initial, (cfg.a, cfg.b), cfg.base_dir)
    left = make_datafn(cfg.left, (0.0, cfg.horizon), cfg.base_dir)
    right = make_datafn(cfg.right, (0.0, cfg.horizon), cfg.base_dir)
    problem = ProblemData(initial=initial, left=left, right=right)
    data_sup = max(initial.sup_estimate(cfg.a, cfg.b),
                   left.sup_estimate(0.0, cfg.horizon),
                   right.sup_estimate(0.0, cfg.horizon))

    if cfg.flux.box_rho is not None:
        rho_range, mean_range = cfg.flux.box_rho, cfg.flux.box_R
    elif model.default_box is not None:
        rho_range, mean_range = model.default_box
    else:
        top = max(1.0, data_sup)
        rho_range = mean_range = (0.0, top)
        warnings.append(f"flux.box not given; using [0, {top:g}] for both arguments")
    box = Box(t=(0.0, cfg.horizon), x=(cfg.a, cfg.b), rho=rho_range, R=mean_range)
    ftable = flux_bounds(model, box)

    mesh = build_mesh(cfg.a, cfg.b, cfg.n_cells, cfg.horizon, cfg.alpha, ftable,
                      safety=cfg.cfl_safety, lam=lam)
    ktable = kernel_norms(kernel, mesh)
    dk = build_discrete_kernel(kernel, mesh, mode=cfg.kernel.discretization)

    tol = 1e-12
    if data_sup > box.rho[1] + tol:
        raise ConfigSemantic(
            f"data reach {data_sup:g}, above the flux box rho range {list(box.rho)}")
    if data_sup > box.R[1] + tol:
        raise ConfigSemantic(
            f"data reach {data_sup:g}, above the flux box R range {list(box.R)}")

    projected = project_all(problem, mesh)
    dn = build_data_norms(projected, mesh)
    constants = apriori_constants(ktable, ftable, dn, mesh.alpha)

    # The solution's nonlocal mean stays within (sup w / K_w) * L1-growth; if
    # that envelope can exceed the box's R range the sampled flux bounds may
    # be optimistic late in the run. Not fatal: the box check above already
    # guarantees the *data* fit, so record it and continue.
    mean_envelope = (ktable.sup_w / ktable.k_omega) * constants.r1[-1]
    if mean_envelope > box.R[1] + tol:
        warnings.append(
            f"nonlocal-mean envelope {mean_envelope:g} exceeds flux box R "
            f"range {list(box.R)}; bound constants extrapolate outside the box")

    return RunSetup(
        config=cfg,
        kernel=kernel,
        kernel_table=ktable,
        discrete_kernel=dk,
        model=model,
        box=box,
        flux_table=ftable,
        mesh=mesh,
        problem=problem,
        projected=projected,
        data_norms=dn,
        constants=constants,
        warnings=tuple(warnings),
    )


@dataclass
class Trajectory:
    """Result of a run: stored states, per-step diagnostics, and constants."""

    setup: RunSetup
    mesh: Mesh
    states: list[SolverState]
    diagnostics: list[DiagnosticsRecord]
    constants: ConstantsReport
    violations: list = field(default_factory=list)
    entropy_every: int = 1

    @property
    def final_state(self) -> SolverState:
        return self.states[-1]

    @property
    def final_cells(self) -> np.ndarray:
        return self.states[-1].cells

    def worst_entropy_residual(self) -> float:
        vals = [r.entropy_plus_max for r in self.diagnostics] + [
            r.entropy_minus_max for r in self.diagnostics]
        vals = [v for v in vals if np.isfinite(v)]
        return max(vals) if vals else float("nan")


def solve(
    run: Union[RunSetup, RunConfig, dict, str],
    *,
    bound_mode: Optional[str] = None,
    output_stride: Optional[int] = None,
    entropy_every: Optional[int] = None,
    k_grid_size: Optional[int] = None,
) -> Trajectory:
    """March the scheme from 0 to T, checking bounds as it goes.

    entropy_every=0 disables entropy residuals; None picks a cadence by grid
    size. Stored states honor output_stride but always include step 0 and the
    final step.
    """
    setup = run if isinstance(run, RunSetup) else assemble(run)
    cfg = setup.config
    mesh, dk, model = setup.mesh, setup.discrete_kernel, setup.model
    projected, constants = setup.projected, setup.constants

    mode = bound_mode if bound_mode is not None else cfg.bound_mode
    stride = output_stride if output_stride is not None else cfg.output_stride
    k_size = k_grid_size if k_grid_size is not None else cfg.k_grid_size
    if entropy_every is None:
        entropy_every = ENTROPY_EVERY_DENSE if mesh.N <= ENTROPY_DENSE_LIMIT else ENTROPY_EVERY_SPARSE

    state = make_state(0, 0.0, projected.rho0, projected.left[0], projected.right[0], dk)
    norms = measure(state, mesh)
    record = DiagnosticsRecord(
        step=0, t=0.0, l1=norms.l1, linf=norms.linf, tv=norms.tv,
        min_cell=norms.min_cell, mass=norms.mass)
    record, violations = compare_bounds(record, constants, mode)
    records = [record]
    states = [state]

    for n in range(mesh.n_steps):
        nxt, flux = advance(state, dk, model, mesh, projected)
        norms = measure(nxt, mesh)
        td = time_difference(state, nxt, mesh)
        residual = mass_balance_residual(state, nxt, mesh, flux)

        ent_plus = ent_minus = float("nan")
        if entropy_every and (nxt.step % entropy_every == 0 or nxt.step == mesh.n_steps):
            k_values = entropy_k_grid(state, nxt, k_size)
            res_plus, res_minus = entropy_residuals(state, nxt, mesh, model, k_values)
            ent_plus = float(res_plus.max())
            ent_minus = float(res_minus.max())

        record = DiagnosticsRecord(
            step=nxt.step, t=nxt.t, l1=norms.l1, linf=norms.linf, tv=norms.tv,
            min_cell=norms.min_cell, mass=norms.mass, time_diff=td,
            entropy_plus_max=ent_plus, entropy_minus_max=ent_minus,
            mass_residual=residual)
        record, step_violations = compare_bounds(record, constants, mode)
        violations.extend(step_violations)
        records.append(record)

        if nxt.step % stride == 0 or nxt.step == mesh.n_steps:
            states.append(nxt)
        state = nxt

    return Trajectory(
        setup=setup, mesh=mesh, states=states, diagnostics=records,
        constants=constants, violations=violations, entropy_every=entropy_every)
