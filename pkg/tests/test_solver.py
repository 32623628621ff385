"""Scheme update oracles: hand-computed steps, invariance, determinism.

Hand oracle for advection f = rho, alpha = 1: the two-point flux collapses
to F(u, v) = u (pure upwind), so with lambda = 0.2,

    [1, 0, 0], ghosts 0  ->  [1 - 0.2(1-0), 0 - 0.2(0-1), 0] = [0.8, 0.2, 0].

For the zero flux the update is a three-point average:
rho_j + (alpha lambda / 2)(rho_{j+1} - 2 rho_j + rho_{j-1}).
"""

import dataclasses

import numpy as np
import pytest

import nonlocal_fv as nf
from nonlocal_fv.errors import CFLViolation, NonFiniteState, StateMismatch
from nonlocal_fv.grid import ProjectedData


def hand_mesh(n=3, lam=0.2, alpha=1.0, n_steps=5, a=0.0, b=1.0):
    # Direct construction leaves cfl_limit unset: formula examples may pick
    # any lambda without tripping the runtime cap check.
    dx = (b - a) / n
    dt = lam * dx
    return nf.Mesh(a=a, b=b, N=n, dx=dx, dt=dt, lam=lam, alpha=alpha,
                   T=n_steps * dt, n_steps=n_steps)


def tri_kernel(mesh, h=0.4):
    return nf.build_discrete_kernel(nf.triweight(h), mesh)


def zero_traces(mesh):
    z = np.zeros(mesh.n_steps + 1)
    return ProjectedData(rho0=np.zeros(mesh.N), left=z, right=z.copy())


def test_advection_single_step_oracle():
    mesh = hand_mesh()
    dk = tri_kernel(mesh)
    model = nf.linear_advection(1.0)
    state = nf.make_state(0, 0.0, [1.0, 0.0, 0.0], 0.0, 0.0, dk)
    new = nf.step(state, dk, model, mesh, zero_traces(mesh))
    assert np.allclose(new.cells, [0.8, 0.2, 0.0], atol=1e-15)
    assert new.step == 1
    assert new.t == pytest.approx(mesh.dt)


def test_zero_flux_diffuses():
    mesh = hand_mesh()
    dk = tri_kernel(mesh)
    state = nf.make_state(0, 0.0, [0.0, 1.0, 0.0], 0.0, 0.0, dk)
    new = nf.step(state, dk, nf.zero_flux(), mesh, zero_traces(mesh))
    assert np.allclose(new.cells, [0.1, 0.8, 0.1], atol=1e-15)


def test_zero_data_stays_zero():
    # f(., ., 0, .) = 0: the zero state is a fixed point, exactly.
    mesh = hand_mesh(n=8, n_steps=10)
    dk = tri_kernel(mesh, h=0.3)
    model = nf.nonlocal_lwr(1.0, 1.0)
    traces = zero_traces(mesh)
    state = nf.make_state(0, 0.0, np.zeros(8), 0.0, 0.0, dk)
    for _ in range(mesh.n_steps):
        state = nf.step(state, dk, model, mesh, traces)
    assert np.all(state.cells == 0.0)


def test_ghosts_come_from_traces():
    mesh = hand_mesh()
    dk = tri_kernel(mesh)
    left = np.linspace(0.5, 0.7, mesh.n_steps + 1)
    right = np.linspace(0.1, 0.0, mesh.n_steps + 1)
    traces = ProjectedData(rho0=np.zeros(mesh.N), left=left, right=right)
    state = nf.make_state(0, 0.0, np.zeros(mesh.N), left[0], right[0], dk)
    new = nf.step(state, dk, nf.zero_flux(), mesh, traces)
    assert new.ghost_left == left[1]
    assert new.ghost_right == right[1]


def test_no_trace_beyond_horizon():
    mesh = hand_mesh(n_steps=1)
    dk = tri_kernel(mesh)
    traces = zero_traces(mesh)
    state = nf.make_state(0, 0.0, np.zeros(mesh.N), 0.0, 0.0, dk)
    state = nf.step(state, dk, nf.zero_flux(), mesh, traces)
    with pytest.raises(StateMismatch):
        nf.step(state, dk, nf.zero_flux(), mesh, traces)


def test_advance_polices_cfl_on_validated_mesh():
    fb = nf.flux_bounds(nf.linear_advection(1.0),
                        nf.Box(t=(0, 1), x=(0, 1), rho=(0, 1), R=(0, 1)))
    mesh = nf.build_mesh(0.0, 1.0, 10, 0.1, 1.0, fb)
    broken = dataclasses.replace(mesh, lam=10.0)
    dk = nf.build_discrete_kernel(nf.triweight(0.3), broken)
    traces = zero_traces(broken)
    state = nf.make_state(0, 0.0, np.zeros(10), 0.0, 0.0, dk)
    with pytest.raises(CFLViolation):
        nf.step(state, dk, nf.linear_advection(1.0), broken, traces)


def test_states_are_read_only():
    mesh = hand_mesh()
    dk = tri_kernel(mesh)
    state = nf.make_state(0, 0.0, [0.1, 0.2, 0.3], 0.0, 0.0, dk)
    with pytest.raises(ValueError):
        state.cells[0] = 9.0


def test_nonfinite_state_rejected():
    mesh = hand_mesh()
    dk = tri_kernel(mesh)
    with pytest.raises(NonFiniteState):
        nf.make_state(0, 0.0, [np.nan, 0.0, 0.0], 0.0, 0.0, dk)


def test_determinism_bitwise(ref_setup):
    one = nf.solve(ref_setup, entropy_every=0, output_stride=ref_setup.mesh.n_steps)
    two = nf.solve(ref_setup, entropy_every=0, output_stride=ref_setup.mesh.n_steps)
    assert np.array_equal(one.final_cells, two.final_cells)
    assert one.final_cells.tobytes() == two.final_cells.tobytes()
