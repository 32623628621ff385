"""Norm measurement, entropy residuals, and bound comparison.

The advection entropy oracle recomputes both inequalities term by term with
plain Python arithmetic: flux F(u, v) = (f(u) + f(v) - alpha (v - u)) / 2,
clip-up flux difference G, clip-down difference L, and the k-level shift
f(x_{j+1/2}, k) - f(x_{j-1/2}, k) (zero for advection). The residuals must
match the vectorized implementation exactly and stay nonpositive.
"""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import nonlocal_fv as nf
from nonlocal_fv.diagnostics import neg_part, pos_part, sgn_minus, sgn_plus
from nonlocal_fv.errors import BoundViolation
from nonlocal_fv.grid import ProjectedData


def hand_mesh(n=3, lam=0.2, alpha=1.0, n_steps=5, a=0.0, b=1.0):
    dx = (b - a) / n
    dt = lam * dx
    return nf.Mesh(a=a, b=b, N=n, dx=dx, dt=dt, lam=lam, alpha=alpha,
                   T=n_steps * dt, n_steps=n_steps)


def tri_kernel(mesh, h=0.4):
    return nf.build_discrete_kernel(nf.triweight(h), mesh)


# -- part/sign helpers -------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-1e6, max_value=1e6))
def test_part_identities(s):
    assert pos_part(s) - neg_part(s) == pytest.approx(s)
    assert pos_part(s) + neg_part(s) == pytest.approx(abs(s))
    assert sgn_plus(s) in (0.0, 1.0)
    assert sgn_minus(s) in (-1.0, 0.0)


# -- measurement -------------------------------------------------------------

def test_measure_oracle():
    # Cells [1,0,0], ghosts 0, dx = 1: l1 = 1, tv = |0-1|+|1-0| = 2, linf = 1.
    mesh = hand_mesh(n=3, a=0.0, b=3.0)
    dk = tri_kernel(mesh, h=1.2)
    state = nf.make_state(0, 0.0, [1.0, 0.0, 0.0], 0.0, 0.0, dk)
    norms = nf.measure(state, mesh)
    assert norms.l1 == pytest.approx(1.0, abs=1e-15)
    assert norms.tv == pytest.approx(2.0, abs=1e-15)
    assert norms.linf == pytest.approx(1.0, abs=1e-15)
    assert norms.mass == pytest.approx(1.0, abs=1e-15)
    assert norms.min_cell == 0.0


def test_measure_constant_state():
    mesh = hand_mesh(n=4, a=0.0, b=2.0)
    dk = tri_kernel(mesh, h=0.9)
    state = nf.make_state(0, 0.0, np.full(4, 0.3), 0.3, 0.3, dk)
    norms = nf.measure(state, mesh)
    assert norms.tv == 0.0
    assert norms.l1 == pytest.approx(0.3 * 2.0, abs=1e-15)
    assert norms.mass == pytest.approx(norms.l1, abs=1e-15)


def test_time_difference_includes_ghosts():
    mesh = hand_mesh(n=3, a=0.0, b=3.0)
    dk = tri_kernel(mesh, h=1.2)
    s0 = nf.make_state(0, 0.0, [1.0, 0.0, 0.0], 0.5, 0.0, dk)
    s1 = nf.make_state(1, mesh.dt, [0.8, 0.2, 0.0], 0.7, 0.0, dk)
    got = nf.time_difference(s0, s1, mesh)
    assert got == pytest.approx(1.0 * (0.2 + 0.2 + 0.2 + 0.0 + 0.0), abs=1e-15)


def test_mass_balance_identity_on_real_step():
    mesh = hand_mesh(n=8, a=0.0, b=1.0)
    dk = tri_kernel(mesh, h=0.3)
    model = nf.nonlocal_lwr(1.0, 1.0)
    rng = np.random.default_rng(3)
    traces = ProjectedData(
        rho0=np.zeros(8),
        left=np.full(mesh.n_steps + 1, 0.4),
        right=np.zeros(mesh.n_steps + 1),
    )
    state = nf.make_state(0, 0.0, rng.uniform(0, 1, 8), 0.4, 0.0, dk)
    nxt, flux = nf.advance(state, dk, model, mesh, traces)
    residual = nf.mass_balance_residual(state, nxt, mesh, flux)
    assert abs(residual) < 1e-15


# -- entropy -----------------------------------------------------------------

def test_entropy_zero_for_constant_state_zero_flux():
    mesh = hand_mesh(n=4, a=0.0, b=2.0)
    dk = tri_kernel(mesh, h=0.9)
    model = nf.zero_flux()
    s0 = nf.make_state(0, 0.0, np.full(4, 0.3), 0.3, 0.3, dk)
    s1 = nf.make_state(1, mesh.dt, np.full(4, 0.3), 0.3, 0.3, dk)
    res_plus, res_minus = nf.entropy_residuals(s0, s1, mesh, model, np.array([0.0, 0.3, 1.0]))
    assert np.all(res_plus == 0.0)
    assert np.all(res_minus == 0.0)


def test_entropy_plus_vanishes_above_range():
    # k above every value: positive parts and clipped flux differences vanish.
    mesh = hand_mesh()
    dk = tri_kernel(mesh)
    model = nf.nonlocal_lwr(1.0, 1.0)
    traces = ProjectedData(rho0=np.zeros(3), left=np.zeros(mesh.n_steps + 1),
                           right=np.zeros(mesh.n_steps + 1))
    s0 = nf.make_state(0, 0.0, [0.9, 0.1, 0.4], 0.0, 0.0, dk)
    s1 = nf.step(s0, dk, model, mesh, traces)
    res_plus, _ = nf.entropy_residuals(s0, s1, mesh, model, np.array([2.0]))
    assert np.all(res_plus == 0.0)


def brute_force_residuals(prev, nxt, mesh, f, k):
    """Term-by-term recomputation with scalar arithmetic."""
    lam, alpha = mesh.lam, mesh.alpha
    ext = list(prev.extended())
    flux = lambda u, v: 0.5 * (f(u) + f(v) - alpha * (v - u))
    res_p, res_m = [], []
    for j in range(1, mesh.N + 1):
        u, v, w = ext[j - 1], ext[j], ext[j + 1]
        g_right = flux(max(v, k), max(w, k)) - flux(k, k)
        g_left = flux(max(u, k), max(v, k)) - flux(k, k)
        l_right = flux(k, k) - flux(min(v, k), min(w, k))
        l_left = flux(k, k) - flux(min(u, k), min(v, k))
        new = nxt.cells[j - 1]
        shift = 0.0  # advection flux has no x dependence
        sp = 1.0 if new - k > 0 else 0.0
        sm = -1.0 if new - k < 0 else 0.0
        res_p.append(max(new - k, 0) - max(v - k, 0) + lam * (g_right - g_left) + lam * sp * shift)
        res_m.append(max(k - new, 0) - max(k - v, 0) + lam * (l_right - l_left) + lam * sm * shift)
    return np.array(res_p), np.array(res_m)


def test_entropy_advection_oracle():
    # Worked case small enough to check by hand:
    # f = rho, alpha = 1, [1,0,0] -> [0.8,0.2,0], k = 0.5.
    mesh = hand_mesh()
    dk = tri_kernel(mesh)
    model = nf.linear_advection(1.0)
    traces = ProjectedData(rho0=np.zeros(3), left=np.zeros(mesh.n_steps + 1),
                           right=np.zeros(mesh.n_steps + 1))
    s0 = nf.make_state(0, 0.0, [1.0, 0.0, 0.0], 0.0, 0.0, dk)
    s1 = nf.step(s0, dk, model, mesh, traces)
    assert np.allclose(s1.cells, [0.8, 0.2, 0.0], atol=1e-15)

    for k in (0.5, 0.0, 0.25, 0.8, 1.0):
        res_p, res_m = nf.entropy_residuals(s0, s1, mesh, model, np.array([k]))
        oracle_p, oracle_m = brute_force_residuals(s0, s1, mesh, lambda s: s, k)
        assert np.allclose(res_p[:, 0], oracle_p, atol=1e-14)
        assert np.allclose(res_m[:, 0], oracle_m, atol=1e-14)
        assert np.all(res_p <= 1e-12)
        assert np.all(res_m <= 1e-12)


def test_g_l_duality():
    # (F(max)-F(k,k)) + (F(k,k)-F(min)) = F(max) - F(min), checked through
    # the public flux helper on random argument pairs.
    rng = np.random.default_rng(11)
    model = nf.nonlocal_lwr(1.0, 1.0)
    u, v, k = rng.uniform(0, 1, (3, 50))
    big_r = rng.uniform(0, 1, 50)
    f_k = nf.evaluate_flux(model, 0.0, 0.5, k, big_r)
    g = nf.numerical_flux(model, 0.0, 0.5, np.maximum(u, k), np.maximum(v, k), big_r, 1.0) - f_k
    l = f_k - nf.numerical_flux(model, 0.0, 0.5, np.minimum(u, k), np.minimum(v, k), big_r, 1.0)
    direct = (nf.numerical_flux(model, 0.0, 0.5, np.maximum(u, k), np.maximum(v, k), big_r, 1.0)
              - nf.numerical_flux(model, 0.0, 0.5, np.minimum(u, k), np.minimum(v, k), big_r, 1.0))
    assert np.allclose(g + l, direct, atol=1e-15)


def test_entropy_k_grid_covers_values_and_levels():
    mesh = hand_mesh()
    dk = tri_kernel(mesh)
    s0 = nf.make_state(0, 0.0, [1.0, 0.0, 0.0], 0.5, 0.0, dk)
    s1 = nf.make_state(1, mesh.dt, [0.8, 0.2, 0.0], 0.5, 0.0, dk)
    grid = nf.entropy_k_grid(s0, s1, size=32)
    for value in [1.0, 0.0, 0.8, 0.2, 0.5]:
        assert np.min(np.abs(grid - value)) < 1e-15
    assert grid.size >= 32
    assert np.all(np.diff(grid) > 0)


# -- bound comparison --------------------------------------------------------

def test_compare_bounds_flags_single_linf_violation(ref_setup):
    constants = ref_setup.constants
    record = nf.DiagnosticsRecord(
        step=1, t=ref_setup.mesh.dt, l1=0.1, linf=1e9, tv=0.5,
        min_cell=0.0, mass=0.1)
    updated, violations = nf.compare_bounds(record, constants, mode="monitor")
    assert [v["quantity"] for v in violations] == ["linf"]
    assert updated.margin_linf < 0
    assert updated.margin_l1 > 0
    with pytest.raises(BoundViolation):
        nf.compare_bounds(record, constants, mode="strict")


def test_compare_bounds_accepts_compliant_record(ref_setup):
    record = nf.DiagnosticsRecord(
        step=0, t=0.0, l1=0.4, linf=0.8, tv=0.8, min_cell=0.0, mass=0.4)
    updated, violations = nf.compare_bounds(record, ref_setup.constants, mode="strict")
    assert violations == []
    assert math.isnan(updated.margin_timediff)   # no transition at step 0
