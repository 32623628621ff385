"""Constant-chain spot checks against hand-computed values.

Hand oracles:
  C1(t)   = |rho_o|_L1 + alpha (|rho_a|_L1(0,t) + |rho_b|_L1(0,t));
            with rho_o = 1 on [0,1], rho_a = rho_b = 0.5, alpha = 1, t = 1:
            C1(1) = 1 + (0.5 + 0.5) = 2.
  cal_L   = sup|w'|/K + sup|w| |w'|_L1 / K^2
  cal_W   = 2 sup|w''|/K + sup|w| |w''|_L1 / K^2
            + 2 sup|w| |w'|_L1^2 / K^3 + 2 sup|w'| |w'|_L1 / K^2
With KernelNorms(2, 3, 5, 7, 11, 1/2): cal_L = 6 + 56 = 62 and
cal_W = 20 + 88 + 1568 + 168 = 1844.
"""

import numpy as np
import pytest

import nonlocal_fv as nf
from nonlocal_fv.bounds import kernel_curvature, kernel_lipschitz
from nonlocal_fv.errors import MissingNorm
from nonlocal_fv.fluxes import FluxBounds
from nonlocal_fv.kernels import KernelNorms

UNIT_BOX = nf.Box(t=(0.0, 1.0), x=(0.0, 1.0), rho=(0.0, 1.0), R=(0.0, 1.0))


def plain_bounds(L=1.0, C=1.0, sup_d_rhox=0.0, sup_d_rhoR=1.0):
    return FluxBounds(L=L, C=C, sup_d_rhox=sup_d_rhox, sup_d_rhoR=sup_d_rhoR, box=UNIT_BOX)


def constant_problem(mesh, initial=1.0, left=0.5, right=0.5):
    problem = nf.ProblemData(
        initial=nf.constant_data(initial),
        left=nf.constant_data(left),
        right=nf.constant_data(right))
    return nf.project_all(problem, mesh)


def test_kernel_factor_oracles():
    kn = KernelNorms(sup_w=2.0, sup_w1=3.0, sup_w2=5.0, l1_w1=7.0, l1_w2=11.0, k_omega=0.5)
    assert kernel_lipschitz(kn) == pytest.approx(62.0, rel=1e-15)
    assert kernel_curvature(kn) == pytest.approx(1844.0, rel=1e-15)


def test_c1_linear_growth_oracle():
    mesh = nf.build_mesh(0.0, 1.0, 10, 1.0, 1.0, plain_bounds())
    dn = nf.build_data_norms(constant_problem(mesh), mesh)
    kn = KernelNorms(sup_w=1.0, sup_w1=1.0, sup_w2=1.0, l1_w1=1.0, l1_w2=1.0, k_omega=1.0)
    report = nf.apriori_constants(kn, plain_bounds(), dn, alpha=1.0)
    assert report.c1[0] == pytest.approx(1.0, abs=1e-12)       # just the initial mass
    assert report.c1[-1] == pytest.approx(2.0, abs=1e-12)      # + alpha (0.5 + 0.5) t
    assert np.all(np.diff(report.c1) >= 0)


def test_data_norm_conventions():
    mesh = nf.build_mesh(0.0, 1.0, 10, 1.0, 1.0, plain_bounds())
    # Ramp left trace, zero right trace: check cumulative tables directly.
    ramp = nf.table_data([0.0, 1.0], [0.0, 1.0])
    problem = nf.ProblemData(initial=nf.constant_data(0.2), left=ramp,
                             right=nf.constant_data(0.0))
    pd = nf.project_all(problem, mesh)
    dn = nf.build_data_norms(pd, mesh)
    # L1 tables integrate slabs strictly before t^n.
    assert dn.l1_a[0] == 0.0
    assert dn.l1_a[1] == pytest.approx(mesh.dt * pd.left[0], abs=1e-15)
    assert dn.l1_a[2] == pytest.approx(mesh.dt * (pd.left[0] + pd.left[1]), abs=1e-15)
    # sup tables are inclusive, maxdata excludes the slab being entered.
    assert dn.sup_a[0] == pytest.approx(pd.left[0])
    assert dn.maxdata[0] == pytest.approx(0.2)     # only the initial datum
    assert dn.maxdata[1] == pytest.approx(max(0.2, pd.left[0]))
    # TV tables accumulate trace jumps.
    assert dn.tv_a[0] == 0.0
    assert dn.tv_a[2] == pytest.approx(abs(pd.left[1] - pd.left[0])
                                       + abs(pd.left[2] - pd.left[1]), abs=1e-15)
    # Ghost-inclusive initial variation.
    assert dn.tv0 == pytest.approx(abs(0.2 - pd.left[0]) + abs(0.2 - 0.0), abs=1e-14)


def test_linf_bound_starts_at_maxdata():
    mesh = nf.build_mesh(0.0, 1.0, 10, 0.5, 1.0, plain_bounds())
    dn = nf.build_data_norms(constant_problem(mesh, initial=0.7, left=0.3, right=0.1), mesh)
    kn = KernelNorms(sup_w=1.0, sup_w1=1.0, sup_w2=1.0, l1_w1=1.0, l1_w2=1.0, k_omega=1.0)
    report = nf.apriori_constants(kn, plain_bounds(), dn, alpha=1.0)
    assert report.linf_bound[0] == pytest.approx(0.7)
    assert np.all(np.diff(report.linf_bound) >= 0)


def test_tv_bound_zero_variation_data():
    # Constant data: Cx(0) = tv0 = ghost jumps only.
    mesh = nf.build_mesh(0.0, 1.0, 10, 0.5, 1.0, plain_bounds())
    dn = nf.build_data_norms(constant_problem(mesh, initial=0.5, left=0.5, right=0.5), mesh)
    kn = KernelNorms(sup_w=1.0, sup_w1=1.0, sup_w2=1.0, l1_w1=1.0, l1_w2=1.0, k_omega=1.0)
    report = nf.apriori_constants(kn, plain_bounds(), dn, alpha=1.0)
    assert dn.tv0 == pytest.approx(0.0, abs=1e-14)
    assert report.cx[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(report.cx >= -1e-12)


def test_time_diff_bound_per_transition():
    mesh = nf.build_mesh(0.0, 1.0, 10, 0.5, 1.0, plain_bounds())
    dn = nf.build_data_norms(constant_problem(mesh), mesh)
    kn = KernelNorms(sup_w=1.0, sup_w1=1.0, sup_w2=1.0, l1_w1=1.0, l1_w2=1.0, k_omega=1.0)
    report = nf.apriori_constants(kn, plain_bounds(), dn, alpha=1.0)
    assert report.time_diff_bound.shape == (mesh.n_steps,)
    # Constant traces: the boundary-jump term vanishes, leaving dt * Ct.
    assert report.time_diff_bound[0] == pytest.approx(mesh.dt * report.ct[0], rel=1e-12)


def test_time_lipschitz_window():
    mesh = nf.build_mesh(0.0, 1.0, 10, 0.5, 1.0, plain_bounds())
    dn = nf.build_data_norms(constant_problem(mesh), mesh)
    kn = KernelNorms(sup_w=1.0, sup_w1=1.0, sup_w2=1.0, l1_w1=1.0, l1_w2=1.0, k_omega=1.0)
    report = nf.apriori_constants(kn, plain_bounds(), dn, alpha=1.0)
    n = mesh.n_steps
    # Constant traces have no window TV: tau * Ct(t_to).
    expected = (report.t[n] - report.t[0]) * report.ct[n]
    assert report.time_lipschitz(0, n, dn) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(MissingNorm):
        report.time_lipschitz(0, n + 5, dn)


def test_stability_chain_zero_perturbation():
    # sigma = rho: every distance is zero, so the final bound is zero too.
    mesh = nf.build_mesh(0.0, 1.0, 10, 0.5, 1.0, plain_bounds())
    pd = constant_problem(mesh)
    dn = nf.build_data_norms(pd, mesh)
    kn = KernelNorms(sup_w=1.0, sup_w1=1.0, sup_w2=1.0, l1_w1=1.0, l1_w2=1.0, k_omega=1.0)
    distances = nf.build_data_distances(pd, pd, mesh)
    report = nf.stability_constants(kn, plain_bounds(), dn, dn, distances, alpha=1.0)
    assert distances.initial_l1 == 0.0
    assert float(np.asarray(report.a_dist).reshape(-1)[-1]) == 0.0
    assert float(np.asarray(report.final_bound).reshape(-1)[-1]) == 0.0


def test_stability_distance_tables():
    mesh = nf.build_mesh(0.0, 1.0, 10, 0.5, 1.0, plain_bounds())
    pd1 = constant_problem(mesh, initial=0.5, left=0.5, right=0.5)
    pd2 = constant_problem(mesh, initial=0.6, left=0.5, right=0.5)
    d = nf.build_data_distances(pd1, pd2, mesh)
    assert d.initial_l1 == pytest.approx(0.1, abs=1e-14)
    assert d.left_l1[-1] == pytest.approx(0.0, abs=1e-15)


def test_as_table_names():
    mesh = nf.build_mesh(0.0, 1.0, 5, 0.2, 1.0, plain_bounds())
    dn = nf.build_data_norms(constant_problem(mesh), mesh)
    kn = KernelNorms(sup_w=1.0, sup_w1=1.0, sup_w2=1.0, l1_w1=1.0, l1_w2=1.0, k_omega=1.0)
    table = nf.apriori_constants(kn, plain_bounds(), dn, alpha=1.0).as_table()
    for name in ["C1", "C2", "K1", "K2", "K3", "K4", "Cx", "Ct", "Cxt",
                 "R1", "Rinf", "T1", "T2", "tv_bound", "linf_bound",
                 "time_diff_bound", "cal_L", "cal_W", "alpha", "L", "t"]:
        assert name in table
