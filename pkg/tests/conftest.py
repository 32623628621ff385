"""Shared fixtures: the reference problem and its solved trajectory.

Reference problem: nonlocal-lwr flux (v_max = rho_max = 1), triweight kernel
with h = 0.2, domain [0, 1], Riemann initial datum 0.8 on [0, 0.5] and 0
after, boundary data rho_a = 0.8 and rho_b = 0, horizon T = 0.5, alpha =
max(L, 1), time step from the CFL cap. Most acceptance checks run against
one N = 200 trajectory, solved once per session.
"""

import copy

import pytest

import nonlocal_fv as nf

REFERENCE = {
    "domain": {"a": 0.0, "b": 1.0},
    "N": 200,
    "T": 0.5,
    "alpha": "auto",
    "kernel": {"name": "triweight", "h": 0.2, "discretization": "midpoint"},
    "flux": {
        "name": "nonlocal-lwr",
        "params": {"v_max": 1.0, "rho_max": 1.0},
        "box": {"rho": [0.0, 1.0], "R": [0.0, 1.0]},
    },
    "data": {
        "initial": {"kind": "step", "left": 0.8, "right": 0.0, "where": 0.5},
        "left": {"kind": "constant", "value": 0.8},
        "right": {"kind": "constant", "value": 0.0},
    },
}


def reference_config(n_cells=200, **overrides) -> dict:
    cfg = copy.deepcopy(REFERENCE)
    cfg["N"] = n_cells
    cfg.update(overrides)
    return cfg


@pytest.fixture(scope="session")
def ref_setup() -> nf.RunSetup:
    return nf.assemble(reference_config(200))


@pytest.fixture(scope="session")
def ref_trajectory(ref_setup) -> nf.Trajectory:
    # Entropy residuals get their own dedicated run (different N); skip here.
    return nf.solve(ref_setup, entropy_every=0, output_stride=ref_setup.mesh.n_steps)
