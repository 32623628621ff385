"""Grid refinement study on smooth data.

Successive refinements share one lambda = dt/dx, so the L1 difference
between consecutive levels measures self-convergence. Observed order
approaches one as the mesh resolves the smooth profile.
"""

import nonlocal_fv as nf

from riemann_profile import CONFIG

LEVELS = [100, 200, 400, 800]


def main():
    cfg = dict(CONFIG, T=0.25)
    cfg["data"] = {
        "initial": {"kind": "sine", "offset": 0.4, "amplitude": 0.4, "frequency": 1},
        "left": {"kind": "constant", "value": 0.4},
        "right": {"kind": "constant", "value": 0.4},
    }
    result = nf.convergence_study(cfg, LEVELS)

    print(f"lambda = {result.lam:.6f} (fixed across levels), T = {cfg['T']}")
    print(f"{'N':>6} {'dx':>12} {'L1 diff':>12} {'order':>8}")
    for n, dx, err, order in result.as_rows():
        err_s = f"{err:.4e}" if err == err else "-"
        ord_s = f"{order:.3f}" if order == order else "-"
        print(f"{n:>6} {dx:>12.3e} {err_s:>12} {ord_s:>8}")


if __name__ == "__main__":
    main()
