"""How much headroom the a-priori bounds leave on a real run.

Solves the reference congestion front and reports, for each monitored
estimate, the smallest margin (bound minus measurement) seen over the run.
The margins are large: the constants are worst-case envelopes, not sharp
predictions. The point is that they never go negative.
"""

import math

import nonlocal_fv as nf

from riemann_profile import CONFIG


def main():
    setup = nf.assemble(CONFIG)
    traj = nf.solve(setup, entropy_every=0, output_stride=setup.mesh.n_steps)

    # At t = 0 the l1/linf/tv bounds equal the data norms (margin 0 by
    # construction); the interesting margins are the later ones.
    tightest = {"l1": math.inf, "linf": math.inf, "tv": math.inf, "timediff": math.inf}
    for rec in traj.diagnostics:
        if rec.step == 0:
            continue
        tightest["l1"] = min(tightest["l1"], rec.margin_l1)
        tightest["linf"] = min(tightest["linf"], rec.margin_linf)
        tightest["tv"] = min(tightest["tv"], rec.margin_tv)
        tightest["timediff"] = min(tightest["timediff"], rec.margin_timediff)

    c = traj.constants
    print(f"alpha = {c.alpha:g}, cal_L = {c.cal_l:.4f}, cal_W = {c.cal_w:.4f}")
    print(f"at T = {setup.mesh.T:g}: C1 = {c.c1[-1]:.4f}, "
          f"linf bound = {c.linf_bound[-1]:.4g}, Cx = {c.cx[-1]:.4g}")
    print()
    print(f"{'estimate':<10} {'tightest margin':>16}")
    for name, value in tightest.items():
        print(f"{name:<10} {value:>16.6g}")
    print()
    print(f"violations recorded: {len(traj.violations)}")


if __name__ == "__main__":
    main()
