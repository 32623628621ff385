"""Command-line front end.

    nonlocal-fv solve         --config run.json [--out DIR] [--strict-bounds]
    nonlocal-fv bounds        --config run.json [--out DIR]
    nonlocal-fv convergence   --config run.json [--levels 100,200,400,800] [--out DIR]
    nonlocal-fv stability     --config run.json [--perturb eps=1e-3,target=initial] [--out DIR]
    nonlocal-fv entropy-check --config run.json [--out DIR]

Exit codes: 0 success, 2 bound or entropy violation, 3 config error,
4 inadmissible discretization, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .config import parse_config
from .driver import Trajectory, assemble, solve
from .errors import (
    AdmissibilityError,
    BoundViolation,
    ConfigError,
    ConfigSemantic,
    NumericError,
)
from .experiments import Perturbation, convergence_study, stability_experiment

__all__ = ["main"]

ENTROPY_TOL = 1e-12

EXIT_OK = 0
EXIT_BOUND = 2
EXIT_CONFIG = 3
EXIT_ADMISSIBILITY = 4
EXIT_NUMERIC = 5


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _sanitize(obj):
    # json.dump writes bare Infinity/NaN otherwise, which is not JSON;
    # numpy scalars and arrays are not serializable at all.
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return _sanitize(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(_sanitize(payload), indent=2, sort_keys=True) + "\n")


def _out_dir(args, cfg) -> str:
    if args.out:
        return args.out
    if cfg.out_dir:
        return os.path.join(cfg.base_dir, cfg.out_dir)
    return "out"


def _write_solution(traj: Trajectory, out: str) -> None:
    mesh = traj.mesh
    centers = mesh.cell_centers
    interfaces = mesh.interfaces
    sol_rows = []
    face_rows = []
    for state in traj.states:
        for x, r in zip(centers, state.cells):
            sol_rows.append((state.t, float(x), float(r)))
        for x, r in zip(interfaces, state.interface_R):
            face_rows.append((state.t, float(x), float(r)))
    _write_csv(os.path.join(out, "solution.csv"), ["t", "x", "rho"], sol_rows)
    _write_csv(os.path.join(out, "interfaces.csv"), ["t", "x_interface", "R"], face_rows)


DIAG_COLUMNS = [
    "step", "t", "l1", "linf", "tv", "min", "mass", "time_diff",
    "entropy_plus_max", "entropy_minus_max",
    "margin_l1", "margin_linf", "margin_tv", "margin_timediff",
]


def _write_diagnostics(traj: Trajectory, out: str) -> None:
    rows = [
        (r.step, r.t, r.l1, r.linf, r.tv, r.min_cell, r.mass, r.time_diff,
         r.entropy_plus_max, r.entropy_minus_max,
         r.margin_l1, r.margin_linf, r.margin_tv, r.margin_timediff)
        for r in traj.diagnostics
    ]
    _write_csv(os.path.join(out, "diagnostics.csv"), DIAG_COLUMNS, rows)


def _print_warnings(setup) -> None:
    for w in setup.warnings:
        print(f"warning: {w}", file=sys.stderr)


def _cmd_solve(args) -> int:
    cfg = parse_config(args.config)
    setup = assemble(cfg)
    _print_warnings(setup)
    mode = "strict" if args.strict_bounds else cfg.bound_mode
    traj = solve(setup, bound_mode=mode)
    out = _out_dir(args, cfg)
    _write_solution(traj, out)
    _write_diagnostics(traj, out)
    _write_json(os.path.join(out, "constants.json"), traj.constants.as_table())

    final = traj.diagnostics[-1]
    print(f"solve: {setup.mesh.N} cells, {setup.mesh.n_steps} steps, "
          f"dt={setup.mesh.dt:.6g}, alpha={setup.mesh.alpha:.6g}")
    print(f"final t={final.t:.6g}: l1={final.l1:.9g} linf={final.linf:.9g} "
          f"tv={final.tv:.9g} min={final.min_cell:.3g}")
    print(f"bound margins stayed nonnegative: {'yes' if not traj.violations else 'no'}"
          f" ({len(traj.violations)} violation(s))")
    print(f"wrote solution.csv, interfaces.csv, diagnostics.csv, constants.json to {out}")
    return EXIT_BOUND if traj.violations else EXIT_OK


def _cmd_bounds(args) -> int:
    cfg = parse_config(args.config)
    setup = assemble(cfg)
    _print_warnings(setup)
    out = _out_dir(args, cfg)
    table = setup.constants.as_table()
    _write_json(os.path.join(out, "constants.json"), table)
    c = setup.constants
    print(f"bounds: alpha={c.alpha:.6g} L={c.flux_l:.6g} cal_L={c.cal_l:.6g} "
          f"cal_W={c.cal_w:.6g}")
    print(f"at T={setup.mesh.T:g}: C1={c.c1[-1]:.6g} linf_bound={c.linf_bound[-1]:.6g} "
          f"Cx={c.cx[-1]:.6g} Ct={c.ct[-1]:.6g}")
    print(f"wrote constants.json to {out}")
    return EXIT_OK


def _parse_levels(raw: str) -> list[int]:
    try:
        levels = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigSemantic(f"--levels must be comma-separated integers, got {raw!r}") from exc
    if len(levels) < 2:
        raise ConfigSemantic(f"--levels needs at least two entries, got {raw!r}")
    return levels


def _cmd_convergence(args) -> int:
    cfg = parse_config(args.config)
    levels = _parse_levels(args.levels)
    result = convergence_study(cfg, levels)
    out = _out_dir(args, cfg)
    _write_csv(os.path.join(out, "convergence.csv"),
               ["N", "dx", "l1_error", "order"], result.as_rows())
    print(f"convergence: lam={result.lam:.6g}, levels {list(result.levels)}")
    for n, dx, err, order in result.as_rows():
        order_txt = f"{order:.3f}" if math.isfinite(order) else "-"
        err_txt = f"{err:.6e}" if math.isfinite(err) else "-"
        print(f"  N={n:>6d} dx={dx:.6g} error={err_txt} order={order_txt}")
    print(f"wrote convergence.csv to {out}")
    return EXIT_OK


def _parse_perturb(raw: str) -> Perturbation:
    eps = 1e-3
    target = "initial"
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigSemantic(f"--perturb entries look like key=value, got {part!r}")
        key, _, value = part.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "eps":
            try:
                eps = float(value)
            except ValueError as exc:
                raise ConfigSemantic(f"--perturb eps must be a number, got {value!r}") from exc
        elif key == "target":
            target = value
        else:
            raise ConfigSemantic(f"--perturb keys are eps and target, got {key!r}")
    return Perturbation(eps=eps, target=target)


def _cmd_stability(args) -> int:
    cfg = parse_config(args.config)
    perturbation = _parse_perturb(args.perturb)
    result = stability_experiment(cfg, perturbation)
    out = _out_dir(args, cfg)
    payload = {
        "perturbation": {"eps": perturbation.eps, "target": perturbation.target},
        "measured_distance": result.measured_distance,
        "data_distance": result.data_distance,
        "bound": result.bound,
        "report": result.report.as_table(),
    }
    _write_json(os.path.join(out, "stability.json"), payload)
    print(f"stability: eps={perturbation.eps:g} on {perturbation.target}")
    print(f"measured final L1 distance: {result.measured_distance:.9g}")
    print(f"data distance A: {result.data_distance:.9g}")
    print(f"a-priori bound: {result.bound:.9g}")
    ok = result.measured_distance <= result.bound or not math.isfinite(result.bound)
    print(f"measured <= bound: {'yes' if ok else 'NO'}")
    print(f"wrote stability.json to {out}")
    return EXIT_OK if ok else EXIT_BOUND


def _cmd_entropy_check(args) -> int:
    cfg = parse_config(args.config)
    setup = assemble(cfg)
    _print_warnings(setup)
    traj = solve(setup, entropy_every=1)
    worst = traj.worst_entropy_residual()
    if args.out:
        _write_diagnostics(traj, args.out)
        print(f"wrote diagnostics.csv to {args.out}")
    print(f"entropy-check: {setup.mesh.n_steps} steps, k-grid size {cfg.k_grid_size}")
    print(f"worst cell entropy residual: {worst:.6e} (tolerance {ENTROPY_TOL:g})")
    if worst > ENTROPY_TOL:
        print("entropy-check: FAIL")
        return EXIT_BOUND
    print("entropy-check: pass")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocal-fv",
        description="Finite-volume solver for nonlocal conservation laws on an interval")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON run config")
        p.add_argument("--out", default=None, help="output directory")
        p.set_defaults(fn=fn)
        return p

    p = add("solve", _cmd_solve, "run the scheme and write solution and diagnostics")
    p.add_argument("--strict-bounds", action="store_true",
                   help="raise on the first a-priori bound violation")
    add("bounds", _cmd_bounds, "compute the a-priori constants without solving")
    p = add("convergence", _cmd_convergence, "grid refinement study")
    p.add_argument("--levels", default="100,200,400,800",
                   help="comma-separated cell counts, each double the last")
    p = add("stability", _cmd_stability, "perturbed-data stability experiment")
    p.add_argument("--perturb", default="eps=1e-3,target=initial",
                   help="perturbation spec, e.g. eps=1e-3,target=initial")
    add("entropy-check", _cmd_entropy_check, "verify discrete entropy residuals")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BoundViolation as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdmissibilityError as exc:
        print(f"inadmissible discretization: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
