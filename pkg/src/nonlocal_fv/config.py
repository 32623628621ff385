"""Run configuration: parsing, validation, and lossless round-tripping.

The configuration document is a JSON object:

    {
      "domain": {"a": 0.0, "b": 1.0},
      "N": 200,
      "T": 0.5,
      "alpha": "auto",                  // or a positive number
      "cfl_safety": 1.0,
      "kernel": {"name": "triweight", "h": 0.2, "discretization": "midpoint"},
      "flux": {"name": "nonlocal-lwr", "params": {"v_max": 1.0, "rho_max": 1.0},
               "box": {"rho": [0.0, 1.0], "R": [0.0, 1.0]}},
      "data": {"initial": {"kind": "step", "left": 0.8, "right": 0.0, "where": 0.5},
               "left":    {"kind": "constant", "value": 0.8},
               "right":   {"kind": "constant", "value": 0.0}},
      "bound_mode": "monitor",          // or "strict"
      "output_stride": 1,
      "k_grid_size": 32,
      "out_dir": null
    }

Data kinds: constant {value}, step {left, right, where}, sine {offset,
amplitude, frequency}, csv {path} (two numeric columns with a header line;
first column is the coordinate). Structural problems raise ConfigSyntax,
inconsistent values raise ConfigSemantic; both report every offending field
path at once.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ConfigSemantic, ConfigSyntax
from .fluxes import BUILTIN_FLUXES
from .grid import DataFn, constant_data, sine_data, step_data, table_data

__all__ = ["KernelConfig", "FluxConfig", "RunConfig", "parse_config", "make_datafn"]

KERNEL_NAMES = ("triweight", "lookahead")
DISCRETIZATIONS = ("midpoint", "cell_average")
BOUND_MODES = ("monitor", "strict")
DATA_KINDS = ("constant", "step", "sine", "csv")


@dataclass(frozen=True)
class KernelConfig:
    name: str
    h: float
    discretization: str = "midpoint"


@dataclass(frozen=True)
class FluxConfig:
    name: str
    params: dict = field(default_factory=dict)
    box_rho: Optional[tuple] = None
    box_R: Optional[tuple] = None


@dataclass(frozen=True)
class RunConfig:
    a: float
    b: float
    n_cells: int
    horizon: float
    kernel: KernelConfig
    flux: FluxConfig
    initial: dict
    left: dict
    right: dict
    alpha: Union[str, float] = "auto"
    cfl_safety: float = 1.0
    bound_mode: str = "monitor"
    output_stride: int = 1
    k_grid_size: int = 32
    out_dir: Optional[str] = None
    base_dir: str = "."

    def to_dict(self) -> dict:
        """Serializable form; parse_config(to_dict()) reproduces the config."""
        doc = {
            "domain": {"a": self.a, "b": self.b},
            "N": self.n_cells,
            "T": self.horizon,
            "alpha": self.alpha,
            "cfl_safety": self.cfl_safety,
            "kernel": {
                "name": self.kernel.name,
                "h": self.kernel.h,
                "discretization": self.kernel.discretization,
            },
            "flux": {"name": self.flux.name, "params": dict(self.flux.params)},
            "data": {"initial": dict(self.initial), "left": dict(self.left), "right": dict(self.right)},
            "bound_mode": self.bound_mode,
            "output_stride": self.output_stride,
            "k_grid_size": self.k_grid_size,
            "out_dir": self.out_dir,
        }
        if self.flux.box_rho is not None:
            doc["flux"]["box"] = {"rho": list(self.flux.box_rho), "R": list(self.flux.box_R)}
        return doc


class _Collector:
    def __init__(self):
        self.syntax: list[str] = []
        self.semantic: list[str] = []

    def need(self, mapping, key, types, path):
        if not isinstance(mapping, dict) or key not in mapping:
            self.syntax.append(f"{path}: missing")
            return None
        value = mapping[key]
        if types is not None and not isinstance(value, types):
            self.syntax.append(f"{path}: expected {getattr(types, '__name__', types)}, got {type(value).__name__}")
            return None
        if isinstance(value, bool) and types in ((int, float), (int,)):
            self.syntax.append(f"{path}: expected a number, got bool")
            return None
        return value

    def optional(self, mapping, key, types, path, default):
        if not isinstance(mapping, dict) or key not in mapping or mapping[key] is None:
            return default
        return self.need(mapping, key, types, path)

    def raise_if_failed(self):
        if self.syntax:
            raise ConfigSyntax("; ".join(self.syntax))
        if self.semantic:
            raise ConfigSemantic("; ".join(self.semantic))


_NUM = (int, float)


def _validate_data_spec(spec, path, col: _Collector):
    if not isinstance(spec, dict):
        col.syntax.append(f"{path}: expected an object")
        return
    kind = col.need(spec, "kind", str, f"{path}.kind")
    if kind is None:
        return
    if kind not in DATA_KINDS:
        col.semantic.append(f"{path}.kind: unknown kind {kind!r} (choose from {DATA_KINDS})")
        return
    if kind == "constant":
        v = col.need(spec, "value", _NUM, f"{path}.value")
        if v is not None and v < 0:
            col.semantic.append(f"{path}.value: must be nonnegative, got {v}")
    elif kind == "step":
        for key in ("left", "right", "where"):
            v = col.need(spec, key, _NUM, f"{path}.{key}")
            if v is not None and key != "where" and v < 0:
                col.semantic.append(f"{path}.{key}: must be nonnegative, got {v}")
    elif kind == "sine":
        off = col.need(spec, "offset", _NUM, f"{path}.offset")
        amp = col.need(spec, "amplitude", _NUM, f"{path}.amplitude")
        freq = col.need(spec, "frequency", int, f"{path}.frequency")
        if off is not None and off < 0:
            col.semantic.append(f"{path}.offset: must be nonnegative, got {off}")
        if amp is not None and amp < 0:
            col.semantic.append(f"{path}.amplitude: must be nonnegative, got {amp}")
        if freq is not None and freq < 1:
            col.semantic.append(f"{path}.frequency: must be a positive integer, got {freq}")
    elif kind == "csv":
        col.need(spec, "path", str, f"{path}.path")


def parse_config(source) -> RunConfig:
    """Parse a config from a dict, a JSON string, or a file path."""
    base_dir = "."
    if isinstance(source, dict):
        doc = source
    else:
        text = None
        candidate = os.fspath(source)
        if os.path.exists(candidate):
            base_dir = os.path.dirname(os.path.abspath(candidate)) or "."
            try:
                with open(candidate, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigSyntax(f"cannot read config file {candidate!r}: {exc}") from exc
        elif isinstance(source, str) and source.lstrip().startswith("{"):
            text = source
        else:
            raise ConfigSyntax(f"config file not found: {candidate!r}")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigSyntax(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigSyntax("config root must be a JSON object")

    col = _Collector()
    domain = col.need(doc, "domain", dict, "domain") or {}
    a = col.need(domain, "a", _NUM, "domain.a")
    b = col.need(domain, "b", _NUM, "domain.b")
    n_cells = col.need(doc, "N", int, "N")
    horizon = col.need(doc, "T", _NUM, "T")
    alpha = col.optional(doc, "alpha", (str, int, float), "alpha", "auto")
    cfl_safety = col.optional(doc, "cfl_safety", _NUM, "cfl_safety", 1.0)

    kspec = col.need(doc, "kernel", dict, "kernel") or {}
    k_name = col.need(kspec, "name", str, "kernel.name")
    k_h = col.need(kspec, "h", _NUM, "kernel.h")
    k_disc = col.optional(kspec, "discretization", str, "kernel.discretization", "midpoint")

    fspec = col.need(doc, "flux", dict, "flux") or {}
    f_name = col.need(fspec, "name", str, "flux.name")
    f_params = col.optional(fspec, "params", dict, "flux.params", {})
    box_rho = box_R = None
    if isinstance(fspec, dict) and fspec.get("box") is not None:
        fbox = col.need(fspec, "box", dict, "flux.box") or {}
        for label in ("rho", "R"):
            pair = col.need(fbox, label, list, f"flux.box.{label}")
            if pair is not None:
                if len(pair) != 2 or not all(isinstance(v, _NUM) for v in pair):
                    col.syntax.append(f"flux.box.{label}: expected [lo, hi]")
                elif pair[1] <= pair[0]:
                    col.semantic.append(f"flux.box.{label}: needs lo < hi, got {pair}")
                elif label == "rho":
                    box_rho = (float(pair[0]), float(pair[1]))
                else:
                    box_R = (float(pair[0]), float(pair[1]))
        if (box_rho is None) != (box_R is None):
            col.semantic.append("flux.box: provide both rho and R ranges")

    data = col.need(doc, "data", dict, "data") or {}
    initial = col.need(data, "initial", dict, "data.initial")
    left = col.need(data, "left", dict, "data.left")
    right = col.need(data, "right", dict, "data.right")
    for spec, path in ((initial, "data.initial"), (left, "data.left"), (right, "data.right")):
        if spec is not None:
            _validate_data_spec(spec, path, col)

    bound_mode = col.optional(doc, "bound_mode", str, "bound_mode", "monitor")
    output_stride = col.optional(doc, "output_stride", int, "output_stride", 1)
    k_grid_size = col.optional(doc, "k_grid_size", int, "k_grid_size", 32)
    out_dir = col.optional(doc, "out_dir", str, "out_dir", None)

    # Value checks that need nothing beyond the parsed fields.
    if a is not None and b is not None and not (np.isfinite(a) and np.isfinite(b) and a < b):
        col.semantic.append(f"domain: needs finite a < b, got [{a}, {b}]")
    if n_cells is not None and n_cells < 1:
        col.semantic.append(f"N: must be >= 1, got {n_cells}")
    if horizon is not None and not (np.isfinite(horizon) and horizon > 0):
        col.semantic.append(f"T: must be positive, got {horizon}")
    if isinstance(alpha, str):
        if alpha != "auto":
            col.semantic.append(f"alpha: must be 'auto' or a positive number, got {alpha!r}")
    elif alpha is not None and not (np.isfinite(alpha) and alpha > 0):
        col.semantic.append(f"alpha: must be positive, got {alpha}")
    if cfl_safety is not None and not (0 < cfl_safety <= 1):
        col.semantic.append(f"cfl_safety: must lie in (0, 1], got {cfl_safety}")
    if k_name is not None and k_name not in KERNEL_NAMES:
        col.semantic.append(f"kernel.name: unknown kernel {k_name!r} (choose from {KERNEL_NAMES})")
    if k_h is not None and not (np.isfinite(k_h) and k_h > 0):
        col.semantic.append(f"kernel.h: must be positive, got {k_h}")
    if k_disc is not None and k_disc not in DISCRETIZATIONS:
        col.semantic.append(f"kernel.discretization: choose from {DISCRETIZATIONS}, got {k_disc!r}")
    if f_name is not None and f_name not in BUILTIN_FLUXES:
        col.semantic.append(f"flux.name: unknown flux {f_name!r} (choose from {tuple(BUILTIN_FLUXES)})")
    if bound_mode is not None and bound_mode not in BOUND_MODES:
        col.semantic.append(f"bound_mode: choose from {BOUND_MODES}, got {bound_mode!r}")
    if output_stride is not None and output_stride < 1:
        col.semantic.append(f"output_stride: must be >= 1, got {output_stride}")
    if k_grid_size is not None and k_grid_size < 2:
        col.semantic.append(f"k_grid_size: must be >= 2, got {k_grid_size}")
    col.raise_if_failed()

    return RunConfig(
        a=float(a),
        b=float(b),
        n_cells=int(n_cells),
        horizon=float(horizon),
        alpha=alpha if alpha == "auto" else float(alpha),
        cfl_safety=float(cfl_safety),
        kernel=KernelConfig(name=k_name, h=float(k_h), discretization=k_disc),
        flux=FluxConfig(name=f_name, params=dict(f_params), box_rho=box_rho, box_R=box_R),
        initial=dict(initial),
        left=dict(left),
        right=dict(right),
        bound_mode=bound_mode,
        output_stride=int(output_stride),
        k_grid_size=int(k_grid_size),
        out_dir=out_dir,
        base_dir=base_dir,
    )


def _load_csv_columns(path: str):
    try:
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise ConfigSemantic(f"cannot read data file {path!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigSemantic(f"data file {path!r} is not two numeric CSV columns: {exc}") from exc
    if rows.shape[1] != 2:
        raise ConfigSemantic(f"data file {path!r} must have exactly two columns, found {rows.shape[1]}")
    return rows[:, 0], rows[:, 1]


def make_datafn(spec: dict, span: tuple[float, float], base_dir: str = ".") -> DataFn:
    """Realize a validated data spec as a DataFn on the given span."""
    kind = spec["kind"]
    if kind == "constant":
        return constant_data(spec["value"])
    if kind == "step":
        return step_data(spec["left"], spec["right"], spec["where"])
    if kind == "sine":
        return sine_data(spec["offset"], spec["amplitude"], spec["frequency"], span)
    if kind == "csv":
        path = spec["path"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        points, values = _load_csv_columns(path)
        return table_data(points, values)
    raise ConfigSemantic(f"unknown data kind {kind!r}")
