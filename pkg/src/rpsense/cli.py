"""Command-line front end.

    rpsense <subcommand> --config run.json --out result.csv [--workers N]

Subcommands: response-curve, response-pattern, sensitivity, peaks,
infer-field, validate.  Every data-producing run also writes
``<out>.manifest.json``.  Exit codes: 0 success, 1 failed validation or
inversion, 2 configuration error, 3 capacity error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CapacityError, InsufficientPeaksError, ValidationError
from .model import FieldParams, ModelSpec, NetworkTopology, PairParams, parse_topology
from .observables import (
    YieldParams, default_workers, response_curve, response_pattern, sensitivity,
)
from .peaks import DEFAULT_MIN_PROMINENCE, detect_peaks, estimate_field, predict_peaks_g4
from .states import InitialStateKind
from . import validation

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3
DATA_COLUMNS = ["theta", "g", "g_ab", "k", "observed_pair", "yield"]
DEFAULT_MAX_CELLS = 250_000
# cells x Hilbert-space dimension
DEFAULT_MAX_WORK = 8_000_000


class ConfigError(Exception):
    pass


def fmt(x) -> str:
    """Shortest round-trip decimal, capped at 15 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".15g")


def _grid(spec, name):
    if isinstance(spec, list):
        values = np.array(spec, dtype=float)
    elif isinstance(spec, dict):
        try:
            start, stop = float(spec["start"]), float(spec["stop"])
            if "num" in spec:
                num = int(spec["num"])
            else:
                num = int(round((stop - start) / float(spec["step"]))) + 1
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: grid needs start, stop and num or step ({exc})") from exc
        if num < 1:
            raise ConfigError(f"{name}: grid must have at least one point")
        values = np.linspace(start, stop, num)
    else:
        raise ConfigError(f"{name}: grid must be a list or a {{start, stop, num|step}} object")
    if values.size == 0:
        raise ConfigError(f"{name}: grid is empty")
    if np.any(np.diff(values) <= 0):
        raise ConfigError(f"{name}: grid must be strictly ascending")
    return values


def _topology(spec):
    if spec is None:
        return NetworkTopology(1)
    if isinstance(spec, str):
        return parse_topology(spec)
    if isinstance(spec, dict):
        return NetworkTopology(int(spec["n_pairs"]), tuple(tuple(e) for e in spec.get("edges", ())))
    raise ConfigError("topology must be a preset name or {n_pairs, edges}")


@dataclass
class RunConfig:
    model: ModelSpec
    initial_state: InitialStateKind
    yp: YieldParams
    observed_pair: int = 0
    sweep_axis: str = "theta"
    sweep: np.ndarray | None = None
    axis1_name: str = "theta"
    axis1: np.ndarray | None = None
    axis2_name: str = "g"
    axis2: np.ndarray | None = None
    min_prominence: float = DEFAULT_MIN_PROMINENCE
    strategy: str = "smallest"
    max_cells: int = DEFAULT_MAX_CELLS
    max_work: int = DEFAULT_MAX_WORK
    raw: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        """Every parameter that affects the output, JSON-serializable."""
        m = self.model
        out = {
            "a": m.pair.a, "g_ab": m.pair.g_ab, "theta": m.theta, "g": m.g, "k": self.yp.k,
            "topology": {"n_pairs": m.topology.n_pairs,
                         "edges": [[i, ri.value, j, rj.value] for i, ri, j, rj in m.topology.edges]},
            "initial_state": self.initial_state.value, "observed_pair": self.observed_pair,
            "min_prominence": self.min_prominence, "strategy": self.strategy,
            "max_cells": self.max_cells, "max_work": self.max_work,
        }
        if self.sweep is not None:
            out["sweep"] = {"axis": self.sweep_axis, "values": self.sweep.tolist()}
        if self.axis1 is not None:
            out["axis1"] = {"name": self.axis1_name, "values": self.axis1.tolist()}
            out["axis2"] = {"name": self.axis2_name, "values": self.axis2.tolist()}
        return out


def load_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        model = ModelSpec(
            pair=PairParams(float(raw.get("a", 1.0)), float(raw.get("g_ab", 0.0))),
            field=FieldParams(float(raw.get("theta", 0.0))),
            g=float(raw.get("g", 0.0)),
            topology=_topology(raw.get("topology")),
        )
    except ValidationError as exc:
        raise ConfigError(f"model: {exc}") from exc
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"model: malformed parameter ({exc})") from exc
    try:
        kind = InitialStateKind.parse(raw.get("initial_state", "Singlet"))
    except ValidationError as exc:
        raise ConfigError(f"initial_state: {exc}") from exc
    try:
        yp = YieldParams(float(raw.get("k", 0.1)))
    except ValidationError as exc:
        raise ConfigError(f"k: {exc}") from exc
    pair = raw.get("observed_pair", 0)
    if not isinstance(pair, int) or not 0 <= pair < model.topology.n_pairs:
        raise ConfigError(f"observed_pair: must be an integer in [0, {model.topology.n_pairs})")
    cfg = RunConfig(model, kind, yp, pair, raw=raw)
    if "sweep" in raw:
        sw = raw["sweep"]
        cfg.sweep_axis = sw.get("axis", "theta")
        cfg.sweep = _grid(sw.get("grid"), "sweep.grid")
    for key in ("axis1", "axis2"):
        if key in raw:
            ax = raw[key]
            setattr(cfg, f"{key}_name", ax.get("name", "theta" if key == "axis1" else "g"))
            setattr(cfg, key, _grid(ax.get("grid"), f"{key}.grid"))
    for name in ("sweep_axis", "axis1_name", "axis2_name"):
        if getattr(cfg, name) not in ("theta", "g", "g_ab"):
            raise ConfigError(f"{name}: must be theta, g or g_ab")
    cfg.min_prominence = float(raw.get("min_prominence", DEFAULT_MIN_PROMINENCE))
    if cfg.min_prominence < 0:
        raise ConfigError("min_prominence: must be non-negative")
    cfg.strategy = raw.get("strategy", "smallest")
    if cfg.strategy not in ("smallest", "consistent"):
        raise ConfigError("strategy: must be smallest or consistent")
    cfg.max_cells = int(raw.get("max_cells", DEFAULT_MAX_CELLS))
    cfg.max_work = int(raw.get("max_work", DEFAULT_MAX_WORK))
    return cfg


def _require(cfg, attr, command):
    if getattr(cfg, attr) is None:
        field_name = {"sweep": "sweep", "axis1": "axis1/axis2"}[attr]
        raise ConfigError(f"{field_name}: required by {command}")


def _check_budget(cfg, cells):
    if cells > cfg.max_cells:
        raise CapacityError(f"{cells} grid cells exceed max_cells={cfg.max_cells}")
    work = cells * cfg.model.topology.dim
    if work > cfg.max_work:
        raise CapacityError(
            f"{cells} cells x dimension {cfg.model.topology.dim} = {work} exceeds max_work={cfg.max_work}"
        )


def _data_row(params, observed_pair, y):
    return [fmt(params["theta"]), fmt(params["g"]), fmt(params["g_ab"]), fmt(params["k"]),
            fmt(observed_pair), fmt(y)]


def _curve_rows(curve):
    rows = []
    for v, y in zip(curve.sweep_values, curve.yields):
        params = dict(curve.fixed_params, **{curve.axis: v})
        rows.append(_data_row(params, curve.observed_pair, y))
    return rows


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


@dataclass
class RunManifest:
    tool: str
    version: str
    command: str
    parameters: dict
    duration_s: float
    warnings: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def cmd_response_curve(cfg, out, workers):
    _require(cfg, "sweep", "response-curve")
    _check_budget(cfg, cfg.sweep.size)
    curve = response_curve(cfg.model, cfg.initial_state, cfg.observed_pair, cfg.sweep, cfg.yp,
                           axis=cfg.sweep_axis, workers=workers)
    _write_csv(out, DATA_COLUMNS, _curve_rows(curve))
    return EXIT_OK, []


def cmd_response_pattern(cfg, out, workers):
    _require(cfg, "axis1", "response-pattern")
    _check_budget(cfg, cfg.axis1.size * cfg.axis2.size)
    pat = response_pattern(cfg.model, cfg.initial_state, cfg.observed_pair, cfg.axis1, cfg.axis2, cfg.yp,
                           axis2_name=cfg.axis2_name, axis1_name=cfg.axis1_name, workers=workers)
    rows = []
    for i in range(pat.axis2.size):
        rows.extend(_curve_rows(pat.row(i)))
    _write_csv(out, DATA_COLUMNS, rows)
    return EXIT_OK, []


def cmd_sensitivity(cfg, out, workers):
    _require(cfg, "sweep", "sensitivity")
    if cfg.sweep_axis != "theta":
        raise ConfigError("sweep.axis: sensitivity is taken with respect to theta")
    _check_budget(cfg, 3 * cfg.sweep.size)
    rows, notes = [], []
    for th in cfg.sweep:
        s = sensitivity(cfg.model, cfg.initial_state, cfg.observed_pair, float(th), cfg.yp)
        if s.insensitive:
            notes.append(f"insensitive at theta={fmt(th)}")
        params = {"theta": th, "g": cfg.model.g, "g_ab": cfg.model.pair.g_ab, "k": cfg.yp.k}
        rows.append(_data_row(params, cfg.observed_pair, s.yield_value)
                    + [fmt(s.derivative), fmt(s.value), fmt(s.insensitive)])
    _write_csv(out, DATA_COLUMNS + ["derivative", "sensitivity", "insensitive"], rows)
    return EXIT_OK, notes


def cmd_peaks(cfg, out, workers):
    _require(cfg, "sweep", "peaks")
    _check_budget(cfg, cfg.sweep.size)
    curve = response_curve(cfg.model, cfg.initial_state, cfg.observed_pair, cfg.sweep, cfg.yp,
                           axis=cfg.sweep_axis, workers=workers)
    peaks = detect_peaks(curve, cfg.min_prominence)
    _write_csv(out, ["axis", "location", "height", "prominence"],
               [[cfg.sweep_axis, fmt(p.location), fmt(p.height), fmt(p.prominence)] for p in peaks])
    print(f"{len(peaks)} peak(s) along {cfg.sweep_axis}")
    return EXIT_OK, []


def cmd_infer_field(cfg, out, workers):
    _require(cfg, "sweep", "infer-field")
    if cfg.sweep_axis != "g":
        raise ConfigError("sweep.axis: infer-field needs a g sweep")
    if cfg.model.topology.n_pairs != 2:
        raise ConfigError("topology: infer-field needs a two-pair model")
    _check_budget(cfg, cfg.sweep.size)
    curve = response_curve(cfg.model, cfg.initial_state, cfg.observed_pair, cfg.sweep, cfg.yp,
                           axis="g", workers=workers)
    peaks = detect_peaks(curve, cfg.min_prominence)
    rows = [[fmt(p.location), fmt(p.height), fmt(p.prominence)] for p in peaks]
    try:
        est, _ = estimate_field(curve, cfg.min_prominence, cfg.strategy)
    except InsufficientPeaksError as exc:
        _write_csv(out, ["location", "height", "prominence", "selected"], [r + ["false"] for r in rows])
        print(f"insufficient peaks: {exc}", file=sys.stderr)
        return EXIT_FAILED, [str(exc)]
    chosen = {est.g1, est.g2}
    _write_csv(out, ["location", "height", "prominence", "selected"],
               [r + [fmt(p.location in chosen)] for r, p in zip(rows, peaks)])
    pred = predict_peaks_g4(est.theta_hat)
    print(f"detected peaks (g): {', '.join(fmt(p.location) for p in peaks)}")
    print(f"selected g1={fmt(est.g1)} g2={fmt(est.g2)} ({cfg.strategy})")
    print(f"theta_hat = 2(g1+g2) = {fmt(est.theta_hat)}")
    print("perturbative peaks predicted for theta_hat: " + ", ".join(fmt(g) for g in pred.perturbative))
    return EXIT_OK, []


def cmd_validate(out=None, oracle_instances=6):
    results = validation.run_all(oracle_instances)
    for r in results:
        print(r.line())
    if out:
        _write_csv(out, ["check", "max_deviation", "tolerance", "passed", "detail"],
                   [[r.name, fmt(r.max_deviation), fmt(r.tolerance), fmt(r.passed), r.detail] for r in results])
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("validation failed: " + "; ".join(failed), file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


COMMANDS = {
    "response-curve": cmd_response_curve,
    "response-pattern": cmd_response_pattern,
    "sensitivity": cmd_sensitivity,
    "peaks": cmd_peaks,
    "infer-field": cmd_infer_field,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="rpsense", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rpsense {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: available CPUs)")
    p = sub.add_parser("validate")
    p.add_argument("--config", type=Path, help="ignored; accepted for uniformity")
    p.add_argument("--out", type=Path)
    p.add_argument("--workers", type=int)
    p.add_argument("--oracle-instances", type=int, default=6)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args.out, args.oracle_instances)
    t0 = time.perf_counter()
    try:
        raw = json.loads(args.config.read_text())
        cfg = load_config(raw)
        workers = args.workers if args.workers is not None else default_workers()
        if workers < 1:
            raise ConfigError("--workers: must be at least 1")
        code, notes = COMMANDS[args.command](cfg, args.out, workers)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    manifest = RunManifest("rpsense", __version__, args.command, cfg.resolved(),
                           round(time.perf_counter() - t0, 6), notes)
    Path(str(args.out) + ".manifest.json").write_text(manifest.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
