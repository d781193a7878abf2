"""Command line interface: ``tunnels catalog | run | sweep``.

Exit codes: 0 success (a degenerate tunnel is a finding, not a failure),
2 invalid configuration, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .analysis import ParamRange, ShapeGrid, sweep
from .engine import StopCriteria, run
from .errors import GeometryError, InvalidGrid, InvalidSpec, IoFailure
from .geometry import Figure, make_figure
from .report import emit_csv, emit_sweep_csv, emit_trace, render_svg
from .transforms import CATALOG, CENTER_KINDS, PointSpec, TransformSpec

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3
OUTPUT_DIR_ENV = "TUNNELS_OUTPUT_DIR"

POINT_ALIASES = {"symmedian": "symmedian_point", "gergonne": "gergonne_point"}
MODE_ALIASES = {"fixed": "fixed_in_plane", "recomputed": "recomputed_each_step"}


class ConfigError(InvalidSpec):
    pass


def parse_figure(text) -> Figure:
    """``"x1,y1 x2,y2 ..."`` or a list of coordinate pairs."""
    try:
        if isinstance(text, str):
            pts = [tuple(float(c) for c in tok.split(",")) for tok in text.split()]
        else:
            pts = [tuple(float(c) for c in p) for p in text]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse figure {text!r}") from exc
    if any(len(p) != 2 for p in pts) or len(pts) < 3:
        raise ConfigError(f"figure needs at least three x,y vertices, got {text!r}")
    try:
        return make_figure(pts)
    except GeometryError as exc:
        raise ConfigError(str(exc)) from exc


def parse_point(value, mode: Optional[str]) -> PointSpec:
    mode = MODE_ALIASES.get(mode or "fixed", mode or "fixed")
    if isinstance(value, (list, tuple)):
        x, y = value
        return PointSpec("custom", float(x), float(y), mode)
    name = POINT_ALIASES.get(value, value)
    if name in CENTER_KINDS:
        return PointSpec(name, mode=mode)
    try:
        x, y = (float(c) for c in value.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse point {value!r}") from exc
    return PointSpec("custom", x, y, mode)


@dataclass
class RunConfig:
    """A run as written in a config file; CLI flags are converted to the same shape."""

    transform: dict
    figure: object
    stop: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(doc) - {"transform", "figure", "stop", "outputs"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "transform" not in doc or "figure" not in doc:
            raise ConfigError("config needs 'transform' and 'figure'")
        if not isinstance(doc["transform"], dict):
            raise ConfigError("'transform' must be an object")
        return cls(doc["transform"], doc["figure"], dict(doc.get("stop") or {}), dict(doc.get("outputs") or {}))

    def spec(self) -> TransformSpec:
        t = dict(self.transform)
        allowed = {"name", "ratio", "ratio_schedule", "angle_deg", "point", "point_mode", "skip", "allow_outside"}
        unknown = set(t) - allowed
        if unknown:
            raise ConfigError(f"unknown transform keys {sorted(unknown)}")
        if "name" not in t:
            raise ConfigError("transform needs a name")
        point = None
        if t.get("point") is not None:
            point = parse_point(t["point"], t.get("point_mode"))
        elif t.get("point_mode") is not None:
            raise ConfigError("point_mode given without point")
        angle = t.get("angle_deg")
        schedule = t.get("ratio_schedule")
        try:
            return TransformSpec(
                kind=t["name"],
                ratio=None if t.get("ratio") is None else float(t["ratio"]),
                angle=None if angle is None else math.radians(float(angle)),
                point=point,
                skip=t.get("skip"),
                allow_outside=t.get("allow_outside"),
                ratio_schedule=None if schedule is None else tuple(float(r) for r in schedule),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def stop_criteria(self) -> StopCriteria:
        try:
            return StopCriteria.from_dict(self.stop)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


INLINE_FLAGS = ("transform", "ratio", "angle", "point", "point_mode", "skip", "figure",
                "steps", "collapse_tol", "blowup", "allow_outside")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.config is not None:
        if any(getattr(ns, k) not in (None, False) for k in INLINE_FLAGS):
            raise ConfigError("--config cannot be combined with inline run flags")
        try:
            doc = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise IoFailure(f"cannot read config {ns.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {ns.config} is not valid JSON: {exc}") from exc
        cfg = RunConfig.from_json(doc)
        for key in ("trace", "csv", "svg"):
            flag = getattr(ns, "out" if key == "trace" else key)
            if flag is not None:
                cfg.outputs[key] = flag
        return cfg
    if ns.transform is None or ns.figure is None:
        raise ConfigError("run needs --transform and --figure (or --config)")
    transform: dict = {"name": ns.transform}
    if ns.ratio is not None:
        transform["ratio"] = ns.ratio
    if ns.angle is not None:
        transform["angle_deg"] = ns.angle
    if ns.point is not None:
        transform["point"] = ns.point
    if ns.point_mode is not None:
        transform["point_mode"] = ns.point_mode
    if ns.skip is not None:
        transform["skip"] = ns.skip
    if ns.allow_outside:
        transform["allow_outside"] = True
    stop: dict = {}
    if ns.steps is not None:
        stop["max_steps"] = ns.steps
    if ns.collapse_tol is not None:
        stop["collapse_tol"] = ns.collapse_tol
    if ns.blowup is not None:
        stop["blowup_factor"] = ns.blowup
    outputs = {k: v for k, v in (("trace", ns.out), ("csv", ns.csv), ("svg", ns.svg)) if v is not None}
    return RunConfig(transform, ns.figure, stop, outputs)


def _output_path(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _write(path: str, data: bytes) -> None:
    try:
        _output_path(path).write_bytes(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def cmd_catalog(ns) -> int:
    for name, info in CATALOG.items():
        params = ",".join(info.requires) or "-"
        optional = ",".join(info.accepts)
        if optional:
            params += f" [{optional}]"
        arity = "triangle" if info.triangle_only else "polygon"
        print(f"{name}\t{arity}\tparams={params}\tcenter={info.center_name}\t{info.direction}")
    return EXIT_OK


def cmd_run(ns) -> int:
    cfg = config_from_args(ns)
    spec = cfg.spec()
    figure = parse_figure(cfg.figure)
    stop = cfg.stop_criteria()
    trace = run(figure, spec, stop)
    outputs = cfg.outputs
    if "trace" in outputs:
        _write(outputs["trace"], emit_trace(trace))
    if "csv" in outputs:
        _write(outputs["csv"], emit_csv(trace))
    if "svg" in outputs:
        _write(outputs["svg"], render_svg(trace))
    term, cls = trace.termination, trace.classification
    summary = f"{spec.kind}: {len(trace.steps)} steps, termination={term.kind}"
    if term.error:
        summary += f" ({term.error} at step {term.at_step})"
    summary += f", classification={cls.kind}"
    if cls.limit is not None:
        summary += f" limit=({cls.limit.x!r}, {cls.limit.y!r})"
    if cls.rate is not None:
        summary += f" rate={cls.rate!r}"
    print(summary)
    return EXIT_OK


def cmd_sweep(ns) -> int:
    transform: dict = {"name": ns.transform}
    if ns.ratio is not None:
        transform["ratio"] = ns.ratio
    if ns.angle is not None:
        transform["angle_deg"] = ns.angle
    if ns.point is not None:
        transform["point"] = ns.point
    if ns.point_mode is not None:
        transform["point_mode"] = ns.point_mode
    if ns.skip is not None:
        transform["skip"] = ns.skip
    if ns.allow_outside:
        transform["allow_outside"] = True
    stop = {"max_steps": ns.steps} if ns.steps is not None else {}
    cfg = RunConfig(transform, ns.figure or "0,0 1,0 0,1", stop)
    params = None
    if ns.param is not None:
        if not ns.values:
            raise ConfigError("--param needs --values")
        try:
            vals = [float(v) for v in ns.values.split(",")]
        except ValueError as exc:
            raise ConfigError(f"cannot parse --values {ns.values!r}") from exc
        if ns.param == "angle":
            vals = [math.radians(v) for v in vals]
        elif ns.param == "skip":
            vals = [int(v) for v in vals]
        params = ParamRange(ns.param, tuple(vals))
        # a placeholder so the template validates; every cell overrides it
        if ns.param == "ratio" and "ratio" not in transform:
            cfg.transform["ratio"] = vals[0]
        if ns.param == "angle" and "angle_deg" not in transform:
            cfg.transform["angle_deg"] = math.degrees(vals[0])
    spec = cfg.spec()
    if ns.figure is not None:
        report = sweep(spec, None, params, cfg.stop_criteria(), figure=parse_figure(ns.figure), n_jobs=ns.jobs)
    else:
        grid = ShapeGrid(ns.grid_step, ns.a_max, ns.b_max, canonical=ns.canonical)
        report = sweep(spec, grid, params, cfg.stop_criteria(), n_jobs=ns.jobs)
    data = emit_sweep_csv(report)
    if ns.csv:
        _write(ns.csv, data)
    else:
        sys.stdout.write(data.decode("utf-8"))
    return EXIT_OK


def _transform_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--transform", help="transform name (see `tunnels catalog`)")
    p.add_argument("--ratio", type=float, help="nedian ratio r = BA'/A'C")
    p.add_argument("--angle", type=float, help="alpha/beta angle in degrees")
    p.add_argument("--point", help="centroid|incenter|circumcenter|orthocenter|symmedian|gergonne|x,y")
    p.add_argument("--point-mode", dest="point_mode", choices=sorted(MODE_ALIASES))
    p.add_argument("--skip", type=int, help="polygon side skip k >= 1")
    p.add_argument("--figure", help='vertices as "x1,y1 x2,y2 ..."')
    p.add_argument("--steps", type=int, help="maximum number of levels")
    p.add_argument("--allow-outside", dest="allow_outside", action="store_true",
                   help="accept feet on extended side lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tunnels", description="Recursive triangle and polygon tunnels.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list transforms, their parameters and centers")

    p_run = sub.add_parser("run", help="run one tunnel")
    _transform_flags(p_run)
    p_run.add_argument("--config", help="JSON run configuration (exclusive with inline flags)")
    p_run.add_argument("--collapse-tol", dest="collapse_tol", type=float)
    p_run.add_argument("--blowup", type=float, help="relative diameter treated as divergence")
    p_run.add_argument("--out", help="trace JSON path")
    p_run.add_argument("--csv", help="per-step CSV path")
    p_run.add_argument("--svg", help="SVG drawing path")

    p_sweep = sub.add_parser("sweep", help="run a grid of tunnels and write a CSV")
    _transform_flags(p_sweep)
    p_sweep.add_argument("--grid-step", dest="grid_step", type=float, default=1.0, help="degrees")
    p_sweep.add_argument("--a-max", dest="a_max", type=float, default=90.0)
    p_sweep.add_argument("--b-max", dest="b_max", type=float, default=90.0)
    p_sweep.add_argument("--canonical", action="store_true", help="only cells with A <= B <= C")
    p_sweep.add_argument("--param", choices=("ratio", "angle", "skip"))
    p_sweep.add_argument("--values", help="comma-separated parameter values (degrees for angle)")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--csv", help="output CSV path (default: stdout)")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    handler = {"catalog": cmd_catalog, "run": cmd_run, "sweep": cmd_sweep}[ns.command]
    try:
        return handler(ns)
    except IoFailure as exc:
        print(f"tunnels: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidSpec, InvalidGrid, GeometryError) as exc:
        print(f"tunnels: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
