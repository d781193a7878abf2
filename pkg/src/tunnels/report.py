"""Trace documents (JSON), CSV tables and SVG drawings.

All emitters are deterministic: identical inputs give identical bytes.
Floats are written with Python's shortest round-trip repr, so parsing a
document recovers every number bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Optional

from .analysis import LocusReport, SweepReport, locus_of
from .engine import Classification, StopCriteria, Termination, TunnelStep, TunnelTrace
from .errors import InvalidSpec
from .geometry import Circle, Figure, Line, Point, Polygon, Triangle
from .transforms import TransformSpec

SCHEMA_VERSION = 1

TRACE_COLUMNS = [
    "n", "area", "perimeter", "alpha_n", "beta_n", "center_x", "center_y",
    "angle1", "angle2", "angle3", "min_angle", "outside_flags",
]
SWEEP_COLUMNS = [
    "index", "a_deg", "b_deg", "param", "classification", "termination", "error", "steps",
    "final_alpha", "final_beta", "rate", "final_shape_distance",
]


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _pt(p: Optional[Point]):
    return None if p is None else [float(p[0]), float(p[1])]


def _clean(obj):
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _figure_type(f: Figure) -> str:
    return "triangle" if isinstance(f, Triangle) else "polygon"


def _build_figure(kind: str, verts) -> Figure:
    pts = [Point(float(x), float(y)) for x, y in verts]
    return Triangle(*pts) if kind == "triangle" else Polygon(tuple(pts))


def trace_to_dict(trace: TunnelTrace, locus: Optional[LocusReport] = None) -> dict:
    ftype = _figure_type(trace.initial)
    steps = []
    for s in trace.steps:
        steps.append({
            "n": s.n,
            "origin": _pt(s.origin),
            "vertices": [_pt(v) for v in s.figure.vertices],
            "area": s.area,
            "perimeter": s.perimeter,
            "alpha_n": s.area_ratio,
            "beta_n": s.perimeter_ratio,
            "center": _pt(s.center),
            "shape": list(s.shape),
            "min_angle": s.min_angle,
            "diameter": s.diameter,
            "outside_flags": list(s.outside_flags),
        })
    t = trace.termination
    c = trace.classification
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "transform": trace.spec.to_dict(),
            "figure": [_pt(v) for v in trace.initial.vertices],
            "stop": trace.stop.to_dict(),
        },
        "figure_type": ftype,
        "steps": steps,
        "termination": {
            "kind": t.kind,
            "limit_point": _pt(t.limit_point),
            "error": t.error,
            "message": t.message,
            "at_step": t.at_step,
        },
        "classification": None if c is None else {
            "kind": c.kind,
            "limit": _pt(c.limit),
            "rate": c.rate,
            "shape": None if c.shape is None else list(c.shape),
            "period": c.period,
            "evidence": dict(c.evidence),
        },
        "locus": None if locus is None else locus_to_dict(locus),
    }
    return _clean(doc)


def locus_to_dict(locus: LocusReport) -> dict:
    return {
        "kind": locus.kind,
        "residual": locus.residual,
        "point_count": locus.point_count,
        "point": _pt(locus.point),
        "line": None if locus.line is None else list(locus.line),
        "circle": None if locus.circle is None else {
            "center": _pt(locus.circle.center), "radius": locus.circle.radius,
        },
    }


def _opt_point(v) -> Optional[Point]:
    return None if v is None else Point(float(v[0]), float(v[1]))


def trace_from_dict(doc: dict) -> tuple[TunnelTrace, Optional[LocusReport]]:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InvalidSpec(f"unsupported schema_version {doc.get('schema_version')!r}")
    cfg = doc["config"]
    ftype = doc["figure_type"]
    spec = TransformSpec.from_dict(cfg["transform"])
    stop = StopCriteria.from_dict(cfg["stop"])
    initial = _build_figure(ftype, cfg["figure"])
    steps = [
        TunnelStep(
            n=s["n"],
            origin=_opt_point(s["origin"]),
            figure=_build_figure(ftype, s["vertices"]),
            area=s["area"],
            perimeter=s["perimeter"],
            area_ratio=s["alpha_n"],
            perimeter_ratio=s["beta_n"],
            center=_opt_point(s["center"]),
            shape=tuple(s["shape"]),
            min_angle=s["min_angle"],
            diameter=s["diameter"],
            outside_flags=tuple(s["outside_flags"]),
        )
        for s in doc["steps"]
    ]
    t = doc["termination"]
    termination = Termination(t["kind"], _opt_point(t["limit_point"]), t["error"], t["message"], t["at_step"])
    c = doc["classification"]
    classification = None
    if c is not None:
        classification = Classification(
            c["kind"], _opt_point(c["limit"]), c["rate"],
            None if c["shape"] is None else tuple(c["shape"]), c["period"], dict(c["evidence"]),
        )
    trace = TunnelTrace(initial, spec, stop, steps, termination, classification)
    lc = doc.get("locus")
    locus = None
    if lc is not None:
        circle = lc["circle"]
        locus = LocusReport(
            lc["kind"], lc["residual"], lc["point_count"], _opt_point(lc["point"]),
            None if lc["line"] is None else Line(*lc["line"]),
            None if circle is None else Circle(_opt_point(circle["center"]), circle["radius"]),
        )
    return trace, locus


def emit_trace(trace: TunnelTrace) -> bytes:
    """JSON trace document, including the locus fitted to the center sequence."""
    doc = trace_to_dict(trace, locus_of(trace))
    return (json.dumps(doc, indent=2, allow_nan=False) + "\n").encode("utf-8")


def parse_trace(data: bytes) -> tuple[TunnelTrace, Optional[LocusReport]]:
    return trace_from_dict(json.loads(data.decode("utf-8")))


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ""
    return str(x)


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue().encode("utf-8")


def emit_csv(trace: TunnelTrace) -> bytes:
    rows = []
    for s in trace.steps:
        angles = list(s.shape) if len(s.shape) == 3 and isinstance(s.figure, Triangle) else [None] * 3
        rows.append([
            s.n, s.area, s.perimeter, s.area_ratio, s.perimeter_ratio, s.center.x, s.center.y,
            *angles, s.min_angle, ";".join(str(i) for i in s.outside_flags),
        ])
    return _csv_bytes(TRACE_COLUMNS, rows)


def emit_sweep_csv(report: SweepReport) -> bytes:
    rows = [
        [c.index, c.a_deg, c.b_deg, c.param, c.classification, c.termination, c.error, c.steps,
         c.final_area_ratio, c.final_perimeter_ratio, c.rate, c.final_shape_distance]
        for c in report.cells
    ]
    return _csv_bytes(SWEEP_COLUMNS, rows)


# -- SVG --------------------------------------------------------------------

CANVAS = 800.0
LEGEND_HEIGHT = 40.0


def _f(x: float) -> str:
    return f"{x:.3f}"


def render_svg(trace: TunnelTrace) -> bytes:
    """Nested figures, fading with depth, plus the center locus and a legend.

    The view box covers every drawn figure with a 5% margin, so decreasing
    tunnels are framed by the initial figure and increasing ones by the
    last.
    """
    figures = trace.figures()
    centers = trace.centers()
    xs = [p.x for f in figures for p in f.vertices] + [c.x for c in centers]
    ys = [p.y for f in figures for p in f.vertices] + [c.y for c in centers]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    pad = 0.05 * span
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    scale = CANVAS / max(x1 - x0, y1 - y0)
    width = (x1 - x0) * scale
    height = (y1 - y0) * scale

    def sx(x):
        return (x - x0) * scale

    def sy(y):
        return (y1 - y) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" '
        f'height="{_f(height + LEGEND_HEIGHT)}" viewBox="0 0 {_f(width)} {_f(height + LEGEND_HEIGHT)}">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height + LEGEND_HEIGHT)}" fill="white"/>',
    ]
    n = len(figures)
    for depth, f in enumerate(figures):
        opacity = 1.0 - 0.85 * depth / max(1, n - 1)
        pts = " ".join(f"{_f(sx(p.x))},{_f(sy(p.y))}" for p in f.vertices)
        colour = "#000000" if depth == 0 else "#1f4e79"
        out.append(f'<polygon points="{pts}" fill="none" stroke="{colour}" '
                   f'stroke-opacity="{opacity:.3f}" stroke-width="1"/>')
    if centers:
        pts = " ".join(f"{_f(sx(c.x))},{_f(sy(c.y))}" for c in centers)
        out.append(f'<polyline points="{pts}" fill="none" stroke="#c0392b" stroke-width="0.75"/>')
        for c in centers:
            out.append(f'<circle cx="{_f(sx(c.x))}" cy="{_f(sy(c.y))}" r="2" fill="#c0392b"/>')
    term = trace.termination
    label = f"{trace.spec.kind}: {term.kind}"
    if term.error:
        label += f" ({term.error} at step {term.at_step})"
    label += f", {len(trace.steps)} steps"
    out.append(f'<text x="8" y="{_f(height + 26)}" font-family="monospace" font-size="14">'
               f'{_escape(label)}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
