"""Iterate a transform from an initial figure and record every level."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GeometryError, InvalidSpec
from .geometry import (
    Figure,
    Point,
    Tolerances,
    Triangle,
    angle_triple,
    check_polygon,
    check_triangle,
    diameter,
    interior_angles,
    translate,
    perimeter,
    signed_area,
    vertex_centroid,
)
from .transforms import CATALOG, Context, TransformSpec, apply_step, resolve_anchor

# an unfinished run counts as geometric decay/growth when the fitted log-diameter
# trend over the window exceeds the largest residual by this factor
TREND_FACTOR = 10.0
RATE_WINDOW = 20


@dataclass(frozen=True)
class StopCriteria:
    max_steps: int = 100
    collapse_tol: float = 1e-9
    blowup_factor: float = 1e9
    angle_tol: float = 1e-9
    degeneracy_tol: float = 1e-12
    cycle_window: int = 24
    cycle_tol: float = 1e-7

    def __post_init__(self):
        if not isinstance(self.max_steps, int) or self.max_steps < 1:
            raise InvalidSpec(f"max_steps must be an integer >= 1, got {self.max_steps!r}")
        if not isinstance(self.cycle_window, int) or self.cycle_window < 1:
            raise InvalidSpec(f"cycle_window must be an integer >= 1, got {self.cycle_window!r}")
        for name in ("collapse_tol", "blowup_factor", "angle_tol", "degeneracy_tol", "cycle_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise InvalidSpec(f"{name} must be positive and finite, got {v!r}")

    def tolerances(self) -> Tolerances:
        return Tolerances(degeneracy=self.degeneracy_tol, angle=self.angle_tol)

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "StopCriteria":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidSpec(f"unknown stop criteria {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class TunnelStep:
    """One level of a tunnel.

    ``figure`` is stored relative to ``origin`` (its vertex centroid in the
    plane), which keeps full relative precision for figures that are tiny
    compared with their distance from the plane origin. ``center`` is in
    plane coordinates.
    """

    n: int
    origin: Point
    figure: Figure
    area: float
    perimeter: float
    area_ratio: float
    perimeter_ratio: float
    center: Point
    shape: tuple[float, ...]
    min_angle: float
    diameter: float
    outside_flags: tuple[int, ...] = ()

    def world_figure(self) -> Figure:
        return translate(self.figure, self.origin)


@dataclass(frozen=True)
class Termination:
    """One of collapsed, blew_up, degenerate, budget_exhausted."""

    kind: str
    limit_point: Optional[Point] = None
    error: Optional[str] = None
    message: Optional[str] = None
    at_step: Optional[int] = None


@dataclass(frozen=True)
class Classification:
    """Verdict on a trace.

    ``kind`` is one of converges_to_point, diverges, fixed_shape,
    periodic_shape, irregular; only the fields relevant to it are set.
    """

    kind: str
    limit: Optional[Point] = None
    rate: Optional[float] = None
    shape: Optional[tuple[float, ...]] = None
    period: Optional[int] = None
    evidence: dict = field(default_factory=dict)


@dataclass
class TunnelTrace:
    initial: Figure
    spec: TransformSpec
    stop: StopCriteria
    steps: list[TunnelStep]
    termination: Termination
    classification: Optional[Classification] = None

    def figures(self) -> list[Figure]:
        """Initial figure and every level, in plane coordinates."""
        return [self.initial] + [s.world_figure() for s in self.steps]

    def centers(self) -> list[Point]:
        return [s.center for s in self.steps]


def shape_of(f: Figure) -> tuple[float, ...]:
    """Sorted angle triple for triangles, sorted side/perimeter list otherwise."""
    if isinstance(f, Triangle):
        return angle_triple(f)
    vs = f.vertices
    per = perimeter(f)
    return tuple(sorted(math.dist(vs[i], vs[(i + 1) % len(vs)]) / per for i in range(len(vs))))


def shape_distance(s1, s2) -> float:
    if len(s1) != len(s2):
        return math.inf
    return max(abs(a - b) for a, b in zip(s1, s2))


def _check_figure(f: Figure, tol: Tolerances) -> None:
    if isinstance(f, Triangle):
        check_triangle(f, tol)
    else:
        check_polygon(f, tol)


def _prepare(initial: Figure, spec: TransformSpec) -> Figure:
    if spec.kind not in CATALOG:
        raise InvalidSpec(f"unknown transform {spec.kind!r}")
    if CATALOG[spec.kind].triangle_only and not isinstance(initial, Triangle):
        if len(initial.vertices) != 3:
            raise InvalidSpec(f"{spec.kind} needs a triangle, got a {len(initial.vertices)}-gon")
        return Triangle(*initial.vertices)
    return initial


def measure(
    n: int, origin: Point, fig: Figure, center: Point, outside, prev_area: float, prev_perimeter: float
) -> TunnelStep:
    area = abs(signed_area(fig))
    per = perimeter(fig)
    return TunnelStep(
        n=n,
        origin=origin,
        figure=fig,
        area=area,
        perimeter=per,
        area_ratio=area / prev_area,
        perimeter_ratio=per / prev_perimeter,
        center=center,
        shape=shape_of(fig),
        min_angle=min(interior_angles(fig)),
        diameter=diameter(fig),
        outside_flags=tuple(outside),
    )


def run(initial: Figure, spec: TransformSpec, stop: StopCriteria = StopCriteria()) -> TunnelTrace:
    """Iterate ``spec`` from ``initial`` until a stop condition fires.

    Construction failures end the run with a ``degenerate`` termination;
    invalid inputs raise :class:`InvalidSpec`.
    """
    spec.validate()
    initial = _prepare(initial, spec)
    tol = stop.tolerances()
    try:
        _check_figure(initial, tol)
        anchor = resolve_anchor(spec, initial)
    except GeometryError as exc:
        raise InvalidSpec(f"invalid initial figure: {exc}") from exc

    d0 = diameter(initial)
    # each level is computed in the frame of its parent's vertex centroid
    origin = vertex_centroid(initial)
    prev = translate(initial, -origin)
    prev_area, prev_per = abs(signed_area(prev)), perimeter(prev)
    steps: list[TunnelStep] = []
    termination = Termination("budget_exhausted")
    for n in range(1, stop.max_steps + 1):
        if (spec.ratio_schedule is not None) and spec.ratio_at(n) is None:
            break
        local_anchor = anchor - origin if anchor is not None else None
        try:
            applied = apply_step(spec, prev, Context(n, local_anchor, tol))
            _check_figure(applied.figure, tol)
            shift = vertex_centroid(applied.figure)
            fig = translate(applied.figure, -shift)
        except GeometryError as exc:
            termination = Termination("degenerate", error=type(exc).__name__, message=str(exc), at_step=n)
            break
        step = measure(n, origin + shift, fig, origin + applied.center, applied.outside, prev_area, prev_per)
        steps.append(step)
        origin, prev, prev_area, prev_per = step.origin, step.figure, step.area, step.perimeter
        rel = step.diameter / d0
        if rel < stop.collapse_tol:
            termination = Termination("collapsed", limit_point=origin + vertex_centroid(fig))
            break
        if rel > stop.blowup_factor:
            termination = Termination("blew_up")
            break
    trace = TunnelTrace(initial, spec, stop, steps, termination)
    trace.classification = classify(trace, stop)
    return trace


def fit_log_rate(values, window: int = RATE_WINDOW) -> tuple[float, float]:
    """Geometric rate and max absolute log residual of an OLS fit on log(values[-window:])."""
    ys = np.log(np.asarray(values[-window:], dtype=float))
    xs = np.arange(len(ys), dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return float(math.exp(slope)), float(np.max(np.abs(resid)))


def detect_period(shapes, window: int, tol: float) -> Optional[int]:
    """Smallest p <= window with shapes[i] ~ shapes[i - p] over the recent tail.

    At least p comparisons (one full period) are required, using the last
    min(window, len - p) indices.
    """
    m = len(shapes)
    for p in range(1, window + 1):
        count = min(window, m - p)
        if count < max(p, 2):
            break
        if all(shape_distance(shapes[i], shapes[i - p]) < tol for i in range(m - count, m)):
            return p
    return None


def _final_centroid(step: TunnelStep) -> Point:
    return step.origin + vertex_centroid(step.figure)


def classify(trace: TunnelTrace, stop: Optional[StopCriteria] = None) -> Classification:
    stop = stop or trace.stop
    steps = trace.steps
    term = trace.termination
    if len(steps) < 3:
        return Classification("irregular", evidence={"note": f"only {len(steps)} steps recorded"})

    diams = [diameter(trace.initial)] + [s.diameter for s in steps]
    rate, resid = fit_log_rate(diams)
    evidence = {"rate_fit_residual": resid, "rate_window": min(RATE_WINDOW, len(diams))}
    if term.kind == "collapsed":
        return Classification("converges_to_point", limit=_final_centroid(steps[-1]), rate=rate,
                              evidence=evidence)
    if term.kind == "blew_up":
        return Classification("diverges", rate=rate, evidence=evidence)

    shapes = [shape_of(trace.initial)] + [s.shape for s in steps]
    evidence["last_shape_distance"] = shape_distance(shapes[-1], shapes[-2])
    period = detect_period(shapes, stop.cycle_window, stop.cycle_tol)
    trend = abs(math.log(rate)) * (min(RATE_WINDOW, len(diams)) - 1)
    evidence["trend"] = trend
    if term.kind == "budget_exhausted" and trend > TREND_FACTOR * resid and len(diams) >= 5:
        if rate < 1.0 - 1e-6:
            return Classification("converges_to_point", limit=_final_centroid(steps[-1]), rate=rate,
                                  evidence=evidence)
        if rate > 1.0 + 1e-6:
            return Classification("diverges", rate=rate, evidence=evidence)
    if period == 1:
        return Classification("fixed_shape", shape=shapes[-1], evidence=evidence)
    if period is not None:
        return Classification("periodic_shape", period=period, evidence=evidence)
    return Classification("irregular", evidence=evidence)
