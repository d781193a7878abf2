"""Empirical answers from traces: center loci, ratio sequences, shape
trajectories and parameter sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .engine import (
    StopCriteria,
    TunnelTrace,
    detect_period,
    run,
    shape_distance,
    shape_of,
)
from .errors import InvalidGrid, InvalidSpec
from .geometry import Circle, Figure, Line, Point, Triangle, diameter
from .transforms import TransformSpec

FIT_TOL = 1e-7
POINT_TOL = 1e-9
EQUILATERAL = (math.pi / 3,) * 3


@dataclass(frozen=True)
class LocusReport:
    """Fitted locus: ``kind`` is single_point, line, circle or irregular."""

    kind: str
    residual: float
    point_count: int
    point: Optional[Point] = None
    line: Optional[Line] = None
    circle: Optional[Circle] = None


def _canonical_line(normal: np.ndarray, through: np.ndarray) -> Line:
    a, b = float(normal[0]), float(normal[1])
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    n = math.hypot(a, b)
    a, b = a / n, b / n
    return Line(a, b, -(a * float(through[0]) + b * float(through[1])))


def classify_locus(points: Sequence, reference_diameter: float) -> LocusReport:
    """Fit point, then line, then circle; the first with relative residual < 1e-7 wins."""
    pts = np.asarray([(float(p[0]), float(p[1])) for p in points], dtype=float)
    n = len(pts)
    if n == 0:
        raise ValueError("classify_locus needs at least one point")
    mean = pts.mean(axis=0)
    centered = pts - mean
    diffs = pts[:, None, :] - pts[None, :, :]
    cloud = float(np.sqrt((diffs ** 2).sum(axis=-1)).max())
    rms_point = float(np.sqrt((centered ** 2).sum(axis=1).mean()))
    if cloud < POINT_TOL * reference_diameter:
        res = rms_point / reference_diameter if reference_diameter > 0 else 0.0
        return LocusReport("single_point", res, n, point=Point(float(mean[0]), float(mean[1])))

    best = math.inf
    _, _, vt = np.linalg.svd(centered / cloud)
    normal = vt[1]
    line_res = float(np.sqrt(((centered @ normal) ** 2).mean())) / cloud
    best = min(best, line_res)
    if line_res < FIT_TOL:
        return LocusReport("line", line_res, n, line=_canonical_line(normal, mean))

    if n >= 3:
        x, y = centered[:, 0] / cloud, centered[:, 1] / cloud
        design = np.column_stack([2 * x, 2 * y, np.ones(n)])
        (cx, cy, c), *_ = np.linalg.lstsq(design, x * x + y * y, rcond=None)
        r2 = c + cx * cx + cy * cy
        if r2 > 0:
            r = math.sqrt(r2)
            circ_res = float(np.sqrt(((np.hypot(x - cx, y - cy) - r) ** 2).mean()))
            best = min(best, circ_res)
            if circ_res < FIT_TOL:
                center = Point(float(mean[0] + cx * cloud), float(mean[1] + cy * cloud))
                return LocusReport("circle", circ_res, n, circle=Circle(center, r * cloud))
    return LocusReport("irregular", best, n)


def locus_of(trace: TunnelTrace) -> Optional[LocusReport]:
    centers = trace.centers()
    if not centers:
        return None
    return classify_locus(centers, diameter(trace.initial))


@dataclass(frozen=True)
class RatioSummary:
    """Verdict on an alpha_n or beta_n sequence.

    ``verdict`` is constant, convergent, oscillating or irregular; ``value``
    holds the constant or the limit.
    """

    values: tuple[float, ...]
    verdict: str
    value: Optional[float] = None
    rate: Optional[float] = None
    residual: float = 0.0


def summarize_ratios(values: Sequence[float]) -> RatioSummary:
    vals = tuple(float(v) for v in values)
    if len(vals) < 2:
        raise ValueError("summarize_ratios needs at least two values")
    arr = np.asarray(vals)
    mean = float(arr.mean())
    spread = float(np.abs(arr - mean).max())
    if spread < 1e-10 * abs(mean):
        return RatioSummary(vals, "constant", value=mean, residual=spread / abs(mean))

    # geometric decay of the increments is the same statement as decay of the
    # deviations from the limit, without depending on an estimate of the limit
    inc = np.abs(np.diff(arr))
    floor = 1e-12 * abs(mean)
    idx = np.nonzero(inc > floor)[0]
    conv_res = math.inf
    if len(idx) >= 3:
        idx = idx[-8:]
        ys = np.log(inc[idx])
        slope, icpt = np.polyfit(idx.astype(float), ys, 1)
        conv_res = float(np.abs(ys - (slope * idx + icpt)).max())
        rate = math.exp(slope)
        if rate < 1.0 - 1e-6 and conv_res < 1e-3:
            last = vals[-1] - vals[-2]
            limit = vals[-1] + last * rate / (1.0 - rate) if idx[-1] == len(inc) - 1 else vals[-1]
            return RatioSummary(vals, "convergent", value=limit, rate=rate, residual=conv_res)

    tail = arr[-min(len(arr), 10):]
    centered = tail - tail.mean()
    signs = np.sign(centered)
    if len(tail) >= 6 and np.all(signs[1:] * signs[:-1] < 0):
        amp = np.abs(centered)
        if amp.min() >= 0.5 * amp.max():
            return RatioSummary(vals, "oscillating", value=float(tail.mean()),
                                residual=float(amp.min() / abs(tail.mean())))
    return RatioSummary(vals, "irregular", residual=conv_res)


@dataclass(frozen=True)
class ShapeTrajectory:
    shapes: list
    distances: list
    period: Optional[int]


def shape_trajectory(trace: TunnelTrace) -> ShapeTrajectory:
    """Shapes from the initial figure onward, successive distances, minimal period."""
    shapes = [shape_of(trace.initial)] + [s.shape for s in trace.steps]
    if len(shapes) < 2:
        raise ValueError("shape_trajectory needs a trace with at least one step")
    distances = [shape_distance(p, q) for p, q in zip(shapes, shapes[1:])]
    period = detect_period(shapes, trace.stop.cycle_window, trace.stop.cycle_tol)
    return ShapeTrajectory(shapes, distances, period)


def distance_to_equilateral(shape: Sequence[float]) -> float:
    return shape_distance(shape, EQUILATERAL)


# -- sweeps -----------------------------------------------------------------


def triangle_from_angles(a: float, b: float) -> Triangle:
    """Triangle with angles a at (0, 0) and b at (1, 0), in radians."""
    c = math.pi - a - b
    if min(a, b, c) <= 0:
        raise InvalidGrid(f"angles ({a}, {b}) do not form a triangle")
    side = math.sin(b) / math.sin(c)
    return Triangle((0.0, 0.0), (1.0, 0.0), (side * math.cos(a), side * math.sin(a)))


@dataclass(frozen=True)
class ShapeGrid:
    """Cell centers ((i + 1/2) step, (j + 1/2) step) in degrees with A < a_max, B < b_max.

    Cells whose third angle is below ``margin_deg`` (default half a step)
    are left out; ``canonical`` keeps only A <= B <= C.
    """

    step_deg: float = 1.0
    a_max_deg: float = 90.0
    b_max_deg: float = 90.0
    margin_deg: Optional[float] = None
    canonical: bool = False

    def cells(self) -> list[tuple[float, float]]:
        if not (self.step_deg > 0 and self.a_max_deg > 0 and self.b_max_deg > 0):
            raise InvalidGrid("grid step and extents must be positive")
        margin = self.step_deg / 2 if self.margin_deg is None else self.margin_deg
        na = int(round(self.a_max_deg / self.step_deg))
        nb = int(round(self.b_max_deg / self.step_deg))
        out = []
        for i, j in product(range(na), range(nb)):
            a = (i + 0.5) * self.step_deg
            b = (j + 0.5) * self.step_deg
            c = 180.0 - a - b
            if c < margin - 1e-12:
                continue
            if self.canonical and not (a <= b <= c):
                continue
            out.append((a, b))
        return out

    def to_dict(self) -> dict:
        return {"type": "shape", **self.__dict__}


@dataclass(frozen=True)
class ParamRange:
    """Values substituted into one TransformSpec field (``ratio``, ``angle`` or ``skip``)."""

    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in ("ratio", "angle", "skip"):
            raise InvalidGrid(f"cannot sweep parameter {self.name!r}")
        if not self.values:
            raise InvalidGrid("parameter range is empty")
        object.__setattr__(self, "values", tuple(self.values))

    def to_dict(self) -> dict:
        return {"type": "param", "name": self.name, "values": list(self.values)}


@dataclass(frozen=True)
class SweepCell:
    index: int
    a_deg: Optional[float]
    b_deg: Optional[float]
    param: Optional[float]
    classification: str
    termination: str
    error: Optional[str]
    steps: int
    final_area_ratio: Optional[float]
    final_perimeter_ratio: Optional[float]
    rate: Optional[float]
    final_shape_distance: Optional[float]


@dataclass(frozen=True)
class SweepReport:
    transform: TransformSpec
    grid: dict
    cells: list[SweepCell] = field(default_factory=list)


def _run_cell(job) -> SweepCell:
    index, spec, figure, a_deg, b_deg, param, stop = job
    if figure is None:
        figure = triangle_from_angles(math.radians(a_deg), math.radians(b_deg))
    trace = run(figure, spec, stop)
    cls = trace.classification
    last = trace.steps[-1] if trace.steps else None
    shape_dist = None
    if last is not None and len(last.shape) == 3:
        shape_dist = distance_to_equilateral(last.shape)
    return SweepCell(
        index=index,
        a_deg=a_deg,
        b_deg=b_deg,
        param=param,
        classification=cls.kind,
        termination=trace.termination.kind,
        error=trace.termination.error,
        steps=len(trace.steps),
        final_area_ratio=last.area_ratio if last else None,
        final_perimeter_ratio=last.perimeter_ratio if last else None,
        rate=cls.rate,
        final_shape_distance=shape_dist,
    )


def sweep(
    template: TransformSpec,
    shapes: Optional[ShapeGrid] = None,
    params: Optional[ParamRange] = None,
    stop: StopCriteria = StopCriteria(),
    *,
    figure: Optional[Figure] = None,
    n_jobs: int = 1,
) -> SweepReport:
    """One engine run per (shape cell, parameter value).

    With no shape grid, ``figure`` is the fixed initial figure for every
    parameter value. The report is ordered by cell index whatever ``n_jobs``.
    """
    if shapes is None and figure is None:
        raise InvalidGrid("sweep needs a shape grid or a fixed figure")
    if shapes is not None and figure is not None:
        raise InvalidGrid("give either a shape grid or a fixed figure, not both")
    shape_cells = shapes.cells() if shapes is not None else [(None, None)]
    values = params.values if params is not None else (None,)
    if not shape_cells:
        raise InvalidGrid("shape grid has no cells")

    jobs = []
    for index, ((a, b), v) in enumerate(product(shape_cells, values)):
        spec = template
        if params is not None:
            try:
                spec = replace(template, **{params.name: v})
            except InvalidSpec as exc:
                raise InvalidGrid(f"parameter value {v!r} is invalid: {exc}") from exc
        jobs.append((index, spec, figure, a, b, v, stop))

    if n_jobs == 1:
        cells = [_run_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            cells = list(pool.map(_run_cell, jobs, chunksize=max(1, len(jobs) // (8 * n_jobs))))
    cells.sort(key=lambda c: c.index)

    grid: dict = {}
    if shapes is not None:
        grid["shapes"] = shapes.to_dict()
    if params is not None:
        grid["params"] = params.to_dict()
    return SweepReport(template, grid, cells)
