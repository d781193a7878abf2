"""Triangle and polygon transforms, and the TransformSpec dispatcher.

Each named construction is a pure function of its inputs. Constructions
whose new vertices are feet on side lines also report which feet fell
outside their closed segment; the public functions raise
:class:`FootOutsideSide` for those unless ``allow_outside`` is true.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

from .errors import (
    ArityMismatch,
    CevianCircleMiss,
    CoincidentPoints,
    ConcurrentNedians,
    DegeneratePolygon,
    DegenerateTriangle,
    FootAtInfinity,
    FootOutsideSide,
    InvalidSpec,
    NotConcurrent,
    NotInterior,
    RayMissesSide,
    RightAngleDegenerate,
    SimsonDegenerate,
    VertexAtInfinity,
)
from .geometry import (
    DEFAULT_TOLERANCES,
    BaryCoords,
    Figure,
    Point,
    Polygon,
    Tolerances,
    Triangle,
    as_point,
    check_polygon,
    check_triangle,
    circle_through,
    circumcenter,
    diameter,
    excenters,
    from_barycentric,
    incircle,
    intersect,
    intersect_param,
    project,
    rotate,
    signed_area,
    to_barycentric,
    vertex_centroid,
)


class Built(NamedTuple):
    """A constructed figure plus the indices of feet outside their sides."""

    figure: Figure
    outside: tuple[int, ...] = ()


def _outside(params: Sequence[float], tol: Tolerances) -> tuple[int, ...]:
    eps = tol.segment
    return tuple(i for i, s in enumerate(params) if s < -eps or s > 1.0 + eps)


def _gate(built: Built, allow_outside: bool) -> Built:
    if built.outside and not allow_outside:
        raise FootOutsideSide(built.outside)
    return built


def _check_not_right(t: Triangle, tol: Tolerances) -> None:
    for name, ang in zip("ABC", t.angles()):
        if abs(ang - math.pi / 2) <= tol.angle:
            raise RightAngleDegenerate(f"angle at {name} is a right angle")


# -- named centers ----------------------------------------------------------

CENTER_KINDS = (
    "centroid",
    "incenter",
    "circumcenter",
    "orthocenter",
    "symmedian_point",
    "gergonne_point",
)


def centroid(t: Triangle) -> Point:
    return vertex_centroid(t)


def orthocenter(t: Triangle) -> Point:
    # H = A + B + C - 2 O, written relative to A
    o = circumcenter(t)
    a = t.a
    return a + (t.b - a) + (t.c - a) - (o - a) * 2.0


def center_barycentric(t: Triangle, kind: str) -> BaryCoords:
    check_triangle(t)
    a, b, c = t.sides()
    if kind == "centroid":
        return BaryCoords(1.0, 1.0, 1.0)
    if kind == "incenter":
        return BaryCoords(a, b, c)
    if kind == "symmedian_point":
        return BaryCoords(a * a, b * b, c * c)
    if kind == "gergonne_point":
        s = 0.5 * (a + b + c)
        return BaryCoords(1.0 / (s - a), 1.0 / (s - b), 1.0 / (s - c))
    if kind == "circumcenter":
        return to_barycentric(t, circumcenter(t))
    if kind == "orthocenter":
        return to_barycentric(t, orthocenter(t))
    raise InvalidSpec(f"unknown center kind {kind!r}")


def center_point(t: Triangle, kind: str) -> Point:
    if kind == "centroid":
        return centroid(t)
    if kind == "circumcenter":
        return circumcenter(t)
    if kind == "orthocenter":
        return orthocenter(t)
    return from_barycentric(t, center_barycentric(t, kind))


# -- orthic / medial family -------------------------------------------------


def _orthic(t: Triangle, tol: Tolerances) -> Built:
    check_triangle(t, tol)
    _check_not_right(t, tol)
    a, b, c = t.vertices
    fa, sa = project(a, b, c)
    fb, sb = project(b, c, a)
    fc, sc = project(c, a, b)
    return Built(Triangle(fa, fb, fc), _outside((sa, sb, sc), tol))


def orthic(t: Triangle, *, allow_outside: bool = True, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Triangle of the altitude feet on BC, CA, AB."""
    return _gate(_orthic(t, tol), allow_outside).figure


def medial(t: Triangle, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    check_triangle(t, tol)
    a, b, c = t.vertices
    return Triangle((b + c) * 0.5, (c + a) * 0.5, (a + b) * 0.5)


def anticomplementary(t: Triangle, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    check_triangle(t, tol)
    a, b, c = t.vertices
    return Triangle(b + c - a, c + a - b, a + b - c)


# -- cevian family ----------------------------------------------------------


def _cevian(t: Triangle, p: Sequence[float], tol: Tolerances) -> Built:
    check_triangle(t, tol)
    u, v, w = p
    scale = abs(u) + abs(v) + abs(w)
    if scale == 0.0:
        raise FootAtInfinity("zero barycentric weights")
    for s in (v + w, w + u, u + v):
        if abs(s) <= 1e-12 * scale:
            raise FootAtInfinity(f"cevian foot of {tuple(p)} escapes to infinity")
    # parameters along B->C, C->A, A->B
    params = (w / (v + w), u / (w + u), v / (u + v))
    a, b, c = t.vertices
    feet = (b + (c - b) * params[0], c + (a - c) * params[1], a + (b - a) * params[2])
    return Built(Triangle(*feet), _outside(params, tol))


def cevian_triangle(t: Triangle, p: Sequence[float], *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Feet (0:v:w), (u:0:w), (u:v:0) of the cevians through ``p``."""
    return _cevian(t, p, tol).figure


def anticevian_triangle(t: Triangle, p: Sequence[float], *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Triangle (-u:v:w), (u:-v:w), (u:v:-w); ``t`` is its cevian triangle of ``p``."""
    check_triangle(t, tol)
    u, v, w = p
    scale = abs(u) + abs(v) + abs(w)
    if scale == 0.0 or min(abs(u), abs(v), abs(w)) <= 1e-12 * scale:
        raise VertexAtInfinity(f"{tuple(p)} has a zero coordinate")
    for s in (-u + v + w, u - v + w, u + v - w):
        if abs(s) <= 1e-12 * scale:
            raise VertexAtInfinity(f"anticevian vertex of {tuple(p)} escapes to infinity")
    return Triangle(
        from_barycentric(t, (-u, v, w)),
        from_barycentric(t, (u, -v, w)),
        from_barycentric(t, (u, v, -w)),
    )


def incentral(t: Triangle, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    return cevian_triangle(t, center_barycentric(t, "incenter"), tol=tol)


def symmedial(t: Triangle, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    return cevian_triangle(t, center_barycentric(t, "symmedian_point"), tol=tol)


# -- incircle / excircle family ---------------------------------------------


def contact(t: Triangle, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Touch points of the incircle on BC, CA, AB."""
    check_triangle(t, tol)
    i = incircle(t).center
    a, b, c = t.vertices
    return Triangle(project(i, b, c)[0], project(i, c, a)[0], project(i, a, b)[0])


def excentral(t: Triangle, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    check_triangle(t, tol)
    return Triangle(*excenters(t))


def tangential(t: Triangle, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Triangle bounded by the circumcircle tangents at A, B, C."""
    check_triangle(t, tol)
    _check_not_right(t, tol)
    a, b, c = t.sides()
    a2, b2, c2 = a * a, b * b, c * c
    return Triangle(
        from_barycentric(t, (-a2, b2, c2)),
        from_barycentric(t, (a2, -b2, c2)),
        from_barycentric(t, (a2, b2, -c2)),
    )


# -- pedal family -----------------------------------------------------------


def _pedal(t: Triangle, p, tol: Tolerances) -> Built:
    check_triangle(t, tol)
    p = as_point(p)
    a, b, c = t.vertices
    fa, sa = project(p, b, c)
    fb, sb = project(p, c, a)
    fc, sc = project(p, a, b)
    d = diameter(t)
    feet = Triangle(fa, fb, fc)
    if abs(signed_area(feet)) <= tol.collinearity * d * d:
        raise SimsonDegenerate(f"pedal feet of {tuple(p)} are collinear")
    return Built(feet, _outside((sa, sb, sc), tol))


def pedal(t: Triangle, p, *, allow_outside: bool = True, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Feet of the perpendiculars from ``p`` to BC, CA, AB."""
    return _gate(_pedal(t, p, tol), allow_outside).figure


def antipedal(t: Triangle, p, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Triangle whose pedal triangle with respect to ``p`` is ``t``."""
    check_triangle(t, tol)
    p = as_point(p)
    d = diameter(t)
    dirs = []
    for name, v in zip("ABC", t.vertices):
        r = v - p
        if r.norm() <= tol.degeneracy * d:
            raise CoincidentPoints(f"point coincides with vertex {name}")
        dirs.append(Point(-r.y, r.x))
    a, b, c = t.vertices
    return Triangle(
        intersect(b, dirs[1], c, dirs[2]),
        intersect(c, dirs[2], a, dirs[0]),
        intersect(a, dirs[0], b, dirs[1]),
    )


# -- cyclocevian ------------------------------------------------------------


def _second_intersection(start: Point, end: Point, center: Point, s_known: float) -> float:
    # roots of |start + s*(end-start) - center|^2 = rho^2 sum to -2 d.(start-center)/|d|^2;
    # a tangent line gives the double root automatically
    d = end - start
    return -2.0 * d.dot(start - center) / d.dot(d) - s_known


def _cyclocevian(t: Triangle, p: Sequence[float], tol: Tolerances) -> tuple[BaryCoords, Built]:
    check_triangle(t, tol)
    u, v, w = BaryCoords(*p).normalized()
    if min(u, v, w) <= 0.0:
        raise NotInterior(f"{tuple(p)} is not interior")
    a, b, c = t.vertices
    sd, se, sf = w / (v + w), u / (w + u), v / (u + v)
    feet = (b + (c - b) * sd, c + (a - c) * se, a + (b - a) * sf)
    try:
        circ = circle_through(*feet)
        check_triangle(Triangle(*feet), tol)
    except DegenerateTriangle as exc:
        raise CevianCircleMiss("cevian feet are collinear") from exc
    o = circ.center
    sd2 = _second_intersection(b, c, o, sd)
    se2 = _second_intersection(c, a, o, se)
    sf2 = _second_intersection(a, b, o, sf)
    db, dc = 1.0 - sd2, sd2
    ea, ec = se2, 1.0 - se2
    fa, fb = 1.0 - sf2, sf2
    ceva = db * ec * fa - dc * ea * fb
    mag = abs(db * ec * fa) + abs(dc * ea * fb)
    if mag == 0.0 or abs(ceva) > 1e-8 * mag:
        raise NotConcurrent(f"second-intersection cevians do not concur (residual {ceva:.3g})")
    candidates = (
        (ea * dc, db * ec, dc * ec),
        (fa * ea, fb * ea, fa * ec),
        (fa * db, fb * db, fb * dc),
    )
    q = max(candidates, key=lambda k: abs(k[0]) + abs(k[1]) + abs(k[2]))
    s = q[0] + q[1] + q[2]
    conj = BaryCoords(q[0] / s, q[1] / s, q[2] / s) if abs(s) > 1e-12 * sum(map(abs, q)) else BaryCoords(*q)
    new_feet = (b + (c - b) * sd2, c + (a - c) * se2, a + (b - a) * sf2)
    return conj, Built(Triangle(*new_feet), _outside((sd2, se2, sf2), tol))


def cyclocevian_conjugate(t: Triangle, p: Sequence[float], *, tol: Tolerances = DEFAULT_TOLERANCES) -> BaryCoords:
    return _cyclocevian(t, p, tol)[0]


def cyclocevian(t: Triangle, p: Sequence[float], *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Cevian triangle of the cyclocevian conjugate of ``p``.

    The circle through the cevian feet of ``p`` meets each side line a
    second time; those second points are the returned vertices.
    """
    return _cyclocevian(t, p, tol)[1].figure


# -- nedians ----------------------------------------------------------------


def ratio_from_order(i: int, n: int) -> float:
    """Ratio r with BA'/BC = i/n, i.e. r = i / (n - i)."""
    if not 0 < i < n:
        raise InvalidSpec(f"order {i}/{n} needs 0 < i < n")
    return i / (n - i)


def nedian_feet(t: Triangle, r: float) -> tuple[Point, Point, Point]:
    """A' on BC, B' on CA, C' on AB with BA'/A'C = CB'/B'A = AC'/C'B = r."""
    if not (r > 0.0 and math.isfinite(r)):
        raise InvalidSpec(f"nedian ratio must be positive, got {r}")
    q = r / (1.0 + r)
    a, b, c = t.vertices
    return (b + (c - b) * q, c + (a - c) * q, a + (b - a) * q)


def _interior(t: Triangle, feet: Sequence[Point], tol: Tolerances) -> Triangle:
    a, b, c = t.vertices
    da, db, dc = feet[0] - a, feet[1] - b, feet[2] - c
    x_a = intersect(b, db, c, dc)
    x_b = intersect(c, dc, a, da)
    x_c = intersect(a, da, b, db)
    inner = Triangle(x_a, x_b, x_c)
    d = diameter(t)
    if abs(signed_area(inner)) <= tol.degeneracy * d * d:
        raise ConcurrentNedians("the three nedians concur")
    return inner


def nedian_exterior(t: Triangle, r: float, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    check_triangle(t, tol)
    return Triangle(*nedian_feet(t, r))


def nedian_interior(t: Triangle, r: float, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Triangle:
    """Triangle cut out by the three nedians of ratio ``r``."""
    check_triangle(t, tol)
    if abs(r - 1.0) <= 1e-9:
        raise ConcurrentNedians("nedians of ratio 1 are the medians")
    return _interior(t, nedian_feet(t, r), tol)


def _check_variant(variant: str) -> None:
    if variant not in ("interior", "exterior"):
        raise InvalidSpec(f"variant must be 'interior' or 'exterior', got {variant!r}")


def alpha_nedian(
    t: Triangle, alpha: float, variant: str = "exterior", *, tol: Tolerances = DEFAULT_TOLERANCES
) -> Triangle:
    """Nedians making angle ``alpha`` with AB, BC, CA, rotated toward the interior."""
    _check_variant(variant)
    check_triangle(t, tol)
    a, b, c = t.vertices
    feet = []
    for name, ang, (p, q, r) in zip("ABC", t.angles(), ((a, b, c), (b, c, a), (c, a, b))):
        if not 0.0 < alpha < ang:
            raise RayMissesSide(name, f"ray from {name} at {alpha:.6g} rad misses the opposite side "
                                      f"(vertex angle {ang:.6g})")
        feet.append(intersect(p, rotate(q - p, alpha), q, r - q))
    if variant == "exterior":
        return Triangle(*feet)
    return _interior(t, feet, tol)


def _beta(t: Triangle, beta: float, variant: str, tol: Tolerances) -> Built:
    _check_variant(variant)
    if not 0.0 < beta < math.pi:
        raise InvalidSpec(f"beta must lie in (0, pi), got {beta}")
    check_triangle(t, tol)
    a, b, c = t.vertices
    feet, params = [], []
    for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
        side = r - q
        direction = rotate(side / side.norm(), beta)
        _, s = intersect_param(p, direction, q, side)
        feet.append(q + side * s)
        params.append(s)
    if variant == "exterior":
        return Built(Triangle(*feet), _outside(params, tol))
    return Built(_interior(t, feet, tol), _outside(params, tol))


def beta_nedian(
    t: Triangle,
    beta: float,
    variant: str = "exterior",
    *,
    allow_outside: bool = False,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Triangle:
    """Nedians meeting the opposite side at angle ``beta``.

    The nedian from A has direction unit(C - B) rotated by ``beta``, so
    ``beta = pi/2`` gives the altitudes.
    """
    return _gate(_beta(t, beta, variant, tol), allow_outside).figure


# -- polygons ---------------------------------------------------------------


def _same_kind(source: Figure, vertices: Sequence[Point]) -> Figure:
    if isinstance(source, Triangle):
        return Triangle(*vertices)
    return Polygon(tuple(vertices))


def _check_skip(k: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise InvalidSpec(f"skip must be an integer >= 1, got {k!r}")


def _perp_foot(p: Figure, k: int, tol: Tolerances) -> Built:
    _check_skip(k)
    check_polygon(p, tol)
    vs = p.vertices
    m = len(vs)
    feet, params = [], []
    for j in range(m):
        s0, s1 = vs[(j + k) % m], vs[(j + k + 1) % m]
        try:
            f, s = project(vs[j], s0, s1)
        except CoincidentPoints as exc:
            raise DegeneratePolygon(f"side {(j + k) % m} has zero length") from exc
        feet.append(f)
        params.append(s)
    return Built(_same_kind(p, feet), _outside(params, tol))


def polygon_perp_foot(
    p: Figure, k: int = 1, *, allow_outside: bool = False, tol: Tolerances = DEFAULT_TOLERANCES
) -> Figure:
    """Vertex j becomes the foot of the perpendicular from V_j to side j+k."""
    return _gate(_perp_foot(p, k, tol), allow_outside).figure


def polygon_midpoint_cevian(
    p: Figure, k: int = 1, ratio: float = 1.0, *, tol: Tolerances = DEFAULT_TOLERANCES
) -> Figure:
    """Vertex j becomes the point of side j+k dividing it in ``ratio`` (midpoint by default)."""
    _check_skip(k)
    if not (ratio > 0.0 and math.isfinite(ratio)):
        raise InvalidSpec(f"ratio must be positive, got {ratio}")
    check_polygon(p, tol)
    vs = p.vertices
    m = len(vs)
    q = ratio / (1.0 + ratio)
    new = []
    for j in range(m):
        s0, s1 = vs[(j + k) % m], vs[(j + k + 1) % m]
        new.append((s0 + s1) * 0.5 if ratio == 1.0 else s0 + (s1 - s0) * q)
    return _same_kind(p, new)


# -- specs and dispatch -----------------------------------------------------

POINT_MODES = ("fixed_in_plane", "recomputed_each_step")


@dataclass(frozen=True)
class PointSpec:
    kind: str
    x: Optional[float] = None
    y: Optional[float] = None
    mode: str = "fixed_in_plane"

    def __post_init__(self):
        if self.kind == "custom":
            if self.x is None or self.y is None or not (math.isfinite(self.x) and math.isfinite(self.y)):
                raise InvalidSpec("custom point needs finite x and y")
        elif self.kind in CENTER_KINDS:
            if self.x is not None or self.y is not None:
                raise InvalidSpec(f"named point {self.kind!r} takes no coordinates")
        else:
            raise InvalidSpec(f"unknown point kind {self.kind!r}")
        if self.mode not in POINT_MODES:
            raise InvalidSpec(f"unknown point mode {self.mode!r}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "mode": self.mode}
        if self.kind == "custom":
            d["x"], d["y"] = self.x, self.y
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PointSpec":
        return cls(d["kind"], d.get("x"), d.get("y"), d.get("mode", "fixed_in_plane"))


@dataclass(frozen=True)
class TransformSpec:
    kind: str
    ratio: Optional[float] = None
    angle: Optional[float] = None
    point: Optional[PointSpec] = None
    skip: Optional[int] = None
    allow_outside: Optional[bool] = None
    ratio_schedule: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.ratio_schedule is not None:
            object.__setattr__(self, "ratio_schedule", tuple(float(r) for r in self.ratio_schedule))
        self.validate()

    @property
    def info(self) -> "TransformInfo":
        return CATALOG[self.kind]

    def validate(self) -> None:
        if self.kind not in CATALOG:
            raise InvalidSpec(f"unknown transform {self.kind!r}")
        info = CATALOG[self.kind]
        given = {
            "ratio": self.ratio is not None or self.ratio_schedule is not None,
            "angle": self.angle is not None,
            "point": self.point is not None,
            "skip": self.skip is not None,
        }
        for name in info.requires:
            if not given[name]:
                raise InvalidSpec(f"{self.kind} requires {name}")
        for name, present in given.items():
            if present and name not in info.requires and name not in info.accepts:
                raise InvalidSpec(f"{self.kind} does not take {name}")
        rs = [self.ratio] if self.ratio is not None else []
        rs += list(self.ratio_schedule or ())
        if any(not (r > 0.0 and math.isfinite(r)) for r in rs):
            raise InvalidSpec("ratios must be positive and finite")
        if self.ratio_schedule is not None and not self.ratio_schedule:
            raise InvalidSpec("ratio schedule is empty")
        if self.angle is not None and not math.isfinite(self.angle):
            raise InvalidSpec("angle must be finite")
        if self.skip is not None:
            _check_skip(self.skip)

    def ratio_at(self, level: int) -> Optional[float]:
        """Ratio used to build level ``level`` (1-based)."""
        if self.ratio_schedule is not None:
            if level > len(self.ratio_schedule):
                return None
            return self.ratio_schedule[level - 1]
        return self.ratio

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.ratio is not None:
            d["ratio"] = self.ratio
        if self.ratio_schedule is not None:
            d["ratio_schedule"] = list(self.ratio_schedule)
        if self.angle is not None:
            d["angle"] = self.angle
        if self.point is not None:
            d["point"] = self.point.to_dict()
        if self.skip is not None:
            d["skip"] = self.skip
        if self.allow_outside is not None:
            d["allow_outside"] = self.allow_outside
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TransformSpec":
        point = d.get("point")
        schedule = d.get("ratio_schedule")
        return cls(
            kind=d["kind"],
            ratio=d.get("ratio"),
            angle=d.get("angle"),
            point=PointSpec.from_dict(point) if point is not None else None,
            skip=d.get("skip"),
            allow_outside=d.get("allow_outside"),
            ratio_schedule=tuple(schedule) if schedule is not None else None,
        )


class Context(NamedTuple):
    """Per-step inputs the dispatcher needs beyond the figure."""

    level: int = 1
    anchor: Optional[Point] = None
    tol: Tolerances = DEFAULT_TOLERANCES


BuildFn = Callable[[Figure, TransformSpec, Context], Built]
CenterFn = Callable[[Figure, TransformSpec, Context], Point]


@dataclass(frozen=True)
class TransformInfo:
    name: str
    build: BuildFn
    center: CenterFn
    center_name: str
    triangle_only: bool = True
    requires: tuple[str, ...] = ()
    accepts: tuple[str, ...] = ()
    default_allow_outside: bool = True
    direction: str = "decreasing"


CATALOG: dict[str, TransformInfo] = {}


def register(info: TransformInfo) -> TransformInfo:
    """Add a transform to the catalog; the name must be new."""
    if info.name in CATALOG:
        raise InvalidSpec(f"transform {info.name!r} already registered")
    CATALOG[info.name] = info
    return info


def resolve_anchor(spec: TransformSpec, initial: Figure) -> Optional[Point]:
    """Point resolved once from the initial figure, for fixed-in-plane specs."""
    ps = spec.point
    if ps is None:
        return None
    if ps.kind == "custom":
        return Point(float(ps.x), float(ps.y))  # type: ignore[arg-type]
    if ps.mode == "fixed_in_plane":
        return center_point(_as_triangle(initial), ps.kind)
    return None


def _as_triangle(f: Figure) -> Triangle:
    if isinstance(f, Triangle):
        return f
    if len(f.vertices) == 3:
        return Triangle(*f.vertices)
    raise ArityMismatch(f"triangle transform applied to a {len(f.vertices)}-gon")


def _point_of(t: Triangle, spec: TransformSpec, ctx: Context) -> Point:
    if ctx.anchor is not None:
        return ctx.anchor
    ps = spec.point
    if ps.kind == "custom":  # type: ignore[union-attr]
        return Point(float(ps.x), float(ps.y))  # type: ignore[union-attr,arg-type]
    return center_point(t, ps.kind)  # type: ignore[union-attr]


def _bary_of(t: Triangle, spec: TransformSpec, ctx: Context) -> BaryCoords:
    ps = spec.point
    if ctx.anchor is None and ps is not None and ps.kind != "custom":
        return center_barycentric(t, ps.kind)
    return to_barycentric(t, _point_of(t, spec, ctx))


def _allow(spec: TransformSpec) -> bool:
    if spec.allow_outside is not None:
        return spec.allow_outside
    return CATALOG[spec.kind].default_allow_outside


def _ratio(spec: TransformSpec, ctx: Context) -> float:
    r = spec.ratio_at(ctx.level)
    if r is None:
        raise InvalidSpec(f"ratio schedule has no entry for level {ctx.level}")
    return r


def _simple(fn: Callable[..., Triangle]) -> BuildFn:
    return lambda f, spec, ctx: Built(fn(f, tol=ctx.tol))


def _named_center(kind: str) -> CenterFn:
    return lambda f, spec, ctx: center_point(f, kind)  # type: ignore[arg-type]


def _centroid_center(f, spec, ctx) -> Point:
    return vertex_centroid(f)


def _spec_point_center(f, spec, ctx) -> Point:
    return _point_of(f, spec, ctx)


def _cevian_build(f, spec, ctx) -> Built:
    return _cevian(f, _bary_of(f, spec, ctx), ctx.tol)


def _anticevian_build(f, spec, ctx) -> Built:
    return Built(anticevian_triangle(f, _bary_of(f, spec, ctx), tol=ctx.tol))


def _cyclocevian_build(f, spec, ctx) -> Built:
    return _cyclocevian(f, _bary_of(f, spec, ctx), ctx.tol)[1]


def _pedal_build(f, spec, ctx) -> Built:
    return _gate(_pedal(f, _point_of(f, spec, ctx), ctx.tol), _allow(spec))


def _antipedal_build(f, spec, ctx) -> Built:
    return Built(antipedal(f, _point_of(f, spec, ctx), tol=ctx.tol))


def _orthic_build(f, spec, ctx) -> Built:
    return _gate(_orthic(f, ctx.tol), _allow(spec))


def _alpha_build(variant: str) -> BuildFn:
    return lambda f, spec, ctx: Built(alpha_nedian(f, spec.angle, variant, tol=ctx.tol))


def _beta_build(variant: str) -> BuildFn:
    return lambda f, spec, ctx: _gate(_beta(f, spec.angle, variant, ctx.tol), _allow(spec))


def _perp_build(f, spec, ctx) -> Built:
    return _gate(_perp_foot(f, spec.skip or 1, ctx.tol), _allow(spec))


def _midpoint_build(f, spec, ctx) -> Built:
    r = spec.ratio_at(ctx.level) if (spec.ratio is not None or spec.ratio_schedule) else 1.0
    if r is None:
        raise InvalidSpec(f"ratio schedule has no entry for level {ctx.level}")
    return Built(polygon_midpoint_cevian(f, spec.skip or 1, r, tol=ctx.tol))


for _info in (
    TransformInfo("orthic", _orthic_build, _named_center("orthocenter"), "orthocenter"),
    TransformInfo("medial", _simple(medial), _named_center("centroid"), "centroid"),
    TransformInfo("anticomplementary", _simple(anticomplementary), _named_center("centroid"), "centroid",
                  direction="increasing"),
    TransformInfo("incentral", _simple(incentral), _named_center("incenter"), "incenter"),
    TransformInfo("contact", _simple(contact), _named_center("incenter"), "incenter"),
    TransformInfo("excentral", _simple(excentral), _named_center("incenter"), "incenter",
                  direction="increasing"),
    TransformInfo("tangential", _simple(tangential), _named_center("circumcenter"), "circumcenter",
                  direction="increasing"),
    TransformInfo("cevian", _cevian_build, _spec_point_center, "point", requires=("point",)),
    TransformInfo("anticevian", _anticevian_build, _spec_point_center, "point", requires=("point",),
                  direction="increasing"),
    TransformInfo("pedal", _pedal_build, _spec_point_center, "point", requires=("point",)),
    TransformInfo("antipedal", _antipedal_build, _spec_point_center, "point", requires=("point",),
                  direction="increasing"),
    TransformInfo("cyclocevian", _cyclocevian_build, _spec_point_center, "point", requires=("point",)),
    TransformInfo("symmedial", _simple(symmedial), _named_center("symmedian_point"), "symmedian_point"),
    TransformInfo("nedian_interior",
                  lambda f, spec, ctx: Built(nedian_interior(f, _ratio(spec, ctx), tol=ctx.tol)),
                  _centroid_center, "vertex_centroid", requires=("ratio",)),
    TransformInfo("nedian_exterior",
                  lambda f, spec, ctx: Built(nedian_exterior(f, _ratio(spec, ctx), tol=ctx.tol)),
                  _centroid_center, "vertex_centroid", requires=("ratio",)),
    TransformInfo("alpha_nedian_interior", _alpha_build("interior"), _centroid_center, "vertex_centroid",
                  requires=("angle",)),
    TransformInfo("alpha_nedian_exterior", _alpha_build("exterior"), _centroid_center, "vertex_centroid",
                  requires=("angle",)),
    TransformInfo("beta_nedian_interior", _beta_build("interior"), _centroid_center, "vertex_centroid",
                  requires=("angle",), default_allow_outside=False),
    TransformInfo("beta_nedian_exterior", _beta_build("exterior"), _centroid_center, "vertex_centroid",
                  requires=("angle",), default_allow_outside=False),
    TransformInfo("polygon_perp_foot", _perp_build, _centroid_center, "vertex_centroid",
                  triangle_only=False, accepts=("skip",), default_allow_outside=False),
    TransformInfo("polygon_midpoint_cevian", _midpoint_build, _centroid_center, "vertex_centroid",
                  triangle_only=False, accepts=("skip", "ratio")),
):
    register(_info)


class Applied(NamedTuple):
    figure: Figure
    outside: tuple[int, ...]
    center: Point


def apply_step(spec: TransformSpec, f: Figure, ctx: Context = Context()) -> Applied:
    """Build the next figure and the parent's distinguished center."""
    info = CATALOG[spec.kind]
    if info.triangle_only:
        f = _as_triangle(f)
    built = info.build(f, spec, ctx)
    return Applied(built.figure, built.outside, info.center(f, spec, ctx))


def apply(
    spec: TransformSpec,
    f: Figure,
    *,
    level: int = 1,
    anchor: Optional[Point] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Figure:
    """Apply ``spec`` once. ``anchor`` is the fixed-in-plane point, if any."""
    return apply_step(spec, f, Context(level, anchor, tol)).figure
