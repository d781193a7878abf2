"""Planar primitives: points, lines, circles, barycentrics, triangles, polygons.

Plain double precision throughout. Tolerances are relative to the figure
diameter unless stated otherwise, so a construction that succeeds on a
triangle also succeeds on any similar copy of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import (
    CoincidentPoints,
    DegeneratePolygon,
    DegenerateTriangle,
    NonFiniteCoordinate,
    ParallelLines,
    PointAtInfinity,
)

DEGENERACY_TOL = 1e-12
ANGLE_TOL = 1e-9
PARALLEL_TOL = 1e-12


@dataclass(frozen=True)
class Tolerances:
    """Per-run tolerance policy shared by every construction."""

    degeneracy: float = DEGENERACY_TOL
    angle: float = ANGLE_TOL
    # pedal feet whose triangle area is below this fraction of diameter**2
    # are treated as a Simson line
    collinearity: float = 1e-10
    # feet with segment parameter in [-segment, 1 + segment] count as inside
    segment: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()


class Point(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def __mul__(self, k):  # type: ignore[override]
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return Point(self.x / k, self.y / k)

    def __neg__(self):
        return Point(-self.x, -self.y)

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1]

    def cross(self, other) -> float:
        return self.x * other[1] - self.y * other[0]

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


def as_point(p) -> Point:
    q = Point(float(p[0]), float(p[1]))
    if not q.is_finite():
        raise NonFiniteCoordinate(f"non-finite coordinate {tuple(p)!r}")
    return q


def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def rotate(v: Point, theta: float) -> Point:
    c, s = math.cos(theta), math.sin(theta)
    return Point(c * v.x - s * v.y, s * v.x + c * v.y)


class Line(NamedTuple):
    """Implicit line ``a*x + b*y + c = 0`` with ``a**2 + b**2 == 1``."""

    a: float
    b: float
    c: float

    def value(self, p) -> float:
        """Signed distance of ``p`` from the line."""
        return self.a * p[0] + self.b * p[1] + self.c

    @property
    def direction(self) -> Point:
        return Point(-self.b, self.a)


class Circle(NamedTuple):
    center: Point
    radius: float


class BaryCoords(NamedTuple):
    """Homogeneous barycentric weights relative to a reference triangle."""

    u: float
    v: float
    w: float

    def normalized(self) -> "BaryCoords":
        s = self.u + self.v + self.w
        if abs(s) <= 1e-12 * (abs(self.u) + abs(self.v) + abs(self.w)):
            raise PointAtInfinity(f"weights {tuple(self)} sum to zero")
        return BaryCoords(self.u / s, self.v / s, self.w / s)


def line_through(p, q) -> Line:
    p, q = as_point(p), as_point(q)
    d = q - p
    n = d.norm()
    if n <= DEGENERACY_TOL * max(1.0, p.norm(), q.norm()):
        raise CoincidentPoints(f"{p} and {q} do not determine a line")
    a, b = -d.y / n, d.x / n
    return Line(a, b, -(a * p.x + b * p.y))


def line_intersection(l1: Line, l2: Line) -> Point:
    det = l1.a * l2.b - l2.a * l1.b
    if abs(det) <= PARALLEL_TOL:
        raise ParallelLines(f"{l1} and {l2} are parallel")
    x = (l1.b * l2.c - l2.b * l1.c) / det
    y = (l2.a * l1.c - l1.a * l2.c) / det
    return Point(x, y)


def perpendicular_foot(p, l: Line) -> Point:
    s = l.value(p)
    return Point(p[0] - s * l.a, p[1] - s * l.b)


def project(p, a: Point, b: Point) -> tuple[Point, float]:
    """Foot of ``p`` on line ``ab`` and its parameter ``t`` (0 at a, 1 at b)."""
    d = b - a
    dd = d.dot(d)
    if dd == 0.0:
        raise CoincidentPoints(f"segment endpoints coincide at {a}")
    t = (Point(p[0], p[1]) - a).dot(d) / dd
    return a + d * t, t


def intersect(p: Point, d: Point, q: Point, e: Point) -> Point:
    """Intersection of the lines ``p + s*d`` and ``q + u*e``."""
    den = d.cross(e)
    if abs(den) <= PARALLEL_TOL * d.norm() * e.norm():
        raise ParallelLines("lines are parallel")
    s = (q - p).cross(e) / den
    return p + d * s


def intersect_param(p: Point, d: Point, q: Point, e: Point) -> tuple[float, float]:
    """Parameters ``(s, u)`` with ``p + s*d == q + u*e``."""
    den = d.cross(e)
    if abs(den) <= PARALLEL_TOL * d.norm() * e.norm():
        raise ParallelLines("lines are parallel")
    w = q - p
    return w.cross(e) / den, w.cross(d) / den


@dataclass(frozen=True, slots=True)
class Triangle:
    """Ordered triangle ABC, normalized to counterclockwise orientation.

    A clockwise input has B and C swapped and ``flipped`` set.
    """

    a: Point
    b: Point
    c: Point
    flipped: bool = field(default=False, compare=False)

    def __post_init__(self):
        a, b, c = as_point(self.a), as_point(self.b), as_point(self.c)
        if (b - a).cross(c - a) < 0.0:
            b, c = c, b
            object.__setattr__(self, "flipped", True)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @classmethod
    def of(cls, pts: Sequence) -> "Triangle":
        if len(pts) != 3:
            raise DegenerateTriangle(f"a triangle needs 3 vertices, got {len(pts)}")
        return cls(pts[0], pts[1], pts[2])

    @property
    def vertices(self) -> tuple[Point, Point, Point]:
        return (self.a, self.b, self.c)

    def sides(self) -> tuple[float, float, float]:
        """Side lengths (|BC|, |CA|, |AB|) opposite A, B, C."""
        return dist(self.b, self.c), dist(self.c, self.a), dist(self.a, self.b)

    def angles(self) -> tuple[float, float, float]:
        """Interior angles at A, B, C in radians (unsorted)."""
        return (
            _angle_at(self.a, self.b, self.c),
            _angle_at(self.b, self.c, self.a),
            _angle_at(self.c, self.a, self.b),
        )


@dataclass(frozen=True, slots=True)
class Polygon:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        vs = tuple(as_point(v) for v in self.vertices)
        if len(vs) < 3:
            raise DegeneratePolygon(f"a polygon needs at least 3 vertices, got {len(vs)}")
        object.__setattr__(self, "vertices", vs)

    def __len__(self) -> int:
        return len(self.vertices)


Figure = Union[Triangle, Polygon]


def make_figure(pts: Iterable) -> Figure:
    """Triangle for three vertices, Polygon otherwise."""
    pts = [as_point(p) for p in pts]
    if len(pts) == 3:
        return Triangle(*pts)
    return Polygon(tuple(pts))


def _angle_at(p: Point, q: Point, r: Point) -> float:
    u, v = q - p, r - p
    return math.atan2(abs(u.cross(v)), u.dot(v))


def diameter(f: Figure) -> float:
    vs = f.vertices
    return max(dist(p, q) for i, p in enumerate(vs) for q in vs[i + 1:])


def vertex_centroid(f: Figure) -> Point:
    vs = f.vertices
    n = len(vs)
    return Point(math.fsum(v.x for v in vs) / n, math.fsum(v.y for v in vs) / n)


def signed_area(f: Figure) -> float:
    """Shoelace area, taken relative to the first vertex."""
    vs = f.vertices
    o = vs[0]
    s = 0.0
    for p, q in zip(vs[1:], vs[2:]):
        s += (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x)
    return 0.5 * s


def perimeter(f: Figure) -> float:
    vs = f.vertices
    return math.fsum(dist(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))


def angle_triple(t: Triangle) -> tuple[float, float, float]:
    return tuple(sorted(t.angles()))  # type: ignore[return-value]


def interior_angles(f: Figure) -> list[float]:
    """Unsigned angle at each vertex between its two incident sides."""
    vs = f.vertices
    m = len(vs)
    return [_angle_at(vs[i], vs[i - 1], vs[(i + 1) % m]) for i in range(m)]


def check_triangle(t: Triangle, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    d = diameter(t)
    if not d > 0.0 or abs(signed_area(t)) <= tol.degeneracy * d * d:
        raise DegenerateTriangle(f"triangle {t.vertices} is degenerate")


def check_polygon(p: Figure, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    vs = p.vertices
    d = diameter(p)
    if not d > 0.0:
        raise DegeneratePolygon("all vertices coincide")
    for i, v in enumerate(vs):
        if dist(v, vs[(i + 1) % len(vs)]) <= tol.degeneracy * d:
            raise DegeneratePolygon(f"vertices {i} and {(i + 1) % len(vs)} coincide")


def to_barycentric(t: Triangle, p) -> BaryCoords:
    check_triangle(t)
    p = as_point(p)
    a, b, c = t.vertices
    total = (b - a).cross(c - a)
    return BaryCoords(
        (b - p).cross(c - p) / total,
        (c - p).cross(a - p) / total,
        (a - p).cross(b - p) / total,
    )


def from_barycentric(t: Triangle, w: Sequence[float]) -> Point:
    u, v, x = BaryCoords(*w).normalized()
    a, b, c = t.vertices
    # offset from A keeps precision for triangles far from the origin
    return a + (b - a) * v + (c - a) * x


def circumcenter(t: Triangle) -> Point:
    check_triangle(t)
    a = t.a
    b, c = t.b - a, t.c - a
    d = 2.0 * b.cross(c)
    bb, cc = b.dot(b), c.dot(c)
    return a + Point((c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d)


def circumcircle(t: Triangle) -> Circle:
    o = circumcenter(t)
    r = math.fsum(dist(o, v) for v in t.vertices) / 3.0
    return Circle(o, r)


def incircle(t: Triangle) -> Circle:
    check_triangle(t)
    a, b, c = t.sides()
    center = from_barycentric(t, (a, b, c))
    return Circle(center, 2.0 * abs(signed_area(t)) / (a + b + c))


def excenters(t: Triangle) -> tuple[Point, Point, Point]:
    """Excenters opposite A, B, C."""
    check_triangle(t)
    a, b, c = t.sides()
    return (
        from_barycentric(t, (-a, b, c)),
        from_barycentric(t, (a, -b, c)),
        from_barycentric(t, (a, b, -c)),
    )


def circle_through(p: Point, q: Point, r: Point) -> Circle:
    """Circle through three points (raises DegenerateTriangle if collinear)."""
    t = Triangle(p, q, r)
    return circumcircle(t)


def translate(f: Figure, v) -> Figure:
    if isinstance(f, Triangle):
        return Triangle(f.a + v, f.b + v, f.c + v)
    return Polygon(tuple(p + v for p in f.vertices))
