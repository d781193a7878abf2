import itertools
import math
import random

import pytest

from tunnels.geometry import Point, Polygon, Triangle, diameter


def random_triangle(rng: random.Random, *, acute: bool = False, min_angle_deg: float = 3.0,
                    max_angle_deg: float = 177.0) -> Triangle:
    """Vertices uniform in a box, rejected until the angle limits hold."""
    hi = 88.0 if acute else max_angle_deg
    while True:
        pts = [(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3)]
        try:
            t = Triangle(*pts)
        except Exception:
            continue
        angs = [math.degrees(a) for a in t.angles()]
        if min(angs) >= min_angle_deg and max(angs) <= hi:
            return t


def random_similarity(rng: random.Random):
    theta = rng.uniform(0, 2 * math.pi)
    k = math.exp(rng.uniform(-2, 2))
    tx, ty = rng.uniform(-10, 10), rng.uniform(-10, 10)
    c, s = k * math.cos(theta), k * math.sin(theta)
    return lambda p: Point(c * p[0] - s * p[1] + tx, s * p[0] + c * p[1] + ty), k


def random_affine(rng: random.Random):
    """Orientation-preserving affine map; a reflection would relabel B and C."""
    while True:
        a, b, c, d = (rng.uniform(-2, 2) for _ in range(4))
        if a * d - b * c > 0.3:
            break
    tx, ty = rng.uniform(-5, 5), rng.uniform(-5, 5)
    return lambda p: Point(a * p[0] + b * p[1] + tx, c * p[0] + d * p[1] + ty)


def map_figure(f, fn):
    if isinstance(f, Triangle):
        return Triangle(*(fn(v) for v in f.vertices))
    return Polygon(tuple(fn(v) for v in f.vertices))


def vertex_set_distance(f, g) -> float:
    """Max vertex distance under the best matching of vertex sets."""
    fv, gv = list(f.vertices), list(g.vertices)
    if len(fv) != len(gv):
        return math.inf
    if len(fv) <= 6:
        return min(max(math.dist(p, q) for p, q in zip(fv, perm)) for perm in itertools.permutations(gv))
    return max(min(math.dist(p, q) for q in gv) for p in fv)


def assert_same_vertices(f, g, tol):
    d = vertex_set_distance(f, g)
    assert d <= tol * diameter(g), f"vertex sets differ by {d:.3g} ({f} vs {g})"


@pytest.fixture
def rng():
    return random.Random(20260914)


@pytest.fixture
def scalene():
    return Triangle((0, 0), (4, 0), (1, 3))


def random_polygon(rng: random.Random, m: int) -> Polygon:
    """Star-shaped m-gon with jittered radii and angles, counterclockwise."""
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(m))
    while min((angles[(i + 1) % m] - angles[i]) % (2 * math.pi) for i in range(m)) < 0.2:
        angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(m))
    cx, cy = rng.uniform(-3, 3), rng.uniform(-3, 3)
    return Polygon(tuple(Point(cx + r * math.cos(a), cy + r * math.sin(a))
                         for a, r in zip(angles, (rng.uniform(0.7, 1.3) for _ in range(m)))))


def interior_weights(rng: random.Random):
    return tuple(rng.uniform(0.2, 1.0) for _ in range(3))


def catalog_cases(t: Triangle, rng: random.Random):
    """(kind, TransformSpec factory) for every catalog entry on triangle ``t``.

    Factories take a point map so custom points can be carried along by a
    similarity or affine map of the plane.
    """
    from tunnels.geometry import from_barycentric
    from tunnels.transforms import PointSpec, TransformSpec

    p = from_barycentric(t, interior_weights(rng))
    min_ang = min(t.angles())
    alpha = 0.4 * min_ang
    beta = rng.uniform(1.2, 1.9)

    def custom(kind):
        return lambda fn: TransformSpec(kind, point=PointSpec("custom", *fn(p)))

    return [
        ("orthic", lambda fn: TransformSpec("orthic")),
        ("medial", lambda fn: TransformSpec("medial")),
        ("anticomplementary", lambda fn: TransformSpec("anticomplementary")),
        ("incentral", lambda fn: TransformSpec("incentral")),
        ("contact", lambda fn: TransformSpec("contact")),
        ("excentral", lambda fn: TransformSpec("excentral")),
        ("tangential", lambda fn: TransformSpec("tangential")),
        ("cevian", custom("cevian")),
        ("cevian/symmedian", lambda fn: TransformSpec("cevian", point=PointSpec("symmedian_point"))),
        ("anticevian", custom("anticevian")),
        ("pedal", custom("pedal")),
        ("antipedal", custom("antipedal")),
        ("cyclocevian", custom("cyclocevian")),
        ("cyclocevian/gergonne", lambda fn: TransformSpec("cyclocevian", point=PointSpec("gergonne_point"))),
        ("symmedial", lambda fn: TransformSpec("symmedial")),
        ("nedian_interior", lambda fn: TransformSpec("nedian_interior", ratio=2.5)),
        ("nedian_exterior", lambda fn: TransformSpec("nedian_exterior", ratio=0.6)),
        ("alpha_nedian_interior", lambda fn: TransformSpec("alpha_nedian_interior", angle=alpha)),
        ("alpha_nedian_exterior", lambda fn: TransformSpec("alpha_nedian_exterior", angle=alpha)),
        ("beta_nedian_interior", lambda fn: TransformSpec("beta_nedian_interior", angle=beta, allow_outside=True)),
        ("beta_nedian_exterior", lambda fn: TransformSpec("beta_nedian_exterior", angle=beta, allow_outside=True)),
        ("polygon_perp_foot", lambda fn: TransformSpec("polygon_perp_foot", allow_outside=True)),
        ("polygon_midpoint_cevian", lambda fn: TransformSpec("polygon_midpoint_cevian", skip=2)),
    ]


AFFINE_NATURAL = ("medial", "anticomplementary", "cevian", "anticevian", "nedian_interior",
                  "nedian_exterior", "polygon_midpoint_cevian")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
