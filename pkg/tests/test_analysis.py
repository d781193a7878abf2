import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tunnels.analysis import (
    ParamRange,
    ShapeGrid,
    classify_locus,
    distance_to_equilateral,
    locus_of,
    shape_trajectory,
    summarize_ratios,
    sweep,
    triangle_from_angles,
)
from tunnels.engine import StopCriteria, run
from tunnels.errors import InvalidGrid
from tunnels.geometry import Point, Triangle, angle_triple
from tunnels.transforms import TransformSpec

from conftest import random_similarity, random_triangle


class TestLocus:
    def test_single_point(self):
        rep = classify_locus([(1.5, -2.0)] * 12, 4.0)
        assert rep.kind == "single_point"
        assert rep.point == pytest.approx((1.5, -2.0))

    def test_line(self):
        rep = classify_locus([(0, 0), (1, 1), (2, 2), (3, 3)], 3.0)
        assert rep.kind == "line"
        assert rep.residual < 1e-12
        a, b, c = rep.line
        assert abs(c) < 1e-12
        # direction (-b, a) parallel to (1, 1)
        assert abs(-b - a) < 1e-12

    def test_circle(self):
        rng = random.Random(5)
        pts = [(math.cos(2 * math.pi * k / 16) + rng.uniform(-1e-12, 1e-12),
                math.sin(2 * math.pi * k / 16) + rng.uniform(-1e-12, 1e-12)) for k in range(16)]
        rep = classify_locus(pts, 2.0)
        assert rep.kind == "circle"
        assert rep.residual < 1e-7
        assert rep.circle.center == pytest.approx((0, 0), abs=1e-9)
        assert rep.circle.radius == pytest.approx(1, rel=1e-9)

    def test_irregular(self):
        pts = [(k, k ** 3 % 7) for k in range(10)]
        rep = classify_locus(pts, 10.0)
        assert rep.kind == "irregular"
        assert rep.residual >= 1e-7

    def test_medial_trace_locus(self, scalene):
        rep = locus_of(run(scalene, TransformSpec("medial")))
        assert rep.kind == "single_point"
        assert rep.point == pytest.approx((5 / 3, 1), abs=1e-12)

    def test_similarity_equivariance(self):
        rng = random.Random(11)
        clouds = [
            [(k, 2 * k + 1) for k in range(6)],
            [(2 + 3 * math.cos(t), -1 + 3 * math.sin(t)) for t in np.linspace(0, 2, 9)],
            [(0.5, 0.5)] * 4,
        ]
        for pts in clouds:
            base = classify_locus(pts, 5.0)
            for _ in range(20):
                s, k = random_similarity(rng)
                rep = classify_locus([s(p) for p in pts], 5.0 * k)
                assert rep.kind == base.kind
                assert rep.residual == pytest.approx(base.residual, rel=1e-9, abs=1e-12)
                if base.kind == "circle":
                    assert math.dist(rep.circle.center, s(base.circle.center)) <= 1e-9 * k
                    assert rep.circle.radius == pytest.approx(k * base.circle.radius, rel=1e-9)
                if base.kind == "line":
                    q = s(Point(0, 1))
                    assert abs(rep.line.a * q.x + rep.line.b * q.y + rep.line.c) <= 1e-9 * k
                if base.kind == "single_point":
                    assert math.dist(rep.point, s(base.point)) <= 1e-9 * k


class TestRatios:
    def test_medial_constant(self, scalene):
        summary = summarize_ratios([s.area_ratio for s in run(scalene, TransformSpec("medial")).steps])
        assert summary.verdict == "constant"
        assert summary.value == pytest.approx(0.25, abs=1e-12)

    def test_contact_convergent(self, rng):
        for _ in range(10):
            t = random_triangle(rng, min_angle_deg=6)
            summary = summarize_ratios([s.area_ratio for s in run(t, TransformSpec("contact")).steps])
            assert summary.verdict == "convergent"
            assert summary.value == pytest.approx(0.25, abs=1e-9)

    def test_orthic_irregular(self):
        t = Triangle((0, 0), (1, 0), (0.37, 0.81))
        trace = run(t, TransformSpec("orthic"), StopCriteria(max_steps=60))
        summary = summarize_ratios([s.area_ratio for s in trace.steps])
        assert summary.verdict == "irregular"

    def test_oscillating(self):
        vals = [1.0 + 0.1 * (-1) ** k for k in range(12)]
        assert summarize_ratios(vals).verdict == "oscillating"

    def test_geometric(self):
        summary = summarize_ratios([2.0 + 0.5 ** k for k in range(30)])
        assert summary.verdict == "convergent"
        assert summary.rate == pytest.approx(0.5, rel=1e-6)

    def test_too_short(self):
        with pytest.raises(ValueError):
            summarize_ratios([1.0])

    @settings(max_examples=50)
    @given(st.floats(0.01, 100), st.floats(1e-3, 1e3))
    def test_scale_free(self, base, k):
        vals = [base * (1 + 0.3 * 0.6 ** n) for n in range(25)]
        a = summarize_ratios(vals)
        # the ratio sequence of a scaled tunnel is the same sequence; the verdict must not depend on units
        b = summarize_ratios([v * k for v in vals])
        assert a.verdict == b.verdict


class TestShapes:
    def test_medial_distances_zero(self, scalene):
        traj = shape_trajectory(run(scalene, TransformSpec("medial")))
        assert max(traj.distances) < 1e-12
        assert traj.period == 1

    def test_contact_halves(self, scalene):
        traj = shape_trajectory(run(scalene, TransformSpec("contact")))
        d = [distance_to_equilateral(s) for s in traj.shapes]
        for d0, d1 in zip(d[:15], d[1:16]):
            assert d1 / d0 == pytest.approx(0.5, rel=1e-6)

    def test_equilateral_orthic_period_one(self):
        t = Triangle((1, 0), (-0.5, math.sqrt(3) / 2), (-0.5, -math.sqrt(3) / 2))
        traj = shape_trajectory(run(t, TransformSpec("orthic"), StopCriteria(max_steps=12)))
        assert traj.period == 1

    def test_needs_a_step(self):
        trace = run(Triangle((0, 0), (1, 0), (0, 1)), TransformSpec("orthic"))
        with pytest.raises(ValueError):
            shape_trajectory(trace)


class TestGrid:
    def test_triangle_from_angles(self):
        t = triangle_from_angles(math.radians(50), math.radians(60))
        assert angle_triple(t) == pytest.approx(tuple(sorted(map(math.radians, (50, 60, 70)))), abs=1e-12)
        with pytest.raises(InvalidGrid):
            triangle_from_angles(2.0, 1.5)

    def test_cells(self):
        assert len(ShapeGrid().cells()) == 8100
        canon = ShapeGrid(step_deg=5, canonical=True).cells()
        assert all(a <= b <= 180 - a - b for a, b in canon)
        with pytest.raises(InvalidGrid):
            ShapeGrid(step_deg=0).cells()

    def test_param_range(self):
        with pytest.raises(InvalidGrid):
            ParamRange("colour", (1,))
        with pytest.raises(InvalidGrid):
            ParamRange("ratio", ())


class TestSweep:
    def test_excentral_decay(self):
        rep = sweep(TransformSpec("excentral"), ShapeGrid(step_deg=15))
        assert rep.cells
        for c in rep.cells:
            a, b = math.radians(c.a_deg), math.radians(c.b_deg)
            d0 = distance_to_equilateral(angle_triple(triangle_from_angles(a, b)))
            assert c.classification == "diverges"
            assert c.final_shape_distance / d0 == pytest.approx(0.5 ** c.steps, rel=1e-6)

    def test_orthic_never_diverges(self):
        rep = sweep(TransformSpec("orthic"), ShapeGrid(step_deg=3))
        assert len(rep.cells) == 900
        assert all(c.classification != "diverges" for c in rep.cells)
        assert all(c.termination in ("degenerate", "collapsed", "budget_exhausted") for c in rep.cells)

    def test_param_sweep_fixed_figure(self, scalene):
        rep = sweep(TransformSpec("nedian_interior", ratio=2.0), params=ParamRange("ratio", (0.5, 1.0, 2.0)),
                    figure=scalene, stop=StopCriteria(max_steps=3))
        assert [c.param for c in rep.cells] == [0.5, 1.0, 2.0]
        assert rep.cells[1].error == "ConcurrentNedians"
        assert rep.cells[0].final_area_ratio == pytest.approx(1 / 7, rel=1e-10)

    def test_bad_grid(self, scalene):
        with pytest.raises(InvalidGrid):
            sweep(TransformSpec("medial"))
        with pytest.raises(InvalidGrid):
            sweep(TransformSpec("medial"), ShapeGrid(), figure=scalene)
        with pytest.raises(InvalidGrid):
            sweep(TransformSpec("nedian_interior", ratio=2.0), params=ParamRange("ratio", (-1.0,)), figure=scalene)

    def test_order_independent(self):
        grid = ShapeGrid(step_deg=10)
        cells = grid.cells()
        one = sweep(TransformSpec("contact"), grid, stop=StopCriteria(max_steps=15))
        two = sweep(TransformSpec("contact"), grid, stop=StopCriteria(max_steps=15), n_jobs=2)
        assert one == two
        assert [(c.a_deg, c.b_deg) for c in one.cells] == cells
