import json
import math
import re

import pytest

from tunnels.cli import main
from tunnels.engine import StopCriteria, run
from tunnels.errors import InvalidSpec
from tunnels.geometry import Polygon, Triangle
from tunnels.report import (
    SWEEP_COLUMNS,
    TRACE_COLUMNS,
    emit_csv,
    emit_sweep_csv,
    emit_trace,
    parse_trace,
    render_svg,
    trace_to_dict,
)
from tunnels.analysis import ShapeGrid, sweep, triangle_from_angles
from tunnels.transforms import PointSpec, TransformSpec

SCALENE = Triangle((0, 0), (4, 0), (1, 3))


def traces():
    return [
        run(SCALENE, TransformSpec("medial")),
        run(SCALENE, TransformSpec("orthic")),
        run(Triangle((0, 0), (1, 0), (0, 1)), TransformSpec("orthic")),
        run(SCALENE, TransformSpec("pedal", point=PointSpec("custom", 1.5, 1.0)), StopCriteria(max_steps=7)),
        run(SCALENE, TransformSpec("nedian_interior", ratio_schedule=(0.5, 2.0, 3.0))),
        run(Polygon(((0, 0), (4, 0), (5, 3), (2, 5), (-1, 3))), TransformSpec("polygon_midpoint_cevian")),
        run(SCALENE, TransformSpec("excentral")),
    ]


class TestTraceDocument:
    @pytest.mark.parametrize("trace", traces(), ids=lambda t: t.spec.kind)
    def test_round_trip_bytes(self, trace):
        data = emit_trace(trace)
        parsed, locus = parse_trace(data)
        assert emit_trace(parsed) == data
        assert trace_to_dict(parsed) == trace_to_dict(trace)

    def test_bit_exact_numbers(self):
        trace = run(SCALENE, TransformSpec("contact"))
        parsed, _ = parse_trace(emit_trace(trace))
        for a, b in zip(trace.steps, parsed.steps):
            assert a.area == b.area and a.area_ratio == b.area_ratio
            assert a.figure == b.figure and a.center == b.center and a.shape == b.shape

    def test_schema(self):
        doc = json.loads(emit_trace(run(SCALENE, TransformSpec("medial"), StopCriteria(max_steps=10))))
        assert doc["schema_version"] == 1
        assert doc["classification"]["kind"] == "converges_to_point"
        assert doc["classification"]["limit"] == pytest.approx([5 / 3, 1])
        assert doc["locus"]["kind"] == "single_point"
        assert len(doc["steps"]) == 10
        assert set(doc["steps"][0]) >= {"n", "vertices", "area", "perimeter", "alpha_n", "beta_n", "center"}

    def test_bad_schema(self):
        doc = json.loads(emit_trace(run(SCALENE, TransformSpec("medial"), StopCriteria(max_steps=3))))
        doc["schema_version"] = 99
        with pytest.raises(InvalidSpec):
            parse_trace(json.dumps(doc).encode())


class TestCsv:
    def test_medial_rows(self):
        text = emit_csv(run(SCALENE, TransformSpec("medial"))).decode()
        lines = text.splitlines()
        assert lines[0].split(",") == TRACE_COLUMNS
        for row in lines[1:]:
            cells = row.split(",")
            assert float(cells[3]) == pytest.approx(0.25, abs=1e-12)
            assert float(cells[4]) == pytest.approx(0.5, abs=1e-12)

    def test_header_only(self):
        text = emit_csv(run(Triangle((0, 0), (1, 0), (0, 1)), TransformSpec("orthic"))).decode()
        assert text == ",".join(TRACE_COLUMNS) + "\n"

    def test_outside_flags_column(self):
        tr = run(Triangle((0, 0), (4, 0), (5, 1)), TransformSpec("orthic"), StopCriteria(max_steps=1))
        row = emit_csv(tr).decode().splitlines()[1].split(",")
        assert row[-1] != ""

    def test_sweep_csv(self):
        rep = sweep(TransformSpec("medial"), ShapeGrid(step_deg=30), stop=StopCriteria(max_steps=5))
        lines = emit_sweep_csv(rep).decode().splitlines()
        assert lines[0].split(",") == SWEEP_COLUMNS
        assert len(lines) == 1 + len(rep.cells)


def _polygon_count(svg: bytes) -> int:
    return svg.count(b"<polygon ")


class TestSvg:
    def test_deterministic(self):
        assert render_svg(run(SCALENE, TransformSpec("orthic"))) == render_svg(run(SCALENE, TransformSpec("orthic")))

    def test_medial_nested(self):
        trace = run(SCALENE, TransformSpec("medial"), StopCriteria(max_steps=8))
        svg = render_svg(trace)
        assert _polygon_count(svg) == 9
        assert svg.count(b"<circle ") == 8
        assert b"medial: budget_exhausted" in svg

    def test_single_step_degenerate(self):
        # angles 45, 60, 75 degrees: the orthic triangle has angles 90, 60, 30
        t = triangle_from_angles(math.radians(45), math.radians(60))
        trace = run(t, TransformSpec("orthic"))
        assert len(trace.steps) == 1
        assert (trace.termination.error, trace.termination.at_step) == ("RightAngleDegenerate", 2)
        assert _polygon_count(render_svg(trace)) == 2
        empty = run(Triangle((0, 0), (1, 0), (0, 1)), TransformSpec("orthic"))
        svg = render_svg(empty)
        assert _polygon_count(svg) == 1
        assert b"RightAngleDegenerate" in svg

    def test_excentral_canvas_holds_last_figure(self):
        trace = run(SCALENE, TransformSpec("excentral"), StopCriteria(max_steps=4))
        svg = render_svg(trace).decode()
        w, h = map(float, re.search(r'viewBox="0 0 ([\d.]+) ([\d.]+)"', svg).groups())
        for pts in re.findall(r'<polygon points="([^"]+)"', svg):
            for pair in pts.split():
                x, y = map(float, pair.split(","))
                assert 0 <= x <= w and 0 <= y <= h
        assert max(w, h) == pytest.approx(800, abs=1e-3)


FIG = "0,0 4,0 1,3"


class TestCli:
    def test_catalog(self, capsys):
        assert main(["catalog"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 21
        assert any(line.startswith("orthic\t") and "center=orthocenter" in line for line in lines)

    def test_medial_example(self, tmp_path):
        out = tmp_path / "t.json"
        assert main(["run", "--transform", "medial", "--figure", FIG, "--steps", "10", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["classification"]["kind"] == "converges_to_point"
        assert doc["classification"]["limit"] == pytest.approx([5 / 3, 1], abs=1e-12)

    def test_degenerate_is_success(self, tmp_path):
        out = tmp_path / "t.json"
        assert main(["run", "--transform", "orthic", "--figure", "0,0 1,0 0,1", "--out", str(out)]) == 0
        term = json.loads(out.read_text())["termination"]
        assert (term["kind"], term["error"], term["at_step"]) == ("degenerate", "RightAngleDegenerate", 1)

    @pytest.mark.parametrize("argv", [
        ["run", "--transform", "nedian_interior", "--figure", "0,0 1,0 0,1"],
        ["run", "--transform", "medial"],
        ["run", "--transform", "bogus", "--figure", FIG],
        ["run", "--transform", "medial", "--figure", "0,0 1,1 2,2"],
        ["run", "--transform", "medial", "--figure", "0,0 1,a 2,2"],
        ["run", "--transform", "orthic", "--figure", "0,0 1,0 1,1 0,1"],
        ["run", "--transform", "medial", "--figure", FIG, "--steps", "0"],
        ["run", "--transform", "pedal", "--figure", FIG, "--point", "nowhere"],
        ["sweep", "--transform", "medial", "--grid-step", "0"],
    ])
    def test_config_errors(self, argv, capsys):
        assert main(argv) == 2
        assert capsys.readouterr().err

    def test_config_and_flags_exclusive(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"transform": {"name": "medial"}, "figure": FIG}))
        assert main(["run", "--config", str(cfg), "--transform", "orthic"]) == 2

    def test_io_failure(self, tmp_path):
        assert main(["run", "--transform", "medial", "--figure", FIG,
                     "--out", str(tmp_path / "missing" / "t.json")]) == 3
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == 3

    def test_flags_match_config(self, tmp_path):
        a = {k: tmp_path / f"a.{k}" for k in ("json", "csv", "svg")}
        b = {k: tmp_path / f"b.{k}" for k in ("json", "csv", "svg")}
        assert main(["run", "--transform", "alpha_nedian_exterior", "--angle", "20", "--figure", FIG,
                     "--steps", "15", "--out", str(a["json"]), "--csv", str(a["csv"]), "--svg", str(a["svg"])]) == 0
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "transform": {"name": "alpha_nedian_exterior", "angle_deg": 20},
            "figure": [[0, 0], [4, 0], [1, 3]],
            "stop": {"max_steps": 15},
            "outputs": {"trace": str(b["json"]), "csv": str(b["csv"]), "svg": str(b["svg"])},
        }))
        assert main(["run", "--config", str(cfg)]) == 0
        for k in a:
            assert a[k].read_bytes() == b[k].read_bytes()

    def test_point_flags(self, tmp_path):
        out = tmp_path / "t.json"
        assert main(["run", "--transform", "pedal", "--point", "circumcenter", "--point-mode", "fixed",
                     "--figure", FIG, "--steps", "2", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["config"]["transform"]["point"] == {"kind": "circumcenter", "mode": "fixed_in_plane"}
        assert main(["run", "--transform", "cevian", "--point", "0.5,0.5", "--figure", FIG, "--steps", "2"]) == 0

    def test_output_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TUNNELS_OUTPUT_DIR", str(tmp_path))
        assert main(["run", "--transform", "medial", "--figure", FIG, "--steps", "3", "--csv", "t.csv"]) == 0
        assert (tmp_path / "t.csv").exists()

    def test_sweep(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["sweep", "--transform", "medial", "--grid-step", "15", "--steps", "5", "--csv", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].split(",") == SWEEP_COLUMNS
        assert all(",converges_to_point," in line for line in lines[1:])

    def test_param_sweep(self, tmp_path, capsys):
        assert main(["sweep", "--transform", "nedian_interior", "--param", "ratio", "--values", "0.5,2,3",
                     "--figure", FIG, "--steps", "2"]) == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert len(rows) == 4
        alpha = float(rows[1].split(",")[SWEEP_COLUMNS.index("final_alpha")])
        assert math.isclose(alpha, 1 / 7, rel_tol=1e-10)
