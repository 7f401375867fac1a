import json

import pytest
from click.testing import CliRunner

from torusdim.cli import EXIT_INPUT, EXIT_TRUNCATED, main


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return go


def test_analyze_isolated(run, tmp_path):
    res = run("analyze", "@isolated", "--depth-lo", "5", "--depth-hi", "5", "--out", str(tmp_path))
    assert res.exit_code == 0
    out = res.output
    assert "essential classes: 1" in out
    assert "inner dims [0.628346303, 1.885322742]" in out
    assert "isolated dimensions: {2.285974507, 2.293082123}" in out
    assert "x2402:" in out and "exact:" in out
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["diagram.dot", "dims.csv", "report.txt", "result.json"]
    doc = json.loads((tmp_path / "result.json").read_text())
    assert doc["schema_version"] == 1


def test_analyze_structure_only(run):
    res = run("analyze", "@essnotunique")
    assert res.exit_code == 0
    assert "essential classes: 2" in res.output
    assert "{5,9,10} essential" in res.output
    assert "{7} essential" in res.output


def test_golden_modes(run):
    torus = run("analyze", "@golden", "--depth-lo", "4", "--depth-hi", "4")
    line = run("analyze", "@golden", "--mode", "line", "--depth-lo", "4", "--depth-hi", "4")
    assert "reduced characteristic vectors: 38" in torus.output
    assert "reduced characteristic vectors: 40" in line.output


def test_truncation_exit(run):
    res = run("analyze", "@golden", "--max-nodes", "25")
    assert res.exit_code == EXIT_TRUNCATED
    assert "TRUNCATED" in res.output


def test_bad_spec(run, tmp_path):
    p = tmp_path / "bad.spec"
    p.write_text("[field]\nmin_poly = 4, -1\n[ifs]\ndigits = 0, 1/2, 1/3\n")
    res = run("analyze", str(p))
    assert res.exit_code == EXIT_INPUT
    assert "line 4" in res.output


def test_unknown_example(run):
    assert run("analyze", "@nope").exit_code == EXIT_INPUT


def test_warm_cache_identical(run, tmp_path):
    cache = tmp_path / "cache"
    a = run("analyze", "@isolated", "--cache", str(cache), "--out", str(tmp_path / "a"))
    b = run("analyze", "@isolated", "--cache", str(cache), "--out", str(tmp_path / "b"))
    assert a.output == b.output
    for name in ("report.txt", "diagram.dot", "dims.csv", "result.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_diagram_dot(run):
    res = run("diagram", "@essnotunique")
    assert res.output.startswith("digraph transition {")


def test_dims_csv(run):
    res = run("dims", "@isolated", "--depth-lo", "5", "--depth-hi", "5")
    assert res.exit_code == 0
    assert res.output.splitlines()[0].startswith("classes,")


def test_point(run):
    res = run("point", "@isolated", "7/8")
    assert "local dimension: 2.293082123 (exact, periodic)" in res.output


def test_point_line_zero(run):
    res = run("point", "@cantor3", "0", "--mode", "line")
    assert "local dimension: 1.892789261" in res.output


def test_point_gap(run):
    res = run("point", "@strictsep", "1", "--mode", "line")
    assert res.exit_code == EXIT_INPUT


def test_cantor_table(run):
    res = run("cantor-table", "--d-range", "3:5", "--m-range", "3:5")
    lines = res.output.splitlines()
    assert len(lines) == 7
    assert lines[1] == "3,3,1.133544891,1.077324384,true,1"


def test_cantor_single_pair(run):
    res = run("cantor-table", "--d-range", "3:3", "--m-range", "3:3")
    assert len(res.output.splitlines()) == 2


def test_check_pisot(run):
    assert run("check-pisot", "1,-1,-1").exit_code == 0
    assert run("check-pisot", "1,0,-2").exit_code == 1


def test_examples(run):
    assert "golden" in run("examples").output.split()
