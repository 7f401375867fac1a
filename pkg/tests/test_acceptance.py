"""The ten acceptance criteria, each at its stated tolerance and time budget.

Every test records one ``ACCEPTANCE n: PASS|FAIL`` line; the lines are
echoed in the terminal summary (see conftest).
"""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest
from click.testing import CliRunner

from conftest import ACCEPTANCE_LOG, diagram_of
from oracles import LevelImages, sandwich_bracket, sandwich_points, unit_mass_bounds
from torusdim.cantor import binomial_probs, block_permute, cantor_T, shrink_table
from torusdim.catalog import catalog_spec
from torusdim.classes import loop_classes
from torusdim.cli import main
from torusdim.dims import inner_interval, isolated_report, outer_interval, periodic_dim, point_symbolic, sss_interval
from torusdim.netgen import closure, net_intervals

TOL = 1e-6


@contextmanager
def criterion(n, title, budget):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        dt = time.perf_counter() - t0
        ACCEPTANCE_LOG.append(f"ACCEPTANCE {n}: FAIL {title} ({dt:.1f}s) {type(exc).__name__}: {exc}")
        raise
    dt = time.perf_counter() - t0
    ok = dt <= budget
    ACCEPTANCE_LOG.append(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {title} ({dt:.1f}s of {budget}s)")
    assert ok, f"took {dt:.1f}s, budget {budget}s"


def fresh(name, mode="torus"):
    spec = catalog_spec(name, mode)
    d = closure(spec)
    return spec, d, loop_classes(d)


def by_label(rep, labels):
    return next(c for c in rep.classes if c.reduced == labels)


def self_loop(cls):
    return (cls.nodes[0], cls.nodes[0])


def test_1_structure_counts():
    with criterion(1, "structure counts", 4 * 30):
        for name, mode, want in [("essnotunique", "torus", 10), ("golden", "line", 40), ("golden", "torus", 38)]:
            t0 = time.perf_counter()
            _, d, rep = fresh(name, mode)
            assert time.perf_counter() - t0 < 30
            assert d.n_reduced == want and not d.truncated
            if name == "essnotunique":
                assert sorted(c.reduced for c in rep.essential) == [(5, 9, 10), (7,)]
                assert len(rep.maximal) == 2
        t0 = time.perf_counter()
        _, d, rep = fresh("isolated")
        assert time.perf_counter() - t0 < 30
        assert d.n_reduced == 10
        (ess,) = rep.essential
        assert len(ess.reduced) == 1 and len(ess.nodes) == 4


def test_2_periodic_dimensions():
    with criterion(2, "exact periodic dimensions", 10):
        _, d, rep = diagram_of("isolated")
        got = sorted({round(periodic_dim(d, self_loop(c)).dim, 12) for c in rep.maximal})
        assert len(got) == 2
        assert abs(got[0] - 2.285974508) < TOL and abs(got[1] - 2.293082124) < TOL
        _, d, rep = diagram_of("golden", "line")
        for lab in [(2,), (6,)]:
            assert abs(periodic_dim(d, self_loop(by_label(rep, lab))).dim - 2.880840181) < TOL
        _, d, rep = diagram_of("golden")
        for lab in [(16,), (22,)]:
            assert abs(periodic_dim(d, self_loop(by_label(rep, lab))).dim - 0.992399434) < TOL


def test_3_inner_intervals():
    with criterion(3, "inner intervals", 120):
        _, d, rep = diagram_of("golden")
        inn = inner_interval(d, rep.essential[0], 6)
        assert abs(inn.dim_lo - 0.992399434) < TOL and abs(inn.dim_hi - 1.002504754) < TOL
        assert sorted([len(inn.witness_lo) - 1, len(inn.witness_hi) - 1]) == [2, 3]
        _, d, rep = diagram_of("isolated")
        inn = inner_interval(d, rep.essential[0], 5)
        assert abs(inn.dim_lo - 0.628346304) < TOL and abs(inn.dim_hi - 1.885322743) < TOL
        assert len(inn.witness_lo) - 1 <= 5 and len(inn.witness_hi) - 1 <= 5


def test_4_outer_bounds():
    with criterion(4, "outer bounds and isolation verdicts", 600):
        _, d, rep = diagram_of("isolated")
        ess = rep.essential[0]
        out = outer_interval(d, ess, 5, 5, "col", "col")
        assert abs(out.dim_lo - 0.614294428) < TOL and abs(out.dim_hi - 2.052681190) < TOL
        inn = inner_interval(d, ess, 5)
        assert out.dim_lo <= inn.dim_lo and inn.dim_hi <= out.dim_hi
        r = isolated_report(d, rep, depth_lo=5, depth_hi=5)
        assert all(c.verdict == "isolated" for c in r.candidates)
        iso = r.isolated_dims()
        assert abs(iso[0] - 2.285974508) < TOL and abs(iso[1] - 2.293082124) < TOL

        _, d, rep = diagram_of("golden")
        ess = rep.essential[0]
        out = outer_interval(d, ess, 20, 10, lower_norm="row", upper_norm="col", subset=(3, 4))
        # target under the row-sub-norm on positions {3, 4} / column sup-norm convention
        assert abs(out.dim_lo - 0.815720713) < TOL and abs(out.dim_hi - 1.400908289) < TOL
        inn = inner_interval(d, ess, 6)
        assert out.dim_lo <= inn.dim_lo and inn.dim_hi <= out.dim_hi
        r = isolated_report(d, rep)
        assert r.isolated_dims() == []
        assert all(c.verdict == "inside" for c in r.candidates)
        assert r.components() == 1


def pattern(m):
    return ["".join("." if x == 0 else str(int(x) - 1) for x in row) for row in m.entries]


# entries shown as probability indices; "." marks a zero
DISPLAYED_T = {
    0: ["0......", ".1..0..", "..2..1.", "4..3..2", ".5..4..", "..6..5.", "...7..6"],
    1: [".0.....", "..1..0.", "3..2..1", ".4..3..", "..5..4.", "7..6..5", "....7.."],
    2: ["..0....", "2..1..0", ".3..2..", "..4..3.", "6..5..4", ".7..6..", ".....7."],
    3: ["1..0...", ".2..1..", "..3..2.", "5..4..3", ".6..5..", "..7..6.", "......7"],
}
DISPLAYED_BLOCKS = {
    0: ["0......", "432....", ".76....", "...10..", "...54..", ".....21", ".....65"],
    1: ["...0...", "...43..", "....7..", ".....10", ".....54", "321....", "765...."],
    2: [".....0.", ".....43", "......7", "210....", "654....", "...32..", "...76.."],
    3: ["10.....", "543....", "..7....", "...21..", "...65..", ".....32", ".....76"],
}


def test_5_cantor_machinery():
    with criterion(5, "Cantor-like block matrices", 10):
        marks = [Fraction(j + 1) for j in range(8)]
        for ell in range(4):
            T = cantor_T(4, 7, probs=marks, ell=ell)
            assert pattern(T) == DISPLAYED_T[ell]
            assert pattern(block_permute(T, 4, 7).matrix) == DISPLAYED_BLOCKS[ell]
        probs = binomial_probs(7)
        a = block_permute(cantor_T(4, 7, probs=probs, ell=0), 4, 7)
        b = block_permute(cantor_T(4, 7, probs=probs, ell=3), 4, 7)
        p = a @ b
        q = p
        for _ in range(6):
            q = q @ p
        assert q.is_block_diagonal() and q.is_block_positive()


# (m, d): line bound, torus bound, verdict, depth
TABLE = {
    (2, 3): (1.261859507, 1.261859507, False, 10),
    (3, 3): (1.133544891, 1.077324384, True, 1),
    (4, 3): (1.058745493, 1.049820435, True, 2),
    (5, 3): (1.027566600, 1.025209036, True, 3),
    (6, 3): (1.014334772, 1.011259593, True, 2),
    (4, 4): (1.321490682, 1.166666667, True, 1),
    (5, 4): (1.207518750, 1.084691151, True, 1),
    (6, 4): (1.132742274, 1.075965367, True, 2),
    (5, 5): (1.515580565, 1.188044511, True, 1),
    (6, 5): (1.374997393, 1.138225274, True, 1),
    (6, 6): (1.707969651, 1.239189644, True, 1),
}


def test_6_shrink_table():
    with criterion(6, "bound table rows 3 <= d <= m <= 6 and (2,3)", 300):
        rows = shrink_table(list(TABLE))
        assert len(rows) == len(TABLE)
        for r in rows:
            line, torus, holds, depth = TABLE[(r.m, r.d)]
            assert abs(r.line_bound - line) < TOL, (r.m, r.d)
            assert abs(r.torus_bound - torus) < TOL, (r.m, r.d)
            assert r.holds == holds and r.depth == depth, (r.m, r.d)


def test_7_q_vector_oracle():
    with criterion(7, "Q_n equals brute force over A^n, n <= 4", 120):
        for name in ("golden", "isolated"):
            spec, d, _ = diagram_of(name)
            for n in range(5):
                images = LevelImages(spec, n)
                count = 0
                for path, left, _ in net_intervals(d, n):
                    node = d.nodes[path[-1]]
                    q = [Fraction(1)] * len(d.nodes[path[0]].neighbours)
                    for a, b in zip(path, path[1:]):
                        m = d.matrix(a, b)
                        q = [sum(q[i] * m.entries[i][j] for i in range(len(q))) for j in range(m.cols)]
                    bf = images.q_vector(left, node.length)
                    assert set(bf) == set(node.neighbours), (name, n, path)
                    assert [bf[a] for a in node.neighbours] == q, (name, n, path)
                    count += 1
                assert count > 0


def test_8_sandwich():
    with criterion(8, "torus estimates inside ball-measure brackets at 20 points", 300):
        line = catalog_spec("cantor3", "line")
        c1, c2 = unit_mass_bounds(line)
        _, d, _ = diagram_of("cantor3")
        n = 12
        for x in sandwich_points(20):
            est = point_symbolic(d, x, depth=n).estimate_adjacent
            lo, hi = sandwich_bracket(line, x, n, c1, c2)
            assert lo - 1e-12 <= est <= hi + 1e-12, (x, lo, est, hi)


def test_9_strict_separation():
    with criterion(9, "strict separation closed form", 60):
        spec, d, rep = diagram_of("strictsep")
        (ess,) = rep.essential
        (node,) = {d.nodes[i].describe_reduced() for i in ess.nodes}
        assert node == "(2, (0))"
        inn = inner_interval(d, ess, 6)
        lo, hi = sss_interval(spec)
        assert abs(lo - math.log(3 / 4) / math.log(1 / 4)) < 1e-12
        assert abs(inn.dim_lo - lo) < 1e-9 and abs(inn.dim_hi - hi) < 1e-9


def test_10_truncation():
    with criterion(10, "graceful truncation at max_nodes=25", 60):
        d = closure(catalog_spec("golden"), {"max_nodes": 25})
        assert d.truncated and "max_nodes" in d.truncation_reason
        res = CliRunner().invoke(main, ["analyze", "@golden", "--max-nodes", "25"])
        assert res.exit_code != 0
        assert "TRUNCATED" in res.output


@pytest.fixture(autouse=True, scope="module")
def _warm():
    # build the shared diagrams outside the timed sections, except where a
    # criterion times construction itself
    for name, mode in [("isolated", "torus"), ("golden", "torus"), ("golden", "line"), ("cantor3", "torus"), ("strictsep", "torus")]:
        diagram_of(name, mode)
