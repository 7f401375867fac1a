import networkx as nx

from conftest import diagram_of
from torusdim.catalog import catalog_spec
from torusdim.classes import diagram_graph, loop_classes, to_dot
from torusdim.netgen import closure


def kinds(report):
    return {c.reduced: c.kind for c in report.classes}


def test_essnotunique_two_essential(essnotunique_torus):
    _, _, rep = essnotunique_torus
    assert rep.n_essential == 2
    assert kinds(rep) == {
        (2,): "simple-loop",
        (4, 8): "maximal",
        (5, 9, 10): "essential",
        (7,): "essential",
    }


def test_essnotunique_line_unique():
    _, _, rep = diagram_of("essnotunique", "line")
    assert rep.n_essential == 1


def test_golden_torus(golden_torus):
    _, d, rep = golden_torus
    assert kinds(rep) == {
        (16,): "simple-loop",
        (22,): "simple-loop",
        (26, 27, 28, 31, 32, 33, 34, 35, 36, 37, 38): "essential",
    }
    ess = rep.essential[0]
    assert ess.positivity == "positive"
    labels = [d.reduced_label(i) for i in ess.witness]
    assert labels == [26, 32, 36, 34, 38, 32, 36, 35]


def test_golden_witness_is_positive(golden_torus):
    _, d, rep = golden_torus
    w = rep.essential[0].witness
    assert d.path_matrix(list(w)).is_positive()


def test_golden_line(golden_line):
    _, _, rep = golden_line
    assert kinds(rep) == {
        (2,): "simple-loop",
        (6,): "simple-loop",
        (19,): "simple-loop",
        (25,): "simple-loop",
        (28, 29, 30, 33, 34, 35, 36, 37, 38, 39, 40): "essential",
    }


def test_isolated(isolated_torus):
    _, _, rep = isolated_torus
    ess = rep.essential
    assert len(ess) == 1
    assert ess[0].reduced == (4,)
    assert len(ess[0].nodes) == 4  # one reduced vector, four full ones
    assert sorted(c.reduced for c in rep.maximal) == [(5,), (6,), (7,)]


def test_membership_and_condensation(golden_torus):
    _, d, rep = golden_torus
    g = diagram_graph(d)
    sccs = [c for c in nx.strongly_connected_components(g) if len(c) > 1 or any(g.has_edge(v, v) for v in c)]
    assert len(sccs) == len(rep.classes)
    for c in rep.classes:
        for n in c.nodes:
            assert rep.class_of(n) is c


def test_not_positive_simple_loops(isolated_torus):
    _, _, rep = isolated_torus
    for c in rep.maximal:
        assert c.positivity in ("positive", "not-positive")


def test_truncated_has_no_spurious_essential():
    d = closure(catalog_spec("golden"), {"max_nodes": 25})
    rep = loop_classes(d)
    assert rep.warnings
    unexpanded = {i for i, es in enumerate(d.edges) if not es}
    for c in rep.essential:
        assert not set(c.nodes) & unexpanded


def test_dot(essnotunique_torus):
    _, d, rep = essnotunique_torus
    dot = to_dot(d, rep)
    assert dot.startswith("digraph")
    assert dot.count("cluster_") == 4
    assert "fillcolor=lightgrey" in dot
    assert dot.rstrip().endswith("}")
