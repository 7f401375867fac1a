from fractions import Fraction

import pytest

from conftest import diagram_of
from oracles import q_vector_bruteforce
from torusdim.catalog import catalog_spec
from torusdim.model import spec_cantor
from torusdim.netgen import (
    KOracle,
    TransitionDiagram,
    cached_closure,
    children,
    closure,
    net_intervals,
    root_vector,
)


def test_roots():
    g = catalog_spec("golden")
    assert root_vector(g).describe_reduced() == "(1, (0, 1))"
    assert root_vector(g.with_mode("line")).describe_reduced() == "(2, (0))"


@pytest.mark.parametrize(
    "name, mode, reduced, full",
    [
        ("golden", "torus", 38, 38),
        ("golden", "line", 40, 40),
        ("essnotunique", "torus", 10, 16),
        ("isolated", "torus", 10, 15),
        ("strictsep", "torus", 2, 3),
        ("cantor3", "torus", 1, 3),
    ],
)
def test_counts(name, mode, reduced, full):
    _, d, _ = diagram_of(name, mode)
    assert not d.truncated
    assert d.n_reduced == reduced
    assert d.n_nodes == full


def test_isolated_vectors():
    # a common alternative normalization lists these with all lengths doubled
    _, d, _ = diagram_of("isolated")
    vecs = [v.describe_reduced() for v in d.reduced_vectors()]
    assert "(1/2, (0, 1/2, 1, 3/2))" in vecs
    assert vecs[0] == "(1, (0, 1))"


def test_golden_root_children():
    spec, d, _ = diagram_of("golden")
    kids = [d.nodes[c].describe_reduced() for c in d.successors(0)]
    assert len(kids) == len(set(d.successors(0)))
    assert all(k.startswith("(") for k in kids)
    # net interval lengths at level 1 add up to the root length
    total = sum((d.nodes[c].length * spec.rho for c in d.successors(0)), spec.field.zero)
    assert total == spec.field.one


def test_strong_separation_children():
    spec = catalog_spec("strictsep", "line")
    root = root_vector(spec)
    kids = children(spec, root)
    assert len(kids) == 2
    for h, cv, mat in kids:
        assert cv.reduced == root.reduced
        assert len(mat) == 1 and len(mat[0]) == 1


def test_oracle_basic():
    spec = catalog_spec("cantor3")
    o = KOracle(spec)
    one = spec.field.one
    assert o(-one, one)
    assert not o(one * 4, one * 5)
    # 4/3 = S_2(0) lies in the attractor
    assert o(one, one * 2)


def test_oracle_gap():
    spec = catalog_spec("strictsep", "line")
    # digits 0, 3/2 with ratio 1/4: hull [0, 2], images [0, 1/2] and [3/2, 2]
    o = KOracle(spec)
    f = spec.field
    assert not o(f.element(Fraction(1, 2)), f.element(Fraction(3, 2)))
    assert o(f.element(Fraction(1, 4)), f.element(Fraction(3, 4)))


def test_truncation_flags():
    d = closure(catalog_spec("golden"), {"max_nodes": 25})
    assert d.truncated
    assert "max_nodes" in d.truncation_reason
    assert d.n_nodes <= 25
    assert any("unexpanded_nodes" in w for w in d.witness)


def test_net_intervals_tile_torus():
    spec, d, _ = diagram_of("golden")
    for n in range(4):
        ivs = net_intervals(d, n)
        total = sum((ln for _, _, ln in ivs), spec.field.zero)
        assert total == spec.field.one
        lefts = [left for _, left, _ in ivs]
        assert all((b - a).sign() > 0 for a, b in zip(lefts, lefts[1:]))


@pytest.mark.parametrize("name", ["golden", "isolated"])
def test_q_vectors_match_bruteforce(name):
    spec, d, _ = diagram_of(name)
    for n in range(3):
        for path, left, _ in net_intervals(d, n):
            node = d.nodes[path[-1]]
            q = [Fraction(1)] * len(d.nodes[d.root].neighbours)
            for a, b in zip(path, path[1:]):
                m = d.matrix(a, b)
                q = [sum(q[i] * m.entries[i][j] for i in range(len(q))) for j in range(m.cols)]
            bf = q_vector_bruteforce(spec, left, node.length, node.neighbours, n)
            assert [bf.get(a) for a in node.neighbours] == q


@pytest.mark.parametrize("d, k", [(3, 3), (4, 4), (4, 7)])
def test_cantor_single_vector(d, k):
    diag = closure(spec_cantor(d, k))
    assert diag.n_reduced == 1
    assert len(diag.successors(0)) == d


def test_json_roundtrip(tmp_path):
    spec = catalog_spec("isolated")
    d1 = cached_closure(spec, None, str(tmp_path))
    d2 = cached_closure(spec, None, str(tmp_path))
    assert d1.to_json() == d2.to_json()
    d3 = TransitionDiagram.from_json(spec, d1.to_json())
    assert [n.describe() for n in d3.nodes] == [n.describe() for n in d1.nodes]
    assert len(list(tmp_path.iterdir())) == 1
