"""Net intervals, characteristic vectors and the transition diagram.

Every net interval is described in its own normalized frame, where a
level-n interval of actual length L has normalized length L / rho^n.  A
neighbour at position a means that the interval occupies [a, a + length]
inside the normalized hull [0, delta] of one level-n image of the
attractor.  On the torus the root is [0, 1] with the delta integer
translates of the hull as neighbours; on the line the root is the hull
[0, delta] itself.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import lcm

from .errors import PathError, UndecidedAtCap
from .model import MeasureSpec
from .numberfield import AlgebraicNumber, nf_cmp
from .spectra import TransitionMatrix, path_product

__all__ = [
    "CharacteristicVector",
    "ChildEdge",
    "TransitionDiagram",
    "KOracle",
    "root_vector",
    "children",
    "closure",
    "net_intervals",
    "DEFAULT_CAPS",
]

CACHE_VERSION = 1
DEFAULT_CAPS = {"max_nodes": 5000, "max_depth": 200, "max_questions": 200_000}

_key = cmp_to_key(nf_cmp)


@dataclass(frozen=True)
class CharacteristicVector:
    length: AlgebraicNumber
    neighbours: tuple
    sibling: int = 1

    @property
    def reduced(self):
        return (self.length, self.neighbours)

    def describe(self, symbol="r"):
        nb = ", ".join(str(a) for a in self.neighbours)
        return f"({self.length}, ({nb}), {self.sibling})"

    def describe_reduced(self):
        nb = ", ".join(str(a) for a in self.neighbours)
        return f"({self.length}, ({nb}))"


@dataclass(frozen=True)
class ChildEdge:
    parent: int
    child: int
    position: int  # left-to-right index among the parent's children
    offset: AlgebraicNumber  # left endpoint in the parent's normalized frame
    digits: tuple  # digits[j][i] = s with T[j][i] = p_s, or -1


class KOracle:
    """Decides whether the attractor meets an open interval (u, v).

    0 and delta belong to the attractor, so any interval containing one of
    them in its interior is accepted, and any interval outside (0, delta)
    is rejected.  Otherwise the question is pulled back through every map;
    each pull-back multiplies the length by 1/rho, so the search ends.
    """

    def __init__(self, spec: MeasureSpec, max_questions=DEFAULT_CAPS["max_questions"]):
        self.spec = spec
        self.beta = spec.rho.inverse()
        self.delta = spec.delta
        self.digits = spec.digits
        self.max_questions = max_questions
        self.memo = {}
        self.asked = 0

    def _verdict(self, u, v):
        # True: accept, False: prune, None: undecided yet
        su, sv = u.sign(), v.sign()
        if sv <= 0:
            return False
        if su < 0:
            return True
        du, dv = (u - self.delta).sign(), (v - self.delta).sign()
        if du >= 0:
            return False
        if dv > 0:
            return True
        return None

    def __call__(self, u: AlgebraicNumber, v: AlgebraicNumber) -> bool:
        quick = self._verdict(u, v)
        if quick is not None:
            return quick
        start = (u, v)
        if start in self.memo:
            return self.memo[start]
        seen = {start}
        queue = deque([start])
        while queue:
            a, b = queue.popleft()
            for d in self.digits:
                q = ((a - d) * self.beta, (b - d) * self.beta)
                verdict = self._verdict(*q)
                if verdict is False:
                    continue
                if verdict is True or self.memo.get(q) is True:
                    self.memo[start] = True
                    return True
                if q in self.memo or q in seen:
                    continue
                seen.add(q)
                self.asked += 1
                if self.asked > self.max_questions:
                    raise UndecidedAtCap(
                        f"attractor intersection search exceeded {self.max_questions} questions"
                    )
                queue.append(q)
        for q in seen:
            self.memo[q] = False
        return False

    def export(self):
        return [[_enc(u), _enc(v), b] for (u, v), b in self.memo.items()]

    def load(self, rows):
        ctx = self.spec.field
        for u, v, b in rows:
            self.memo[(_dec(ctx, u), _dec(ctx, v))] = b


def root_vector(spec: MeasureSpec) -> CharacteristicVector:
    one = spec.field.one
    if spec.mode == "torus":
        n = spec.int_delta
        return CharacteristicVector(one, tuple(one * j for j in range(n)), 1)
    return CharacteristicVector(spec.delta, (spec.field.zero,), 1)


def _sorted_unique(values):
    return sorted(set(values), key=_key)


def reduced_children(spec: MeasureSpec, length, neighbours, oracle: KOracle):
    """Children of a reduced vector as (offset, length, neighbours, digit matrix)."""
    rho = spec.rho
    beta = oracle.beta
    rd = rho * spec.delta
    zero = spec.field.zero
    images = []
    for j, c in enumerate(neighbours):
        for s, d in enumerate(spec.digits):
            x = d - c
            images.append((x, x + rd, j, s))
    points = {zero, length}
    for x, y, _, _ in images:
        for p in (x, y):
            if p.sign() > 0 and (p - length).sign() < 0:
                points.add(p)
    points = _sorted_unique(points)
    out = []
    for h, h2 in zip(points, points[1:]):
        child_len = (h2 - h) * beta
        cands = {}
        for x, y, j, s in images:
            if (x - h).sign() <= 0 and (y - h2).sign() >= 0:
                v = (h - x) * beta
                cands.setdefault(v, []).append((j, s))
        kept = [v for v in cands if oracle(v, v + child_len)]
        if not kept:
            continue
        kept = _sorted_unique(kept)
        mat = [[-1] * len(kept) for _ in neighbours]
        for i, v in enumerate(kept):
            for j, s in cands[v]:
                mat[j][i] = s
        out.append((h, child_len, tuple(kept), tuple(tuple(r) for r in mat)))
    return out


def children(spec: MeasureSpec, parent: CharacteristicVector, oracle: KOracle | None = None):
    """Child vectors of ``parent`` with offsets and digit matrices.

    Returns a list of (offset, CharacteristicVector, digit matrix) in left
    to right order.
    """
    oracle = oracle or KOracle(spec)
    raw = reduced_children(spec, parent.length, parent.neighbours, oracle)
    return _with_siblings(raw)


def _with_siblings(raw):
    counts = {}
    out = []
    for h, ln, nb, mat in raw:
        r = counts.get((ln, nb), 0) + 1
        counts[(ln, nb)] = r
        out.append((h, CharacteristicVector(ln, nb, r), mat))
    return out


@dataclass
class TransitionDiagram:
    spec: MeasureSpec
    nodes: list
    edges: list  # edges[i] = list of ChildEdge out of node i
    depth: list
    truncated: bool = False
    truncation_reason: str = ""
    witness: list = field(default_factory=list)
    root: int = 0

    def __post_init__(self):
        self.reduced_index = {}
        self.reduced_of = []
        for nd in self.nodes:
            rid = self.reduced_index.setdefault(nd.reduced, len(self.reduced_index))
            self.reduced_of.append(rid)
        self._matrix_cache = {}
        self._edge_map = {(e.parent, e.child): e for es in self.edges for e in es}

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_reduced(self):
        return len(self.reduced_index)

    def reduced_label(self, node_id) -> int:
        """1-based reduced label in breadth-first discovery order."""
        return self.reduced_of[node_id] + 1

    def reduced_vectors(self):
        out = [None] * self.n_reduced
        for nd, rid in zip(self.nodes, self.reduced_of):
            if out[rid] is None:
                out[rid] = nd
        return out

    def nodes_with_reduced(self, label):
        return [i for i, r in enumerate(self.reduced_of) if r + 1 == label]

    def edge(self, parent, child) -> ChildEdge:
        try:
            return self._edge_map[(parent, child)]
        except KeyError:
            raise PathError(f"no edge {parent} -> {child}") from None

    def successors(self, node_id):
        return [e.child for e in self.edges[node_id]]

    @property
    def display_scale(self):
        if not self.spec.probs:
            return 1
        return lcm(*(p.denominator for p in self.spec.probs))

    def edge_matrix(self, e: ChildEdge, probs=None) -> TransitionMatrix:
        probs = probs or self.spec.probs
        if not probs:
            raise ValueError("probabilities are required for transition matrices")
        key = (e.parent, e.child, tuple(probs))
        m = self._matrix_cache.get(key)
        if m is None:
            zero = Fraction(0)
            m = TransitionMatrix(
                [[probs[s] if s >= 0 else zero for s in row] for row in e.digits],
                scale=lcm(*(Fraction(p).denominator for p in probs)),
            )
            self._matrix_cache[key] = m
        return m

    def matrix(self, parent, child, probs=None) -> TransitionMatrix:
        return self.edge_matrix(self.edge(parent, child), probs)

    def path_matrices(self, path, probs=None):
        if len(path) < 2:
            raise PathError("a path needs at least two nodes")
        return [self.matrix(a, b, probs) for a, b in zip(path, path[1:])]

    def path_matrix(self, path, probs=None) -> TransitionMatrix:
        return path_product(self.path_matrices(path, probs))

    def edge_list(self):
        return [e for es in self.edges for e in es]

    def summary(self):
        return {
            "nodes": self.n_nodes,
            "reduced": self.n_reduced,
            "edges": sum(len(es) for es in self.edges),
            "truncated": self.truncated,
            "reason": self.truncation_reason,
        }

    # -- serialization ------------------------------------------------------

    def to_json(self):
        return {
            "version": CACHE_VERSION,
            "spec": self.spec.fingerprint(),
            "nodes": [
                [_enc(n.length), [_enc(a) for a in n.neighbours], n.sibling] for n in self.nodes
            ],
            "edges": [
                [[e.child, e.position, _enc(e.offset), [list(r) for r in e.digits]] for e in es]
                for es in self.edges
            ],
            "depth": self.depth,
            "truncated": self.truncated,
            "reason": self.truncation_reason,
            "witness": self.witness,
        }

    @classmethod
    def from_json(cls, spec: MeasureSpec, data):
        if data.get("version") != CACHE_VERSION or data.get("spec") != spec.fingerprint():
            raise ValueError("cache entry does not match this spec")
        ctx = spec.field
        nodes = [
            CharacteristicVector(_dec(ctx, ln), tuple(_dec(ctx, a) for a in nb), r)
            for ln, nb, r in data["nodes"]
        ]
        edges = [
            [
                ChildEdge(i, c, pos, _dec(ctx, off), tuple(tuple(r) for r in dm))
                for c, pos, off, dm in es
            ]
            for i, es in enumerate(data["edges"])
        ]
        return cls(spec, nodes, edges, data["depth"], data["truncated"], data["reason"], data["witness"])


def _enc(x: AlgebraicNumber):
    return [str(c) for c in x.coeffs]


def _dec(ctx, cs):
    from .numberfield import AlgebraicNumber as _A

    return _A(ctx, tuple(Fraction(c) for c in cs))


def closure(spec: MeasureSpec, caps=None, oracle: KOracle | None = None) -> TransitionDiagram:
    """Breadth-first closure of the transition diagram from the root.

    Nodes are full characteristic vectors; the children of a node depend
    only on its reduced form and are computed once per reduced form.  If
    a cap is hit the partial diagram is returned with ``truncated`` set.
    """
    caps = {**DEFAULT_CAPS, **(caps or {})}
    oracle = oracle or KOracle(spec, caps["max_questions"])
    root = root_vector(spec)
    nodes = [root]
    index = {root: 0}
    depth = [0]
    edges = [[]]
    expanded = [False]
    by_reduced = {}
    queue = deque([0])
    truncated, reason = False, ""
    min_len = {0: float(root.length)}
    while queue:
        i = queue.popleft()
        if depth[i] >= caps["max_depth"]:
            truncated, reason = True, f"max_depth={caps['max_depth']} reached"
            break
        node = nodes[i]
        try:
            kids = by_reduced.get(node.reduced)
            if kids is None:
                raw = reduced_children(spec, node.length, node.neighbours, oracle)
                kids = _with_siblings(raw)
                by_reduced[node.reduced] = kids
        except UndecidedAtCap as exc:
            truncated, reason = True, str(exc)
            break
        out = []
        stop = False
        for pos, (h, cv, mat) in enumerate(kids):
            cid = index.get(cv)
            if cid is None:
                if len(nodes) >= caps["max_nodes"]:
                    truncated, reason = True, f"max_nodes={caps['max_nodes']} reached"
                    stop = True
                    break
                cid = len(nodes)
                nodes.append(cv)
                index[cv] = cid
                depth.append(depth[i] + 1)
                edges.append([])
                expanded.append(False)
                queue.append(cid)
                d = depth[i] + 1
                min_len[d] = min(min_len.get(d, float("inf")), float(cv.length))
            out.append(ChildEdge(i, cid, pos, h, mat))
        if stop:
            break
        edges[i] = out
        expanded[i] = True
    witness = []
    if truncated:
        witness = [
            {"depth": d, "min_normalized_length": min_len[d]} for d in sorted(min_len)
        ]
        witness.append({"unexpanded_nodes": sum(1 for e in expanded if not e)})
    return TransitionDiagram(spec, nodes, edges, depth, truncated, reason, witness)


def net_intervals(diagram: TransitionDiagram, n: int):
    """All level-n net intervals as (node path, left endpoint, actual length).

    The left endpoint is in actual coordinates (the torus is [0, 1)).
    """
    spec = diagram.spec
    rho = spec.rho
    out = [([diagram.root], spec.field.zero)]
    scale = spec.field.one
    for _ in range(n):
        nxt = []
        for path, left in out:
            for e in diagram.edges[path[-1]]:
                nxt.append((path + [e.child], left + e.offset * scale))
        if diagram.truncated and not nxt:
            break
        out = nxt
        scale = scale * rho
    return [(p, left, diagram.nodes[p[-1]].length * scale) for p, left in out]


# -- on-disk cache ------------------------------------------------------------


def cache_key(spec: MeasureSpec, caps) -> str:
    caps = {**DEFAULT_CAPS, **(caps or {})}
    text = spec.fingerprint() + "|" + json.dumps(caps, sort_keys=True) + f"|v{CACHE_VERSION}"
    return hashlib.sha256(text.encode()).hexdigest()[:32]


def cached_closure(spec: MeasureSpec, caps=None, cache_dir=None) -> TransitionDiagram:
    """closure() backed by a JSON file per spec and caps in ``cache_dir``."""
    if cache_dir is None:
        return closure(spec, caps)
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"diagram-{cache_key(spec, caps)}.json")
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        try:
            return TransitionDiagram.from_json(spec, data["diagram"])
        except (ValueError, KeyError):
            pass
    caps_full = {**DEFAULT_CAPS, **(caps or {})}
    oracle = KOracle(spec, caps_full["max_questions"])
    diagram = closure(spec, caps, oracle)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump({"diagram": diagram.to_json(), "k_memo": oracle.export()}, fh, sort_keys=True)
    os.replace(tmp, path)
    return diagram
