"""Local dimensions from the transition diagram.

A spectral value is s = sp(M)^(1/L) for a path matrix M over L steps; the
matching dimension is log(s) / log(rho).  Because log(rho) < 0, a larger
spectral value means a smaller dimension.  Every comparison below is done
exactly on spectral values; logarithms are only taken for display.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .classes import ClassReport, LoopClass, diagram_graph
from .errors import NotInSupport, PathError, SpecError
from .model import MeasureSpec, spec_report
from .netgen import TransitionDiagram
from .numberfield import AlgebraicNumber
from .spectra import TransitionMatrix, compare_spectral_values, spectral_radius

__all__ = [
    "SpectralValue",
    "PeriodicPoint",
    "InnerInterval",
    "BoundValue",
    "OuterInterval",
    "DimensionReport",
    "periodic_dim",
    "inner_interval",
    "outer_interval",
    "sss_interval",
    "point_symbolic",
    "isolated_report",
    "report_csv",
    "report_json",
]

REL_TOL = Fraction(1, 10**24)
mpmath.mp.dps = 40


def log_rho(spec: MeasureSpec):
    return mpmath.log(spec.field.to_mpf(spec.rho, 40))


class SpectralValue:
    """sp(matrix) ** (1 / steps), bracketed exactly."""

    __slots__ = ("matrix", "steps", "bracket")

    def __init__(self, matrix: TransitionMatrix, steps: int):
        if steps < 1:
            raise ValueError("steps must be positive")
        self.matrix = matrix
        self.steps = steps
        self.bracket = spectral_radius(matrix, rel_tol=REL_TOL)

    @classmethod
    def of_number(cls, q, steps):
        return cls(TransitionMatrix([[Fraction(q)]]), steps)

    def value(self):
        """Midpoint estimate as an mpmath number."""
        b = self.bracket
        return _mpf(b.mid) ** (mpmath.mpf(1) / self.steps)

    def bounds(self):
        b = self.bracket
        e = mpmath.mpf(1) / self.steps
        return _mpf(b.lo) ** e, _mpf(b.hi) ** e

    def is_zero(self):
        return self.bracket.hi == 0

    def cmp(self, other: "SpectralValue") -> int:
        """Exact comparison of the two spectral values."""
        # cheap separation first
        a_lo, a_hi = self.bounds()
        b_lo, b_hi = other.bounds()
        if a_lo > b_hi * (1 + mpmath.mpf(10) ** -20):
            return 1
        if a_hi * (1 + mpmath.mpf(10) ** -20) < b_lo:
            return -1
        return compare_spectral_values(self.matrix, self.steps, other.matrix, other.steps)

    def dim(self, spec: MeasureSpec):
        v = self.value()
        if v <= 0:
            return mpmath.inf
        return mpmath.log(v) / log_rho(spec)

    def dim_bounds(self, spec: MeasureSpec):
        lo, hi = self.bounds()
        lr = log_rho(spec)
        d_lo = mpmath.log(hi) / lr
        d_hi = mpmath.log(lo) / lr if lo > 0 else mpmath.inf
        return d_lo, d_hi


def _float_value(m: TransitionMatrix, steps: int) -> float:
    a = np.array(m.to_float())
    return float(max(abs(np.linalg.eigvals(a)))) ** (1.0 / steps)


def _mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


# -- periodic points ------------------------------------------------------------


@dataclass
class PeriodicPoint:
    cycle: tuple
    preamble: tuple
    value: SpectralValue
    dim: float
    dim_bounds: tuple

    @property
    def length(self):
        return len(self.cycle) - 1


def _check_path(diagram: TransitionDiagram, path):
    for a, b in zip(path, path[1:]):
        diagram.edge(a, b)


def periodic_dim(diagram: TransitionDiagram, cycle, probs=None, preamble=()) -> PeriodicPoint:
    """Local dimension at the periodic point with the given cycle of node ids.

    ``cycle`` lists the nodes with the first repeated at the end.
    """
    cycle = tuple(cycle)
    if len(cycle) < 2 or cycle[0] != cycle[-1]:
        raise PathError("a cycle must start and end at the same node")
    _check_path(diagram, cycle)
    if preamble:
        _check_path(diagram, tuple(preamble) + (cycle[0],))
    m = diagram.path_matrix(cycle, probs)
    sv = SpectralValue(m, len(cycle) - 1)
    spec = diagram.spec
    lo, hi = sv.dim_bounds(spec)
    return PeriodicPoint(cycle, tuple(preamble), sv, float(sv.dim(spec)), (float(lo), float(hi)))


# -- inner intervals ---------------------------------------------------------------


@dataclass
class InnerInterval:
    dim_lo: float
    dim_hi: float
    max_value: SpectralValue  # gives dim_lo
    min_value: SpectralValue  # gives dim_hi
    witness_lo: tuple  # cycle attaining dim_lo
    witness_hi: tuple
    n_cycles: int
    partial: bool = False
    values: list = field(default_factory=list, repr=False)  # (cycle, float value)


def class_subgraph(diagram: TransitionDiagram, cls: LoopClass):
    g = diagram_graph(diagram)
    return g.subgraph(cls.nodes).copy()


def class_cycles(diagram, cls, max_len, max_cycles=200_000):
    """Primitive closed walks inside the class with at most ``max_len`` edges.

    Walks may revisit nodes.  Each is listed once, in its lexicographically
    least rotation, with the first node repeated at the end; proper powers
    of shorter walks are skipped since they have the same spectral value.
    """
    members = set(cls.nodes)
    succ = {i: sorted(c for c in diagram.successors(i) if c in members) for i in members}
    out = []
    partial = False

    def canonical(w):
        n = len(w)
        for k in range(1, n):
            r = w[k:] + w[:k]
            if r < w:
                return False
            if r == w:
                return False  # proper power
        return True

    for s in sorted(members):
        stack = [(s, (s,))]
        while stack:
            node, walk = stack.pop()
            for c in succ[node]:
                if c < s:
                    continue  # the least node starts the canonical rotation
                if c == s:
                    if canonical(walk):
                        out.append(walk + (s,))
                        if len(out) >= max_cycles:
                            partial = True
                            break
                if len(walk) < max_len:
                    stack.append((c, walk + (c,)))
            if partial:
                break
        if partial:
            break
    out.sort(key=lambda c: (len(c), c))
    return out, partial


def inner_interval(diagram: TransitionDiagram, cls: LoopClass, max_cycle_len=6, probs=None, max_cycles=200_000):
    """Range of periodic-point dimensions over closed walks of bounded length.

    Periodic dimensions are dense in the dimension set of a positive loop
    class, so this is an inner approximation of that set.
    """
    cycles, partial = class_cycles(diagram, cls, max_cycle_len, max_cycles)
    if not cycles:
        raise PathError("loop class has no cycle within the length bound")
    # rank by floating point, then settle the extremes exactly
    approx = [(c, _float_value(diagram.path_matrix(c, probs), len(c) - 1)) for c in cycles]
    top = max(v for _, v in approx)
    bottom = min(v for _, v in approx)
    near_top = [c for c, v in approx if v >= top * (1 - 1e-9)]
    near_bottom = [c for c, v in approx if v <= bottom * (1 + 1e-9)]
    exact = {c: SpectralValue(diagram.path_matrix(c, probs), len(c) - 1) for c in set(near_top + near_bottom)}
    best_hi = near_top[0], exact[near_top[0]]
    for c in near_top[1:]:
        if exact[c].cmp(best_hi[1]) > 0:
            best_hi = c, exact[c]
    best_lo = near_bottom[0], exact[near_bottom[0]]
    for c in near_bottom[1:]:
        if exact[c].cmp(best_lo[1]) < 0:
            best_lo = c, exact[c]
    vals = approx
    spec = diagram.spec
    return InnerInterval(
        float(best_hi[1].dim(spec)),
        float(best_lo[1].dim(spec)),
        best_hi[1],
        best_lo[1],
        best_hi[0],
        best_lo[0],
        len(cycles),
        partial,
        vals,
    )


# -- outer intervals -----------------------------------------------------------------


@dataclass
class BoundValue:
    """A norm bound m over ``steps`` steps: the spectral bound is m ** (1/steps)."""

    norm: str
    subset: tuple | None  # 1-based positions, None for the whole matrix
    steps: int
    value: Fraction
    method: str  # "exact", or a note that the depth was reduced
    paths: int = 0

    def spectral(self) -> SpectralValue:
        return SpectralValue.of_number(self.value, self.steps)

    def describe(self):
        where = "all" if self.subset is None else "{" + ",".join(map(str, self.subset)) + "}"
        return f"{self.norm} on {where}, depth {self.steps} ({self.method})"


@dataclass
class OuterInterval:
    dim_lo: float
    dim_hi: float
    lower: BoundValue | None  # bound on spectral values from below (gives dim_hi)
    upper: BoundValue  # from above (gives dim_lo)
    warnings: list = field(default_factory=list)

    def contains_value(self, sv: SpectralValue) -> bool:
        if self.upper.spectral().cmp(sv) < 0:
            return False
        if self.lower is not None and self.lower.spectral().cmp(sv) > 0:
            return False
        return True


class _ClassMatrices:
    """Integer-scaled internal edge matrices of a loop class."""

    def __init__(self, diagram: TransitionDiagram, cls: LoopClass, probs=None):
        self.members = sorted(cls.nodes)
        mem = set(self.members)
        probs = probs or diagram.spec.probs
        if not probs:
            raise SpecError("probabilities are required for dimension bounds")
        self.scale = 1
        for p in probs:
            self.scale = self.scale * Fraction(p).denominator // _gcd(self.scale, Fraction(p).denominator)
        self.width = {i: len(diagram.nodes[i].neighbours) for i in mem}
        self.out = {i: [] for i in mem}
        self.inc = {i: [] for i in mem}
        for i in mem:
            for e in diagram.edges[i]:
                if e.child in mem:
                    m = diagram.edge_matrix(e, probs)
                    ints = tuple(tuple(int(x * self.scale) for x in r) for r in m.entries)
                    self.out[i].append((e.child, ints))
                    self.inc[e.child].append((i, ints))

    def count_paths(self, n):
        cnt = {i: 1 for i in self.members}
        total = len(self.members)
        for _ in range(n):
            new = {i: 0 for i in self.members}
            for i in self.members:
                for c, _m in self.out[i]:
                    new[c] += cnt[i]
            cnt = new
            total += sum(cnt.values())
        return total

    def common_width(self):
        return min(self.width.values())


def _gcd(a, b):
    from math import gcd

    return gcd(a, b)


def _vec_mat(v, m):
    cols = len(m[0])
    out = [0] * cols
    for a, row in zip(v, m):
        if a:
            for j in range(cols):
                if row[j]:
                    out[j] += a * row[j]
    return out


def _mat_vec(m, w):
    return [sum(a * b for a, b in zip(row, w) if a and b) for row in m]


def _restricted(rows_j, J, kind):
    # rows_j: the rows J of a product; returns min row or column sum of A[J, J]
    sub = [[r[j] for j in J] for r in rows_j]
    if kind == "row":
        return min(sum(r) for r in sub)
    return min(sum(c) for c in zip(*sub))


def _enumerate(cm: _ClassMatrices, n, want):
    """Exact extremes over all internal paths with n edges.

    ``want`` maps a key to (kind, J) where kind is one of 'lower-col',
    'lower-row', 'upper-col', 'upper-row', 'upper-sum' and J a tuple of
    0-based positions or None.  Returns key -> integer extreme (scaled).
    """
    res = {}
    # forward: rows J (or column sums) of the product
    fwd_keys = [k for k, (kind, J) in want.items() if not (kind == "lower-row" and J is None) and kind != "upper-row"]
    bwd_keys = [k for k, (kind, J) in want.items() if (kind == "lower-row" and J is None) or kind == "upper-row"]
    if fwd_keys:
        subsets = {want[k][1] for k in fwd_keys}
        need_full_rows = any(J is not None for J in subsets)
        need_colsum = any(want[k][1] is None for k in fwd_keys)

        def visit(node, depth, colsum, rows):
            if depth == n:
                for k in fwd_keys:
                    kind, J = want[k]
                    if J is None:
                        v = min(colsum) if kind == "lower-col" else (max(colsum) if kind == "upper-col" else sum(colsum))
                    else:
                        v = _restricted([rows[j] for j in J], J, "row" if kind == "lower-row" else "col")
                    if k not in res:
                        res[k] = v
                    elif kind.startswith("lower"):
                        res[k] = min(res[k], v)
                    else:
                        res[k] = max(res[k], v)
                return
            for c, m in cm.out[node]:
                nc = _vec_mat(colsum, m) if need_colsum else None
                nr = [_vec_mat(r, m) for r in rows] if need_full_rows else None
                visit(c, depth + 1, nc, nr)

        for s in cm.members:
            w = cm.width[s]
            ident = [[1 if i == j else 0 for j in range(w)] for i in range(w)]
            visit(s, 0, [1] * w if need_colsum else None, ident if need_full_rows else None)
    if bwd_keys:

        def back(node, depth, rowsum):
            if depth == n:
                for k in bwd_keys:
                    kind, _J = want[k]
                    v = min(rowsum) if kind == "lower-row" else max(rowsum)
                    if k not in res:
                        res[k] = v
                    elif kind.startswith("lower"):
                        res[k] = min(res[k], v)
                    else:
                        res[k] = max(res[k], v)
                return
            for p, m in cm.inc[node]:
                back(p, depth + 1, _mat_vec(m, rowsum))

        for t in cm.members:
            back(t, 0, [1] * cm.width[t])
    return res


def _bound(cm, n, kind, J, path_cap):
    """Exact extreme at depth n, or at the largest depth whose path tree fits the cap."""
    depth = n
    while depth > 1 and cm.count_paths(depth) > path_cap:
        depth -= 1
    v = _enumerate(cm, depth, {0: (kind, J)})[0]
    norm = kind.split("-")[1]
    if norm != "sum":
        norm += "-min" if kind.startswith("lower") else "-max"
    return BoundValue(
        norm,
        None if J is None else tuple(j + 1 for j in J),
        depth,
        Fraction(v, cm.scale**depth),
        "exact" if depth == n else f"reduced from depth {n}",
        cm.count_paths(depth),
    )


def search_subset(cm: _ClassMatrices, depth: int, kinds=("col", "row")):
    """Best (kind, J) for the lower bound at a small search depth.

    Every nonempty set of positions shared by all nodes of the class is
    tried when there are at most 8 of them; otherwise pairs and the full
    set only.
    """
    w = cm.common_width()
    positions = range(w)
    if w <= 8:
        subsets = [None] + [c for r in range(1, w + 1) for c in itertools.combinations(positions, r)]
    else:
        subsets = [None] + list(itertools.combinations(positions, 2))
    want = {}
    for kind in kinds:
        for J in subsets:
            want[(kind, J)] = ("lower-" + kind, J)
    res = _enumerate(cm, depth, want)
    best = max(res.items(), key=lambda kv: (kv[1], kv[0][1] is None))
    return best[0]


def outer_interval(
    diagram: TransitionDiagram,
    cls: LoopClass,
    depth_lo=5,
    depth_hi=5,
    lower_norm="col",
    upper_norm="col",
    subset=None,
    probs=None,
    path_cap=1_000_000,
    search_depth=6,
) -> OuterInterval:
    """Certified range containing every periodic-point dimension in ``cls``.

    Lower spectral bound: minimum over internal paths of length
    ``depth_lo`` of a supermultiplicative norm (minimum column or row sum,
    optionally on the principal submatrix at 1-based ``subset`` positions,
    taken at the same positions at every node).  Upper spectral bound:
    maximum over paths of length ``depth_hi`` of a submultiplicative norm
    (maximum column sum, maximum row sum or total sum).  ``lower_norm`` /
    ``upper_norm`` set to ``auto`` pick the tightest available choice; with
    ``subset='search'`` the positions are chosen by search at a small
    depth.  Paths are enumerated exactly; when the path tree has more than
    ``path_cap`` nodes the depth is reduced until it fits, which keeps the
    bound valid but looser.
    """
    cm = _ClassMatrices(diagram, cls, probs)
    warnings = []
    w = cm.common_width()
    if subset == "search" or lower_norm == "auto":
        kinds = ("col", "row") if lower_norm == "auto" else (lower_norm,)
        if subset == "search" or subset is None and lower_norm == "auto":
            lower_norm, J = search_subset(cm, min(search_depth, depth_lo), kinds)
        else:
            J = None if subset is None else tuple(j - 1 for j in subset)
            lower_norm = max(
                kinds, key=lambda k: _enumerate(cm, min(search_depth, depth_lo), {0: ("lower-" + k, J)})[0]
            )
    else:
        J = None if subset is None else tuple(j - 1 for j in subset)
    if J is not None and (min(J) < 0 or max(J) >= w):
        raise PathError(f"subset positions must lie in 1..{w} for this class")
    lower = _bound(cm, depth_lo, "lower-" + lower_norm, J, path_cap)
    if lower.value == 0:
        warnings.append("lower norm bound is zero; only the lower dimension bound is informative")
    if upper_norm == "auto":
        cands = [_bound(cm, depth_hi, "upper-" + k, None, path_cap) for k in ("col", "row", "sum")]
        upper = min(cands, key=lambda b: (b.spectral().value(), b.norm))
    else:
        upper = _bound(cm, depth_hi, "upper-" + upper_norm, None, path_cap)
    for b in (lower, upper):
        if b.method != "exact":
            warnings.append(f"{b.describe()}: path count above the cap of {path_cap}, depth reduced")
    spec = diagram.spec
    up = upper.spectral()
    dim_lo = float(up.dim(spec))
    dim_hi = float(lower.spectral().dim(spec)) if lower.value > 0 else float("inf")
    return OuterInterval(dim_lo, dim_hi, lower if lower.value > 0 else None, upper, warnings)


# -- strong separation closed form --------------------------------------------------


def sss_interval(spec: MeasureSpec):
    """[log max p / log rho, log min p / log rho] under strong separation."""
    rep = spec_report(spec)
    if not rep.strong_separation:
        raise SpecError("strong separation fails; use the general pipeline instead")
    if not spec.probs:
        raise SpecError("probabilities are required")
    lr = log_rho(spec)
    return (
        float(mpmath.log(_mpf(max(spec.probs))) / lr),
        float(mpmath.log(_mpf(min(spec.probs))) / lr),
    )


# -- pointwise descent -----------------------------------------------------------------


@dataclass
class PointResult:
    x: AlgebraicNumber
    paths: list  # one node path per representation
    periodic: list  # PeriodicPoint or None per representation
    exact: bool
    dim: float | None  # exact value when periodic
    estimate: float  # from the product norms at the final depth
    estimate_adjacent: float | None  # M_n variant using neighbouring intervals
    depth: int
    boundary: bool


class _Track:
    __slots__ = ("path", "xn", "seen", "cycle")

    def __init__(self, path, xn, seen):
        self.path = path
        self.xn = xn
        self.seen = seen
        self.cycle = None


def _child_span(diagram, e):
    rho = diagram.spec.rho
    return e.offset, e.offset + diagram.nodes[e.child].length * rho


def point_symbolic(diagram: TransitionDiagram, x, depth=40, probs=None) -> PointResult:
    """Follow the net intervals containing ``x`` down the diagram.

    Returns the node path (two when x is a common endpoint), the exact
    periodic dimension when the path becomes periodic, and the estimate
    log ||T(path)|| / (n log rho) at the final depth together with the
    variant summing the two adjacent intervals.
    """
    spec = diagram.spec
    ctx = spec.field
    x = ctx.element(x)
    rho = spec.rho
    beta = rho.inverse()
    if spec.mode == "torus":
        # reduce modulo 1 using a float floor, corrected exactly
        k = int(mpmath.floor(ctx.to_mpf(x)))
        x = x - k
        while x.sign() < 0:
            x = x + 1
        while (x - 1).sign() >= 0:
            x = x - 1
    elif x.sign() < 0 or (x - spec.delta).sign() > 0:
        raise NotInSupport(f"{x} lies outside the convex hull [0, {spec.delta}]")
    root = diagram.root
    tracks = [_Track([root], x, {(root, x): 0})]
    if spec.mode == "torus" and x.is_zero():
        # 0 and 1 are the same point: also follow the right end of the root
        tracks.append(_Track([root], diagram.nodes[root].length, {(root, diagram.nodes[root].length): 0}))
    for _ in range(depth):
        new = []
        for t in tracks:
            if t.cycle is not None:
                new.append(t)
                continue
            node = t.path[-1]
            hits = []
            for e in diagram.edges[node]:
                a, b = _child_span(diagram, e)
                if (t.xn - a).sign() >= 0 and (t.xn - b).sign() <= 0:
                    hits.append((e, a))
            for e, a in hits:
                xn = (t.xn - a) * beta
                path = t.path + [e.child]
                key = (e.child, xn)
                seen = dict(t.seen)
                nt = _Track(path, xn, seen)
                if key in seen:
                    nt.cycle = (seen[key], len(path) - 1)
                else:
                    seen[key] = len(path) - 1
                new.append(nt)
        if not new:
            raise NotInSupport(f"{x} is not in the support (falls into a gap)")
        # deduplicate identical tracks
        uniq = {}
        for t in new:
            uniq.setdefault((tuple(t.path), t.xn), t)
        tracks = list(uniq.values())
        if all(t.cycle is not None for t in tracks):
            break
    lr = log_rho(spec)
    periodic = []
    for t in tracks:
        if t.cycle is None:
            periodic.append(None)
            continue
        i, j = t.cycle
        periodic.append(periodic_dim(diagram, t.path[i : j + 1], probs, tuple(t.path[:i])))
    exact = all(p is not None for p in periodic)
    dim = None
    if exact:
        # the larger spectral value dominates the measure of small balls
        best = periodic[0]
        for p in periodic[1:]:
            if p.value.cmp(best.value) > 0:
                best = p
        dim = best.dim
    # norm estimates at the requested depth along the first track
    probs_ = probs or spec.probs
    n = depth
    path = _extend_periodic(tracks[0], n)
    q = _q_norm(diagram, path, probs_)
    est = float(mpmath.log(_mpf(q)) / (len(path) - 1) / lr) if len(path) > 1 else float("nan")
    adj = _adjacent_estimate(diagram, path, probs_, tracks)
    return PointResult(
        x,
        [t.path for t in tracks],
        periodic,
        exact,
        dim,
        est,
        adj,
        len(path) - 1,
        len(tracks) > 1,
    )


def _extend_periodic(track, n):
    path = list(track.path)
    if track.cycle is not None:
        i, j = track.cycle
        loop = path[i + 1 : j + 1]
        while len(path) - 1 < n:
            path.extend(loop)
    return path[: n + 1]


def _q_vector(diagram, path, probs):
    root = diagram.root
    q = [Fraction(1)] * len(diagram.nodes[root].neighbours)
    for a, b in zip(path, path[1:]):
        m = diagram.matrix(a, b, probs)
        q = [sum((qi * m.entries[i][j] for i, qi in enumerate(q) if qi), Fraction(0)) for j in range(m.cols)]
    return q


def _q_norm(diagram, path, probs):
    return sum(_q_vector(diagram, path, probs))


def _adjacent_estimate(diagram, path, probs, tracks):
    """log M_n / (n log rho) with M_n the total over the interval and its neighbours."""
    n = len(path) - 1
    if n < 1:
        return None
    spec = diagram.spec
    torus = spec.mode == "torus"
    root = diagram.root
    qroot = [Fraction(1)] * len(diagram.nodes[root].neighbours)
    # state: (node, q) for left, centre, right; None when no neighbour
    left = (root, qroot) if torus else None
    right = (root, qroot) if torus else None
    centre = (root, qroot)

    def step(state, child_edge):
        node, q = state
        m = diagram.edge_matrix(child_edge, probs)
        return (child_edge.child, [sum((qi * m.entries[i][j] for i, qi in enumerate(q) if qi), Fraction(0)) for j in range(m.cols)])

    for a, b in zip(path, path[1:]):
        kids = diagram.edges[a]
        pos = next(i for i, e in enumerate(kids) if e.child == b)
        new_centre = step(centre, kids[pos])
        if pos > 0:
            new_left = step(centre, kids[pos - 1])
        elif left is not None:
            new_left = step(left, diagram.edges[left[0]][-1])
        else:
            new_left = None
        if pos < len(kids) - 1:
            new_right = step(centre, kids[pos + 1])
        elif right is not None:
            new_right = step(right, diagram.edges[right[0]][0])
        else:
            new_right = None
        left, centre, right = new_left, new_centre, new_right
    total = sum(centre[1])
    for s in (left, right):
        if s is not None:
            total += sum(s[1])
    return float(mpmath.log(_mpf(total)) / n / log_rho(spec))


# -- isolated points ----------------------------------------------------------------------


@dataclass
class ClassDims:
    cls: LoopClass
    inner: InnerInterval | None
    outer: OuterInterval | None
    verdict: str = ""  # for non-essential classes: isolated | inside | undecided
    note: str = ""


@dataclass
class DimensionReport:
    spec: MeasureSpec
    classes: list  # ClassDims
    warnings: list = field(default_factory=list)

    @property
    def essential(self):
        return [c for c in self.classes if c.cls.essential]

    @property
    def candidates(self):
        return [c for c in self.classes if not c.cls.essential]

    def isolated_dims(self):
        """Distinct isolated values; classes with equal spectral values count once."""
        vals = []
        for c in self.candidates:
            if c.verdict == "isolated" and c.inner is not None:
                for v in (c.inner.max_value, c.inner.min_value):
                    if not any(v.cmp(w) == 0 for w in vals):
                        vals.append(v)
        return sorted(float(v.dim(self.spec)) for v in vals)

    def components(self):
        """Number of pieces in the bounding set: merged essential outer intervals plus isolated points."""
        spans = sorted((c.outer.dim_lo, c.outer.dim_hi) for c in self.essential if c.outer is not None)
        merged = []
        for lo, hi in spans:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return len(merged) + len(self.isolated_dims())

    @property
    def any_undecided(self):
        return any(c.verdict == "undecided" for c in self.candidates)


def isolated_report(
    diagram: TransitionDiagram,
    report: ClassReport,
    probs=None,
    cycle_len=6,
    depth_lo=8,
    depth_hi=8,
    lower_norm="auto",
    upper_norm="auto",
    subset="search",
    path_cap=1_000_000,
) -> DimensionReport:
    """Inner and outer intervals per class and a verdict for every non-essential class.

    A non-essential class is ``isolated`` when its periodic dimensions lie
    outside every essential outer interval, ``inside`` when they lie in
    some essential inner interval, and ``undecided`` otherwise.
    """
    out = []
    warnings = list(report.warnings)
    for c in report.classes:
        inner = inner_interval(diagram, c, cycle_len, probs)
        outer = None
        if c.essential:
            outer = outer_interval(
                diagram, c, depth_lo, depth_hi, lower_norm, upper_norm, subset, probs, path_cap
            )
            warnings.extend(outer.warnings)
            if not (outer.contains_value(inner.max_value) and outer.contains_value(inner.min_value)):
                warnings.append(f"class {c.label()}: inner interval not inside the outer bound")
        out.append(ClassDims(c, inner, outer))
    ess = [cd for cd in out if cd.cls.essential]
    for cd in out:
        if cd.cls.essential:
            continue
        ends = [cd.inner.max_value, cd.inner.min_value]
        if any(all(_inside_inner(e, v) for v in ends) for e in ess):
            cd.verdict = "inside"
        elif all(not e.outer.contains_value(v) for v in ends for e in ess):
            cd.verdict = "isolated"
        else:
            cd.verdict = "undecided"
        if not cd.cls.simple:
            cd.note = "endpoints of the inner interval were compared"
    return DimensionReport(diagram.spec, out, warnings)


def _inside_inner(e: ClassDims, v: SpectralValue) -> bool:
    return e.inner.min_value.cmp(v) <= 0 <= e.inner.max_value.cmp(v)


# -- export ------------------------------------------------------------------------------------


def _fmt(x):
    if x is None:
        return ""
    if x == float("inf"):
        return "inf"
    return f"{x:.9f}"


def report_rows(diagram: TransitionDiagram, rep: DimensionReport):
    rows = []
    for cd in rep.classes:
        c = cd.cls
        lab = lambda path: " ".join(str(diagram.reduced_label(i)) for i in path)
        rows.append(
            {
                "classes": " ".join(map(str, c.reduced)),
                "nodes": " ".join(map(str, c.nodes)),
                "kind": c.kind,
                "positivity": c.positivity,
                "inner_lo": _fmt(cd.inner.dim_lo if cd.inner else None),
                "inner_hi": _fmt(cd.inner.dim_hi if cd.inner else None),
                "outer_lo": _fmt(cd.outer.dim_lo if cd.outer else None),
                "outer_hi": _fmt(cd.outer.dim_hi if cd.outer else None),
                "witness_lo": lab(cd.inner.witness_lo) if cd.inner else "",
                "witness_hi": lab(cd.inner.witness_hi) if cd.inner else "",
                "verdict": cd.verdict,
            }
        )
    return rows


def report_csv(diagram: TransitionDiagram, rep: DimensionReport) -> str:
    rows = report_rows(diagram, rep)
    buf = io.StringIO()
    fields = list(rows[0].keys()) if rows else ["classes"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


SCHEMA_VERSION = 1


def report_json(diagram: TransitionDiagram, classes: ClassReport, rep: DimensionReport | None) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "spec": {
            "min_poly": list(diagram.spec.field.int_poly),
            "digits": [str(d) for d in diagram.spec.digits],
            "probs": [str(p) for p in diagram.spec.probs],
            "mode": diagram.spec.mode,
            "delta": str(diagram.spec.delta),
        },
        "report": spec_report(diagram.spec).as_dict(),
        "diagram": {
            **diagram.summary(),
            "reduced_vectors": [v.describe_reduced() for v in diagram.reduced_vectors()],
        },
        "classes": [
            {
                "reduced": list(c.reduced),
                "nodes": list(c.nodes),
                "kind": c.kind,
                "positivity": c.positivity,
                "witness": [diagram.reduced_label(i) for i in c.witness],
                "row_nonzero": c.row_nonzero,
            }
            for c in classes.classes
        ],
        "dimensions": report_rows(diagram, rep) if rep else None,
        "isolated": [_fmt(x) for x in rep.isolated_dims()] if rep else None,
        "warnings": (rep.warnings if rep else classes.warnings),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
