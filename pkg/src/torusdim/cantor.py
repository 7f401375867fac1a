"""Transition matrices of complete Cantor-like measures on the torus.

For ratio 1/d and digits j(d-1)/d (j in Lambda, 0 and k in Lambda) the
torus diagram, when complete, has the single reduced vector
(1, (0, 1, ..., k-1)) with d children; child l carries the k x k matrix
T(l) built by ``cantor_T``.  Regrouping indices by residue mod (d-1)
turns each T(l) into a (d-1) x (d-1) block matrix whose nonzero blocks
sit on one block diagonal, which is what the bounds here exploit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath

from .errors import SpecError
from .spectra import TransitionMatrix

__all__ = [
    "cantor_T",
    "BlockMatrix",
    "block_permute",
    "block_unpermute",
    "block_product",
    "upper_bound_theta",
    "bhm_sup_dim",
    "shrink_table",
    "TableRow",
    "table_csv",
    "binomial_probs",
]


def binomial_probs(m):
    return [Fraction(comb(m, j), 2**m) for j in range(m + 1)]


def _prob_map(k, lam, probs):
    lam = list(range(k + 1)) if lam is None else sorted(lam)
    if lam[0] != 0 or lam[-1] != k:
        raise SpecError("the digit index set must contain 0 and k")
    if probs is None:
        probs = binomial_probs(k) if lam == list(range(k + 1)) else None
        if probs is None:
            raise SpecError("probabilities are required for a proper index set")
    if len(probs) != len(lam):
        raise SpecError("one probability per digit index is required")
    return {s: Fraction(p) for s, p in zip(lam, probs)}


def cantor_T(d: int, k: int, lam=None, probs=None, ell=0) -> TransitionMatrix:
    """The k x k matrix of child ``ell``: entry (j, i) is p_s when
    (ell - (i-1) + (j-1) d) / (d-1) = s lies in ``lam`` (1-based i, j)."""
    if not 0 <= ell < d:
        raise ValueError("child index must lie in 0..d-1")
    if k < 1:
        raise SpecError("k must be positive")
    pm = _prob_map(k, lam, probs)
    rows = []
    for j in range(1, k + 1):
        row = []
        for i in range(1, k + 1):
            num = ell - (i - 1) + (j - 1) * d
            s, rem = divmod(num, d - 1)
            row.append(pm.get(s, Fraction(0)) if rem == 0 else Fraction(0))
        rows.append(row)
    return TransitionMatrix(rows)


def _block_sizes(d, k):
    return [(k - i) // (d - 1) + 1 if k >= i else 0 for i in range(1, d)]


def _perm(d, k):
    """0-based original indices in block order."""
    out = []
    for i in range(1, d):
        size = (k - i) // (d - 1) + 1 if k >= i else 0
        out.extend(i - 1 + t * (d - 1) for t in range(size))
    return out


@dataclass(frozen=True)
class BlockMatrix:
    d: int
    k: int
    matrix: TransitionMatrix  # already permuted

    @property
    def sizes(self):
        return _block_sizes(self.d, self.k)

    def _offsets(self):
        offs = [0]
        for s in self.sizes:
            offs.append(offs[-1] + s)
        return offs

    def block(self, i, j) -> TransitionMatrix | None:
        """Block (i, j) for 1-based i, j; None when it has no entries."""
        offs = self._offsets()
        r0, r1 = offs[i - 1], offs[i]
        c0, c1 = offs[j - 1], offs[j]
        if r1 == r0 or c1 == c0:
            return None
        return self.matrix.submatrix(range(r0, r1), range(c0, c1))

    def nonzero_blocks(self):
        out = []
        for i in range(1, self.d):
            for j in range(1, self.d):
                b = self.block(i, j)
                if b is not None and any(x for r in b.entries for x in r):
                    out.append((i, j))
        return out

    @property
    def type(self):
        rs = {(j - i) % (self.d - 1) for i, j in self.nonzero_blocks()}
        if len(rs) == 1:
            return rs.pop()
        return "mixed" if rs else None

    def is_block_diagonal(self):
        return self.type == 0

    def is_block_positive(self):
        """Every block on the block diagonal of its type is entrywise positive."""
        r = self.type
        if not isinstance(r, int):
            return False
        for i in range(1, self.d):
            j = (i - 1 + r) % (self.d - 1) + 1
            b = self.block(i, j)
            if b is None:
                continue
            if not b.is_positive():
                return False
        return True

    def __matmul__(self, other):
        return block_product(self, other)


def block_permute(T: TransitionMatrix, d: int, k: int) -> BlockMatrix:
    if T.rows != k or T.cols != k:
        raise ValueError("expected a k x k matrix")
    p = _perm(d, k)
    return BlockMatrix(d, k, T.submatrix(p, p))


def block_unpermute(B: BlockMatrix) -> TransitionMatrix:
    p = _perm(B.d, B.k)
    inv = [0] * len(p)
    for pos, orig in enumerate(p):
        inv[orig] = pos
    return B.matrix.submatrix(inv, inv)


def block_product(a: BlockMatrix, b: BlockMatrix) -> BlockMatrix:
    if (a.d, a.k) != (b.d, b.k):
        raise ValueError("block matrices of different shapes")
    return BlockMatrix(a.d, a.k, a.matrix @ b.matrix)


# -- bounds ---------------------------------------------------------------------


def _theta_word(B: BlockMatrix):
    prod = Fraction(1)
    for i, j in B.nonzero_blocks():
        prod *= B.block(i, j).min_col_sum()
    return prod, len(B.nonzero_blocks())


def upper_bound_theta(d: int, k: int, depth=1, lam=None, probs=None):
    """Upper bound on the local dimensions of the quotient measure.

    For every word of ``depth`` child indices the permuted product has
    d-1 nonzero blocks; the geometric mean of their minimum column sums
    is taken, the minimum over words gives theta, and the returned bound
    is log(theta) / (depth * log(1/d)).  Returns (theta_product, bound)
    where theta_product is the product of block minima before the
    (d-1)-th root; the bound is inf when some block minimum is zero.
    """
    Ts = [block_permute(cantor_T(d, k, lam, probs, ell), d, k) for ell in range(d)]
    best = None
    # depth-first over words so that prefixes are multiplied once
    stack = [(T, 1) for T in reversed(Ts)]
    while stack:
        B, n = stack.pop()
        if n < depth:
            stack.extend((B @ T, n + 1) for T in reversed(Ts))
            continue
        val, nb = _theta_word(B)
        if best is None or val < best[0]:
            best = (val, nb)
    val, nb = best
    if val == 0:
        return val, float("inf")
    with mpmath.workdps(30):
        theta = (mpmath.mpf(val.numerator) / val.denominator) ** (mpmath.mpf(1) / nb)
        bound = mpmath.log(theta) / (depth * mpmath.log(mpmath.mpf(1) / d))
    return val, float(bound)


def bhm_sup_dim(d: int, k: int) -> float:
    """Closed form for the largest interior local dimension of the (d+k)-fold
    convolution of the uniform Cantor measure with ratio 1/d, k >= 0."""
    if k < 0:
        raise ValueError("k must be non-negative")
    n = d + k

    def p(j):
        return mpmath.mpf(comb(n, j)) / 2**n if 0 <= j <= n else mpmath.mpf(0)

    r = k // 2
    with mpmath.workdps(30):
        a, b = p(r + d + 1), p(r)
        beta = (a + b + mpmath.sqrt((a - b) ** 2 + 4 * p(r + 1) * p(r + d))) / 2
        return float(mpmath.log(beta) / mpmath.log(mpmath.mpf(1) / d))


@dataclass
class TableRow:
    m: int
    d: int
    line_bound: float
    torus_bound: float
    holds: bool
    depth: int
    flagged: bool = False  # m = d - 1: line value from the smallest weight

    def as_list(self):
        return [
            self.m,
            self.d,
            f"{self.line_bound:.9f}",
            f"{self.torus_bound:.9f}",
            "true" if self.holds else "false",
            self.depth,
        ]


def line_bound(m: int, d: int):
    """Lower bound for the supremum of interior local dimensions on the line.

    For m >= d this is the closed form above.  For m = d - 1 the row is
    flagged and the value is log(2^-m) / log(1/d), the dimension from the
    smallest weight.
    """
    k = m - d
    if k >= 0:
        return bhm_sup_dim(d, k), False
    if k == -1:
        return float(m * mpmath.log(2) / mpmath.log(d)), True
    raise ValueError("m must be at least d - 1")


def shrink_table(pairs, max_depth=4, flagged_max_depth=10):
    """One row per (m, d): line lower bound, torus upper bound, verdict, depth.

    The depth of the torus bound is increased until the bound is strictly
    below the line bound or the cap is reached.  Rows with m = d - 1 use
    ``flagged_max_depth`` as their cap, since (2, 3) is only settled
    (negatively) after ten levels.
    """
    rows = []
    for m, d in pairs:
        if d < 3:
            raise ValueError("d must be at least 3")
        line, flagged = line_bound(m, d)
        cap = flagged_max_depth if flagged else max_depth
        depth, best = 0, float("inf")
        while depth < cap:
            depth += 1
            _, torus = upper_bound_theta(d, m, depth)
            best = min(best, torus)
            if best < line and not _close(best, line):
                break
        rows.append(TableRow(m, d, line, best, best < line and not _close(best, line), depth, flagged))
    return rows


def _close(a, b):
    return abs(a - b) <= 1e-12 * max(1.0, abs(b))


def table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "d", "line_lower_bound", "torus_upper_bound", "torus_below_line", "depth"])
    for r in rows:
        w.writerow(r.as_list())
    return buf.getvalue()
