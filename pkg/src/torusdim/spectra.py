"""Nonnegative rational matrices, path products, norms and spectral radii.

All arithmetic is exact.  The spectral radius of a nonnegative matrix is
its largest real eigenvalue, so it is bracketed by isolating the largest
real root of the characteristic polynomial; Gelfand-type norm brackets
are available as an independent route.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm

import sympy

from .errors import MatrixError

__all__ = [
    "TransitionMatrix",
    "SpectralBracket",
    "path_product",
    "norms",
    "spectral_radius",
    "gelfand_brackets",
    "compare_spectral_values",
    "nth_root_bracket",
]


class TransitionMatrix:
    """Immutable nonnegative matrix with rational entries.

    ``scale`` is only a display multiplier: ``scaled()`` shows entries
    multiplied by it, arithmetic always uses the true entries.
    """

    __slots__ = ("entries", "rows", "cols", "scale", "_hash")

    def __init__(self, entries, scale=1, check=True):
        rows = tuple(tuple(Fraction(x) for x in r) for r in entries)
        if not rows or not rows[0]:
            raise MatrixError("matrix must have at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise MatrixError("ragged matrix")
        if check and any(x < 0 for r in rows for x in r):
            raise MatrixError("entries must be nonnegative")
        self.entries = rows
        self.rows = len(rows)
        self.cols = width
        self.scale = Fraction(scale)
        self._hash = None

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, TransitionMatrix) and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.scaled().entries)
        tag = f" x1/{self.scale}" if self.scale != 1 else ""
        return f"TransitionMatrix([{body}]{tag})"

    def __matmul__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise MatrixError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries))
        out = []
        for r in self.entries:
            out.append([sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in cols])
        return TransitionMatrix(out, self.scale * other.scale, check=False)

    def __pow__(self, n):
        if self.rows != self.cols:
            raise MatrixError("power of a non-square matrix")
        result = TransitionMatrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    @property
    def shape(self):
        return (self.rows, self.cols)

    def with_scale(self, scale):
        return TransitionMatrix(self.entries, scale, check=False)

    def scaled(self):
        """Matrix with entries multiplied by the display scale."""
        s = self.scale
        return TransitionMatrix([[x * s for x in r] for r in self.entries], s, check=False)

    def integer_form(self):
        """(D, integer rows) with entries equal to rows / D."""
        den = lcm(*(x.denominator for r in self.entries for x in r))
        return den, tuple(tuple(int(x * den) for x in r) for r in self.entries)

    def support(self):
        return tuple(tuple(bool(x) for x in r) for r in self.entries)

    def transpose(self):
        return TransitionMatrix(list(zip(*self.entries)), self.scale, check=False)

    def submatrix(self, rows, cols):
        rows, cols = list(rows), list(cols)
        if not rows or not cols:
            raise MatrixError("empty index subset")
        return TransitionMatrix([[self.entries[i][j] for j in cols] for i in rows], self.scale, check=False)

    def col_sums(self):
        return [sum(c, Fraction(0)) for c in zip(*self.entries)]

    def row_sums(self):
        return [sum(r, Fraction(0)) for r in self.entries]

    def sum_norm(self):
        return sum(self.row_sums(), Fraction(0))

    def min_col_sum(self):
        return min(self.col_sums())

    def max_col_sum(self):
        return max(self.col_sums())

    def min_row_sum(self):
        return min(self.row_sums())

    def max_row_sum(self):
        return max(self.row_sums())

    def has_zero_column(self):
        return any(not any(c) for c in zip(*self.entries))

    def has_zero_row(self):
        return any(not any(r) for r in self.entries)

    def is_positive(self):
        return all(x > 0 for r in self.entries for x in r)

    def to_float(self):
        return [[float(x) for x in r] for r in self.entries]


def path_product(ms) -> TransitionMatrix:
    ms = list(ms)
    if not ms:
        raise MatrixError("empty product")
    return reduce(lambda a, b: a @ b, ms)


def norms(m: TransitionMatrix, J=None, rows=None) -> dict:
    """Sum norm, column-sum extremes and the column minimum restricted to J.

    With ``rows`` given as well, the restricted minimum is taken on the
    submatrix with those rows and columns.
    """
    out = {
        "sum_norm": m.sum_norm(),
        "min_col_sum": m.min_col_sum(),
        "max_col_sum": m.max_col_sum(),
        "min_row_sum": m.min_row_sum(),
        "max_row_sum": m.max_row_sum(),
    }
    if J is not None:
        J = list(J)
        if not J:
            raise MatrixError("column subset must be nonempty")
        sub = m.submatrix(range(m.rows) if rows is None else rows, J)
        out["min_col_sum_on"] = sub.min_col_sum()
    return out


# -- spectral radius ----------------------------------------------------------


@dataclass(frozen=True)
class SpectralBracket:
    lo: Fraction
    hi: Fraction
    iterations: int = 0
    ok: bool = True

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def __float__(self):
        return float(self.mid)


_X = sympy.Symbol("x")


def _charpoly(m: TransitionMatrix):
    den, ints = m.integer_form()
    M = sympy.Matrix(ints)
    return den, sympy.Poly(M.charpoly(_X).as_expr(), _X, domain="ZZ")


@lru_cache(maxsize=4096)
def _perron_data(m: TransitionMatrix):
    """(den, irreducible factor containing the Perron root, its index) for den*m.

    The factor is primitive with positive leading coefficient.
    """
    if m.rows != m.cols:
        raise MatrixError("spectral radius needs a square matrix")
    den, p = _charpoly(m)
    if p.degree() < 1:
        raise MatrixError("degenerate characteristic polynomial")
    best = None
    for f, _mult in p.factor_list()[1]:
        f = sympy.Poly(f, _X, domain="ZZ")
        if f.LC() < 0:
            f = -f
        roots = f.intervals()
        if not roots:
            continue
        (a, b), _ = roots[-1]
        cand = (f, Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)))
        if best is None:
            best = cand
            continue
        best = _max_root(best, cand)
    if best is None:
        # no real eigenvalue other than possibly zero handled by the factors
        raise MatrixError("characteristic polynomial has no real root")
    return den, best[0]


def _refine(f, a, b):
    """Halve the isolating interval (a, b] of a root of squarefree f."""
    mid = (a + b) / 2
    fa = f.eval(sympy.Rational(a.numerator, a.denominator))
    fm = f.eval(sympy.Rational(mid.numerator, mid.denominator))
    if fm == 0:
        return mid, mid
    if fa == 0:
        # a is itself a root only when the interval is degenerate
        return a, a
    if (fa > 0) == (fm > 0):
        return mid, b
    return a, mid


def _max_root(x, y):
    fx, ax, bx = x
    fy, ay, by = y
    if fx == fy:
        return x
    # distinct irreducible factors have no common root: refine until disjoint
    while not (bx < ay or by < ax):
        if bx - ax >= by - ay:
            ax, bx = _refine(fx, ax, bx)
        else:
            ay, by = _refine(fy, ay, by)
    return (fx, ax, bx) if ax > by else (fy, ay, by)


def _root_interval(f, tol):
    roots = f.intervals(eps=sympy.Rational(tol.numerator, tol.denominator)) if tol else f.intervals()
    (a, b), _ = roots[-1]
    return Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q))


def spectral_radius(m: TransitionMatrix, tol=Fraction(1, 10**12), rel_tol=None) -> SpectralBracket:
    """Rational bracket [lo, hi] around sp(m) with hi - lo <= tol.

    With ``rel_tol`` the width is instead at most rel_tol * sp(m).

    The Perron root is the largest real root of the characteristic
    polynomial; it is isolated inside the irreducible factor that holds
    it and refined to the requested width.
    """
    tol = Fraction(tol)
    if m.rows == 1 and m.cols == 1:
        v = m.entries[0][0]
        return SpectralBracket(v, v, 0, True)
    if not any(x for r in m.entries for x in r):
        return SpectralBracket(Fraction(0), Fraction(0), 0, True)
    den, f = _perron_data(m)
    if f.degree() == 1:
        c = f.all_coeffs()
        v = Fraction(int(-c[1]), int(c[0])) / den
        return SpectralBracket(v, v, 0, True)
    if rel_tol is not None:
        a, _ = _root_interval(f, None)
        if a <= 0:
            a, _ = _root_interval(f, Fraction(1, 10**30))
        tol = Fraction(rel_tol) * max(a, Fraction(1, 10**60)) / den
    lo, hi = _root_interval(f, tol * den)
    return SpectralBracket(max(lo / den, Fraction(0)), hi / den, 1, True)


def perron_factor(m: TransitionMatrix):
    """Irreducible integer polynomial whose largest real root is den*sp(m), and den."""
    den, f = _perron_data(m)
    return f, den


def compare_spectral_values(a: TransitionMatrix, la: int, b: TransitionMatrix, lb: int) -> int:
    """Exact sign of sp(a)^(1/la) - sp(b)^(1/lb).

    Equivalent to comparing sp(a^lb) with sp(b^la); equality holds iff
    both Perron roots come from the same irreducible factor after scaling
    to a common denominator.
    """
    A = a**lb
    B = b**la
    if A.rows == 1 and B.rows == 1:
        x, y = A.entries[0][0], B.entries[0][0]
        return (x > y) - (x < y)
    # bring both to the same scale so that identical roots give identical factors
    den = lcm(A.integer_form()[0], B.integer_form()[0])
    As = TransitionMatrix([[x * den for x in r] for r in A.entries], check=False)
    Bs = TransitionMatrix([[x * den for x in r] for r in B.entries], check=False)
    ra, rb = _exact_root(As), _exact_root(Bs)
    if ra[0] == rb[0]:
        return 0
    fa, a0, a1 = ra
    fb, b0, b1 = rb
    while not (a1 < b0 or b1 < a0):
        if a1 - a0 >= b1 - b0:
            a0, a1 = _refine(fa, a0, a1)
        else:
            b0, b1 = _refine(fb, b0, b1)
    return 1 if a0 > b1 else -1


def _exact_root(m: TransitionMatrix):
    """(factor, lo, hi) for the Perron root of an integer-entry matrix."""
    if m.rows == 1:
        v = m.entries[0][0]
        f = sympy.Poly(_X * v.denominator - v.numerator, _X, domain="ZZ")
        return (f, v, v)
    den, f = _perron_data(m)
    if den != 1:
        raise MatrixError("expected an integer matrix")
    a, b = _root_interval(f, None)
    return (f, a, b)


# -- Gelfand brackets -----------------------------------------------------------


def _iroot_floor(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def nth_root_bracket(q: Fraction, k: int, bits=64):
    """Rationals (lo, hi) with lo <= q**(1/k) <= hi and hi - lo <= 2**-bits * (1 + hi)."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    if q == 0:
        return Fraction(0), Fraction(0)
    scale = 1 << bits
    # q**(1/k) * scale = (q * scale**k) ** (1/k)
    num = q.numerator * scale**k
    lo_int = _iroot_floor(num // q.denominator, k)
    hi_int = _iroot_floor(-(-num // q.denominator), k) + 1
    return Fraction(lo_int, scale), Fraction(hi_int, scale)


def gelfand_brackets(m: TransitionMatrix, steps: int, bits=64):
    """Yield (n, lo, hi) for n = 1, 2, 4, ... via repeated squaring.

    lo = max_i (A^n)_ii^(1/n) and hi = ||A^n||^(1/n), rounded outward.
    Both are reported as running best values, so lo never decreases and
    hi never increases.
    """
    if m.rows != m.cols:
        raise MatrixError("square matrix required")
    A = m
    n = 1
    best_lo, best_hi = Fraction(0), None
    for _ in range(steps):
        diag = max(A.entries[i][i] for i in range(A.rows))
        lo, _ = nth_root_bracket(diag, n, bits)
        _, hi = nth_root_bracket(A.sum_norm(), n, bits)
        best_lo = max(best_lo, lo)
        best_hi = hi if best_hi is None else min(best_hi, hi)
        yield n, best_lo, best_hi
        A = A @ A
        n *= 2
