"""Exact arithmetic in Q[rho] for a real algebraic contraction ratio rho.

Elements are stored as rational coefficient vectors in the power basis
1, rho, ..., rho^(deg-1), reduced modulo the minimal polynomial of rho.
Equality is exact; ordering is decided by evaluating the element on a
dyadic enclosure of rho that is refined by bisection until the sign is
certain.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

import mpmath
import sympy

from .errors import FieldError, NotPisotError

__all__ = [
    "FieldContext",
    "AlgebraicNumber",
    "PisotCertificate",
    "nf_arith",
    "nf_cmp",
    "nf_is_pisot",
    "nf_separation_bound",
    "rational_field",
]


def _poly_eval(coeffs, x):
    # ascending coefficients
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a, b):
    a = [Fraction(c) for c in a]
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        coef = a[i + len(b) - 1] / lead
        q[i] = coef
        if coef:
            for j, bc in enumerate(b):
                a[i + j] -= coef * bc
    return _trim(q), _trim(a[: len(b) - 1])


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


class FieldContext:
    """The real field Q[rho] together with an isolating interval for rho.

    ``min_poly`` is given highest degree first with integer coefficients,
    e.g. ``[1, 1, -1]`` for x^2 + x - 1.  ``root_interval`` must contain
    exactly one real root and lie inside (0, 1).  When omitted, the unique
    root in (0, 1) is used.
    """

    def __init__(self, min_poly, root_interval=None, check_irreducible=True):
        ints = [int(c) for c in min_poly]
        if any(Fraction(c) != int(c) for c in min_poly):
            raise FieldError("minimal polynomial must have integer coefficients")
        while ints and ints[0] == 0:
            ints.pop(0)
        if len(ints) < 2:
            raise FieldError("minimal polynomial must have degree >= 1")
        g = reduce(gcd, ints)
        if ints[0] < 0:
            g = -g
        self.int_poly = tuple(c // g for c in ints)
        self.degree = len(self.int_poly) - 1
        x = sympy.Symbol("x")
        spoly = sympy.Poly(list(self.int_poly), x, domain="ZZ")
        if check_irreducible and self.degree > 1 and not spoly.is_irreducible:
            raise FieldError(f"{self.int_poly} is reducible over Q")
        self._spoly = spoly
        lead = Fraction(self.int_poly[0])
        # monic, ascending, without the leading 1
        self._monic = tuple(Fraction(c) / lead for c in reversed(self.int_poly[1:]))
        if root_interval is None:
            lo, hi = Fraction(0), Fraction(1)
        else:
            lo, hi = (Fraction(v) for v in root_interval)
        if not (0 <= lo < hi <= 1):
            raise FieldError("isolating interval must satisfy 0 <= lo < hi <= 1")
        if self.degree == 1:
            root = -Fraction(self.int_poly[1], self.int_poly[0])
            if not (lo <= root <= hi) or not (0 < root < 1):
                raise FieldError("rational root is not a contraction ratio in the interval")
            lo = hi = root
        else:
            n = spoly.count_roots(lo, hi)
            if n != 1:
                raise FieldError(f"interval [{lo}, {hi}] contains {n} roots, expected exactly 1")
            if _poly_eval(self._asc_int(), lo) == 0 or _poly_eval(self._asc_int(), hi) == 0:
                raise FieldError("isolating interval endpoints must not be roots")
        self._lo, self._hi = lo, hi
        self._lock = threading.Lock()
        self._dyadic = {}
        self._sign_cache = {}
        self._reduce_table = self._build_reduce_table()

    def _asc_int(self):
        return [Fraction(c) for c in reversed(self.int_poly)]

    def _build_reduce_table(self):
        # rows give x^(d+i) reduced to degree < d, for i = 0 .. d-2
        d = self.degree
        row = [-c for c in self._monic]
        table = [row]
        for _ in range(d - 2):
            prev = table[-1]
            shifted = [Fraction(0)] + prev[:-1]
            top = prev[-1]
            table.append([shifted[i] + top * row[i] for i in range(d)])
        return table

    # construction helpers -------------------------------------------------

    def __call__(self, value) -> "AlgebraicNumber":
        return self.element(value)

    def element(self, value) -> "AlgebraicNumber":
        if isinstance(value, AlgebraicNumber):
            if value.ctx is not self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (list, tuple)):
            return self.from_poly(value)
        return AlgebraicNumber(self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1))

    def from_poly(self, coeffs) -> "AlgebraicNumber":
        """Element sum(coeffs[i] * rho**i) for an arbitrary-length ascending list."""
        return AlgebraicNumber(self, self._reduce([Fraction(c) for c in coeffs]))

    @property
    def rho(self) -> "AlgebraicNumber":
        if self.degree == 1:
            return self.element(self._lo)
        return AlgebraicNumber(self, (Fraction(0), Fraction(1)) + (Fraction(0),) * (self.degree - 2))

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    def _reduce(self, coeffs):
        d = self.degree
        if d == 1:
            if len(coeffs) > 1:
                r = self._lo
                return (_poly_eval(coeffs, r),)
            return (coeffs[0] if coeffs else Fraction(0),)
        if len(coeffs) > 2 * d - 1:
            return self._reduce_divmod(coeffs)
        out = list(coeffs[:d]) + [Fraction(0)] * max(0, d - len(coeffs))
        for i, c in enumerate(coeffs[d:]):
            if c:
                for j, t in enumerate(self._reduce_table[i]):
                    out[j] += c * t
        return tuple(out)

    def _reduce_divmod(self, coeffs):
        m = list(self._monic) + [Fraction(1)]
        _, r = _poly_divmod(coeffs, m)
        r = list(r) + [Fraction(0)] * (self.degree - len(r))
        return tuple(r)

    # ordering -------------------------------------------------------------

    def interval(self):
        return self._lo, self._hi

    def refine(self, width):
        """Bisect the isolating interval until it is narrower than ``width``."""
        with self._lock:
            p = self._asc_int()
            lo, hi = self._lo, self._hi
            s_lo = _poly_eval(p, lo)
            while hi - lo >= width:
                mid = (lo + hi) / 2
                s_mid = _poly_eval(p, mid)
                if s_mid == 0:
                    lo = hi = mid
                    break
                if (s_mid > 0) == (s_lo > 0):
                    lo, s_lo = mid, s_mid
                else:
                    hi = mid
            self._lo, self._hi = lo, hi
            return lo, hi

    def _dyadic_bounds(self, bits):
        got = self._dyadic.get(bits)
        if got is None:
            lo, hi = self.refine(Fraction(1, 2 ** (bits + 2)))
            scale = 2**bits
            L = (lo.numerator * scale) // lo.denominator
            H = -((-hi.numerator * scale) // hi.denominator)
            got = (L, H)
            self._dyadic[bits] = got
        return got

    def sign(self, x: "AlgebraicNumber") -> int:
        c = x.coeffs
        if not any(c):
            return 0
        if self.degree == 1:
            return 1 if c[0] > 0 else -1
        cached = self._sign_cache.get(c)
        if cached is not None:
            return cached
        den = lcm(*(f.denominator for f in c))
        nums = [int(f * den) for f in c]
        bits = 64
        while True:
            L, H = self._dyadic_bounds(bits)
            d = len(nums) - 1
            lo_sum = hi_sum = 0
            for i, n in enumerate(nums):
                if not n:
                    continue
                w = 2 ** (bits * (d - i))
                a, b = L**i * w, H**i * w
                if n > 0:
                    lo_sum += n * a
                    hi_sum += n * b
                else:
                    lo_sum += n * b
                    hi_sum += n * a
            if lo_sum > 0:
                s = 1
                break
            if hi_sum < 0:
                s = -1
                break
            bits *= 2
            if bits > 1 << 16:
                raise FieldError("sign refinement did not terminate")
        if len(self._sign_cache) < 1_000_000:
            self._sign_cache[c] = s
        return s

    def to_float(self, x: "AlgebraicNumber") -> float:
        lo, hi = self._dyadic_bounds(64)
        r = (Fraction(lo) + Fraction(hi)) / 2 / 2**64
        return float(_poly_eval(list(x.coeffs), r))

    def to_mpf(self, x: "AlgebraicNumber", dps=30):
        bits = max(64, int(dps * 3.4) + 16)
        lo, hi = self._dyadic_bounds(bits)
        with mpmath.workdps(dps + 10):
            r = mpmath.mpf(lo + hi) / 2 / mpmath.mpf(2) ** bits
            acc = mpmath.mpf(0)
            for c in reversed(x.coeffs):
                acc = acc * r + mpmath.mpf(c.numerator) / c.denominator
            return acc

    def rho_float(self) -> float:
        return self.to_float(self.rho)

    def __repr__(self):
        return f"FieldContext(min_poly={list(self.int_poly)}, interval=({self._lo}, {self._hi}))"

    def same_field(self, other: "FieldContext") -> bool:
        return self.int_poly == other.int_poly and (
            self.degree == 1 or (self._lo <= other._hi and other._lo <= self._hi)
        )


def rational_field(rho) -> FieldContext:
    """Field context for a rational contraction ratio."""
    r = Fraction(rho)
    return FieldContext([r.denominator, -r.numerator])


class AlgebraicNumber:
    """Immutable element of Q[rho] in canonical reduced form."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: FieldContext, coeffs):
        self.ctx = ctx
        self.coeffs = tuple(coeffs)
        self._hash = None

    # coercion
    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            if other.ctx is not self.ctx:
                raise FieldError("mixing elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.element(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicNumber(self.ctx, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.ctx, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicNumber(self.ctx, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return AlgebraicNumber(self.ctx, tuple(a * f for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.ctx.degree == 1:
            return AlgebraicNumber(self.ctx, (self.coeffs[0] * o.coeffs[0],))
        prod = _poly_mul(list(self.coeffs), list(o.coeffs))
        return AlgebraicNumber(self.ctx, self.ctx._reduce(prod))

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q[rho]")
        if self.ctx.degree == 1:
            return AlgebraicNumber(self.ctx, (1 / self.coeffs[0],))
        # extended Euclid: find u with u*a = 1 mod m
        m = list(self.ctx._monic) + [Fraction(1)]
        r0, r1 = m, _trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        c = r1[0]
        inv = [x / c for x in s1]
        return self.ctx.from_poly(inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q[rho]")
            f = Fraction(other)
            return AlgebraicNumber(self.ctx, tuple(a / f for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def sign(self) -> int:
        return self.ctx.sign(self)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.element(other)
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        return self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return self.ctx.to_float(self)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise FieldError(f"{self} is not rational")
        return self.coeffs[0]

    def __repr__(self):
        return f"AlgebraicNumber({self})"

    def __str__(self):
        return format_element(self)

    def sort_key(self):
        return _SortKey(self)


class _SortKey:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __lt__(self, other):
        return self.x < other.x

    def __eq__(self, other):
        return self.x == other.x


def format_element(x: AlgebraicNumber, symbol="r") -> str:
    """Human readable form, e.g. ``1/2 - 1/2*r``."""
    if x.ctx.degree == 1:
        return str(x.coeffs[0])
    terms = []
    for i, c in enumerate(x.coeffs):
        if not c:
            continue
        mono = "" if i == 0 else (symbol if i == 1 else f"{symbol}^{i}")
        if i == 0:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for s, b in terms[1:]:
        out += f" {s} {b}"
    return out


def nf_arith(x: AlgebraicNumber, y: AlgebraicNumber, op: str) -> AlgebraicNumber:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def nf_cmp(x: AlgebraicNumber, y: AlgebraicNumber) -> int:
    """Return -1, 0 or 1 according to the real ordering of x and y."""
    return (x - y).sign()


# -- Pisot certification -----------------------------------------------------


@dataclass
class PisotCertificate:
    status: str  # "pisot" | "not_pisot" | "undecided"
    reason: str = ""
    dominant_root: tuple | None = None  # (value, radius)
    conjugate_moduli: list = field(default_factory=list)  # [(modulus, radius)]
    precision_bits: int = 0

    def __bool__(self):
        if self.status == "undecided":
            raise ValueError("Pisot status is undecided; inspect .status instead")
        return self.status == "pisot"


def nf_is_pisot(poly, margin=1e-12, max_bits=256) -> PisotCertificate:
    """Decide whether the polynomial (highest degree first) defines a Pisot number.

    Root enclosures come from mpmath's polynomial solver with its error
    estimate; precision is doubled from 53 bits until every conjugate is
    clearly inside ``|z| < 1 - margin`` or clearly not, and the result is
    ``undecided`` if ``max_bits`` is not enough.
    """
    coeffs = [int(c) for c in poly]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) < 2:
        raise FieldError("polynomial must have degree >= 1")
    if abs(coeffs[0]) != 1:
        return PisotCertificate("not_pisot", "not monic: root is not an algebraic integer")
    if coeffs[0] < 0:
        coeffs = [-c for c in coeffs]
    if len(coeffs) == 2:
        root = -coeffs[1]
        ok = root > 1
        return PisotCertificate(
            "pisot" if ok else "not_pisot",
            "integer root" + ("" if ok else " <= 1"),
            dominant_root=(float(root), 0.0),
        )
    x = sympy.Symbol("x")
    sp = sympy.Poly(coeffs, x)
    if sp.eval(1) == 0:
        return PisotCertificate("not_pisot", "1 is a root")
    n_big = sp.count_roots(1, None)
    if n_big != 1:
        return PisotCertificate("not_pisot", f"{n_big} real roots greater than 1")
    bits = 53
    while bits <= max_bits:
        with mpmath.workprec(bits):
            try:
                roots, err = mpmath.polyroots(coeffs, maxsteps=200, extraprec=bits, error=True)
            except mpmath.libmp.libhyper.NoConvergence:
                bits *= 2
                continue
            err = mpmath.mpf(err) * 4 + mpmath.mpf(2) ** (-bits + 8)
            mods = sorted(((abs(r), r) for r in roots), key=lambda t: t[0])
            top_mod, top = mods[-1]
            rest = mods[:-1]
            decided = True
            for m, _ in rest:
                if m + err < 1 - margin:
                    continue
                if m - err >= 1:
                    return PisotCertificate(
                        "not_pisot",
                        f"conjugate of modulus {mpmath.nstr(m, 15)} >= 1",
                        precision_bits=bits,
                    )
                decided = False
            if decided:
                return PisotCertificate(
                    "pisot",
                    "all conjugates inside the unit disc",
                    dominant_root=(float(mpmath.re(top)), float(err)),
                    conjugate_moduli=[(float(m), float(err)) for m, _ in rest],
                    precision_bits=bits,
                )
        bits *= 2
    return PisotCertificate("undecided", "conjugate too close to the unit circle", precision_bits=max_bits)


def beta_poly(ctx: FieldContext):
    """Integer polynomial (highest degree first) satisfied by beta = 1/rho."""
    return list(reversed(ctx.int_poly))


def _beta_basis(ctx: FieldContext, x: AlgebraicNumber):
    """Coefficients of x in the basis 1, beta, ..., beta^(d-1)."""
    d = ctx.degree
    beta = ctx.rho.inverse()
    cols = [ctx.one]
    for _ in range(d - 1):
        cols.append(cols[-1] * beta)
    # solve sum_j c_j cols[j] = x
    mat = [[cols[j].coeffs[i] for j in range(d)] + [x.coeffs[i]] for i in range(d)]
    for col in range(d):
        piv = next(r for r in range(col, d) if mat[r][col] != 0)
        mat[col], mat[piv] = mat[piv], mat[col]
        pv = mat[col][col]
        mat[col] = [v / pv for v in mat[col]]
        for r in range(d):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
    return [mat[i][d] for i in range(d)]


def nf_separation_bound(ctx: FieldContext, S, dps=40) -> Fraction:
    """Positive rational c with |y - z| >= c for distinct y, z in Lambda^S(beta).

    The construction clears denominators so that S lies in Z[beta], then
    bounds every non-identity conjugate of y - z by a geometric series in
    |sigma(beta)| and uses that the norm of a nonzero algebraic integer is
    at least 1.
    """
    cert = nf_is_pisot(beta_poly(ctx))
    if cert.status != "pisot":
        raise NotPisotError(f"1/rho is not certified Pisot ({cert.status}: {cert.reason})")
    elems = [ctx.element(s) for s in S]
    diffs = {a - b for a in elems for b in elems}
    diffs.discard(ctx.zero)
    if not diffs:
        return Fraction(1)
    if ctx.degree == 1:
        den = lcm(*(e.coeffs[0].denominator for e in elems))
        return Fraction(1, den)
    basis = [_beta_basis(ctx, e) for e in elems]
    den = lcm(*(c.denominator for row in basis for c in row))
    with mpmath.workdps(dps):
        coeffs = beta_poly(ctx)
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=4 * dps)
        beta_f = 1 / ctx.to_mpf(ctx.rho, dps)
        conj = sorted(roots, key=lambda r: abs(r - beta_f))[1:]
        denom = mpmath.mpf(1)
        for s in conj:
            cs = mpmath.mpf(0)
            for a in basis:
                for b in basis:
                    v = sum((a[i] - b[i]) * den * s**i for i in range(len(a)))
                    cs = max(cs, abs(v))
            denom *= cs / (1 - abs(s))
        c = (1 / denom) / den
        # round down to a rational with a margin far above working precision
        digits = dps // 2
        frac = Fraction(int(mpmath.floor(c * 10**digits)), 10**digits)
        frac -= Fraction(1, 10**digits)
    return frac
