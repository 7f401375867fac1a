"""Measure specifications: an equicontractive IFS with optional probabilities.

A spec file is a small sectioned key/value text file::

    # golden mean, convolution square of the Bernoulli measure
    [field]
    min_poly = 1, 1, -1        # integer coefficients, highest degree first
    root_interval = 0, 1       # optional; must isolate the root in (0, 1)

    [ifs]
    digits = 0, 1 - r, 2 - 2*r # polynomials in the contraction ratio r
    probs = 1/4, 1/2, 1/4      # optional; omit for structure-only analysis
    mode = torus               # or "line"

Blank lines and ``#`` comments are ignored.  Digit polynomials accept
rational coefficients, ``r`` or ``rho`` for the ratio, ``*`` for
multiplication (optional between a coefficient and ``r``), and ``^`` or
``**`` for powers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import SpecError
from .numberfield import AlgebraicNumber, FieldContext, beta_poly, nf_is_pisot, rational_field

__all__ = [
    "MeasureSpec",
    "SpecReport",
    "spec_validate",
    "spec_convolve",
    "spec_cantor",
    "parse_spec_text",
    "load_spec",
    "dump_spec",
    "parse_element",
]

MODES = ("line", "torus")


@dataclass(frozen=True, eq=False)
class MeasureSpec:
    field: FieldContext
    rho: AlgebraicNumber
    digits: tuple
    probs: tuple
    mode: str
    delta: AlgebraicNumber

    @property
    def k(self) -> int:
        return len(self.digits) - 1

    @property
    def has_probs(self) -> bool:
        return bool(self.probs)

    @property
    def int_delta(self) -> int:
        return int(self.delta.as_fraction())

    def with_mode(self, mode: str) -> "MeasureSpec":
        return spec_validate(self.field, self.digits, self.probs, mode)[0]

    def with_probs(self, probs) -> "MeasureSpec":
        return spec_validate(self.field, self.digits, probs, self.mode)[0]

    def fingerprint(self) -> str:
        """Stable text identity used for cache keys."""
        parts = [
            "poly=" + ",".join(map(str, self.field.int_poly)),
            "rho~%.17g" % float(self.rho),
            "digits=" + ";".join(",".join(map(str, d.coeffs)) for d in self.digits),
            "probs=" + ",".join(map(str, self.probs)),
            "mode=" + self.mode,
        ]
        return "|".join(parts)


@dataclass(frozen=True)
class SpecReport:
    delta: AlgebraicNumber
    is_regular: bool
    full_support_hull: bool
    strong_separation: bool
    pisot_status: str

    def as_dict(self):
        return {
            "delta": str(self.delta),
            "is_regular": self.is_regular,
            "full_support_hull": self.full_support_hull,
            "strong_separation": self.strong_separation,
            "pisot_status": self.pisot_status,
        }


def spec_validate(field_ctx: FieldContext, digits, probs=(), mode="torus"):
    """Normalize and check a raw specification; returns (MeasureSpec, SpecReport).

    Digits are shifted so that the first one is 0.  In torus mode the
    diameter of the attractor must be an integer; rescale the IFS
    otherwise.
    """
    if mode not in MODES:
        raise SpecError(f"mode must be one of {MODES}, got {mode!r}")
    ds = [field_ctx.element(d) for d in digits]
    if len(ds) < 1:
        raise SpecError("at least one digit is required")
    for a, b in zip(ds, ds[1:]):
        c = (b - a).sign()
        if c == 0:
            raise SpecError(f"duplicate digit {b}")
        if c < 0:
            raise SpecError(f"digits must be strictly increasing ({a} >= {b})")
    if not ds[0].is_zero():
        shift = ds[0]
        ds = [d - shift for d in ds]
    ps = tuple(Fraction(p) for p in probs) if probs else ()
    if ps:
        if len(ps) != len(ds):
            raise SpecError(f"{len(ps)} probabilities for {len(ds)} maps")
        if any(p <= 0 for p in ps):
            raise SpecError("probabilities must be positive")
        if sum(ps) != 1:
            raise SpecError(f"probabilities sum to {sum(ps)}, not 1")
    rho = field_ctx.rho
    delta = ds[-1] / (1 - rho)
    if mode == "torus":
        if not delta.is_rational() or delta.as_fraction().denominator != 1 or delta.as_fraction() < 1:
            if len(ds) == 1:
                raise SpecError("a single map has a one-point attractor; nothing to analyse")
            raise SpecError(
                f"diameter {delta} of the attractor is not a positive integer; "
                "rescale the digits so that it is"
            )
    elif len(ds) == 1:
        raise SpecError("a single map has a one-point attractor; nothing to analyse")
    spec = MeasureSpec(field_ctx, rho, tuple(ds), ps, mode, delta)
    return spec, spec_report(spec)


def spec_report(spec: MeasureSpec) -> SpecReport:
    ds = spec.digits
    width = spec.rho * spec.delta
    gaps = [(b - a - width).sign() for a, b in zip(ds, ds[1:])]
    full = all(g <= 0 for g in gaps)
    sep = all(g > 0 for g in gaps)
    regular = bool(spec.probs) and spec.probs[0] == spec.probs[-1] == min(spec.probs)
    try:
        status = nf_is_pisot(beta_poly(spec.field)).status
    except Exception:  # degenerate polynomials are reported, not fatal
        status = "undecided"
    return SpecReport(spec.delta, regular, full, sep, status)


def spec_convolve(base: MeasureSpec, m: int) -> MeasureSpec:
    """m-fold convolution power of the two-map uniform measure ``base``."""
    if m < 1:
        raise SpecError("convolution power must be positive")
    one = base.field.one
    if (
        len(base.digits) != 2
        or base.digits[1] != one - base.rho
        or tuple(base.probs) != (Fraction(1, 2), Fraction(1, 2))
    ):
        raise SpecError("base must have digits {0, 1-rho} and probabilities (1/2, 1/2)")
    if m == 1:
        return base
    digits = [(one - base.rho) * j for j in range(m + 1)]
    probs = [Fraction(comb(m, j), 2**m) for j in range(m + 1)]
    return spec_validate(base.field, digits, probs, base.mode)[0]


def bernoulli(field_ctx: FieldContext, mode="torus") -> MeasureSpec:
    """Uniform two-map measure with digits 0 and 1 - rho."""
    return spec_validate(field_ctx, [0, field_ctx.one - field_ctx.rho], [Fraction(1, 2)] * 2, mode)[0]


def spec_cantor(d: int, k: int, lam=None, probs=None, mode="torus") -> MeasureSpec:
    """Cantor-like measure: ratio 1/d, digits j(d-1)/d for j in ``lam``.

    ``lam`` defaults to 0..k and ``probs`` to binomial weights when ``lam``
    is full (the k-fold convolution of the uniform Cantor measure).
    """
    if d < 2:
        raise SpecError("d must be at least 2")
    lam = list(range(k + 1)) if lam is None else sorted(set(int(j) for j in lam))
    if not lam or lam[0] != 0 or lam[-1] != k:
        raise SpecError("the digit index set must contain 0 and k")
    if probs is None:
        if lam != list(range(k + 1)):
            raise SpecError("probabilities are required for a proper index set")
        probs = [Fraction(comb(k, j), 2**k) for j in lam]
    ctx = rational_field(Fraction(1, d))
    digits = [Fraction(j * (d - 1), d) for j in lam]
    return spec_validate(ctx, digits, probs, mode)[0]


# -- text format --------------------------------------------------------------

_KEYS = {
    "field": {"min_poly", "root_interval"},
    "ifs": {"digits", "probs", "mode"},
}

_TERM = re.compile(
    r"""\s*(?P<coef>\d+(?:/\d+)?)?\s*\*?\s*(?P<var>rho|r)?(?:\s*(?:\^|\*\*)\s*(?P<pow>\d+))?\s*""",
)


def parse_element(text: str, ctx: FieldContext) -> AlgebraicNumber:
    """Parse a polynomial in the ratio, e.g. ``2 - 2*r`` or ``3/5``."""
    s = text.strip()
    if not s:
        raise ValueError("empty expression")
    compact = re.sub(r"\s+", "", s)
    if not re.fullmatch(r"[+-]?[^+-]+(?:[+-][^+-]+)*", compact):
        raise ValueError(f"cannot parse {text!r}")
    tokens = [(-1 if sg == "-" else 1, tok) for sg, tok in re.findall(r"([+-]?)([^+-]+)", compact)]
    coeffs = {}
    for sign, tok in tokens:
        m = _TERM.fullmatch(tok)
        if not m or (m.group("coef") is None and m.group("var") is None):
            raise ValueError(f"cannot parse term {tok!r}")
        if m.group("pow") and not m.group("var"):
            raise ValueError(f"power without variable in {tok!r}")
        c = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        e = 0
        if m.group("var"):
            e = int(m.group("pow")) if m.group("pow") else 1
        coeffs[e] = coeffs.get(e, 0) + sign * c
    top = max(coeffs)
    return ctx.from_poly([coeffs.get(i, 0) for i in range(top + 1)])


def _split_list(value, lineno, col):
    items = [v.strip() for v in value.split(",")]
    if any(not v for v in items):
        raise SpecError("empty list entry", lineno, col)
    return items


def parse_spec_text(text: str, mode_override=None) -> MeasureSpec:
    section = None
    raw = {}
    where = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        col = len(body) - len(body.lstrip()) + 1
        stripped = body.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise SpecError("unterminated section header", lineno, col)
            name = stripped[1:-1].strip()
            if name not in _KEYS:
                raise SpecError(f"unknown section [{name}]", lineno, col)
            section = name
            continue
        if "=" not in stripped:
            raise SpecError("expected 'key = value'", lineno, col)
        key, value = stripped.split("=", 1)
        key = key.strip()
        if section is None:
            raise SpecError(f"key {key!r} outside of any section", lineno, col)
        if key not in _KEYS[section]:
            raise SpecError(f"unknown key {section}.{key}", lineno, col)
        full = f"{section}.{key}"
        if full in raw:
            raise SpecError(f"duplicate key {full}", lineno, col)
        vcol = body.index("=") + 2
        raw[full] = value.strip()
        where[full] = (lineno, vcol)

    def need(name):
        if name not in raw:
            raise SpecError(f"missing required key {name}")
        return raw[name]

    ln, col = where.get("field.min_poly", (None, None))
    try:
        poly = [int(v) for v in _split_list(need("field.min_poly"), ln, col)]
    except ValueError as exc:
        raise SpecError(f"min_poly must be integers: {exc}", ln, col) from None
    interval = None
    if "field.root_interval" in raw:
        ln2, col2 = where["field.root_interval"]
        try:
            interval = [Fraction(v) for v in _split_list(raw["field.root_interval"], ln2, col2)]
        except ValueError as exc:
            raise SpecError(f"bad root interval: {exc}", ln2, col2) from None
        if len(interval) != 2:
            raise SpecError("root_interval needs two values", ln2, col2)
    try:
        ctx = FieldContext(poly, interval)
    except Exception as exc:
        raise SpecError(str(exc), ln, col) from None
    ln, col = where.get("ifs.digits", (None, None))
    digits = []
    for item in _split_list(need("ifs.digits"), ln, col):
        try:
            digits.append(parse_element(item, ctx))
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"bad digit {item!r}: {exc}", ln, col) from None
    probs = ()
    if "ifs.probs" in raw:
        ln, col = where["ifs.probs"]
        try:
            probs = tuple(Fraction(v) for v in _split_list(raw["ifs.probs"], ln, col))
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"bad probability: {exc}", ln, col) from None
    mode = mode_override or raw.get("ifs.mode", "torus")
    try:
        return spec_validate(ctx, digits, probs, mode)[0]
    except SpecError as exc:
        if exc.line is None:
            ln, col = where.get("ifs.digits", (None, None))
            raise SpecError(str(exc), ln, col) from None
        raise


def load_spec(path, mode_override=None) -> MeasureSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec_text(fh.read(), mode_override)


def dump_spec(spec: MeasureSpec) -> str:
    lo, hi = spec.field.interval()
    lines = [
        "[field]",
        "min_poly = " + ", ".join(map(str, spec.field.int_poly)),
    ]
    if spec.field.degree > 1:
        lines.append(f"root_interval = {lo}, {hi}")
    lines += ["", "[ifs]", "digits = " + ", ".join(str(d) for d in spec.digits)]
    if spec.probs:
        lines.append("probs = " + ", ".join(str(p) for p in spec.probs))
    lines.append(f"mode = {spec.mode}")
    return "\n".join(lines) + "\n"
