from fractions import Fraction

import pytest

from oracles import golden_polys
from torusdim.errors import FieldError
from torusdim.numberfield import (
    FieldContext,
    format_element,
    nf_arith,
    nf_cmp,
    nf_is_pisot,
    nf_separation_bound,
    rational_field,
)


@pytest.fixture(scope="module")
def gold():
    return FieldContext([1, 1, -1])


def test_golden_relation(gold):
    r = gold.rho
    assert r * r + r == gold.one
    assert abs(float(r) - 0.6180339887498949) < 1e-15


def test_one_minus_r_over_r(gold):
    r = gold.rho
    assert (1 - r) / r == r


def test_negative_power(gold):
    r = gold.rho
    assert r**-3 == gold.from_poly([3, 2])  # 3 + 2r
    assert r**-3 * r**3 == gold.one


def test_cmp(gold):
    r = gold.rho
    assert nf_cmp(2 * r, gold.one) == 1
    assert nf_cmp(r, r) == 0
    assert nf_cmp(1 - r, r) == -1


def test_arith_dispatch(gold):
    r = gold.rho
    assert nf_arith(r, r, "mul") == 1 - r
    with pytest.raises(ZeroDivisionError):
        nf_arith(r, gold.zero, "div")


def test_format(gold):
    assert format_element(2 - 2 * gold.rho) == "2 - 2*r"
    assert format_element(gold.zero) == "0"


def test_rational_field():
    ctx = rational_field(Fraction(1, 4))
    assert ctx.degree == 1
    assert ctx.rho.as_fraction() == Fraction(1, 4)
    assert (ctx.rho * 4).is_rational()


def test_reducible_rejected():
    with pytest.raises(FieldError):
        FieldContext([1, 0, -1])  # (x-1)(x+1)


def test_pisot_golden():
    cert = nf_is_pisot([1, -1, -1])
    assert cert.status == "pisot"
    assert bool(cert)


def test_pisot_integer():
    assert nf_is_pisot([1, -4]).status == "pisot"


def test_not_pisot_sqrt2_plus():
    # x^2 - 2 has conjugate -sqrt 2 outside the disc
    assert nf_is_pisot([1, 0, -2]).status == "not_pisot"


def test_not_pisot_non_monic():
    assert nf_is_pisot([2, -1, -1]).status == "not_pisot"


def test_separation_golden_value(gold):
    c = nf_separation_bound(gold, [-1, 0, 1])
    assert Fraction(19, 100) < c <= Fraction(3820, 10000)


def test_separation_brute_force(gold):
    c = float(nf_separation_bound(gold, [-1, 0, 1]))
    vals = abs(golden_polys(13))
    nonzero = vals[vals > 1e-9]
    assert nonzero.min() > c


def test_separation_rational():
    ctx = rational_field(Fraction(1, 3))
    c = nf_separation_bound(ctx, [Fraction(0), Fraction(2, 3), Fraction(4, 3)])
    assert c == Fraction(1, 3)


def test_separation_zero_set(gold):
    assert nf_separation_bound(gold, [0]) == 1
