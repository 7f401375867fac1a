from fractions import Fraction

import pytest

from torusdim.catalog import CATALOG, catalog_spec
from torusdim.errors import SpecError
from torusdim.model import (
    bernoulli,
    dump_spec,
    parse_element,
    parse_spec_text,
    spec_cantor,
    spec_convolve,
    spec_validate,
)
from torusdim.numberfield import FieldContext, rational_field


def test_golden_delta_and_report():
    spec = catalog_spec("golden")
    assert spec.delta == 2
    s, rep = spec_validate(spec.field, spec.digits, spec.probs)
    assert rep.is_regular
    assert rep.full_support_hull
    assert not rep.strong_separation
    assert rep.pisot_status == "pisot"


def test_digits_shifted_to_zero():
    ctx = rational_field(Fraction(1, 3))
    spec, _ = spec_validate(ctx, [1, Fraction(5, 3)], [Fraction(1, 2)] * 2)
    assert spec.digits[0].is_zero()
    assert spec.digits[1].as_fraction() == Fraction(2, 3)


def test_non_integer_delta_rejected_on_torus():
    ctx = rational_field(Fraction(1, 4))
    with pytest.raises(SpecError):
        spec_validate(ctx, [0, Fraction(3, 5)], mode="torus")
    # fine on the line
    spec, _ = spec_validate(ctx, [0, Fraction(3, 5)], mode="line")
    assert spec.delta.as_fraction() == Fraction(4, 5)


@pytest.mark.parametrize(
    "digits, probs",
    [
        ([0, Fraction(1, 2), Fraction(1, 4)], ()),
        ([0, 0, 1], ()),
        ([0, Fraction(3, 4)], [Fraction(1, 2), Fraction(1, 3)]),
        ([0, Fraction(3, 4)], [Fraction(1), Fraction(0)]),
        ([0, Fraction(3, 4)], [Fraction(1)]),
    ],
)
def test_bad_specs(digits, probs):
    with pytest.raises(SpecError):
        spec_validate(rational_field(Fraction(1, 4)), digits, probs)


def test_strong_separation_cantor():
    spec = spec_cantor(4, 2, lam=[0, 2], probs=[Fraction(1, 2)] * 2)
    from torusdim.model import spec_report

    assert spec_report(spec).strong_separation


def test_convolve_cube():
    base = bernoulli(rational_field(Fraction(1, 3)))
    c = spec_convolve(base, 3)
    assert [d.as_fraction() for d in c.digits] == [0, Fraction(2, 3), Fraction(4, 3), 2]
    assert c.probs == (Fraction(1, 8), Fraction(3, 8), Fraction(3, 8), Fraction(1, 8))
    assert c.fingerprint() == catalog_spec("cantor3").fingerprint()


def test_cantor_default_probs():
    s = spec_cantor(4, 7)
    assert s.probs[3] == Fraction(35, 128)
    assert s.delta == 7


def test_parse_element():
    ctx = FieldContext([1, 1, -1])
    r = ctx.rho
    assert parse_element("2 - 2*r", ctx) == 2 - 2 * r
    assert parse_element("rho**2", ctx) == r * r
    assert parse_element("1/2r", ctx) == r / 2
    assert parse_element("-3/5", ctx) == ctx.element(Fraction(-3, 5))
    with pytest.raises(ValueError):
        parse_element("2 + x", ctx)


def test_catalog_roundtrip():
    for name in CATALOG:
        spec = catalog_spec(name)
        again = parse_spec_text(dump_spec(spec))
        assert again.fingerprint() == spec.fingerprint()


def test_mode_override():
    assert catalog_spec("golden", "line").mode == "line"


@pytest.mark.parametrize(
    "text, line",
    [
        ("[field]\nmin_poly = 4, -1\n[ifs]\ndigits = 0, 1/2, 1/3\n", 4),
        ("[field]\nmin_poly = 4, -1\n[ifz]\n", 3),
        ("[field]\nmin_poly = 4, x\n[ifs]\ndigits = 0\n", 2),
        ("[field]\nmin_poly = 4, -1\ncolour = red\n", 3),
    ],
)
def test_parse_errors_carry_position(text, line):
    with pytest.raises(SpecError) as info:
        parse_spec_text(text)
    assert info.value.line == line
    assert "line" in str(info.value)


def test_missing_key():
    with pytest.raises(SpecError):
        parse_spec_text("[field]\nmin_poly = 4, -1\n")
