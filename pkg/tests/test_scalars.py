from __future__ import annotations

import itertools
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import lp
from lpadim.scalars import (
    QQ,
    QQ_I,
    GaussQ,
    LaurentPoly,
    NotPositiveDefinite,
    PrimeField,
    RationalFunction,
    ScalarSyntaxError,
    check_positive_definite,
    field_from_tag,
    field_involve,
    laurent_gcd,
    parse_scalar,
    require_positive_definite,
)

laurents = st.builds(
    lambda lo, cs: LaurentPoly.from_coeffs(QQ, cs, lo),
    st.integers(-3, 3),
    st.lists(st.integers(-4, 4), min_size=0, max_size=5),
)
nonzero_laurents = laurents.filter(lambda f: bool(f))


def test_field_involve():
    assert field_involve(QQ(mpq(3, 2))) == QQ(mpq(3, 2))
    assert field_involve(GaussQ(1, 2)) == GaussQ(1, -2)
    rng = random.Random(0)
    for _ in range(100):
        a = QQ_I.random(rng)
        assert field_involve(field_involve(a)) == a


def test_positive_definite_verdicts():
    assert check_positive_definite(QQ, 5).positive_definite
    assert check_positive_definite(QQ_I, 5).proven
    v = check_positive_definite(PrimeField(5), 2)
    assert not v.positive_definite
    assert tuple(str(k) for k in v.counterexample) == ("1", "2")
    with pytest.raises(NotPositiveDefinite):
        require_positive_definite(PrimeField(5))


def test_field_tags():
    assert field_from_tag("QQ") is QQ
    assert field_from_tag("F7").p == 7
    with pytest.raises(ValueError):
        field_from_tag("RR")


def test_corner_entry_identity():
    s = lp("1 + x") * lp("1 + x^-1")
    assert s == lp("2 + x + x^-1")
    assert lp("1") + s == lp("3 + x + x^-1")


def test_units():
    assert not lp("3 + x + x^-1").is_unit()
    assert lp("5*x^-3").is_unit()
    assert lp("1 + x").involve() == lp("1 + x^-1")


def _unit_by_search(f: LaurentPoly, max_width: int = 6) -> bool:
    """Oracle: look for g with f g = 1 among small-coefficient Laurent
    polynomials of bounded width around the inverse degree."""
    if not f:
        return False
    if f.width > 0:
        # f g has width width(f) + width(g) > 0, never a constant
        return False
    c = f.lead()
    g = LaurentPoly(QQ, {-f.min_deg: QQ(1) / c})
    return f * g == lp("1")


@given(laurents)
def test_is_unit_matches_search(f):
    assert f.is_unit() == _unit_by_search(f)


def test_unit_search_brute_force():
    # exhaustive small search: no product of width-1 and width-<=2 polys is 1
    coeffs = [-1, 1, 2]
    for a, b in itertools.product(coeffs, repeat=2):
        f = LaurentPoly.from_coeffs(QQ, [a, b])
        for cs in itertools.product([0, *coeffs], repeat=3):
            g = LaurentPoly.from_coeffs(QQ, cs, -1)
            assert f * g != lp("1")


@settings(max_examples=300)
@given(laurents, nonzero_laurents)
def test_euclidean_division(f, g):
    q, r = divmod(f, g)
    assert f == q * g + r
    assert not r or r.width < g.width


def test_euclidean_division_1000():
    rng = random.Random(1)
    for _ in range(1000):
        f = LaurentPoly.from_coeffs(QQ, [rng.randint(-3, 3) for _ in range(rng.randint(0, 6))], rng.randint(-3, 3))
        g = LaurentPoly.from_coeffs(QQ, [rng.randint(-3, 3) for _ in range(rng.randint(1, 4))], rng.randint(-3, 3))
        if not g:
            continue
        q, r = divmod(f, g)
        assert f == q * g + r and (not r or r.width < g.width)


@given(laurents, laurents)
def test_involution_laws(f, g):
    assert (f * g).involve() == g.involve() * f.involve()
    assert f.involve().involve() == f


@given(nonzero_laurents, nonzero_laurents)
def test_gcd_divides(f, g):
    h = laurent_gcd(f, g)
    assert h.divides(f) and h.divides(g)


def test_rational_functions():
    f = parse_scalar("3 + x + x^-1")
    assert f * f.inverse() == parse_scalar("1")
    assert str(parse_scalar("x/(x^2)")) == str(parse_scalar("x^-1"))
    assert parse_scalar("x/(x^2)") == parse_scalar("1/x")
    inv = parse_scalar("1/(1+x)").involve()
    assert inv == parse_scalar("x/(x+1)")
    assert inv == parse_scalar("1/(1+x^-1)")


@settings(max_examples=100)
@given(st.lists(laurents, min_size=1, max_size=3), st.lists(nonzero_laurents, min_size=3, max_size=3))
def test_positive_definite_transfers_to_fractions(nums, dens):
    fs = [RationalFunction.canonicalize(n, dd) for n, dd in zip(nums, dens)]
    total = RationalFunction.canonicalize(lp("0"), lp("1"))
    for f in fs:
        total = total + f * f.involve()
    assert (not total) == all(not f for f in fs)


def test_positive_definite_transfers_sampled_qi():
    rng = random.Random(3)
    for _ in range(1000):
        fs = [
            LaurentPoly(QQ_I, {k: QQ_I.random(rng) for k in range(rng.randint(-1, 0), rng.randint(0, 2))})
            for _ in range(rng.randint(1, 3))
        ]
        total = LaurentPoly(QQ_I, {})
        for f in fs:
            total = total + f * f.involve()
        assert (not total) == all(not f for f in fs)


def test_scalar_syntax_error():
    with pytest.raises(ScalarSyntaxError):
        parse_scalar("1 + * x")
