from __future__ import annotations

import random

import pytest

from conftest import NO_EXIT
from lpadim.corpus import corpus, get
from lpadim.lpa import (
    ElementParseError,
    Lpa,
    MixedGraphs,
    normal_form,
    parse_element,
    parse_raw,
    random_raw,
)
from lpadim.scalars import QQ_I, GaussQ
from lpadim.structure import phi


def test_parse_examples(tail):
    A = Lpa(tail)
    assert A.parse("v") == A.vertex("v")
    raw = parse_raw(tail, "t.l.l*.t*")
    assert len(raw.terms) == 1
    # l is the designated edge at v, so the monomial contracts to t.t* = u
    assert A.parse("t.l.l*.t*") == A.vertex("u")
    e = A.parse("2*t - 3/2*v")
    assert len(e.terms) == 2


def test_parse_errors(tail):
    with pytest.raises(ElementParseError):
        parse_element(tail, "t..l")
    with pytest.raises(ElementParseError):
        parse_element(tail, "q")


def test_ck_rules():
    A = Lpa(get("G_cyc2"))
    assert A.parse("f*.f") == A.vertex("v")
    T = Lpa(get("G_tail"))
    assert T.parse("t.t*") == T.vertex("u")
    R = Lpa(get("G_rose2"))
    assert R.parse("b.b*") == R.vertex("v") - R.parse("a.a*")
    assert R.parse("a*.b").is_zero()
    # normal forms never end in a designated pair
    for key in R.parse("b.b* + a.b.b*.a*").terms:
        p, q = key
        assert not (p.edges and q.edges and p.edges[-1] == q.edges[-1] == "b")


def test_mul_add_involve(tail):
    A = Lpa(tail)
    assert A.parse("2*t.l*").star() == A.parse("2*l.t*")
    Ai = Lpa(tail, QQ_I)
    e = Ai.parse("(1+2i)*t.l*")
    assert e.star() == Ai.parse("(1-2i)*l.t*")
    assert A.vertex("v") * A.edge("t") == A.zero
    assert A.edge("t") * A.vertex("v") == A.edge("t")
    assert A.vertex("u") * A.edge("t") == A.edge("t")


@pytest.mark.parametrize("name", list(corpus()))
def test_unit_and_involution_laws(name):
    g = get(name)
    A = Lpa(g)
    rng = random.Random(11)
    one = A.one
    for _ in range(100):
        a, b = A.random_element(rng), A.random_element(rng)
        assert one * a == a == a * one
        assert (a * b).star() == b.star() * a.star()
        assert a.star().star() == a


def test_idempotents(tail):
    A = Lpa(tail)
    for v in ("u", "v"):
        assert A.vertex(v).is_idempotent() and A.vertex(v).is_projection()
    tt = A.parse("t.t*")
    assert tt.is_projection()
    s = A.parse("v + t")
    # (v + t)^2 = v + v.t + t.v + t.t = v + 0 + t + 0
    assert s * s == s and s.is_idempotent() and not s.is_projection()
    w = A.parse("u + v + t")
    # (1 + t)^2 = 1 + 2t since t.t = 0
    assert w * w == A.parse("u + v + 2*t") and not w.is_idempotent()


def test_mixed_graphs_rejected(tail):
    with pytest.raises(MixedGraphs):
        Lpa(tail).one + Lpa(get("G_loop")).one


def test_bare_coefficient_is_scalar_multiple_of_one(tail):
    for strategy in ("innermost", "outermost"):
        a = normal_form(tail, parse_raw(tail, "3 + t.t*"), strategy=strategy)
        assert str(a) == "4*u + 3*v"


@pytest.mark.parametrize("name", list(corpus()))
def test_strategies_agree(name):
    g = get(name)
    rng = random.Random(2)
    for _ in range(200):
        raw = random_raw(g, rng)
        assert normal_form(g, raw, strategy="innermost") == normal_form(g, raw, strategy="outermost")


@pytest.mark.parametrize("name", NO_EXIT)
def test_faithful_on_no_exit(name):
    g = get(name)
    rng = random.Random(4)
    for _ in range(200):
        a = normal_form(g, random_raw(g, rng))
        assert a.is_zero() == phi(g, a).is_zero()


def test_gaussian_coefficients(tail):
    A = Lpa(tail, QQ_I)
    a = A.parse("1i*v")
    assert a * a == A.parse("-1*v")
    assert next(iter(a.terms.values())) == GaussQ(0, 1)
