from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from conftest import lp
from oracles import minor_gcds, ordinary, to_sympy
from lpadim.linalg import FractionField, LaurentRing, Mat, det, inverse, rank, snf, solve, verify_snf
from lpadim.sampling import random_laurent, random_unimodular
from lpadim.scalars import QQ

L = LaurentRing(QQ)
F = FractionField(QQ)


def _factor_polys(res):
    return [ordinary(to_sympy(f)) for f in res.factors]


def test_snf_examples():
    res = snf(Mat(L, [[lp("x"), 0], [0, lp("1 + x")]]))
    assert _factor_polys(res) == [ordinary(1), ordinary(to_sympy(lp("1 + x")))]
    assert res.factors[1] == lp("1 + x")  # normalized: ordinary, monic
    Z = Mat.zeros(L, 2, 3)
    res = snf(Z)
    assert res.rank == 0 and res.D == Z and res.U.is_identity() and res.V.is_identity()
    res = snf(Mat(L, [[lp("1 + x")]]))
    assert res.D == Mat(L, [[lp("1 + x")]])


def _product_chain(res):
    out, acc = [], lp("1")
    for f in res.factors:
        acc = acc * f
        out.append(ordinary(to_sympy(acc)))
    return out


def test_snf_matches_gcd_of_minors():
    rng = random.Random(0)
    for _ in range(120):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        rows = [[random_laurent(QQ, rng, 3) for _ in range(n)] for _ in range(m)]
        A = Mat(L, rows)
        res = snf(A)
        verify_snf(A, res)
        expect = minor_gcds(rows)
        got = _product_chain(res)
        assert got == [p for p in expect if p is not None][: res.rank]
        assert all(p is None for p in expect[res.rank :])


def test_unimodular_sampler_inverse():
    rng = random.Random(2)
    for _ in range(50):
        U, Ui = random_unimodular(L, rng.randint(1, 4), rng)
        assert (U * Ui).is_identity()
        d = det(U)
        assert d.is_unit()


def test_field_helpers():
    A = Mat(F, [[1, 2], [3, 4]])
    assert rank(A) == 2
    assert (A * inverse(A)).is_identity()
    B = Mat(F, [[5], [6]])
    Xs = solve(A, B)
    assert A * Xs == B
    assert Mat(F, [[1, 2], [2, 4]]).adjoint() == Mat(F, [[1, 2], [2, 4]])
    assert rank(Mat(F, [[1, 2], [2, 4]])) == 1
    assert det(Mat(F, [[mpq(1, 2), 0], [0, 4]])) == F.coerce(2)


def test_adjoint_involution():
    rng = random.Random(3)
    for _ in range(50):
        A = Mat(L, [[random_laurent(QQ, rng, 2) for _ in range(3)] for _ in range(2)])
        assert A.adjoint().adjoint() == A


@pytest.mark.parametrize("seed", range(3))
def test_direct_finiteness(seed):
    # solve A B = 1 over the Laurent ring, then B A = 1 must hold
    rng = random.Random(seed)
    for _ in range(30):
        N = rng.randint(1, 4)
        A, _ = random_unimodular(L, N, rng)
        B = solve(A, Mat.identity(L, N))
        assert B is not None and (A * B).is_identity()
        assert (B * A).is_identity()
    # a non-unit determinant has no right inverse
    assert solve(Mat(L, [[lp("3 + x + x^-1")]]), Mat.identity(L, 1)) is None
