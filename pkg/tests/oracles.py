"""Independent reference computations used by the tests."""

from __future__ import annotations

import itertools
from functools import reduce

import sympy

from lpadim.scalars import LaurentPoly

X = sympy.Symbol("x")


def to_sympy(f: LaurentPoly) -> sympy.Expr:
    return sum((sympy.Rational(str(c)) * X**k for k, c in f.terms.items()), sympy.Integer(0))


def ordinary(expr: sympy.Expr) -> sympy.Poly | None:
    """Strip the unit x^k and make monic; None for zero."""
    expr = sympy.together(sympy.expand(expr))
    if expr == 0:
        return None
    num, den = sympy.fraction(expr)
    p = sympy.Poly(num, X)
    # den is a power of x, a unit; so is any x^k dividing num
    k = min(m[0] for m in p.monoms())
    p = sympy.Poly(sympy.expand(p.as_expr() / X**k), X)
    return p.monic()


def leibniz_det(rows: list[list[sympy.Expr]]) -> sympy.Expr:
    n = len(rows)
    total = sympy.Integer(0)
    for perm in itertools.permutations(range(n)):
        sign = sympy.combinatorics.Permutation(list(perm)).signature()
        term = sympy.Integer(sign)
        for i, j in enumerate(perm):
            term *= rows[i][j]
        total += term
    return sympy.expand(total)


def minor_gcds(A: list[list[LaurentPoly]]) -> list[sympy.Poly | None]:
    """gcd of all k x k minors for k = 1..min(m, n), as monic ordinary polys."""
    m, n = len(A), len(A[0]) if A else 0
    S = [[to_sympy(a) for a in row] for row in A]
    out = []
    for k in range(1, min(m, n) + 1):
        minors = []
        for rs in itertools.combinations(range(m), k):
            for cs in itertools.combinations(range(n), k):
                p = ordinary(leibniz_det([[S[i][j] for j in cs] for i in rs]))
                if p is not None:
                    minors.append(p)
        out.append(reduce(lambda a, b: a.gcd(b), minors).monic() if minors else None)
    return out
