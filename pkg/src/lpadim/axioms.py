"""Randomized checks of the comparability axioms and of the properties of
the dimension function on a finite no-exit graph.

Projections are sampled on the Q side (fraction-field blocks, where meets and
joins exist) as orthogonal projections onto column spans of random unimodular
matrices; idempotents are sampled on the R side as unimodular conjugates of
0/1 diagonals.  Every equivalence claim is backed by a witness verified by
exact multiplication.  Negative equivalence claims are backed by the trace,
an invariant of algebraic equivalence computed independently of the rank.

``d`` here is the module-normalized dimension (``d(1_n) = n``); the
statements (D3), (D5), (D6) refer to ``d / n`` on ``M_n(R)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .blocks import BlockMatrix, central_idempotent, is_projection, proj_join, proj_meet
from .dimension import (
    DimVector,
    central_cover,
    d,
    domination,
    gc_witness,
    sim_a,
    simple_order,
)
from .graph import Graph
from .sampling import projection_from_bases, random_basis, random_idempotent
from .scalars import QQ, Field, GaussQ, LaurentPoly, RationalFunction, require_positive_definite
from .structure import decompose

__all__ = ["AXIOMS", "AxiomResult", "AxiomReport", "check_axioms"]

AXIOMS = (
    "Def", "FA", "OA", "P", "GC", "Fin",
    "D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "D9", "D10", "D11",
    "simple", "RQ",
)  # fmt: skip


@dataclass
class AxiomResult:
    axiom: str
    status: str = "pass"
    samples: int = 0
    counterexample: dict | None = None

    def record(self, ok: bool, example=None):
        self.samples += 1
        if not ok and self.status != "fail":
            self.status = "fail"
            self.counterexample = example() if callable(example) else example

    def to_json(self) -> dict:
        out = {"axiom": self.axiom, "status": self.status, "samples": self.samples}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class AxiomReport:
    graph: str
    seed: int
    count: int
    max_n: int
    results: dict[str, AxiomResult] = field(default_factory=dict)
    witnesses_verified: int = 0

    @property
    def ok(self) -> bool:
        return all(r.status == "pass" for r in self.results.values())

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "seed": self.seed,
            "samples": self.count,
            "max_n": self.max_n,
            "witnesses_verified": self.witnesses_verified,
            "ok": self.ok,
            "results": [self.results[a].to_json() for a in AXIOMS],
        }


def _trace_vector(p: BlockMatrix) -> tuple | None:
    """Per-block trace as a rational number.  For an idempotent over a
    characteristic-0 field it equals the rank, and trace(xy) = trace(yx)
    makes it an invariant of algebraic equivalence."""
    out = []
    for M in p.mats:
        t = M.trace()
        if isinstance(t, RationalFunction):
            if not (t.is_laurent() and t.num.is_constant()):
                return None
            t = t.num.constant()
        elif isinstance(t, LaurentPoly):
            if not t.is_constant():
                return None
            t = t.constant()
        if isinstance(t, GaussQ):
            if t.im:
                return None
            t = t.re
        out.append(mpq(t))
    return tuple(out)


def _is_below(a: BlockMatrix, b: BlockMatrix) -> bool:
    return b * a == a and a * b == a


def _pair_json(**mats) -> dict:
    return {k: v.to_json() for k, v in mats.items()}


class _Checker:
    def __init__(self, report: AxiomReport):
        self.report = report
        self.r = {a: AxiomResult(a) for a in AXIOMS}
        report.results = self.r

    def equiv(self, p, q):
        w = sim_a(p, q)
        if w is not None:
            self.report.witnesses_verified += 1
        return w

    def dom(self, p, q):
        out = domination(p, q)
        if out is not None:
            self.report.witnesses_verified += 1
        return out


def check_axioms(
    g: Graph,
    count: int = 200,
    seed: int = 0,
    max_n: int = 3,
    field: Field = QQ,
    name: str | None = None,
) -> AxiomReport:
    """Sample ``count`` projection pairs at logical sizes ``1..max_n``."""
    require_positive_definite(field)
    spec = decompose(g)
    rng = random.Random(seed)
    report = AxiomReport(name or "graph", seed, count, max_n)
    ck = _Checker(report)
    R = ck.r
    sizes = [b.size for b in spec.blocks]
    for _ in range(count):
        n = rng.randint(1, max_n)
        Ns = [n * s for s in sizes]
        one = BlockMatrix.identity(spec, field, n, "Q")
        zero = BlockMatrix.zeros(spec, field, n, n, "Q")

        # p = p1 + p2 and q = q1 + q2 with matching ranks; t independent
        r = [rng.randint(0, N) for N in Ns]
        r1 = [rng.randint(0, x) for x in r]
        Bp = random_basis(spec, field, n, rng, r)
        Bq = random_basis(spec, field, n, rng, r)
        cut = lambda Bs: [B.submatrix(range(B.nrows), range(k)) for B, k in zip(Bs, r1)]  # noqa: E731
        p = projection_from_bases(spec, field, n, Bp)
        q = projection_from_bases(spec, field, n, Bq)
        p1 = projection_from_bases(spec, field, n, cut(Bp))
        q1 = projection_from_bases(spec, field, n, cut(Bq))
        p2, q2 = p - p1, q - q1
        t = projection_from_bases(spec, field, n, random_basis(spec, field, n, rng))
        dp, dq, dt = d(p), d(q), d(t)
        dp1, dp2 = d(p1), d(p2)

        # (Def) and (D7)
        for x in (p, p1, t):
            R["Def"].record((ck.equiv(x, zero) is None) == (not x.is_zero()), lambda: _pair_json(p=x))
            R["D7"].record(d(x).is_zero() == x.is_zero(), lambda: _pair_json(p=x))

        # (FA): orthogonal parts equivalent => sums equivalent
        fam_ok = (
            p1 * p2 == zero
            and q1 * q2 == zero
            and is_projection(p2)
            and is_projection(q2)
            and ck.equiv(p1, q1) is not None
            and ck.equiv(p2, q2) is not None
        )
        R["FA"].record(fam_ok and ck.equiv(p, q) is not None, lambda: _pair_json(p1=p1, p2=p2, q1=q1, q2=q2))

        # (OA): a = a1 + a2, b = b1 + b2, a b = 0, a_i ~ b_i
        m = [rng.randint(0, N // 2) for N in Ns]
        k = [rng.randint(0, x) for x in m]
        Bo = random_basis(spec, field, n, rng, [2 * x for x in m])
        take = lambda Bs, cols: [B.submatrix(range(B.nrows), c) for B, c in zip(Bs, cols)]  # noqa: E731
        a = projection_from_bases(spec, field, n, take(Bo, [range(x) for x in m]))
        a1 = projection_from_bases(spec, field, n, take(Bo, [range(x) for x in k]))
        full = projection_from_bases(spec, field, n, Bo)
        b = full - a
        Bb = [bm * B.submatrix(range(B.nrows), range(x, x + y)) for bm, B, x, y in zip(b.mats, Bo, m, k)]
        b1 = projection_from_bases(spec, field, n, Bb)
        a2, b2 = a - a1, b - b1
        oa_ok = (
            a * b == zero
            and _is_below(b1, b)
            and ck.equiv(a1, b1) is not None
            and ck.equiv(a2, b2) is not None
        )
        R["OA"].record(oa_ok and ck.equiv(a, b) is not None, lambda: _pair_json(a1=a1, a2=a2, b1=b1, b2=b2))

        # (P): p - (p ^ t) ~ (p v t) - t
        meet, join = proj_meet(p, t), proj_join(p, t)
        lattice_ok = _is_below(meet, p) and _is_below(meet, t) and _is_below(p, join) and _is_below(t, join)
        R["P"].record(lattice_ok and ck.equiv(p - meet, join - t) is not None, lambda: _pair_json(p=p, q=t))

        # (GC)
        gc = gc_witness(p, t)
        report.witnesses_verified += 2
        cen = gc.c
        R["GC"].record(
            _is_below(gc.lower[0], cen * t) and _is_below(gc.upper[0], (one - cen) * p),
            lambda: _pair_json(p=p, q=t),
        )

        # (Fin): p ~ 1 => p = 1
        for x in (p, t, full):
            R["Fin"].record((ck.equiv(x, one) is None) or x == one, lambda: _pair_json(p=x))

        # (D1), (D8): equivalence iff equal dimension, witnesses both ways
        R["D1"].record(dp == dq and dp1 == d(q1) and d(p2) == d(q2), lambda: _pair_json(p=p, q=q))
        w = ck.equiv(p, t)
        if dp == dt:
            R["D8"].record(w is not None, lambda: _pair_json(p=p, q=t))
        else:
            tp, tt = _trace_vector(p), _trace_vector(t)
            R["D8"].record(w is None and tp is not None and tp != tt, lambda: _pair_json(p=p, q=t))

        # (D9): domination iff d(p) <= d(t)
        dom = ck.dom(p, t)
        if dp <= dt:
            R["D9"].record(dom is not None and _is_below(dom[0], t), lambda: _pair_json(p=p, q=t))
        else:
            tp, tt = _trace_vector(p), _trace_vector(t)
            R["D9"].record(dom is None and any(x > y for x, y in zip(tp, tt)), lambda: _pair_json(p=p, q=t))

        # (D2), (D5)
        for x, dx in ((p, dp), (t, dt), (p1, dp1)):
            R["D2"].record(all(v >= 0 for v in dx.values), lambda: _pair_json(p=x))
            R["D5"].record(all(0 <= v / n <= 1 for v in dx.values), lambda: _pair_json(p=x))

        # (D3), (D6): central projections
        ind = [rng.random() < 0.5 for _ in spec.blocks]
        c = central_idempotent(spec, field, ind, n, "Q")
        R["D3"].record(d(c).scale(mpq(1, n)).values == tuple(mpq(int(x)) for x in ind), lambda: _pair_json(c=c))
        R["D6"].record(
            d(c * t).values == tuple(v if x else mpq(0) for v, x in zip(dt.values, ind)),
            lambda: _pair_json(c=c, p=t),
        )

        # (D4), (D11): orthogonal sums
        R["D4"].record(p1 * p2 == zero and dp == dp1 + dp2, lambda: _pair_json(p1=p1, p2=p2))
        fam = [a1, a2, b1, b2]
        R["D11"].record(
            all(x * y == zero for i, x in enumerate(fam) for y in fam[i + 1 :])
            and d(a + b) == d(a1) + d(a2) + d(b1) + d(b2),
            lambda: _pair_json(a1=a1, a2=a2, b1=b1, b2=b2),
        )

        # (D10): increasing chain 0 <= p1 <= p <= join(p, t)
        chain = [zero, p1, p, join]
        dims = [d(x) for x in chain]
        R["D10"].record(
            all(_is_below(x, y) for x, y in zip(chain, chain[1:]))
            and all(u <= v for u, v in zip(dims, dims[1:]))
            and dims[-1] == _sup(dims),
            lambda: _pair_json(p1=p1, p=p, join=join),
        )

        # R side: idempotents, witnesses over K[x, x^-1], R/Q agreement
        re = [rng.randint(0, N) for N in Ns]
        e = random_idempotent(spec, field, n, rng, re)
        f = random_idempotent(spec, field, n, rng, re)
        R["RQ"].record(d(e) == d(e.to_q()) and ck.equiv(e, f) is not None, lambda: _pair_json(e=e, f=f))
        R["Fin"].record(any(x < N for x, N in zip(re, Ns)) or e == BlockMatrix.identity(spec, field, n), lambda: _pair_json(p=e))

        # simple projections: d(x) = d(C(x)) / order
        for x in (p, t, p1, e):
            o = simple_order(x)
            if o is not None:
                R["simple"].record(d(x).scale(o) == d(central_cover(x)), lambda: _pair_json(p=x))
    return report


def _sup(dims: list[DimVector]) -> DimVector:
    vals = tuple(max(v[i] for v in (x.values for x in dims)) for i in range(len(dims[0].values)))
    return DimVector(dims[0].spec, vals)
