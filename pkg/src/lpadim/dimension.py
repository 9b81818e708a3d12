"""Dimension of projections, idempotents and finitely presented modules.

Over a finite no-exit graph every block entry ring is a field or the PID
``K[x, x^-1]``, so finitely generated projectives are free and an idempotent
is determined up to algebraic equivalence by its per-block rank.  The
dimension of ``p`` in block ``b`` of size ``s_b`` is ``rank_b(p) / s_b``; the
identity of ``M_n(R)`` therefore has dimension ``n`` in every block.

Every positive equivalence answer comes with a witness that is checked by
exact multiplication before it is returned.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .blocks import (
    BlockMatrix,
    SideMismatch,
    central_idempotent,
    is_idempotent,
    is_projection,
    orth_projection_block,
    rank_q,
    saturation_data,
)
from .graph import Graph
from .linalg import Mat, ShapeMismatch, orth_projection, rank, snf
from .lpa import LpaElement
from .scalars import Field, require_positive_definite
from .structure import BlockSpec, decompose, phi, phi_matrix

__all__ = [
    "NotIdempotent",
    "WitnessFailure",
    "DimVector",
    "EquivWitness",
    "GcWitness",
    "ModulePresentation",
    "Splitting",
    "VReport",
    "d",
    "central_cover",
    "simple_order",
    "sim_a",
    "preceq_a",
    "domination",
    "gc_witness",
    "dim_module",
    "split_bnd",
    "dim_over_q",
    "v_class",
    "v_relation_check",
    "sim_star_verify",
    "sim_star_search",
    "idempotent_factors",
]


class NotIdempotent(ValueError):
    pass


class WitnessFailure(AssertionError):
    """A constructed witness failed exact verification (an internal bug)."""


# --------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class DimVector:
    spec: BlockSpec = field(compare=False, repr=False)
    values: tuple

    @classmethod
    def constant(cls, spec: BlockSpec, value) -> DimVector:
        return cls(spec, tuple(mpq(value) for _ in spec.blocks))

    def __add__(self, other: DimVector) -> DimVector:
        return DimVector(self.spec, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: DimVector) -> DimVector:
        return DimVector(self.spec, tuple(a - b for a, b in zip(self.values, other.values)))

    def scale(self, c) -> DimVector:
        return DimVector(self.spec, tuple(mpq(c) * a for a in self.values))

    def __le__(self, other: DimVector) -> bool:
        return all(a <= b for a, b in zip(self.values, other.values))

    def is_zero(self) -> bool:
        return not any(self.values)

    def to_json(self) -> dict:
        return {
            "blocks": [
                {"kind": b.kind, "size": b.size, "value": _frac(v)}
                for b, v in zip(self.spec.blocks, self.values)
            ]
        }

    def __str__(self):
        if len(self.values) == 1:
            return str(mpq(self.values[0]))
        return "(" + ", ".join(str(mpq(v)) for v in self.values) + ")"


def _frac(v) -> str:
    v = mpq(v)
    return f"{v.numerator}/{v.denominator}"


@dataclass
class EquivWitness:
    """``kind == "algebraic"``: p = x y and q = y x.  ``kind == "star"``:
    p = x x* and q = x* x (``y`` is None)."""

    kind: str
    x: BlockMatrix
    y: BlockMatrix | None
    verified: bool = False

    def to_json(self) -> dict:
        out = {"kind": self.kind, "verified": self.verified, "x": self.x.to_json()}
        if self.y is not None:
            out["y"] = self.y.to_json()
        return out


@dataclass
class GcWitness:
    c: BlockMatrix
    indicator: tuple
    lower: tuple  # domination of c p under c q
    upper: tuple  # domination of (1 - c) q under (1 - c) p


def _require_idempotent(p: BlockMatrix):
    if not is_idempotent(p):
        raise NotIdempotent("expected an idempotent matrix")


# --------------------------------------------------------------------------
# dimension of idempotents


def d(p: BlockMatrix) -> DimVector:
    require_positive_definite(p.field)
    _require_idempotent(p)
    return _d_unchecked(p)


def _d_unchecked(p: BlockMatrix) -> DimVector:
    return DimVector(p.spec, tuple(mpq(r, b.size) for r, b in zip(rank_q(p), p.spec.blocks)))


def central_cover(p: BlockMatrix) -> BlockMatrix:
    """Smallest central idempotent above p: identity on the blocks where p is nonzero."""
    _require_idempotent(p)
    return central_idempotent(p.spec, p.field, [not M.is_zero() for M in p.mats], p.n, p.side)


def simple_order(p: BlockMatrix) -> int | None:
    """The n with d(p) = d(C(p)) / n, if there is one."""
    _require_idempotent(p)
    order = None
    for r, b in zip(rank_q(p), p.spec.blocks):
        if r == 0:
            continue
        full = p.n * b.size
        if full % r:
            return None
        if order is None:
            order = full // r
        elif order != full // r:
            return None
    return order


# --------------------------------------------------------------------------
# algebraic equivalence


def idempotent_factors(P: Mat) -> tuple[Mat, Mat, int]:
    """Write an idempotent as ``P = X Y`` with ``Y X = I_r``.

    From ``U P V = diag(I_r, 0)``: ``X = U^-1[:, :r]`` and ``Y = V^-1[:r, :]``.
    ``X`` is left invertible and ``Y`` right invertible, so ``P^2 = P`` forces
    ``Y X = I_r``.
    """
    res = snf(P)
    N, r = P.nrows, res.rank
    if not all(P.ring.is_unit(f) for f in res.factors):
        raise NotIdempotent("non-unit invariant factor in an idempotent")
    X = res.Uinv.submatrix(range(N), range(r))
    Y = res.Vinv.submatrix(range(r), range(N))
    return X, Y, r


def _factors(p: BlockMatrix) -> list[tuple[Mat, Mat]]:
    f = p.memo.get("factors")
    if f is None:
        f = p.memo["factors"] = [idempotent_factors(M)[:2] for M in p.mats]
    return f


def _verify_alg(p: BlockMatrix, q: BlockMatrix, w: EquivWitness) -> bool:
    return w.x * w.y == p and w.y * w.x == q


def sim_a(p: BlockMatrix, q: BlockMatrix) -> EquivWitness | None:
    """Witness of p ~a q, or None when the rank vectors differ."""
    p._compat(q)
    if p.shape != q.shape:
        raise ShapeMismatch(f"sim_a: shapes {p.shape} and {q.shape} differ")
    _require_idempotent(p)
    _require_idempotent(q)
    if rank_q(p) != rank_q(q):
        return None
    xs, ys = [], []
    for P, Q, (Xp, Yp), (Xq, Yq) in zip(p.mats, q.mats, _factors(p), _factors(q)):
        if Xp.ncols == 0:
            xs.append(Mat.zeros(P.ring, P.nrows, P.nrows))
            ys.append(Mat.zeros(P.ring, P.nrows, P.nrows))
            continue
        xs.append(Xp * Yq)
        ys.append(Xq * Yp)
    mk = lambda mats: BlockMatrix(p.spec, p.field, p.side, p.n, p.n, mats)  # noqa: E731
    w = EquivWitness("algebraic", mk(xs), mk(ys))
    if not _verify_alg(p, q, w):
        raise WitnessFailure("constructed algebraic equivalence does not verify")
    w.verified = True
    return w


def preceq_a(p: BlockMatrix, q: BlockMatrix) -> bool:
    return d(p) <= d(q)


def domination(p: BlockMatrix, q: BlockMatrix) -> tuple[BlockMatrix, EquivWitness] | None:
    """An idempotent ``q' <= q`` with ``p ~a q'`` (a projection when q is a
    Q-side projection), or None when some block rank of p exceeds that of q."""
    rp, rq = rank_q(p), rank_q(q)
    if any(a > b for a, b in zip(rp, rq)):
        return None
    orth = q.side == "Q" and q.field.positive_definite_proof and is_projection(q)
    mats = []
    for Q, r, (X, Y) in zip(q.mats, rp, _factors(q)):
        N = Q.nrows
        if r == 0:
            mats.append(Mat.zeros(Q.ring, N, N))
            continue
        if orth:
            mats.append(orth_projection(X.submatrix(range(N), range(r))))
        else:
            mats.append(X.submatrix(range(N), range(r)) * Y.submatrix(range(r), range(N)))
    sub = BlockMatrix(q.spec, q.field, q.side, q.n, q.n, mats)
    if not (q * sub == sub and sub * q == sub and is_idempotent(sub)):
        raise WitnessFailure("constructed subidempotent is not below q")
    w = sim_a(p, sub)
    if w is None:
        raise WitnessFailure("subidempotent rank mismatch")
    return sub, w


def gc_witness(p: BlockMatrix, q: BlockMatrix) -> GcWitness:
    """Central c with c p dominated by c q and (1 - c) q dominated by (1 - c) p."""
    require_positive_definite(p.field)
    _require_idempotent(p)
    _require_idempotent(q)
    ind = tuple(a <= b for a, b in zip(rank_q(p), rank_q(q)))
    c = central_idempotent(p.spec, p.field, ind, p.n, p.side)
    one = BlockMatrix.identity(p.spec, p.field, p.n, p.side)
    lo = domination(c * p, c * q)
    hi = domination((one - c) * q, (one - c) * p)
    if lo is None or hi is None:
        raise WitnessFailure("generalized comparability witness failed")
    return GcWitness(c, ind, lo, hi)


# --------------------------------------------------------------------------
# star equivalence


def sim_star_verify(p: BlockMatrix, q: BlockMatrix, x: BlockMatrix) -> bool:
    return x * x.adjoint() == p and x.adjoint() * x == q


def _signed_monomials(ring, N: int):
    one = ring.one
    for perm in itertools.permutations(range(N)):
        for signs in itertools.product((one, -one), repeat=N):
            rows = [[ring.zero] * N for _ in range(N)]
            for i, j in enumerate(perm):
                rows[i][j] = signs[i]
            yield Mat(ring, rows, N, coerce=False)


def _random_unimodular(ring, N: int, rng: random.Random, steps: int) -> Mat:
    from .sampling import random_unimodular

    return random_unimodular(ring, N, rng, steps)[0]


def sim_star_search(
    p: BlockMatrix, q: BlockMatrix, budget: int = 2000, seed: int = 0
) -> EquivWitness | None:
    """Look for x with p = x x*, q = x* x among x = p W q, W a signed
    permutation or a sampled unimodular matrix.  None means "unknown"."""
    if not (is_projection(p) and is_projection(q)):
        raise NotIdempotent("sim_star_search expects projections")
    p._compat(q)
    if rank_q(p) != rank_q(q):
        return None
    rng = random.Random(seed)
    per_block = max(1, budget // max(1, len(p.mats)))
    xs = []
    for P, Q in zip(p.mats, q.mats):
        N = P.nrows
        found = None
        tried = 0

        def ok(W):
            x = P * W * Q
            return x if x * x.adjoint() == P and x.adjoint() * x == Q else None

        for W in itertools.chain([Mat.identity(P.ring, N)], _signed_monomials(P.ring, N)):
            if tried >= per_block:
                break
            tried += 1
            found = ok(W)
            if found is not None:
                break
        while found is None and tried < per_block:
            tried += 1
            found = ok(_random_unimodular(P.ring, N, rng, 2 * N))
        if found is None:
            return None
        xs.append(found)
    x = BlockMatrix(p.spec, p.field, p.side, p.n, p.n, xs)
    if not sim_star_verify(p, q, x):
        raise WitnessFailure("star witness failed verification")
    return EquivWitness("star", x, None, True)


# --------------------------------------------------------------------------
# finitely presented modules


@dataclass
class ModulePresentation:
    """``M = R^n / rowspace(A)`` with ``A`` a k x n R-side matrix."""

    graph: Graph
    n: int
    relations: BlockMatrix

    def __post_init__(self):
        if self.relations.side != "R":
            raise SideMismatch("relations must be R-side")
        if self.relations.k != self.n:
            raise ShapeMismatch(f"relation matrix has {self.relations.k} columns, expected {self.n}")

    @property
    def field(self) -> Field:
        return self.relations.field

    @property
    def spec(self) -> BlockSpec:
        return self.relations.spec

    @classmethod
    def free(cls, g: Graph, n: int, field: Field) -> ModulePresentation:
        return cls(g, n, BlockMatrix.zeros(decompose(g), field, 0, n))

    @classmethod
    def from_elements(cls, g: Graph, rows: Sequence[Sequence[LpaElement]], n: int | None = None) -> ModulePresentation:
        if not rows:
            raise ValueError("use ModulePresentation.free for an empty relation list")
        n = len(rows[0]) if n is None else n
        return cls(g, n, phi_matrix(g, [list(r) for r in rows]))


def _check_module_pre(P: ModulePresentation):
    decompose(P.graph)  # raises NotNoExit
    require_positive_definite(P.field)


def dim_module(P: ModulePresentation) -> DimVector:
    _check_module_pre(P)
    sat = saturation_data(P.relations)
    return DimVector(
        P.spec,
        tuple(P.n - mpq(r, b.size) for r, b in zip(sat.ranks, P.spec.blocks)),
    )


@dataclass
class Splitting:
    closure: BlockMatrix  # idempotent whose row space is cl(K)
    projective: BlockMatrix  # 1 - closure, image isomorphic to the unbounded part
    torsion: ModulePresentation  # cl(K) / K presented over R^n
    torsion_factors: list[list]
    dim_total: DimVector
    dim_bounded: DimVector
    dim_unbounded: DimVector

    def to_json(self) -> dict:
        return {
            "closure": self.closure.to_json(),
            "projective_part": self.projective.to_json(),
            "torsion_factors": [[str(f) for f in fs] for fs in self.torsion_factors],
            "dim": self.dim_total.to_json(),
            "dim_bounded": self.dim_bounded.to_json(),
            "dim_unbounded": self.dim_unbounded.to_json(),
        }


def split_bnd(P: ModulePresentation) -> Splitting:
    """``M = bnd M (+) unb M``.

    With ``q`` the closure idempotent of ``K = rowspace(A)``, ``v -> v q``
    maps ``R^n`` onto ``cl(K)`` with kernel ``K + R^n (1 - q)``, so
    ``[A; 1 - q]`` presents ``cl(K)/K``; the unbounded part is
    ``R^n / cl(K) ~= R^n (1 - q)``.
    """
    _check_module_pre(P)
    sat = saturation_data(P.relations)
    q = sat.q
    one = BlockMatrix.identity(P.spec, P.field, P.n)
    proj = one - q
    if not (is_idempotent(q) and P.relations * q == P.relations and q * proj == BlockMatrix.zeros(P.spec, P.field, P.n)):
        raise WitnessFailure("closure idempotent failed verification")
    torsion = ModulePresentation(P.graph, P.n, BlockMatrix.vstack([P.relations, proj]))
    total = DimVector(P.spec, tuple(P.n - mpq(r, b.size) for r, b in zip(sat.ranks, P.spec.blocks)))
    # A saturation has the rank of what it saturates, so the torsion part's
    # dimension only needs ranks; elimination over K(x) avoids a second
    # Smith form on the wide entries of 1 - q.
    bounded = DimVector(
        P.spec,
        tuple(P.n - mpq(rank(M), b.size) for M, b in zip(torsion.relations.mats, P.spec.blocks)),
    )
    unbounded = _d_unchecked(proj)
    return Splitting(q, proj, torsion, sat.torsion_factors(), total, bounded, unbounded)


def dim_over_q(P: ModulePresentation) -> DimVector:
    """Dimension of ``M (x)_R Q``: ranks over the fraction field by elimination."""
    _check_module_pre(P)
    A = P.relations.to_q()
    return DimVector(
        P.spec,
        tuple(P.n - mpq(rank(M), b.size) for M, b in zip(A.mats, P.spec.blocks)),
    )


# --------------------------------------------------------------------------
# the monoid of projective classes


def v_class(p: BlockMatrix) -> tuple[int, ...]:
    """Class in V(R) = N^(#blocks): SNF rank on the R side, elimination rank on Q."""
    _require_idempotent(p)
    if p.side == "R":
        return tuple(snf(M).rank for M in p.mats)
    return rank_q(p)


@dataclass
class VReport:
    relations: list
    q_invariant: bool
    ok: bool

    def to_json(self) -> dict:
        return {"relations": self.relations, "q_invariant": self.q_invariant, "ok": self.ok}


def v_relation_check(g: Graph, field: Field) -> VReport:
    from .lpa import Lpa

    spec = decompose(g)
    A = Lpa(g, field)
    classes = {}
    q_ok = True
    for v in g.vertices:
        pv = phi(g, A.vertex(v))
        classes[v] = v_class(pv)
        q_ok = q_ok and v_class(pv.to_q()) == classes[v]
    rels = []
    for v in g.regular():
        total = [0] * len(spec.blocks)
        for e in g.out_edges[v]:
            for i, c in enumerate(classes[e.dst]):
                total[i] += c
        rels.append(
            {
                "vertex": v,
                "class": list(classes[v]),
                "sum_over_out_edges": total,
                "holds": list(classes[v]) == total,
            }
        )
    return VReport(rels, q_ok, q_ok and all(r["holds"] for r in rels))


def projection_onto(spec: BlockSpec, field: Field, bases: Sequence[Mat], n: int) -> BlockMatrix:
    return orth_projection_block(spec, field, bases, n)
