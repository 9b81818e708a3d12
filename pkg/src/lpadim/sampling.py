"""Seeded random generators for matrices, idempotents, projections and
module presentations over a block decomposition."""

from __future__ import annotations

import random
from typing import Sequence

from gmpy2 import mpq

from .blocks import BlockMatrix, block_ring
from .linalg import Mat, orth_projection
from .scalars import GaussQ, LaurentPoly
from .structure import BlockSpec

__all__ = [
    "small_entry",
    "random_laurent",
    "random_unimodular",
    "random_idempotent",
    "random_projection",
    "random_presentation_matrix",
]

_RATS = [mpq(1), mpq(-1), mpq(2), mpq(1, 2), mpq(-3)]


def _field_const(ring, rng: random.Random):
    c = rng.choice(_RATS)
    if ring.field.has_i and rng.random() < 0.3:
        return ring.field(GaussQ(c, rng.choice((1, -1))))
    return ring.field(c)


def small_entry(ring, rng: random.Random, nonzero: bool = False):
    """A small entry of the block ring: constants, x^{+-1} and short binomials."""
    if not nonzero and rng.random() < 0.35:
        return ring.zero
    if ring.kind == "K":
        return _field_const(ring, rng)
    fld = ring.field
    shape = rng.random()
    if shape < 0.4:
        poly = LaurentPoly(fld, {0: _field_const(ring, rng)})
    elif shape < 0.75:
        poly = LaurentPoly(fld, {rng.choice((1, -1)): _field_const(ring, rng)})
    else:
        k = rng.choice((1, -1))
        poly = LaurentPoly(fld, {0: _field_const(ring, rng), k: _field_const(ring, rng)})
    return ring.coerce(poly)


def random_laurent(field, rng: random.Random, max_width: int = 3) -> LaurentPoly:
    """A Laurent polynomial of width at most ``max_width`` (zero allowed)."""
    if rng.random() < 0.1:
        return LaurentPoly(field, {})
    lo = rng.randint(-2, 1)
    w = rng.randint(0, max_width)
    terms = {}
    for k in range(lo, lo + w + 1):
        if k in (lo, lo + w) or rng.random() < 0.6:
            terms[k] = field(rng.randint(-3, 3) or 1)
    return LaurentPoly(field, terms)


def random_unimodular(ring, N: int, rng: random.Random, steps: int | None = None) -> tuple[Mat, Mat]:
    """``(U, U^-1)``: a permutation followed by elementary transvections and
    unit scalings, each inverted as it is applied."""
    steps = N + 1 if steps is None else steps
    z, o = ring.zero, ring.one
    perm = list(range(N))
    rng.shuffle(perm)
    U = [[o if perm[i] == j else z for j in range(N)] for i in range(N)]
    Ui = [[o if perm[j] == i else z for j in range(N)] for i in range(N)]
    for _ in range(steps if N > 1 else 0):
        i, j = rng.sample(range(N), 2)
        c = small_entry(ring, rng, nonzero=True)
        # U <- (I + c E_ij) U ; U^-1 <- U^-1 (I - c E_ij)
        U[i] = [a + c * b if b else a for a, b in zip(U[i], U[j])]
        for r in Ui:
            if r[i]:
                r[j] = r[j] - r[i] * c
    if N and rng.random() < 0.5:
        i = rng.randrange(N)
        if ring.kind == "K":
            u = _field_const(ring, rng)
        else:
            u = ring.coerce(LaurentPoly(ring.field, {rng.choice((-1, 1)): ring.field(rng.choice((1, -1, 2)))}))
        ui = ring.unit_inverse(u)
        U[i] = [a * u if a else a for a in U[i]]
        for r in Ui:
            if r[i]:
                r[i] = r[i] * ui
    return Mat(ring, U, N, coerce=False), Mat(ring, Ui, N, coerce=False)


def _ranks(spec: BlockSpec, n: int, rng: random.Random, ranks):
    if ranks is not None:
        return list(ranks)
    return [rng.randint(0, n * b.size) for b in spec.blocks]


def random_idempotent(spec: BlockSpec, field, n: int, rng: random.Random, ranks=None, side: str = "R") -> BlockMatrix:
    """``U^-1 diag(I_r, 0) U`` per block for a random unimodular ``U``."""
    mats = []
    for b, r in zip(spec.blocks, _ranks(spec, n, rng, ranks)):
        ring = block_ring(b.kind, field, "R")
        N = n * b.size
        U, Ui = random_unimodular(ring, N, rng)
        M = Ui.submatrix(range(N), range(r)) * U.submatrix(range(r), range(N)) if r else Mat.zeros(ring, N, N)
        if side == "Q":
            M = M.to_fraction(block_ring(b.kind, field, "Q"))
        mats.append(M)
    return BlockMatrix(spec, field, side, n, n, mats)


def random_basis(spec: BlockSpec, field, n: int, rng: random.Random, ranks=None) -> list[Mat]:
    """Per block, ``r`` columns of a random unimodular matrix (Q-side entries)."""
    out = []
    for b, r in zip(spec.blocks, _ranks(spec, n, rng, ranks)):
        ring = block_ring(b.kind, field, "R")
        N = n * b.size
        U, _ = random_unimodular(ring, N, rng)
        out.append(U.submatrix(range(N), range(r)).to_fraction(block_ring(b.kind, field, "Q")))
    return out


def projection_from_bases(spec: BlockSpec, field, n: int, bases: Sequence[Mat]) -> BlockMatrix:
    """Orthogonal projection onto the column spans (columns must be independent)."""
    mats = []
    for b, B in zip(spec.blocks, bases):
        ring = block_ring(b.kind, field, "Q")
        N = n * b.size
        mats.append(orth_projection(B) if B.ncols else Mat.zeros(ring, N, N))
    return BlockMatrix(spec, field, "Q", n, n, mats)


def random_projection(spec: BlockSpec, field, n: int, rng: random.Random, ranks=None) -> BlockMatrix:
    return projection_from_bases(spec, field, n, random_basis(spec, field, n, rng, ranks))


def random_presentation_matrix(spec: BlockSpec, field, n: int, rng: random.Random, k: int | None = None) -> BlockMatrix:
    """A k x n R-side relation matrix mixing free, torsion and dependent rows."""
    k = rng.randint(0, n + 1) if k is None else k
    mats = []
    for b in spec.blocks:
        ring = block_ring(b.kind, field, "R")
        N, K = n * b.size, k * b.size
        rows = []
        for i in range(K):
            mode = rng.random()
            if rows and mode < 0.2:
                # combination of earlier rows: no new rank
                j = rng.randrange(len(rows))
                c = small_entry(ring, rng, nonzero=True)
                rows.append([c * a for a in rows[j]])
            elif mode < 0.3:
                rows.append([ring.zero] * N)
            else:
                row = [small_entry(ring, rng) for _ in range(N)]
                if ring.kind == "L" and rng.random() < 0.3:
                    t = ring.coerce(LaurentPoly(field, {-1: field(1), 0: field(3), 1: field(1)}))
                    row = [t * a for a in row]
                rows.append(row)
        mats.append(Mat(ring, rows, N, coerce=False))
    return BlockMatrix(spec, field, "R", k, n, mats)
