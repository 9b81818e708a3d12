"""Block matrices over the decomposed ring and their linear algebra.

A ``BlockMatrix`` of logical shape ``n x k`` over ``R = L_K(E)`` stores, for
each block ``b`` of size ``s_b``, an ``(n s_b) x (k s_b)`` matrix over the
block's entry ring; the logical entry ``(i, j)`` of block ``b`` is the
``s_b x s_b`` tile starting at ``(i s_b, j s_b)``.

R-side matrices have entries in ``K`` (sink blocks) or ``K[x, x^-1]`` (cycle
blocks); Q-side matrices replace the Laurent ring by its fraction field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .linalg import (
    FieldRing,
    FractionField,
    LaurentRing,
    Mat,
    ShapeMismatch,
    column_basis,
    nullspace,
    orth_projection,
    rank,
    snf,
    solve,
)
from .scalars import Field, require_positive_definite

__all__ = [
    "BlockMatrix",
    "SideMismatch",
    "block_ring",
    "rank_q",
    "snf_blocks",
    "saturate",
    "Saturation",
    "saturation_data",
    "ideal_membership",
    "is_idempotent",
    "is_projection",
    "proj_meet",
    "proj_join",
    "central_idempotent",
]


class SideMismatch(ValueError):
    pass


def block_ring(kind: str, field: Field, side: str):
    if kind == "sink":
        return FieldRing(field)
    return LaurentRing(field) if side == "R" else FractionField(field)


class BlockMatrix:
    __slots__ = ("spec", "field", "side", "n", "k", "mats", "memo")

    def __init__(self, spec, field: Field, side: str, n: int, k: int, mats: Sequence[Mat]):
        if side not in ("R", "Q"):
            raise ValueError("side must be 'R' or 'Q'")
        if len(mats) != len(spec.blocks):
            raise ShapeMismatch("one matrix per block required")
        for blk, M in zip(spec.blocks, mats):
            if M.shape != (n * blk.size, k * blk.size):
                raise ShapeMismatch(f"block {blk.label()} has shape {M.shape}, expected {(n * blk.size, k * blk.size)}")
            if M.ring != block_ring(blk.kind, field, side):
                raise SideMismatch(f"block {blk.label()} has entries in {M.ring}")
        self.spec = spec
        self.field = field
        self.side = side
        self.n = n
        self.k = k
        self.mats = tuple(mats)
        # derived facts (idempotence, ranks, factorizations); matrices are immutable
        self.memo: dict = {}

    # constructors
    @classmethod
    def from_blocks(cls, spec, field: Field, blocks: Sequence, side: str = "R") -> BlockMatrix:
        """From per-block row lists (entries: ring elements or literals)."""
        mats = []
        n = k = None
        for blk, rows in zip(spec.blocks, blocks):
            ring = block_ring(blk.kind, field, side)
            M = rows if isinstance(rows, Mat) else Mat(ring, rows)
            if M.ring != ring:
                M = Mat(ring, M.rows)
            if M.nrows % blk.size or M.ncols % blk.size:
                raise ShapeMismatch(f"block {blk.label()} shape {M.shape} not a multiple of {blk.size}")
            bn, bk = M.nrows // blk.size, M.ncols // blk.size
            if n is None:
                n, k = bn, bk
            elif (n, k) != (bn, bk):
                raise ShapeMismatch("blocks disagree on the logical shape")
            mats.append(M)
        return cls(spec, field, side, n or 0, k or 0, mats)

    @classmethod
    def identity(cls, spec, field: Field, n: int = 1, side: str = "R") -> BlockMatrix:
        return cls(spec, field, side, n, n, [Mat.identity(block_ring(b.kind, field, side), n * b.size) for b in spec.blocks])

    @classmethod
    def zeros(cls, spec, field: Field, n: int = 1, k: int | None = None, side: str = "R") -> BlockMatrix:
        k = n if k is None else k
        return cls(spec, field, side, n, k, [Mat.zeros(block_ring(b.kind, field, side), n * b.size, k * b.size) for b in spec.blocks])

    @classmethod
    def from_logical(cls, entries: Sequence[Sequence[BlockMatrix]]) -> BlockMatrix:
        """Assemble an n x k matrix from 1 x 1 BlockMatrix entries."""
        first = entries[0][0]
        n, k = len(entries), len(entries[0])
        mats = []
        for b in range(len(first.spec.blocks)):
            rows = []
            for i in range(n):
                tiles = [entries[i][j].mats[b] for j in range(k)]
                rows.append(Mat.hstack(tiles))
            mats.append(Mat.vstack(rows))
        return cls(first.spec, first.field, first.side, n, k, mats)

    def entry(self, i: int, j: int) -> BlockMatrix:
        mats = []
        for blk, M in zip(self.spec.blocks, self.mats):
            s = blk.size
            mats.append(M.submatrix(range(i * s, (i + 1) * s), range(j * s, (j + 1) * s)))
        return BlockMatrix(self.spec, self.field, self.side, 1, 1, mats)

    def rows_of(self, rows: Sequence[int]) -> BlockMatrix:
        """Logical rows selected as a new matrix."""
        mats = []
        for blk, M in zip(self.spec.blocks, self.mats):
            s = blk.size
            idx = [i * s + a for i in rows for a in range(s)]
            mats.append(M.submatrix(idx, range(M.ncols)))
        return BlockMatrix(self.spec, self.field, self.side, len(rows), self.k, mats)

    @staticmethod
    def vstack(parts: Sequence[BlockMatrix]) -> BlockMatrix:
        first = parts[0]
        mats = [Mat.vstack([p.mats[b] for p in parts]) for b in range(len(first.mats))]
        return BlockMatrix(first.spec, first.field, first.side, sum(p.n for p in parts), first.k, mats)

    # structure
    @property
    def rings(self):
        return [M.ring for M in self.mats]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.k)

    def _compat(self, other: BlockMatrix):
        if self.spec != other.spec:
            raise ShapeMismatch("matrices over different block decompositions")
        if self.side != other.side:
            raise SideMismatch(f"side mismatch {self.side} vs {other.side}")

    def __add__(self, other: BlockMatrix) -> BlockMatrix:
        self._compat(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"shape mismatch {self.shape} vs {other.shape}")
        return BlockMatrix(self.spec, self.field, self.side, self.n, self.k, [a + b for a, b in zip(self.mats, other.mats)])

    def __sub__(self, other: BlockMatrix) -> BlockMatrix:
        self._compat(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"shape mismatch {self.shape} vs {other.shape}")
        return BlockMatrix(self.spec, self.field, self.side, self.n, self.k, [a - b for a, b in zip(self.mats, other.mats)])

    def __neg__(self) -> BlockMatrix:
        return BlockMatrix(self.spec, self.field, self.side, self.n, self.k, [-a for a in self.mats])

    def __mul__(self, other):
        if isinstance(other, BlockMatrix):
            self._compat(other)
            if self.k != other.n:
                raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
            return BlockMatrix(self.spec, self.field, self.side, self.n, other.k, [a * b for a, b in zip(self.mats, other.mats)])
        return BlockMatrix(self.spec, self.field, self.side, self.n, self.k, [a * other for a in self.mats])

    def __rmul__(self, other):
        return BlockMatrix(self.spec, self.field, self.side, self.n, self.k, [other * a for a in self.mats])

    def adjoint(self) -> BlockMatrix:
        """*-transpose: transpose with the entry involution (x -> x^-1)."""
        return BlockMatrix(self.spec, self.field, self.side, self.k, self.n, [a.adjoint() for a in self.mats])

    star = adjoint

    def __eq__(self, other):
        if not isinstance(other, BlockMatrix):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.side == other.side
            and self.shape == other.shape
            and self.mats == other.mats
        )

    def __hash__(self):
        return hash((self.side, self.shape, self.mats))

    def is_zero(self) -> bool:
        return all(M.is_zero() for M in self.mats)

    def to_q(self) -> BlockMatrix:
        """Pass entries to the Q side (Laurent -> fraction field)."""
        if self.side == "Q":
            return self
        mats = [M.to_fraction(block_ring(b.kind, self.field, "Q")) for b, M in zip(self.spec.blocks, self.mats)]
        return BlockMatrix(self.spec, self.field, "Q", self.n, self.k, mats)

    def to_r(self) -> BlockMatrix:
        """Back to the R side; fails when some entry is not a Laurent polynomial."""
        if self.side == "R":
            return self
        mats = []
        for b, M in zip(self.spec.blocks, self.mats):
            ring = block_ring(b.kind, self.field, "R")
            mats.append(M if M.ring == ring else M.map(ring, ring.coerce))
        return BlockMatrix(self.spec, self.field, "R", self.n, self.k, mats)

    def is_r_representable(self) -> bool:
        if self.side == "R":
            return True
        return all(M.ring.kind != "F" or all(a.is_laurent() for r in M.rows for a in r) for M in self.mats)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "side": self.side,
            "blocks": [
                {"kind": b.kind, "size": b.size, "anchor": b.anchor, "matrix": M.to_json()}
                for b, M in zip(self.spec.blocks, self.mats)
            ],
        }

    def __repr__(self):
        return f"BlockMatrix({self.to_json()})"

    def __str__(self):
        parts = []
        for b, M in zip(self.spec.blocks, self.mats):
            parts.append(f"[{b.label()}]\n{M}")
        return "\n".join(parts)


def central_idempotent(spec, field: Field, indicator: Sequence[bool], n: int = 1, side: str = "R") -> BlockMatrix:
    mats = []
    for b, on in zip(spec.blocks, indicator):
        ring = block_ring(b.kind, field, side)
        N = n * b.size
        mats.append(Mat.identity(ring, N) if on else Mat.zeros(ring, N, N))
    return BlockMatrix(spec, field, side, n, n, mats)


# --------------------------------------------------------------------------
# predicates and ranks


def _memo(A: BlockMatrix, key: str, compute):
    try:
        return A.memo[key]
    except KeyError:
        v = A.memo[key] = compute()
        return v


def is_idempotent(A: BlockMatrix) -> bool:
    return _memo(A, "idempotent", lambda: A.n == A.k and A * A == A)


def is_projection(A: BlockMatrix) -> bool:
    return _memo(A, "projection", lambda: is_idempotent(A) and A.adjoint() == A)


def rank_q(A: BlockMatrix) -> tuple[int, ...]:
    """Per-block rank over the fraction field of the entry ring."""
    return _memo(A, "rank", lambda: tuple(rank(M) for M in A.mats))


def snf_blocks(A: BlockMatrix):
    return [snf(M) for M in A.mats]


# --------------------------------------------------------------------------
# saturation (closure of a submodule to the smallest direct summand)


@dataclass
class Saturation:
    """Closure of the row space of a generator matrix.

    ``q`` is an idempotent whose row space is the closure; ``factors[b]``
    holds the invariant factors of the generators in block ``b`` (the
    non-unit ones measure the torsion of closure / submodule).
    """

    q: BlockMatrix
    ranks: tuple[int, ...]
    factors: list[list]
    snfs: list

    def torsion_factors(self) -> list[list]:
        out = []
        for M, fs in zip(self.q.mats, self.factors):
            out.append([d for d in fs if not M.ring.is_unit(d)])
        return out


def saturation_data(G: BlockMatrix) -> Saturation:
    """Row space closure of ``G`` (k x n) as an n x n idempotent.

    Per block, ``U G V = D`` gives ``rowspace(G) = rowspace(D V^-1)``; the
    closure is spanned by the first ``r`` rows of ``V^-1`` and
    ``q = V[:, :r] V^-1[:r, :]`` projects onto it.
    """
    mats, ranks, factors, snfs = [], [], [], []
    for M in G.mats:
        N = M.ncols
        if rank(M) == N:
            # full column rank: the closure is everything and q = 1, so the
            # transforms (the expensive part) are not needed
            res = snf(M, transforms=False)
            mats.append(Mat.identity(M.ring, N))
        else:
            res = snf(M)
            r = res.rank
            X = res.V.submatrix(range(N), range(r))
            Y = res.Vinv.submatrix(range(r), range(N))
            mats.append(X * Y if r else Mat.zeros(M.ring, N, N))
        r = res.rank
        ranks.append(r)
        factors.append(res.factors)
        snfs.append(res)
    q = BlockMatrix(G.spec, G.field, G.side, G.k, G.k, mats)
    return Saturation(q, tuple(ranks), factors, snfs)


def saturate(G: BlockMatrix) -> BlockMatrix:
    return saturation_data(G).q


def rowspace_contains(G: BlockMatrix, rows: BlockMatrix) -> bool:
    """Is every row of ``rows`` an entry-ring combination of rows of ``G``?"""
    for A, B in zip(G.mats, rows.mats):
        # y A = B  <=>  A^T y^T = B^T
        if solve(A.transpose(), B.transpose()) is None:
            return False
    return True


# --------------------------------------------------------------------------
# right ideals


def ideal_membership(a: BlockMatrix, target: BlockMatrix) -> BlockMatrix | None:
    """Witness ``y`` over the entry rings with ``a * y == target``, else None."""
    a._compat(target)
    if a.n != target.n:
        raise ShapeMismatch("ideal_membership: a and target need the same row count")
    ys = []
    for A, T in zip(a.mats, target.mats):
        Y = solve(A, T)
        if Y is None:
            return None
        ys.append(Y)
    return BlockMatrix(a.spec, a.field, a.side, a.k, target.k, ys)


# --------------------------------------------------------------------------
# meets and joins of projections (Q side)


def _require_q_projection(p: BlockMatrix):
    if p.side != "Q":
        raise SideMismatch("meet/join are defined on Q-side projections")
    require_positive_definite(p.field)


def proj_meet(p: BlockMatrix, q: BlockMatrix) -> BlockMatrix:
    """Orthogonal projection onto im(p) ∩ im(q)."""
    _require_q_projection(p)
    p._compat(q)
    mats = []
    for P, Q in zip(p.mats, q.mats):
        Bp, Bq = column_basis(P), column_basis(Q)
        if Bp.ncols == 0 or Bq.ncols == 0:
            mats.append(Mat.zeros(P.ring, P.nrows, P.nrows))
            continue
        Nn = nullspace(Mat.hstack([Bp, -Bq]))
        if Nn.ncols == 0:
            mats.append(Mat.zeros(P.ring, P.nrows, P.nrows))
            continue
        coeff = Nn.submatrix(range(Bp.ncols), range(Nn.ncols))
        mats.append(orth_projection(Bp * coeff))
    return BlockMatrix(p.spec, p.field, "Q", p.n, p.n, mats)


def proj_join(p: BlockMatrix, q: BlockMatrix) -> BlockMatrix:
    """Orthogonal projection onto im(p) + im(q)."""
    _require_q_projection(p)
    p._compat(q)
    mats = [orth_projection(Mat.hstack([P, Q])) for P, Q in zip(p.mats, q.mats)]
    return BlockMatrix(p.spec, p.field, "Q", p.n, p.n, mats)


def orth_projection_block(spec, field: Field, bases: Sequence[Mat], n: int) -> BlockMatrix:
    """Q-side projection onto the column spans of the given per-block bases."""
    mats = []
    for b, B in zip(spec.blocks, bases):
        ring = block_ring(b.kind, field, "Q")
        N = n * b.size
        if B.ncols == 0:
            mats.append(Mat.zeros(ring, N, N))
        else:
            mats.append(orth_projection(B if B.ring == ring else B.to_fraction(ring)))
    return BlockMatrix(spec, field, "Q", n, n, mats)
