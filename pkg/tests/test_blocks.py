from __future__ import annotations

import random

import pytest

from conftest import NO_EXIT, lp
from lpadim.blocks import (
    BlockMatrix,
    SideMismatch,
    ideal_membership,
    is_idempotent,
    is_projection,
    proj_join,
    proj_meet,
    rank_q,
    rowspace_contains,
    saturate,
    saturation_data,
)
from lpadim.corpus import get
from lpadim.linalg import Mat
from lpadim.sampling import random_idempotent, random_presentation_matrix, random_projection
from lpadim.scalars import QQ
from lpadim.structure import decompose


@pytest.fixture
def spec(tail):
    return decompose(tail)


def bm(spec, rows, side="R"):
    return BlockMatrix.from_blocks(spec, QQ, [rows], side)


@pytest.fixture
def e(spec):
    return bm(spec, [[1, lp("1 + x")], [0, 0]])


def test_worked_example_arithmetic(spec, e):
    assert e * e == e
    assert e * e.adjoint() == bm(spec, [[lp("3 + x + x^-1"), 0], [0, 0]])
    assert is_idempotent(e) and not is_projection(e)
    E11 = bm(spec, [[1, 0], [0, 0]])
    assert is_idempotent(E11) and is_projection(E11)
    ee = e * e.adjoint()
    assert ee.adjoint() == ee and not is_idempotent(ee)


def test_adjoint_is_involutive():
    rng = random.Random(0)
    for name in NO_EXIT:
        sp = decompose(get(name))
        for _ in range(20):
            A = random_presentation_matrix(sp, QQ, 2, rng, k=2)
            assert A.adjoint().adjoint() == A


def test_rank_q(spec, e):
    assert rank_q(BlockMatrix.identity(spec, QQ)) == (2,)
    assert rank_q(e) == (1,)
    assert rank_q(e * e.adjoint()) == (1,)


def test_ideal_membership(spec, e):
    E11 = bm(spec, [[1, 0], [0, 0]])
    y = ideal_membership(e, E11)
    assert y is not None and e * y == E11
    assert ideal_membership(e * e.adjoint(), E11) is None
    one = BlockMatrix.identity(spec, QQ)
    T = bm(spec, [[lp("x"), 2], [0, lp("1 - x")]])
    assert ideal_membership(one, T) == T


def test_saturate_examples(spec):
    q0 = bm(spec, [[1, lp("1 + x")], [0, 0]])
    q = saturate(q0)
    assert is_idempotent(q) and rowspace_contains(q, q0) and rowspace_contains(q0, q)
    G = bm(spec, [[lp("x"), lp("1 + x")], [0, 0]])
    sat = saturation_data(G)
    assert sat.ranks == (1,) and rowspace_contains(G, sat.q)
    G = bm(spec, [[lp("1 + x"), lp("1 + x")], [0, 0]])
    sat = saturation_data(G)
    assert sat.ranks == (1,)
    # the closure contains (1, 1), which is not in the row space of G itself
    ones = bm(spec, [[1, 1], [0, 0]])
    assert rowspace_contains(sat.q, ones) and not rowspace_contains(G, ones)
    assert [str(f) for f in sat.torsion_factors()[0]] == ["1+x"]


@pytest.mark.parametrize("name", NO_EXIT)
def test_saturation_characterization(name):
    sp = decompose(get(name))
    rng = random.Random(6)
    for _ in range(40):
        n = rng.randint(1, 2)
        G = random_presentation_matrix(sp, QQ, n, rng)
        sat = saturation_data(G)
        q = sat.q
        assert is_idempotent(q)
        assert rowspace_contains(q, G)  # containment
        assert rank_q(q) == rank_q(G) == sat.ranks  # rank equality
        # torsion: the largest invariant factor pushes q back into rowspace(G)
        scaled = []
        for M, fs in zip(q.mats, sat.factors):
            d = fs[-1] if fs else M.ring.one
            scaled.append(M.map(M.ring, lambda a, d=d: a * d))
        assert rowspace_contains(G, BlockMatrix(sp, QQ, "R", q.n, q.k, scaled))


def test_meet_join_examples(spec):
    E11 = bm(spec, [[1, 0], [0, 0]], "Q")
    E22 = bm(spec, [[0, 0], [0, 1]], "Q")
    one = BlockMatrix.identity(spec, QQ, 1, "Q")
    zero = BlockMatrix.zeros(spec, QQ, 1, 1, "Q")
    assert proj_meet(E11, E11) == E11 and proj_join(E11, E11) == E11
    assert proj_meet(E11, E22) == zero and proj_join(E11, E22) == one
    half = bm(spec, [["1/2", "1/2"], ["1/2", "1/2"]], "Q")
    assert is_projection(half)
    assert proj_meet(E11, half) == zero and proj_join(E11, half) == one
    with pytest.raises(SideMismatch):
        proj_meet(bm(spec, [[1, 0], [0, 0]]), E11)


@pytest.mark.parametrize("name", NO_EXIT)
def test_parallelogram_ranks(name):
    sp = decompose(get(name))
    rng = random.Random(9)
    for _ in range(25):
        n = rng.randint(1, 2)
        p, q = random_projection(sp, QQ, n, rng), random_projection(sp, QQ, n, rng)
        m, j = proj_meet(p, q), proj_join(p, q)
        assert is_projection(m) and is_projection(j)
        for rp, rm, rj, rq in zip(rank_q(p), rank_q(m), rank_q(j), rank_q(q)):
            assert rp - rm == rj - rq


def test_random_idempotents_are_idempotent():
    rng = random.Random(1)
    for name in NO_EXIT:
        sp = decompose(get(name))
        p = random_idempotent(sp, QQ, 2, rng)
        assert is_idempotent(p) and p * p == p


def test_shape_errors(spec):
    from lpadim.linalg import ShapeMismatch

    with pytest.raises(ShapeMismatch):
        BlockMatrix.from_blocks(spec, QQ, [Mat(BlockMatrix.identity(spec, QQ).mats[0].ring, [[1, 0, 0]])])
