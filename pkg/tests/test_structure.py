from __future__ import annotations

import itertools
import random

import pytest

from conftest import NO_EXIT, lp
from lpadim.blocks import BlockMatrix
from lpadim.corpus import get
from lpadim.graph import paths_into
from lpadim.linalg import Mat
from lpadim.lpa import Lpa, span_basis
from lpadim.scalars import QQ
from lpadim.structure import NotNoExit, decompose, phi, phi_inv, verify_relations


def _kinds(name):
    return [(b.kind, b.size) for b in decompose(get(name)).blocks]


def test_decompose_examples():
    spec = decompose(get("G_tail"))
    (b,) = spec.blocks
    assert (b.kind, b.size, b.anchor) == ("cycle", 2, "v")
    assert [p.edges for p in b.coords] == [(), ("t",)]
    assert spec.labels() == ["M_2(K[x,x^-1])"]
    assert _kinds("G_cyc2") == [("cycle", 2)]
    assert _kinds("G_sink") == [("sink", 1)]
    assert _kinds("G_line") == [("sink", 2)]
    with pytest.raises(NotNoExit):
        decompose(get("G_rose2"))


def _span_rank_of_words(g, max_len: int) -> int:
    """Oracle: K-rank of all products of at most max_len generators."""
    A = Lpa(g)
    gens = A.generators()
    words = [A.one]
    for n in range(1, max_len + 1):
        words += [_prod(w) for w in itertools.product(gens, repeat=n)]
    return span_basis(words)


def _prod(ws):
    out = ws[0]
    for w in ws[1:]:
        out = out * w
    return out


@pytest.mark.parametrize("name", ["G_sink", "G_line", "G_line3"])
def test_acyclic_linear_dimension(name):
    g = get(name)
    expected = sum(b.size**2 for b in decompose(g).blocks)
    assert _span_rank_of_words(g, 4) == expected


@pytest.mark.parametrize("name", NO_EXIT)
def test_block_sizes_are_path_counts(name):
    g = get(name)
    for b in decompose(g).blocks:
        forbidden = {b.gamma} if b.kind == "cycle" else set()
        assert list(b.coords) == paths_into(g, b.anchor, forbidden)


def test_phi_examples(tail):
    A = Lpa(tail)
    spec = decompose(tail)
    x = lp("x")
    assert phi(tail, A.edge("l")) == BlockMatrix.from_blocks(spec, QQ, [[[x, 0], [0, 0]]])
    assert phi(tail, A.edge("t")) == BlockMatrix.from_blocks(spec, QQ, [[[0, 0], [1, 0]]])
    assert phi(tail, A.one) == BlockMatrix.identity(spec, QQ)
    assert phi_inv(tail, BlockMatrix.from_blocks(spec, QQ, [[[1, 0], [0, 0]]])) == A.vertex("v")
    assert phi_inv(tail, BlockMatrix.from_blocks(spec, QQ, [[[lp("x^-1"), 0], [0, 0]]])) == A.ghost("l")
    assert phi_inv(tail, BlockMatrix.identity(spec, QQ)) == A.parse("u + v")


@pytest.mark.parametrize("name", NO_EXIT)
def test_relations_hold(name):
    results = verify_relations(get(name))
    assert results and all(ok for _, ok in results)


@pytest.mark.parametrize("name", NO_EXIT)
def test_roundtrips_and_involution(name):
    g = get(name)
    A = Lpa(g)
    spec = decompose(g)
    rng = random.Random(8)
    for _ in range(300):
        a = A.random_element(rng)
        M = phi(g, a)
        assert phi_inv(g, M) == a
        assert phi(g, a.star()) == M.adjoint()
    for _ in range(100):
        mats = []
        for b in spec.blocks:
            ring = BlockMatrix.identity(spec, QQ).mats[spec.blocks.index(b)].ring
            rows = [[_rand_entry(ring, b.kind, rng) for _ in range(b.size)] for _ in range(b.size)]
            mats.append(Mat(ring, rows))
        M = BlockMatrix(spec, QQ, "R", 1, 1, mats)
        assert phi(g, phi_inv(g, M)) == M


def _rand_entry(ring, kind, rng):
    if kind == "sink":
        return ring.coerce(rng.randint(-2, 2))
    lo = rng.randint(-2, 1)
    return ring.coerce(lp(" + ".join(f"({rng.randint(-2, 2)})*x^{k}" for k in range(lo, lo + rng.randint(1, 3)))))
