"""Acceptance criteria, one test each.  Every test prints a single
``PASS``/``FAIL`` line with its measurement before asserting, so the
summary is readable in ``pytest -v`` output."""

from __future__ import annotations

import random
import time

import pytest
from gmpy2 import mpq

from oracles import minor_gcds, ordinary, to_sympy
from lpadim import linalg
from lpadim.axioms import check_axioms
from lpadim.blocks import BlockMatrix, is_idempotent, rank_q
from lpadim.corpus import corpus, get
from lpadim.dimension import (
    ModulePresentation,
    central_cover,
    d,
    dim_module,
    dim_over_q,
    simple_order,
    split_bnd,
    v_class,
)
from lpadim.graph import analyze
from lpadim.linalg import LaurentRing, Mat, rank, snf, verify_snf
from lpadim.lpa import normal_form, random_raw
from lpadim.rickart import rickart_example
from lpadim.sampling import random_idempotent, random_laurent, random_presentation_matrix, random_projection
from lpadim.scalars import QQ
from lpadim.structure import decompose, phi, verify_relations

CORPUS = corpus()
NO_EXIT = [name for name, g in CORPUS.items() if analyze(g).no_exit]


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str, elapsed: float):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail} [{elapsed:.2f} s]")

    return emit


def test_c1_worked_example(report):
    t0 = time.perf_counter()
    rep = rickart_example()
    elapsed = time.perf_counter() - t0
    ok = len(rep.checks) == 6 and rep.ok and rep.verdict == "not_rickart_star" and elapsed < 1.0
    report(1, ok, f"{sum(c.ok for c in rep.checks)}/6 checks, verdict {rep.verdict}", elapsed)
    assert ok, [c.to_json() for c in rep.checks if not c.ok]


def test_c2_single_block_and_relations(report):
    t0 = time.perf_counter()
    out = {}
    for name in ("G_tail", "G_cyc2"):
        g = get(name)
        labels = decompose(g).labels()
        rels = verify_relations(g)
        out[name] = (labels, all(ok for _, ok in rels) and bool(rels))
    elapsed = time.perf_counter() - t0
    ok = all(lab == ["M_2(K[x,x^-1])"] and rel for lab, rel in out.values()) and elapsed < 1.0
    report(2, ok, ", ".join(f"{k}: {v[0]} relations {'ok' if v[1] else 'broken'}" for k, v in out.items()), elapsed)
    assert ok


def test_c3_extending_verdict(report):
    t0 = time.perf_counter()
    bad = []
    for name, g in CORPUS.items():
        r = analyze(g)
        if r.extending_verdict != r.no_exit:
            bad.append(name)
    rose = analyze(CORPUS["G_rose2"]).extending_verdict
    others = all(analyze(g).extending_verdict for name, g in CORPUS.items() if name != "G_rose2")
    elapsed = time.perf_counter() - t0
    ok = len(CORPUS) == 10 and not bad and rose is False and others
    report(3, ok, f"{len(CORPUS)} graphs, mismatches {bad}, G_rose2 -> {rose}", elapsed)
    assert ok


def test_c4_axioms(report, monkeypatch):
    # timed at the library default: every equivalence claim is already
    # backed by a witness checked by multiplication, so per-SNF
    # self-verification would only measure the test harness
    monkeypatch.setattr(linalg, "_SELF_CHECK", False)
    t0 = time.perf_counter()
    failures, witnesses = [], 0
    for name in NO_EXIT:
        rep = check_axioms(CORPUS[name], count=200, seed=0, max_n=3, name=name)
        witnesses += rep.witnesses_verified
        failures += [(name, r.axiom) for r in rep.results.values() if r.status != "pass"]
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60.0
    report(4, ok, f"{len(NO_EXIT)} graphs x 200 pairs, {witnesses} witnesses verified, failures {failures}", elapsed)
    assert ok


def _presentations(name: str, count: int, seed: int):
    g = CORPUS[name]
    sp = decompose(g)
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(1, 3)
        yield ModulePresentation(g, n, random_presentation_matrix(sp, QQ, n, rng))


def test_c5_splitting(report):
    t0 = time.perf_counter()
    bad, total = [], 0
    for name in NO_EXIT:
        for i, P in enumerate(_presentations(name, 200, 50)):
            total += 1
            s = split_bnd(P)
            q, proj = s.closure, s.projective
            free = tuple(mpq(P.n) for _ in P.spec.blocks)
            # cl K is the row space of q: it contains K, is a direct summand,
            # and has the rank of K; R^n -> R^n (1 - q) has kernel exactly cl K
            exact = (
                is_idempotent(q)
                and P.relations * q == P.relations
                and q * proj == BlockMatrix.zeros(P.spec, QQ, P.n)
                and rank_q(q) == tuple(rank(M) for M in P.relations.mats)
                and all(a + b == P.n * blk.size for a, b, blk in zip(rank_q(q), rank_q(proj), P.spec.blocks))
            )
            ok = (
                tuple(a + b for a, b in zip(d(q).values, d(proj).values)) == free
                and s.dim_bounded.is_zero()
                and s.dim_total == s.dim_unbounded == d(proj) == dim_module(P)
                and exact
            )
            if not ok:
                bad.append((name, i))
    elapsed = time.perf_counter() - t0
    report(5, not bad, f"{total} presentations, failures {bad[:5]}", elapsed)
    assert not bad


def test_c6_passage_to_q(report):
    t0 = time.perf_counter()
    bad, total = [], 0
    for name in NO_EXIT:
        for i, P in enumerate(_presentations(name, 200, 60)):
            total += 1
            if dim_over_q(P) != dim_module(P):
                bad.append(("dim", name, i))
        sp = decompose(CORPUS[name])
        rng = random.Random(61)
        for i in range(200):
            p = random_idempotent(sp, QQ, rng.randint(1, 3), rng)
            if v_class(p) != v_class(p.to_q()):
                bad.append(("v", name, i))
    elapsed = time.perf_counter() - t0
    report(6, not bad, f"{total} presentations and {total} idempotents, failures {bad[:5]}", elapsed)
    assert not bad


def test_c7_normal_forms(report):
    t0 = time.perf_counter()
    bad, total = [], 0
    for name, g in CORPUS.items():
        rng = random.Random(70)
        faithful = name in NO_EXIT
        for i in range(1000):
            raw = random_raw(g, rng)
            a = normal_form(g, raw, strategy="innermost")
            b = normal_form(g, raw, strategy="outermost")
            total += 1
            if a != b:
                bad.append(("strategy", name, i))
            elif faithful and a.is_zero() != phi(g, a).is_zero():
                bad.append(("phi", name, i))
    elapsed = time.perf_counter() - t0
    report(7, not bad, f"{total} expressions over {len(CORPUS)} graphs, failures {bad[:5]}", elapsed)
    assert not bad


def test_c8_snf_oracle(report):
    L = LaurentRing(QQ)
    rng = random.Random(80)
    t0 = time.perf_counter()
    bad = []
    for i in range(500):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        rows = [[random_laurent(QQ, rng, 3) for _ in range(n)] for _ in range(m)]
        A = Mat(L, rows)
        res = snf(A)
        try:
            verify_snf(A, res)
        except AssertionError:
            bad.append(("verify", i))
            continue
        if res.U * A * res.V != res.D:
            bad.append(("UAV", i))
            continue
        chain, acc = [], L.one
        for f in res.factors:
            acc = acc * f
            chain.append(ordinary(to_sympy(acc)))
        expect = minor_gcds(rows)
        if chain != expect[: res.rank] or any(p is not None for p in expect[res.rank :]):
            bad.append(("minors", i))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60.0
    report(8, ok, f"500 matrices up to 4x4, failures {bad[:5]}", elapsed)
    assert ok


def test_c9_simple_projections(report):
    t0 = time.perf_counter()
    bad, seen = [], 0
    for name in NO_EXIT:
        sp = decompose(CORPUS[name])
        rng = random.Random(90)
        for i in range(100):
            n = rng.randint(1, 3)
            for p in (random_idempotent(sp, QQ, n, rng), random_projection(sp, QQ, n, rng)):
                o = simple_order(p)
                if o is None:
                    continue
                seen += 1
                # module-normalized d, so d(C(p)) / o is compared as d(p) * o
                if d(p).scale(o) != d(central_cover(p)):
                    bad.append((name, i))
    elapsed = time.perf_counter() - t0
    ok = not bad and seen > 0
    report(9, ok, f"{seen} simple idempotents, failures {bad[:5]}", elapsed)
    assert ok
