from __future__ import annotations

import random

import pytest

from lpadim.corpus import corpus, get
from lpadim.graph import (
    Graph,
    GraphSyntaxError,
    analyze,
    bfs_paths_into,
    format_graph,
    matrix_graph,
    parse_graph,
    paths_into,
)
from lpadim.structure import decompose


def test_parse_examples():
    g = parse_graph("vertices: u v\nedge t: u -> v\nedge l: v -> v")
    assert g.vertices == ("u", "v") and [e.name for e in g.edges] == ["t", "l"]
    g = parse_graph("vertices: u v\nedge f: u -> v\nedge g: v -> u")
    assert len(g.edges) == 2
    g = parse_graph("vertices: w")
    assert g.vertices == ("w",) and not g.edges


def test_parse_errors_report_position():
    with pytest.raises(GraphSyntaxError) as exc:
        parse_graph("vertices: u v\nedge t u -> v\n")
    assert exc.value.line == 2
    with pytest.raises(GraphSyntaxError):
        parse_graph("vertices: u\nedge t: u -> z\n")
    with pytest.raises(GraphSyntaxError):
        parse_graph("vertices: u u\n")


def test_format_roundtrip():
    for g in corpus().values():
        assert parse_graph(format_graph(g)) == g


def test_analyze_examples():
    rep = analyze(get("G_tail"))
    assert rep.sinks == () and [c.edges for c in rep.cycles] == [("l",)]
    assert rep.no_exit and rep.extending_verdict
    rep = analyze(get("G_rose2"))
    assert len(rep.cycles) == 2 and all(c.has_exit for c in rep.cycles)
    assert not rep.no_exit and not rep.extending_verdict
    rep = analyze(get("G_line"))
    assert rep.sinks == ("v",) and rep.cycles == () and rep.acyclic and rep.no_exit


def _brute_cycles(g: Graph) -> set[frozenset]:
    """Edge sets of simple cycles by enumerating vertex sequences."""
    found = set()
    out = {v: [e for e in g.edges if e.src == v] for v in g.vertices}

    def walk(start, v, used_v, used_e):
        for e in out[v]:
            if e.dst == start:
                found.add(frozenset(used_e + [e.name]))
            elif e.dst not in used_v and e.dst > start:
                walk(start, e.dst, used_v | {e.dst}, used_e + [e.name])

    for s in g.vertices:
        walk(s, s, {s}, [])
    return found


def _random_graph(rng: random.Random, nv: int, ne: int) -> Graph:
    vs = [f"v{i}" for i in range(nv)]
    lines = ["vertices: " + " ".join(vs)]
    for i in range(ne):
        lines.append(f"edge e{i}: {rng.choice(vs)} -> {rng.choice(vs)}")
    return parse_graph("\n".join(lines))


def test_no_exit_matches_brute_force_scan():
    rng = random.Random(0)
    graphs = list(corpus().values()) + [_random_graph(rng, rng.randint(1, 4), rng.randint(0, 5)) for _ in range(150)]
    for g in graphs:
        cycles = _brute_cycles(g)
        rep = analyze(g)
        assert {frozenset(c.edges) for c in rep.cycles} == cycles
        exit_found = False
        for cyc in cycles:
            for name in cyc:
                e = g.edge[name]
                # any other out-edge of a cycle vertex is an exit
                if any(f.src == e.src and f.name not in cyc for f in g.edges):
                    exit_found = True
        assert rep.no_exit == (not exit_found)
        assert rep.extending_verdict == rep.no_exit


def test_matrix_graph_examples():
    g2 = matrix_graph(get("G_sink"), 2)
    line = get("G_line")
    assert len(g2.vertices) == 2 and len(g2.edges) == 1
    assert len(analyze(g2).sinks) == 1 and analyze(g2).acyclic and len(line.edges) == 1
    assert matrix_graph(get("G_tail"), 1) == get("G_tail")
    h = matrix_graph(get("G_tail"), 2)
    assert len(h.vertices) == 4 and len(h.edges) == 4 and analyze(h).no_exit
    spec = decompose(h)
    assert [(b.kind, b.size) for b in spec.blocks] == [("cycle", 4)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_matrix_graph_counts(n):
    for g in corpus().values():
        h = matrix_graph(g, n)
        assert len(h.vertices) == len(g.vertices) * n
        assert len(h.edges) == len(g.edges) + len(g.vertices) * (n - 1)


def test_paths_into_examples():
    fmt = lambda ps: [".".join(p.edges) or p.start for p in ps]  # noqa: E731
    assert fmt(paths_into(get("G_line"), "v")) == ["v", "h"]
    assert fmt(paths_into(get("G_tail"), "v", {"l"})) == ["v", "t"]
    assert fmt(paths_into(get("G_cyc2"), "u", {"f"})) == ["u", "g"]


def test_paths_into_matches_bfs():
    rng = random.Random(5)
    checked = 0
    graphs = list(corpus().values())
    while len(graphs) < 120:
        g = _random_graph(rng, rng.randint(1, 5), rng.randint(0, 6))
        if analyze(g).no_exit:
            graphs.append(g)
    for g in graphs:
        rep = analyze(g)
        forbidden = {c.edges[0] for c in rep.cycles}
        for v in g.vertices:
            got = {(p.start, p.edges) for p in paths_into(g, v, forbidden)}
            assert got == bfs_paths_into(g, v, forbidden)
            checked += 1
    assert checked > 100


def test_corpus_composition():
    names = list(corpus())
    assert len(names) == 10
    verdicts = {n: analyze(g).extending_verdict for n, g in corpus().items()}
    assert verdicts.pop("G_rose2") is False
    assert all(verdicts.values())
