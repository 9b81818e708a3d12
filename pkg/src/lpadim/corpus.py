"""Named small graphs used by tests, examples and the axiom runner."""

from __future__ import annotations

from .graph import Graph, parse_graph

__all__ = ["CORPUS_TEXT", "corpus", "get"]

CORPUS_TEXT: dict[str, str] = {
    "G_sink": "vertices: v\n",
    "G_line": "vertices: u v\nedge h: u -> v\n",
    "G_line3": "vertices: u v w\nedge h1: u -> v\nedge h2: v -> w\n",
    "G_loop": "vertices: v\nedge l: v -> v\n",
    "G_tail": "vertices: u v\nedge t: u -> v\nedge l: v -> v\n",
    "G_tails2": "vertices: a b v\nedge s: a -> v\nedge t: b -> v\nedge l: v -> v\n",
    "G_cyc2": "vertices: u v\nedge f: u -> v\nedge g: v -> u\n",
    "G_rose2": "vertices: v\nedge a: v -> v\nedge b: v -> v\n",
    "G_sink_loop": "vertices: s w\nedge l: w -> w\n",
    "G_tail_line": "vertices: u v a b\nedge t: u -> v\nedge l: v -> v\nedge h: a -> b\n",
}


def get(name: str) -> Graph:
    try:
        return parse_graph(CORPUS_TEXT[name])
    except KeyError:
        raise KeyError(f"unknown corpus graph {name!r}; known: {', '.join(CORPUS_TEXT)}") from None


def corpus() -> dict[str, Graph]:
    return {name: parse_graph(text) for name, text in CORPUS_TEXT.items()}
