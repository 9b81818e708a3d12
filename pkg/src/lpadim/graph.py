"""Finite directed multigraphs, the graph DSL, and structural queries."""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

__all__ = [
    "Edge",
    "Graph",
    "Path",
    "Cycle",
    "GraphReport",
    "GraphError",
    "GraphSyntaxError",
    "CycleReachable",
    "parse_graph",
    "format_graph",
    "analyze",
    "matrix_graph",
    "paths_into",
    "disjoint_union",
]

NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_NAME_RE = re.compile(NAME)


class GraphError(ValueError):
    """Structurally invalid graph (duplicate name, dangling endpoint, ...)."""


class GraphSyntaxError(GraphError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class CycleReachable(GraphError):
    def __init__(self, cycle: tuple[str, ...]):
        self.cycle = cycle
        super().__init__("cycle reachable avoiding the forbidden edges: " + " ".join(cycle))


@dataclass(frozen=True)
class Edge:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.vertices:
            raise GraphError("a graph needs at least one vertex")
        seen: set[str] = set()
        for name in list(self.vertices) + [e.name for e in self.edges]:
            if not _NAME_RE.fullmatch(name):
                raise GraphError(f"invalid name {name!r}")
            if name in seen:
                raise GraphError(f"duplicate name {name!r}")
            seen.add(name)
        vs = set(self.vertices)
        for e in self.edges:
            for end in (e.src, e.dst):
                if end not in vs:
                    raise GraphError(f"edge {e.name!r} has dangling endpoint {end!r}")

    @classmethod
    def build(cls, vertices, edges=()) -> Graph:
        """``edges`` as ``(name, src, dst)`` triples."""
        return cls(tuple(vertices), tuple(Edge(*e) for e in edges))

    @cached_property
    def edge(self) -> dict[str, Edge]:
        return {e.name: e for e in self.edges}

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def in_edges(self) -> dict[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.dst].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def designated(self) -> dict[str, str]:
        """Last-declared edge out of each regular vertex."""
        return {v: es[-1].name for v, es in self.out_edges.items() if es}

    def sinks(self) -> list[str]:
        return [v for v in self.vertices if not self.out_edges[v]]

    def regular(self) -> list[str]:
        return [v for v in self.vertices if self.out_edges[v]]

    def is_vertex(self, name: str) -> bool:
        return name in self.out_edges

    def __str__(self):
        return format_graph(self)


@dataclass(frozen=True, order=True)
class Path:
    """A path given by its start vertex and edge names; trivial when empty."""

    start: str
    edges: tuple[str, ...] = ()
    end: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.end:
            if self.edges:
                raise ValueError("non-trivial Path needs an explicit end vertex")
            object.__setattr__(self, "end", self.start)

    @classmethod
    def trivial(cls, v: str) -> Path:
        return cls(v, (), v)

    @classmethod
    def of(cls, g: Graph, edges) -> Path:
        edges = tuple(edges)
        if not edges:
            raise ValueError("use Path.trivial for length-0 paths")
        for a, b in zip(edges, edges[1:]):
            if g.edge[a].dst != g.edge[b].src:
                raise ValueError(f"edges {a} and {b} do not compose")
        return cls(g.edge[edges[0]].src, edges, g.edge[edges[-1]].dst)

    def __len__(self):
        return len(self.edges)

    @property
    def is_trivial(self) -> bool:
        return not self.edges

    def sort_key(self):
        return (len(self.edges), self.edges, self.start)

    def concat(self, other: Path) -> Path:
        if self.end != other.start:
            raise ValueError(f"cannot compose {self} with {other}")
        if not other.edges:
            return self
        if not self.edges:
            return other
        return Path(self.start, self.edges + other.edges, other.end)

    def __str__(self):
        return ".".join(self.edges) if self.edges else self.start


@dataclass(frozen=True)
class Cycle:
    base: str
    edges: tuple[str, ...]
    vertices: tuple[str, ...]
    has_exit: bool

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "edges": list(self.edges),
            "vertices": list(self.vertices),
            "has_exit": self.has_exit,
        }


@dataclass(frozen=True)
class GraphReport:
    sinks: tuple[str, ...]
    regular: tuple[str, ...]
    cycles: tuple[Cycle, ...]
    no_exit: bool
    extending_verdict: bool
    acyclic: bool

    @property
    def noetherian(self) -> bool:
        return self.no_exit

    def exiting_cycles(self) -> list[Cycle]:
        return [c for c in self.cycles if c.has_exit]

    def to_json(self) -> dict:
        return {
            "sinks": list(self.sinks),
            "regular": list(self.regular),
            "cycles": [c.to_json() for c in self.cycles],
            "no_exit": self.no_exit,
            "noetherian": self.noetherian,
            "extending_verdict": self.extending_verdict,
            "acyclic": self.acyclic,
        }


# --------------------------------------------------------------------------
# parsing


_VERTICES = re.compile(r"vertices\s*:(.*)$")
_EDGE = re.compile(rf"edge\s+({NAME})\s*:\s*({NAME})\s*->\s*({NAME})\s*$")


def _parse_json(text: str) -> Graph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict) or "vertices" not in data:
        raise GraphSyntaxError("JSON graph must be an object with 'vertices'", 1, 1)
    try:
        edges = [Edge(str(e["name"]), str(e["src"]), str(e["dst"])) for e in data.get("edges", [])]
    except (KeyError, TypeError):
        raise GraphSyntaxError("each JSON edge needs 'name', 'src' and 'dst'", 1, 1) from None
    return Graph(tuple(str(v) for v in data["vertices"]), tuple(edges))


def parse_graph(text: str) -> Graph:
    """Parse the line-oriented graph DSL (or its JSON equivalent).

    ::

        # tail plus loop
        vertices: u v
        edge t: u -> v
        edge l: v -> v

    Declaration order of edges is kept; it fixes the designated edge
    (last-declared edge out of each vertex) used by the normal form.
    """
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    vertices: list[str] | None = None
    vertex_line = 0
    edges: list[Edge] = []
    positions: dict[str, tuple[int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        col0 = len(raw) - len(raw.lstrip()) + 1
        if not line or line.startswith("#"):
            continue
        m = _VERTICES.match(line)
        if m:
            if vertices is not None:
                raise GraphSyntaxError(f"second 'vertices:' line (first on line {vertex_line})", lineno, col0)
            vertices = []
            offset = raw.index(":") + 2
            for vm in re.finditer(r"\S+", m.group(1)):
                name = vm.group(0)
                col = offset + vm.start()
                if not _NAME_RE.fullmatch(name):
                    raise GraphSyntaxError(f"invalid vertex name {name!r}", lineno, col)
                if name in positions:
                    raise GraphSyntaxError(f"duplicate name {name!r}", lineno, col)
                positions[name] = (lineno, col)
                vertices.append(name)
            vertex_line = lineno
            continue
        if line.startswith("edge"):
            m = _EDGE.match(line)
            if not m:
                raise GraphSyntaxError("expected 'edge NAME: SRC -> DST'", lineno, col0)
            name, src, dst = m.groups()
            if vertices is None:
                raise GraphSyntaxError("edge declared before the 'vertices:' line", lineno, col0)
            col = col0 + m.start(1)
            if name in positions:
                raise GraphSyntaxError(f"duplicate name {name!r}", lineno, col)
            for grp in (2, 3):
                end = m.group(grp)
                if end not in vertices:
                    raise GraphSyntaxError(f"dangling endpoint {end!r}", lineno, col0 + m.start(grp))
            positions[name] = (lineno, col)
            edges.append(Edge(name, src, dst))
            continue
        raise GraphSyntaxError(f"unrecognised line {line!r}", lineno, col0)
    if vertices is None:
        raise GraphSyntaxError("missing 'vertices:' line", max(1, len(text.splitlines())), 1)
    if not vertices:
        raise GraphSyntaxError("a graph needs at least one vertex", vertex_line, 1)
    return Graph(tuple(vertices), tuple(edges))


def format_graph(g: Graph) -> str:
    lines = ["vertices: " + " ".join(g.vertices)]
    lines += [f"edge {e.name}: {e.src} -> {e.dst}" for e in g.edges]
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [{"name": e.name, "src": e.src, "dst": e.dst} for e in g.edges],
    }


# --------------------------------------------------------------------------
# analysis


def simple_cycles(g: Graph) -> list[tuple[str, tuple[str, ...]]]:
    """All simple cycles as ``(base, edge names)`` with base the least vertex
    name on the cycle; sorted by base, then edge sequence."""
    found: list[tuple[str, tuple[str, ...]]] = []
    for base in sorted(g.vertices):

        def dfs(v: str, trail: list[str], visited: set[str]):
            for e in g.out_edges[v]:
                if e.dst == base:
                    found.append((base, tuple(trail + [e.name])))
                elif e.dst > base and e.dst not in visited:
                    visited.add(e.dst)
                    dfs(e.dst, trail + [e.name], visited)
                    visited.discard(e.dst)

        dfs(base, [], {base})
    found.sort()
    return found


def analyze(g: Graph) -> GraphReport:
    cycles = []
    for base, edges in simple_cycles(g):
        verts = tuple(g.edge[e].src for e in edges)
        # a simple cycle visits each vertex once, so any second out-edge exits
        exit_ = any(len(g.out_edges[v]) > 1 for v in verts)
        cycles.append(Cycle(base, edges, verts, exit_))
    no_exit = not any(c.has_exit for c in cycles)
    return GraphReport(
        sinks=tuple(g.sinks()),
        regular=tuple(g.regular()),
        cycles=tuple(cycles),
        no_exit=no_exit,
        extending_verdict=no_exit,
        acyclic=not cycles,
    )


def paths_into(g: Graph, v: str, forbidden=frozenset()) -> list[Path]:
    """Every path ending at ``v`` that uses no forbidden edge, trivial path
    included, ordered by length then edge names."""
    if v not in g.out_edges:
        raise GraphError(f"unknown vertex {v!r}")
    forbidden = frozenset(forbidden)
    out: list[Path] = []

    # walk backwards; ``trail`` holds the suffix (edges in forward order)
    def back(u: str, trail: tuple[str, ...], on_path: tuple[str, ...]):
        out.append(Path(u, trail, v) if trail else Path.trivial(v))
        for e in g.in_edges[u]:
            if e.name in forbidden:
                continue
            if e.src in on_path:
                i = on_path.index(e.src)
                raise CycleReachable((e.name,) + trail[: len(on_path) - 1 - i])
            back(e.src, (e.name,) + trail, on_path + (e.src,))

    back(v, (), (v,))
    out.sort(key=Path.sort_key)
    return out


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def matrix_graph(g: Graph, n: int) -> Graph:
    """M_nE: hang an oriented line of length n-1 in front of every vertex."""
    if n < 1:
        raise ValueError("matrix_graph needs n >= 1")
    if n == 1:
        return g
    taken = set(g.vertices) | {e.name for e in g.edges}
    vertices = list(g.vertices)
    edges = list(g.edges)
    for v in g.vertices:
        prev = v
        for i in range(1, n):
            w = _fresh(f"{v}_{i}", taken)
            e = _fresh(f"{v}_e{i}", taken)
            vertices.append(w)
            edges.append(Edge(e, w, prev))
            prev = w
    return Graph(tuple(vertices), tuple(edges))


def disjoint_union(*graphs: Graph, prefixes=None) -> Graph:
    """Disjoint union; names are prefixed only where they would clash."""
    vertices: list[str] = []
    edges: list[Edge] = []
    taken: set[str] = set()
    for idx, g in enumerate(graphs):
        pre = prefixes[idx] if prefixes else f"g{idx}_"
        names = set(g.vertices) | {e.name for e in g.edges}
        rename = {nm: (pre + nm if nm in taken else nm) for nm in names}
        taken |= set(rename.values())
        vertices += [rename[v] for v in g.vertices]
        edges += [Edge(rename[e.name], rename[e.src], rename[e.dst]) for e in g.edges]
    return Graph(tuple(vertices), tuple(edges))


def bfs_paths_into(g: Graph, v: str, forbidden=frozenset(), max_len: int = 50) -> set[tuple[str, tuple[str, ...]]]:
    """Bounded breadth-first enumeration of paths into ``v``; returns
    ``(start, edges)`` pairs.  Used as an independent oracle."""
    found = {(v, ())}
    frontier = deque([(v, ())])
    while frontier:
        u, trail = frontier.popleft()
        if len(trail) >= max_len:
            continue
        for e in g.in_edges[u]:
            if e.name in forbidden:
                continue
            item = (e.src, (e.name,) + trail)
            found.add(item)
            frontier.append(item)
    return found
