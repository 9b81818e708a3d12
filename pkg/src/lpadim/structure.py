"""Block decomposition of L_K(E) for finite no-exit graphs.

    L_K(E)  ~=  (+)_{sinks} M_{n_i}(K)  (+)  (+)_{cycles} M_{m_j}(K[x, x^-1])

A sink block is indexed by all paths ending at the sink.  A cycle block with
base vertex ``w`` (least vertex name on the cycle) and cycle edge ``g`` out of
``w`` is indexed by the paths ending at ``w`` that avoid ``g``; the full cycle
word ``c`` based at ``w`` plays the role of ``x``.

``phi`` is the left action on these coordinate paths: a path ``p`` sends the
coordinate ``q_j`` to ``p q_j = q_i c^k``, recorded as ``x^k E_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .blocks import BlockMatrix, block_ring
from .graph import Cycle, Graph, Path, analyze, paths_into
from .linalg import Mat
from .lpa import Lpa, LpaElement
from .scalars import QQ, Field, LaurentPoly, RationalFunction

__all__ = [
    "Block",
    "BlockSpec",
    "NotNoExit",
    "NoPreimage",
    "decompose",
    "phi",
    "phi_inv",
    "phi_matrix",
    "phi_inv_matrix",
    "verify_relations",
]


class NotNoExit(ValueError):
    """The graph has a cycle with an exit; no block decomposition exists."""

    def __init__(self, cycles: list[Cycle]):
        self.cycles = cycles
        names = "; ".join(f"{'.'.join(c.edges)} (based at {c.base})" for c in cycles)
        super().__init__(f"graph is not no-exit: exiting cycle(s) {names}")


class NoPreimage(ValueError):
    """A Q-side entry outside K[x, x^-1]; the matrix has no R-side preimage."""


@dataclass(frozen=True)
class Block:
    kind: str  # "sink" or "cycle"
    anchor: str  # sink vertex or cycle base vertex
    coords: tuple[Path, ...]
    cycle: tuple[str, ...] = ()  # cycle word c based at the anchor
    gamma: str | None = None  # cycle edge out of the anchor

    @property
    def size(self) -> int:
        return len(self.coords)

    def label(self) -> str:
        ring = "K" if self.kind == "sink" else "K[x,x^-1]"
        return f"M_{self.size}({ring})"

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "size": self.size,
            "anchor": self.anchor,
            "ring": self.label(),
            "coordinate_paths": [list(p.edges) if p.edges else [] for p in self.coords],
            "coordinate_starts": [p.start for p in self.coords],
        }
        if self.kind == "cycle":
            out["cycle"] = list(self.cycle)
            out["gamma"] = self.gamma
        return out


@dataclass(frozen=True)
class BlockSpec:
    graph: Graph
    blocks: tuple[Block, ...]
    # per block: coordinate lookup and coordinates grouped by start vertex
    _index: tuple = field(default=(), compare=False, repr=False)
    _by_start: tuple = field(default=(), compare=False, repr=False)

    def __hash__(self):
        return hash(self.graph)

    def labels(self) -> list[str]:
        return [b.label() for b in self.blocks]

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks]}

    def decompose_path(self, b: int, p: Path) -> tuple[int, int]:
        """Write a path ending at the anchor of block b as ``q_i c^k``."""
        blk = self.blocks[b]
        edges = p.edges
        k = 0
        c = blk.cycle
        if c:
            L = len(c)
            while len(edges) >= L and edges[-L:] == c:
                edges = edges[:-L]
                k += 1
        key = (p.start if edges else blk.anchor, edges)
        try:
            return self._index[b][key], k
        except KeyError:
            raise AssertionError(f"path {p} does not decompose over block {b}; size formula falsified") from None


@lru_cache(maxsize=256)
def decompose(g: Graph) -> BlockSpec:
    report = analyze(g)
    if not report.no_exit:
        raise NotNoExit(report.exiting_cycles())
    blocks = []
    for s in sorted(report.sinks):
        blocks.append(Block("sink", s, tuple(paths_into(g, s))))
    for cyc in sorted(report.cycles, key=lambda c: c.base):
        gamma = cyc.edges[0]
        coords = tuple(paths_into(g, cyc.base, {gamma}))
        blocks.append(Block("cycle", cyc.base, coords, cyc.edges, gamma))
    index = []
    by_start = []
    for blk in blocks:
        index.append({(p.start, p.edges): i for i, p in enumerate(blk.coords)})
        groups: dict[str, list[int]] = {}
        for i, p in enumerate(blk.coords):
            groups.setdefault(p.start, []).append(i)
        by_start.append(groups)
    return BlockSpec(g, tuple(blocks), tuple(index), tuple(by_start))


def _path_action(spec: BlockSpec, b: int, p: Path) -> list[tuple[int, int, int]]:
    """Nonzero entries (i, j, k) of phi(p) in block b: p q_j = q_i c^k."""
    out = []
    blk = spec.blocks[b]
    for j in spec._by_start[b].get(p.end, ()):
        qj = blk.coords[j]
        i, k = spec.decompose_path(b, p.concat(qj))
        out.append((i, j, k))
    return out


def phi(g: Graph, a: LpaElement) -> BlockMatrix:
    """The *-isomorphism L_K(E) -> block ring on a normal-form element."""
    spec = decompose(g)
    if a.graph != g:
        raise ValueError("element belongs to a different graph")
    fld = a.field
    mats = []
    for b, blk in enumerate(spec.blocks):
        N = blk.size
        cells: dict[tuple[int, int], dict[int, object]] = {}
        cache: dict[Path, list] = {}
        for (p, q), c in a.terms.items():
            ap = cache.get(p)
            if ap is None:
                ap = cache[p] = _path_action(spec, b, p)
            if not ap:
                continue
            aq = cache.get(q)
            if aq is None:
                aq = cache[q] = _path_action(spec, b, q)
            # phi(p) phi(q)* = sum_j x^(k_p - k_q) E_{i_p(j), i_q(j)}
            qmap = {j: (i, k) for i, j, k in aq}
            for i, j, k in ap:
                if j in qmap:
                    i2, k2 = qmap[j]
                    cell = cells.setdefault((i, i2), {})
                    e = k - k2
                    cell[e] = cell[e] + c if e in cell else c
        ring = block_ring(blk.kind, fld, "R")
        rows = [[ring.zero] * N for _ in range(N)]
        for (i, j), poly in cells.items():
            if blk.kind == "sink":
                rows[i][j] = fld(poly.get(0, 0))
            else:
                rows[i][j] = LaurentPoly(fld, poly)
        mats.append(Mat(ring, rows, N, coerce=False))
    return BlockMatrix(spec, fld, "R", 1, 1, mats)


def phi_inv(g: Graph, M: BlockMatrix, field: Field | None = None) -> LpaElement:
    """Inverse of phi on a 1 x 1 block matrix."""
    spec = decompose(g)
    if M.shape != (1, 1):
        raise ValueError("phi_inv expects a logical 1 x 1 matrix")
    fld = field or M.field
    A = Lpa(g, fld)
    out = A.zero
    for blk, Mb in zip(spec.blocks, M.mats):
        cyc = blk.cycle
        for i, row in enumerate(Mb.rows):
            for j, val in enumerate(row):
                if not val:
                    continue
                qi, qj = blk.coords[i], blk.coords[j]
                if isinstance(val, RationalFunction):
                    if not val.is_laurent():
                        raise NoPreimage(f"entry {val} at ({i}, {j}) of {blk.label()} is not in K[x,x^-1]")
                    val = val.num
                if not isinstance(val, LaurentPoly):
                    out = out + A.monomial(qi, qj, val)
                    continue
                for k, c in val.terms.items():
                    if k and not cyc:
                        raise NoPreimage("non-constant entry in a sink block")
                    loop = Path(blk.anchor, cyc * abs(k), blk.anchor) if k else Path.trivial(blk.anchor)
                    if k >= 0:
                        out = out + A.monomial(qi.concat(loop), qj, c)
                    else:
                        out = out + A.monomial(qi, qj.concat(loop), c)
    return out


def phi_matrix(g: Graph, entries: list[list[LpaElement]]) -> BlockMatrix:
    """An n x k matrix over L_K(E) as a block matrix."""
    return BlockMatrix.from_logical([[phi(g, a) for a in row] for row in entries])


def phi_inv_matrix(g: Graph, M: BlockMatrix, field: Field | None = None) -> list[list[LpaElement]]:
    return [[phi_inv(g, M.entry(i, j), field) for j in range(M.k)] for i in range(M.n)]


def element_of(g: Graph, text: str, field: Field = QQ) -> BlockMatrix:
    """Convenience: parse an element and map it through phi."""
    return phi(g, Lpa(g, field).parse(text))


def verify_relations(g: Graph, field: Field = QQ) -> list[tuple[str, bool]]:
    """Check the defining relations of L_K(E) on the images of the generators."""
    spec = decompose(g)
    A = Lpa(g, field)
    V = {v: phi(g, A.vertex(v)) for v in g.vertices}
    E = {e.name: phi(g, A.edge(e.name)) for e in g.edges}
    G = {e.name: phi(g, A.ghost(e.name)) for e in g.edges}
    zero = BlockMatrix.zeros(spec, field)
    out = []
    for v in g.vertices:
        for w in g.vertices:
            want = V[v] if v == w else zero
            out.append((f"{v}*{w} = {'%s' % v if v == w else '0'}", V[v] * V[w] == want))
    out.append(("sum of vertices = 1", sum((V[v] for v in g.vertices), zero) == BlockMatrix.identity(spec, field)))
    for e in g.edges:
        n = e.name
        out.append((f"s({n}) {n} = {n} = {n} r({n})", V[e.src] * E[n] == E[n] and E[n] * V[e.dst] == E[n]))
        out.append((f"{n}* = adjoint of {n}", G[n] == E[n].adjoint()))
        for f in g.edges:
            want = V[e.dst] if e.name == f.name else zero
            out.append((f"{n}*.{f.name} = {'r(%s)' % n if n == f.name else '0'}", G[n] * E[f.name] == want))
    for v in g.regular():
        total = zero
        for e in g.out_edges[v]:
            total = total + E[e.name] * G[e.name]
        out.append((f"{v} = sum of e.e* over edges out of {v}", total == V[v]))
    return out
