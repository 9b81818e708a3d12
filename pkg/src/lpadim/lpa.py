"""Leavitt path algebras L_K(E) of finite graphs.

Elements are K-linear combinations of monomials ``p q*`` (``p``, ``q`` paths
with the same range).  The Cuntz-Krieger relations are applied as a
terminating rewriting system:

* vertex absorption and path composition,
* CK1: ``e* f -> delta(e, f) r(e)``,
* CK2, oriented on the designated edge ``g`` of each regular vertex ``v``
  (the last-declared edge out of ``v``):
  ``g g* -> v - sum_{s(e) = v, e != g} e e*``.

A monomial ``p q*`` is in normal form unless ``p`` and ``q`` both end with the
same designated edge.
"""

from __future__ import annotations

import random
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Union

from .graph import Graph, Path
from .scalars import QQ, Field, ScalarSyntaxError, parse_scalar

__all__ = [
    "Lpa",
    "LpaElement",
    "Atom",
    "RawSum",
    "RawProd",
    "normal_form",
    "normal_form_outermost",
    "parse_element",
    "parse_raw",
    "ElementParseError",
    "random_raw",
    "MixedGraphs",
]


class ElementParseError(ValueError):
    def __init__(self, message: str, column: int | None = None):
        self.column = column
        self.line = 1
        super().__init__(message if column is None else f"column {column}: {message}")


class MixedGraphs(ValueError):
    pass


Key = tuple[Path, Path]


def _prefix(g: Graph, p: Path) -> Path:
    if len(p.edges) == 1:
        return Path.trivial(p.start)
    return Path(p.start, p.edges[:-1], g.edge[p.edges[-1]].src)


def _extend(g: Graph, p: Path, e: str) -> Path:
    return Path(p.start, p.edges + (e,), g.edge[e].dst)


def _ck2_reduce(g: Graph, p: Path, q: Path, c, acc: dict) -> int:
    """Add ``c * p q*`` in normal form to ``acc``; returns the number of CK2
    steps taken."""
    steps = 0
    designated = g.designated
    while p.edges and q.edges and p.edges[-1] == q.edges[-1]:
        last = p.edges[-1]
        w = g.edge[last].src
        if designated[w] != last:
            break
        steps += 1
        p, q = _prefix(g, p), _prefix(g, q)
        for f in g.out_edges[w]:
            if f.name != last:
                key = (_extend(g, p, f.name), _extend(g, q, f.name))
                acc[key] = acc[key] - c if key in acc else -c
    key = (p, q)
    acc[key] = acc[key] + c if key in acc else c
    return steps


def _mono_mul(a: Key, b: Key) -> Key | None:
    """(p q*)(r s*) before CK2 reduction, or None when it vanishes."""
    p, q = a
    r, s = b
    if q.start != r.start:
        return None
    qe, re_ = q.edges, r.edges
    if len(qe) <= len(re_):
        if re_[: len(qe)] != qe:
            return None
        rest = re_[len(qe):]
        if not rest:
            return (p, s)
        return (Path(p.start, p.edges + rest, r.end), s)
    if qe[: len(re_)] != re_:
        return None
    rest = qe[len(re_):]
    return (p, Path(s.start, s.edges + rest, q.end))


class Lpa:
    """The algebra L_K(E): a factory for elements over a fixed graph and field."""

    def __init__(self, graph: Graph, field: Field = QQ):
        self.graph = graph
        self.field = field

    def __eq__(self, other):
        return isinstance(other, Lpa) and self.graph == other.graph and self.field is other.field

    def __hash__(self):
        return hash((self.graph, self.field.tag))

    def element(self, terms: dict | None = None) -> LpaElement:
        return LpaElement(self, {k: v for k, v in (terms or {}).items() if v})

    @property
    def zero(self) -> LpaElement:
        return LpaElement(self, {})

    @property
    def one(self) -> LpaElement:
        return self.element({(Path.trivial(v), Path.trivial(v)): self.field.one for v in self.graph.vertices})

    def scalar(self, c) -> LpaElement:
        return self.one * self.field(c)

    def vertex(self, v: str) -> LpaElement:
        if not self.graph.is_vertex(v):
            raise KeyError(v)
        t = Path.trivial(v)
        return self.element({(t, t): self.field.one})

    def edge(self, e: str) -> LpaElement:
        ed = self.graph.edge[e]
        return self.element({(Path(ed.src, (e,), ed.dst), Path.trivial(ed.dst)): self.field.one})

    def ghost(self, e: str) -> LpaElement:
        ed = self.graph.edge[e]
        return self.element({(Path.trivial(ed.dst), Path(ed.src, (e,), ed.dst)): self.field.one})

    def path(self, p: Path) -> LpaElement:
        return self.monomial(p, Path.trivial(p.end))

    def monomial(self, p: Path, q: Path, c=1) -> LpaElement:
        """``c * p q*`` brought to normal form."""
        if p.end != q.end:
            raise ValueError(f"r({p}) != r({q})")
        acc: dict = {}
        _ck2_reduce(self.graph, p, q, self.field(c), acc)
        return self.element(acc)

    def generators(self) -> list[LpaElement]:
        g = self.graph
        return (
            [self.vertex(v) for v in g.vertices]
            + [self.edge(e.name) for e in g.edges]
            + [self.ghost(e.name) for e in g.edges]
        )

    def parse(self, text: str) -> LpaElement:
        return parse_element(self.graph, text, self.field)

    def random_element(self, rng: random.Random, terms: int = 3, max_len: int = 3) -> LpaElement:
        """Random element assembled from random words, via the normal form."""
        raw = RawSum(tuple((self.field.random(rng), _random_word(self.graph, rng, max_len)) for _ in range(terms)))
        return normal_form(self.graph, raw, self.field)


class LpaElement:
    """An element of L_K(E) in normal form (immutable)."""

    __slots__ = ("algebra", "terms", "_hash")

    def __init__(self, algebra: Lpa, terms: dict):
        self.algebra = algebra
        self.terms = terms
        self._hash = None

    @property
    def graph(self) -> Graph:
        return self.algebra.graph

    @property
    def field(self) -> Field:
        return self.algebra.field

    def _check(self, other: LpaElement):
        if other.algebra != self.algebra:
            raise MixedGraphs("elements of different Leavitt path algebras")

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, LpaElement):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return LpaElement(self.algebra, out)

    def __neg__(self):
        return LpaElement(self.algebra, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LpaElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LpaElement):
            self._check(other)
            g = self.graph
            acc: dict = {}
            for ka, ca in self.terms.items():
                for kb, cb in other.terms.items():
                    prod = _mono_mul(ka, kb)
                    if prod is not None:
                        _ck2_reduce(g, prod[0], prod[1], ca * cb, acc)
            return LpaElement(self.algebra, {k: c for k, c in acc.items() if c})
        try:
            c = self.field(other)
        except (TypeError, ValueError):
            return NotImplemented
        if not c:
            return LpaElement(self.algebra, {})
        return LpaElement(self.algebra, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, other):
        try:
            c = self.field(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self * c

    def __pow__(self, e: int):
        out = self.algebra.one
        for _ in range(e):
            out = out * self
        return out

    def star(self) -> LpaElement:
        """The involution: sum k p q* -> sum conj(k) q p*."""
        return LpaElement(self.algebra, {(q, p): c.conjugate() for (p, q), c in self.terms.items()})

    involve = star

    def is_idempotent(self) -> bool:
        return self * self == self

    def is_projection(self) -> bool:
        return self.is_idempotent() and self.star() == self

    def __eq__(self, other):
        if not isinstance(other, LpaElement):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _mono_key(kv[0]))

    def __repr__(self):
        return f"LpaElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for (p, q), c in self.sorted_terms():
            mono = format_monomial(p, q)
            if c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                cs = str(c)
                if "+" in cs or "-" in cs[1:]:
                    cs = f"({cs})"
                s = f"{cs}*{mono}"
            if not out:
                out = s
            elif s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out


def _mono_key(key: Key):
    p, q = key
    return (len(p) + len(q), p.edges, q.edges, p.start, q.start)


def format_monomial(p: Path, q: Path) -> str:
    atoms = list(p.edges) + [e + "*" for e in reversed(q.edges)]
    if not atoms:
        return p.start
    return ".".join(atoms)


# --------------------------------------------------------------------------
# raw expressions and the two reduction strategies


@dataclass(frozen=True)
class Atom:
    kind: str  # "v" vertex, "e" edge, "g" ghost edge
    name: str


@dataclass(frozen=True)
class RawSum:
    terms: tuple  # of (coefficient, raw)


@dataclass(frozen=True)
class RawProd:
    factors: tuple


Raw = Union[Atom, RawSum, RawProd, tuple]


def _atom_element(A: Lpa, a: Atom) -> LpaElement:
    if a.kind == "v":
        return A.vertex(a.name)
    if a.kind == "e":
        return A.edge(a.name)
    return A.ghost(a.name)


def _as_raw(raw) -> Raw:
    if isinstance(raw, tuple) and all(isinstance(a, Atom) for a in raw):
        return RawProd(raw)
    return raw


def normal_form(g: Graph, raw, field: Field = QQ, strategy: str = "innermost") -> LpaElement:
    """Reduce a raw expression to its normal form.

    ``innermost`` normalizes sub-expressions bottom-up and multiplies normal
    forms; ``outermost`` first expands the whole expression into words of
    generators and rewrites the words.  Both reach the same fixed point.
    """
    if strategy == "outermost":
        return normal_form_outermost(g, raw, field)
    if strategy != "innermost":
        raise ValueError(f"unknown strategy {strategy!r}")
    A = Lpa(g, field)
    return _eval_innermost(A, _as_raw(raw))


def _eval_innermost(A: Lpa, raw) -> LpaElement:
    if isinstance(raw, LpaElement):
        return raw
    if isinstance(raw, Atom):
        return _atom_element(A, raw)
    if isinstance(raw, RawSum):
        out = A.zero
        for c, sub in raw.terms:
            out = out + _eval_innermost(A, _as_raw(sub)) * A.field(c)
        return out
    if isinstance(raw, RawProd):
        out = A.one
        for f in raw.factors:
            out = out * _eval_innermost(A, _as_raw(f))
        return out
    raise TypeError(f"not a raw expression: {raw!r}")


def _expand(raw, one) -> list[tuple[object, tuple[Atom, ...]]]:
    """Distribute a raw expression into (coefficient, word) pairs."""
    if isinstance(raw, Atom):
        return [(one, (raw,))]
    if isinstance(raw, RawSum):
        out = []
        for c, sub in raw.terms:
            out += [(c * k, w) for k, w in _expand(_as_raw(sub), one)]
        return out
    if isinstance(raw, RawProd):
        acc = [(one, ())]
        for f in raw.factors:
            part = _expand(_as_raw(f), one)
            acc = [(c1 * c2, w1 + w2) for c1, w1 in acc for c2, w2 in part]
        return acc
    raise TypeError(f"not a raw expression: {raw!r}")


def _pair_rule(g: Graph, a: Atom, b: Atom):
    """Rewrite for the adjacent pair ``a b``: None when it is not a redex,
    otherwise a list of (sign, replacement) with [] meaning zero."""
    E = g.edge
    ka, kb = a.kind, b.kind
    if ka == "v":
        if kb == "v":
            return [(1, (a,))] if a.name == b.name else []
        if kb == "e":
            return [(1, (b,))] if E[b.name].src == a.name else []
        return [(1, (b,))] if E[b.name].dst == a.name else []
    if kb == "v":
        if ka == "e":
            return [(1, (a,))] if E[a.name].dst == b.name else []
        return [(1, (a,))] if E[a.name].src == b.name else []
    if ka == "e" and kb == "e":
        return None if E[a.name].dst == E[b.name].src else []
    if ka == "g" and kb == "g":
        return None if E[a.name].src == E[b.name].dst else []
    if ka == "g":  # ghost then real: CK1
        return [(1, (Atom("v", E[a.name].dst),))] if a.name == b.name else []
    # real then ghost
    if E[a.name].dst != E[b.name].dst:
        return []
    w = E[a.name].src
    if a.name == b.name and g.designated[w] == a.name:
        out = [(1, (Atom("v", w),))]
        out += [(-1, (Atom("e", f.name), Atom("g", f.name))) for f in g.out_edges[w] if f.name != a.name]
        return out
    return None


def _word_to_key(g: Graph, word: tuple[Atom, ...]) -> Key:
    if len(word) == 1 and word[0].kind == "v":
        t = Path.trivial(word[0].name)
        return (t, t)
    reals = tuple(a.name for a in word if a.kind == "e")
    ghosts = tuple(a.name for a in word if a.kind == "g")
    if reals:
        p = Path(g.edge[reals[0]].src, reals, g.edge[reals[-1]].dst)
    else:
        p = Path.trivial(g.edge[ghosts[0]].dst)
    if ghosts:
        qe = tuple(reversed(ghosts))
        q = Path(g.edge[qe[0]].src, qe, g.edge[qe[-1]].dst)
    else:
        q = Path.trivial(p.end)
    return (p, q)


def step_bound(length: int) -> int:
    """Maximum rewrite depth along any branch for a word of this length.

    Every non-CK2 rule shortens the word; a CK2 step keeps the length at most
    and leaves a non-designated pair behind, so at most ``length`` CK2 steps
    separate two shortening steps.
    """
    return length * (length + 1) + 1


def normal_form_outermost(g: Graph, raw, field: Field = QQ, leftmost: bool = False) -> LpaElement:
    A = Lpa(g, field)
    if isinstance(raw, LpaElement):
        return raw
    words = _expand(_as_raw(raw), field.one)
    acc: dict = {}
    stack = [(field(c), w, 0, step_bound(len(w))) for c, w in words if c]
    while stack:
        c, word, depth, bound = stack.pop()
        if depth > bound:
            raise RuntimeError(f"rewriting exceeded the step bound {bound} on {word}")
        if not word:
            # empty product is the identity
            for v in g.vertices:
                stack.append((c, (Atom("v", v),), depth + 1, bound))
            continue
        idx = range(len(word) - 1)
        if not leftmost:
            idx = reversed(idx)
        for i in idx:
            res = _pair_rule(g, word[i], word[i + 1])
            if res is not None:
                for sign, rep in res:
                    stack.append((c if sign == 1 else -c, word[:i] + rep + word[i + 2:], depth + 1, bound))
                break
        else:
            key = _word_to_key(g, word)
            v = acc.get(key)
            acc[key] = c if v is None else v + c
    return A.element(acc)


def _random_word(g: Graph, rng: random.Random, max_len: int) -> RawProd:
    atoms = []
    choices = [Atom("v", v) for v in g.vertices]
    choices += [Atom("e", e.name) for e in g.edges] * 2
    choices += [Atom("g", e.name) for e in g.edges] * 2
    for _ in range(rng.randint(1, max_len)):
        atoms.append(rng.choice(choices))
    return RawProd(tuple(atoms))


def _random_composable_word(g: Graph, rng: random.Random, max_len: int) -> RawProd:
    """Random word biased toward nonzero products (p q* shapes)."""
    v = rng.choice(g.vertices)
    reals: list[str] = []
    cur = v
    for _ in range(rng.randint(0, max_len)):
        outs = g.out_edges[cur]
        if not outs:
            break
        e = rng.choice(outs)
        reals.append(e.name)
        cur = e.dst
    ghosts: list[str] = []
    cur2 = cur
    for _ in range(rng.randint(0, max_len)):
        ins = g.in_edges[cur2]
        if not ins:
            break
        e = rng.choice(ins)
        ghosts.append(e.name)
        cur2 = e.src
    atoms = [Atom("e", e) for e in reals] + [Atom("g", e) for e in ghosts]
    if not atoms:
        atoms = [Atom("v", v)]
    return RawProd(tuple(atoms))


def random_raw(g: Graph, rng: random.Random, field: Field = QQ, depth: int = 2, width: int = 3):
    """Random nested raw expression (sums of products of sums ...)."""
    if depth == 0:
        if rng.random() < 0.6:
            return _random_composable_word(g, rng, 3)
        return _random_word(g, rng, 4)
    if rng.random() < 0.5:
        return RawSum(tuple((field.random(rng), random_raw(g, rng, field, depth - 1, width)) for _ in range(rng.randint(1, width))))
    return RawProd(tuple(random_raw(g, rng, field, depth - 1, width) for _ in range(rng.randint(1, 2))))


# --------------------------------------------------------------------------
# parsing


_ETOK = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<num>\d+(?:/\d+)?i?)|(?P<op>[*.+\-()]))")


def _tokens(text: str):
    pos = 0
    out = []
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _ETOK.match(stripped, pos)
        if not m:
            raise ElementParseError(f"unexpected character {stripped[pos]!r}", pos + 1)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    out.append(("end", "", len(stripped) + 1))
    return out


def parse_element(g: Graph, text: str, field: Field = QQ) -> LpaElement:
    """Parse an element and bring it to normal form."""
    return _eval_innermost(Lpa(g, field), parse_raw(g, text, field))


def parse_raw(g: Graph, text: str, field: Field = QQ) -> RawSum:
    """Parse ``elem := term (('+'|'-') term)*`` with
    ``term := [coeff '*'] mono | coeff`` and ``mono := atom ('.' atom)*``;
    an atom is a vertex, an edge, or a ghost edge ``e*``.  A bare
    coefficient stands for that multiple of the identity."""
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos]

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def coeff():
        kind, val, col = take()
        if kind == "num":
            src = val
        else:  # "(" ... ")"
            depth, j = 1, pos
            while depth and toks[j][0] != "end":
                depth += {"(": 1, ")": -1}.get(toks[j][1], 0) if toks[j][0] == "op" else 0
                j += 1
            if depth:
                raise ElementParseError("unbalanced parenthesis", col)
            start = col
            end = toks[j - 1][2]
            src = text[start: end - 1]
            _advance(j)
        try:
            rf = parse_scalar(src, field)
        except ScalarSyntaxError as exc:
            raise ElementParseError(f"bad coefficient: {exc}", col) from None
        if not rf.num.is_constant() or not rf.is_laurent():
            raise ElementParseError("coefficients must be field elements", col)
        return rf.num.constant()

    def _advance(j):
        nonlocal pos
        pos = j

    def atom():
        kind, val, col = take()
        if kind != "name":
            raise ElementParseError(f"expected a vertex or edge name, got {val or 'end of input'!r}", col)
        ghost = False
        if peek()[1] == "*" and peek()[0] == "op":
            take()
            ghost = True
        if g.is_vertex(val):
            if ghost:
                raise ElementParseError(f"vertex {val!r} cannot carry '*'", col)
            return Atom("v", val), col
        if val in g.edge:
            return Atom("g" if ghost else "e", val), col
        raise ElementParseError(f"unknown vertex or edge {val!r}", col)

    def mono():
        atoms = [atom()]
        while peek()[1] == "." and peek()[0] == "op":
            take()
            atoms.append(atom())
        for (a, _), (b, col) in zip(atoms, atoms[1:]):
            if _pair_rule(g, a, b) == [] and not (a.kind == "g" and b.kind == "e"):
                raise ElementParseError(f"non-composable path at {b.name!r}", col)
        return tuple(a for a, _ in atoms)

    def term():
        kind, val, col = peek()
        if kind == "num" or (kind == "op" and val == "("):
            c = coeff()
            if peek()[1] == "*" and peek()[0] == "op":
                take()
                return c, mono()
            return c, ()
        return field.one, mono()

    terms = []
    sign = 1
    if peek()[0] == "op" and peek()[1] in "+-":
        sign = -1 if take()[1] == "-" else 1
    while True:
        c, word = term()
        terms.append((field(c) * sign, word))
        t = peek()
        if t[0] == "end":
            break
        if t[0] == "op" and t[1] in "+-":
            take()
            sign = -1 if t[1] == "-" else 1
            continue
        raise ElementParseError(f"unexpected {t[1]!r}", t[2])
    return RawSum(tuple((c, RawProd(w) if w else identity_raw(g)) for c, w in terms))


def identity_raw(g: Graph) -> RawSum:
    return RawSum(tuple((1, Atom("v", v)) for v in g.vertices))


def elements_equal_strategies(g: Graph, raw, field: Field = QQ) -> bool:
    return normal_form(g, raw, field, "innermost") == normal_form(g, raw, field, "outermost")


def span_basis(elements: Iterable[LpaElement]) -> int:
    """Rank over K of a family of elements (normal forms are a basis)."""
    rows = [dict(e.terms) for e in elements]
    rank = 0
    keys = sorted({k for r in rows for k in r}, key=_mono_key)
    pivots_done = []
    for key in keys:
        piv = next((r for r in rows if r.get(key)), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = 1 / piv[key]
        for r in rows:
            c = r.get(key)
            if c:
                f = c * inv
                for k2, v2 in piv.items():
                    nv = r.get(k2, 0) - f * v2
                    if nv:
                        r[k2] = nv
                    else:
                        r.pop(k2, None)
        pivots_done.append(key)
        rank += 1
    return rank


def basis_monomials(g: Graph, max_len: int) -> list[Key]:
    """All normal-form monomials p q* with |p|, |q| <= max_len."""
    by_end: dict[str, list[Path]] = defaultdict(list)
    frontier = [Path.trivial(v) for v in g.vertices]
    allp = list(frontier)
    for _ in range(max_len):
        nxt = []
        for p in frontier:
            for e in g.out_edges[p.end]:
                nxt.append(_extend(g, p, e.name))
        allp += nxt
        frontier = nxt
    for p in allp:
        by_end[p.end].append(p)
    out = []
    for v, ps in by_end.items():
        for p in ps:
            for q in ps:
                if p.edges and q.edges and p.edges[-1] == q.edges[-1] and g.designated[g.edge[p.edges[-1]].src] == p.edges[-1]:
                    continue
                out.append((p, q))
    out.sort(key=_mono_key)
    return out
