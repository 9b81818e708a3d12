"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 parse error,
4 precondition violated (for example a graph with an exiting cycle).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from typing import Callable

from . import __version__
from .axioms import check_axioms
from .blocks import BlockMatrix, SideMismatch, is_projection, saturation_data
from .dimension import (
    NotIdempotent,
    central_cover,
    d,
    dim_over_q,
    sim_a,
    sim_star_search,
    simple_order,
    split_bnd,
    v_class,
)
from .graph import GraphError, GraphSyntaxError, analyze, format_graph, matrix_graph, parse_graph
from .io import MatrixFormatError, load_json, matrix_from_json, presentation_from_json
from .linalg import ShapeMismatch
from .lpa import ElementParseError, Lpa, normal_form, parse_raw
from .rickart import rickart_example
from .scalars import NotPositiveDefinite, ScalarSyntaxError, field_from_tag
from .structure import NotNoExit, decompose, phi

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3, 4

PARSE_ERRORS = (GraphSyntaxError, ScalarSyntaxError, ElementParseError, MatrixFormatError)
PRECONDITION_ERRORS = (NotNoExit, NotPositiveDefinite, NotIdempotent, ShapeMismatch, SideMismatch)


def schema_path(command: str):
    """Location of the JSON schema for ``command``'s ``--json`` output."""
    return resources.files("lpadim") / "schemas" / f"{command}.json"


class UsageError(Exception):
    pass


class Output:
    """Collects either a JSON document or table lines, then prints once."""

    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout
        self.lines: list[str] = []

    def line(self, text: str = ""):
        self.lines.append(text)

    def emit(self, doc: dict):
        if self.as_json:
            self.stream.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            self.stream.write("\n".join(self.lines) + ("\n" if self.lines else ""))


# --------------------------------------------------------------------------
# helpers


def _read_graph(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read graph file: {exc}") from None
    return parse_graph(text)


def _field_tag(tag: str) -> str:
    try:
        field_from_tag(tag)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return tag


def _field(args):
    return field_from_tag(args.field)


def _matrix(args, g, fld, path: str | None, element: str | None) -> BlockMatrix:
    if element is not None:
        return phi(g, Lpa(g, fld).parse(element))
    if path is None:
        raise UsageError("give a matrix file or an inline element with -e")
    try:
        obj = load_json(path)
    except OSError as exc:
        raise UsageError(f"cannot read matrix file: {exc}") from None
    return matrix_from_json(g, obj, fld)


def _mat_lines(M: BlockMatrix) -> list[str]:
    return str(M).splitlines()


# --------------------------------------------------------------------------
# subcommands


def cmd_analyze(args, out: Output) -> int:
    g = _read_graph(args.graph)
    rep = analyze(g)
    out.line(f"vertices: {len(g.vertices)}  edges: {len(g.edges)}")
    out.line(f"sinks: {' '.join(rep.sinks) or '-'}")
    out.line(f"no-exit: {str(rep.no_exit).lower()}")
    out.line(f"noetherian: {str(rep.noetherian).lower()}")
    out.line(f"extending: {str(rep.extending_verdict).lower()}")
    out.line(f"acyclic: {str(rep.acyclic).lower()}")
    for c in rep.cycles:
        tag = "has exit" if c.has_exit else "no exit"
        out.line(f"cycle {'.'.join(c.edges)} based at {c.base}: {tag}")
    out.emit(rep.to_json())
    return EXIT_OK


def cmd_structure(args, out: Output) -> int:
    g = _read_graph(args.graph)
    spec = decompose(g)
    out.line(" (+) ".join(spec.labels()))
    for b in spec.blocks:
        coords = ", ".join(p.edges and ".".join(p.edges) or p.start for p in b.coords)
        extra = f", cycle {'.'.join(b.cycle)}" if b.cycle else ""
        out.line(f"  {b.label()} at {b.anchor}{extra}: coordinates [{coords}]")
    out.emit(spec.to_json())
    return EXIT_OK


def cmd_reduce(args, out: Output) -> int:
    g = _read_graph(args.graph)
    fld = _field(args)
    if args.element is None:
        raise UsageError("reduce needs -e ELEMENT")
    raw = parse_raw(g, args.element, fld)
    a = normal_form(g, raw, fld, args.strategy)
    doc = {
        "input": args.element,
        "strategy": args.strategy,
        "normal_form": str(a),
        "is_zero": not a.terms,
        "is_idempotent": a.is_idempotent(),
        "is_projection": a.is_projection(),
    }
    out.line(str(a))
    if analyze(g).no_exit:
        M = phi(g, a)
        doc["phi"] = M.to_json()
        out.line("phi:")
        out.lines.extend("  " + s for s in _mat_lines(M))
    out.emit(doc)
    return EXIT_OK


def cmd_dim(args, out: Output) -> int:
    g = _read_graph(args.graph)
    fld = _field(args)
    if args.presentation:
        try:
            P = presentation_from_json(g, load_json(args.presentation), fld)
        except OSError as exc:
            raise UsageError(f"cannot read presentation file: {exc}") from None
        split = split_bnd(P)
        dq = dim_over_q(P)
        out.line(f"dim: {split.dim_total}")
        out.line(f"dim over Q: {dq}")
        out.line(f"bounded part: {split.dim_bounded}  unbounded part: {split.dim_unbounded}")
        tf = [str(f) for fs in split.torsion_factors for f in fs]
        out.line(f"torsion factors: {', '.join(tf) or '-'}")
        doc = {"mode": "presentation", "dim": split.dim_total.to_json(), "dim_over_q": dq.to_json(), **split.to_json()}
        out.emit(doc)
        return EXIT_OK if dq == split.dim_total else EXIT_CHECK
    p = _matrix(args, g, fld, args.idempotent, args.element)
    dv = d(p)
    order = simple_order(p)
    out.line(str(dv))
    out.line(f"class in V(R): {list(v_class(p))}")
    out.line(f"simple order: {order if order is not None else '-'}")
    out.emit(
        {
            "mode": "idempotent",
            "dim": dv.to_json(),
            "projection": is_projection(p),
            "v_class": list(v_class(p)),
            "simple_order": order,
            "central_cover": central_cover(p).to_json(),
        }
    )
    return EXIT_OK


def cmd_closure(args, out: Output) -> int:
    g = _read_graph(args.graph)
    fld = _field(args)
    A = _matrix(args, g, fld, args.matrix, args.element)
    if A.side != "R":
        raise SideMismatch("closure takes an R-side generator matrix")
    sat = saturation_data(A)
    dv = d(sat.q)
    out.line("closure idempotent:")
    out.lines.extend("  " + s for s in _mat_lines(sat.q))
    out.line(f"dim: {dv}")
    tf = [str(f) for fs in sat.torsion_factors() for f in fs]
    out.line(f"torsion factors: {', '.join(tf) or '-'}")
    out.emit(
        {
            "closure": sat.q.to_json(),
            "dim": dv.to_json(),
            "ranks": list(sat.ranks),
            "torsion_factors": [[str(f) for f in fs] for fs in sat.torsion_factors()],
        }
    )
    return EXIT_OK


def cmd_equiv(args, out: Output) -> int:
    g = _read_graph(args.graph)
    fld = _field(args)
    p = _matrix(args, g, fld, args.p, args.p_element)
    q = _matrix(args, g, fld, args.q, args.q_element)
    doc: dict = {"seed": args.seed}
    out.line(f"# seed: {args.seed}")
    w = sim_a(p, q)
    if w is None:
        out.line("algebraic: not equivalent (dimensions differ)")
        doc["algebraic"] = {"status": "not_equivalent", "d_p": d(p).to_json(), "d_q": d(q).to_json()}
    else:
        out.line("algebraic: equivalent, witness verified")
        out.line("x:")
        out.lines.extend("  " + s for s in _mat_lines(w.x))
        out.line("y:")
        out.lines.extend("  " + s for s in _mat_lines(w.y))
        doc["algebraic"] = {"status": "equivalent", "witness": w.to_json()}
    if args.star:
        if not (is_projection(p) and is_projection(q)):
            raise NotIdempotent("star equivalence needs projections")
        sw = sim_star_search(p, q, args.budget, args.seed)
        if sw is not None:
            out.line("star: equivalent, witness verified")
            out.lines.extend("  " + s for s in _mat_lines(sw.x))
            doc["star"] = {"status": "equivalent", "witness": sw.to_json()}
        elif w is None:
            out.line("star: not equivalent (not even algebraically)")
            doc["star"] = {"status": "not_equivalent"}
        else:
            out.line(f"star: unknown (no witness within budget {args.budget})")
            doc["star"] = {"status": "unknown", "budget": args.budget}
    out.emit(doc)
    return EXIT_OK


def cmd_axioms(args, out: Output) -> int:
    g = _read_graph(args.graph)
    fld = _field(args)
    rep = check_axioms(g, args.samples, args.seed, args.max_size, fld, name=args.graph)
    out.line(f"# seed: {args.seed}  samples: {args.samples}  max n: {args.max_size}")
    for a in rep.to_json()["results"]:
        out.line(f"{a['axiom']:<7} {a['status']:<5} {a['samples']}")
    out.line(f"witnesses verified: {rep.witnesses_verified}")
    out.emit(rep.to_json())
    return EXIT_OK if rep.ok else EXIT_CHECK


def cmd_matrix_graph(args, out: Output) -> int:
    g = _read_graph(args.graph)
    if args.n < 1:
        raise UsageError("-n must be positive")
    h = matrix_graph(g, args.n)
    text = format_graph(h)
    out.line(text.rstrip("\n"))
    out.emit({"n": args.n, "graph": text})
    return EXIT_OK


def cmd_paper_example(args, out: Output) -> int:
    rep = rickart_example()
    for c in rep.checks:
        mark = "✓" if c.ok else "✗"
        out.line(f"{mark} {c.name}: {c.detail}")
    out.line(f"d(e) = {rep.dim_e}")
    out.line(f"e as an element: {rep.element}")
    out.emit(rep.to_json())
    return EXIT_OK if rep.ok else EXIT_CHECK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--field", type=_field_tag, default="QQ", help="coefficient field: QQ, QQ_I or F<p>")

    parser = argparse.ArgumentParser(prog="lpadim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func: Callable, help_: str):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("analyze", cmd_analyze, "cycles, exits and the extending verdict")
    p.add_argument("graph")

    p = add("structure", cmd_structure, "block decomposition of a no-exit graph")
    p.add_argument("graph")

    p = add("reduce", cmd_reduce, "normal form of an element")
    p.add_argument("graph")
    p.add_argument("-e", dest="element", help="element, e.g. 't.l.l*.t*'")
    p.add_argument("--strategy", choices=("innermost", "outermost"), default="innermost")

    p = add("dim", cmd_dim, "dimension of an idempotent or a presented module")
    p.add_argument("graph")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--idempotent", metavar="FILE")
    mode.add_argument("--presentation", metavar="FILE")
    mode.add_argument("-e", dest="element", help="idempotent element of the algebra")

    p = add("closure", cmd_closure, "saturation of a generated submodule")
    p.add_argument("graph")
    p.add_argument("matrix", nargs="?", help="generator matrix file (rows generate)")
    p.add_argument("-e", dest="element", help="single generator given as an element")

    p = add("equiv", cmd_equiv, "algebraic (and optionally star) equivalence")
    p.add_argument("graph")
    p.add_argument("p", nargs="?", help="matrix file for p")
    p.add_argument("q", nargs="?", help="matrix file for q")
    p.add_argument("--p-element", help="p as an element")
    p.add_argument("--q-element", help="q as an element")
    p.add_argument("--star", action="store_true", help="also search for a star witness")
    p.add_argument("--budget", type=int, default=2000, help="star search budget")

    p = add("axioms", cmd_axioms, "randomized axiom and dimension checks")
    p.add_argument("graph")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--max-size", type=int, default=3, help="largest logical matrix size")

    p = add("matrix-graph", cmd_matrix_graph, "graph whose algebra is M_n of the input's")
    p.add_argument("graph")
    p.add_argument("-n", type=int, required=True)

    add("paper-example", cmd_paper_example, "reproduce the Rickart but not Rickart * example")
    return parser


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(args.json, stdout)
    try:
        return args.func(args, out)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except PARSE_ERRORS as exc:
        stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except PRECONDITION_ERRORS as exc:
        stderr.write(f"precondition failed ({type(exc).__name__}): {exc}\n")
        return EXIT_PRECONDITION
    except GraphError as exc:
        stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
