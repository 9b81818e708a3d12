"""Reading matrices and module presentations from JSON.

Matrix files carry a logical-shape header and either per-block entry arrays
or a logical array of algebra elements::

    {"n": 1, "k": 1, "side": "R", "blocks": [[["1", "1+x"], ["0", "0"]]]}
    {"n": 1, "k": 1, "elements": [["v + t* + l.t*"]]}

Block entries may also be objects with a ``"matrix"`` key, which is the shape
written by ``BlockMatrix.to_json``.  Presentation files are
``{"n": <columns>, "relations": <matrix or null>}``.
"""

from __future__ import annotations

import json
from typing import Any

from .blocks import BlockMatrix, block_ring
from .dimension import ModulePresentation
from .graph import Graph
from .linalg import Mat
from .lpa import Lpa
from .scalars import QQ, Field
from .structure import decompose, phi_matrix

__all__ = ["MatrixFormatError", "matrix_from_json", "presentation_from_json", "load_json"]


class MatrixFormatError(ValueError):
    pass


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _grid(obj, what: str) -> list[list]:
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise MatrixFormatError(f"{what} must be an array of arrays")
    widths = {len(r) for r in obj}
    if len(widths) > 1:
        raise MatrixFormatError(f"{what} has ragged rows")
    return obj


def matrix_from_json(g: Graph, obj: Any, field: Field = QQ) -> BlockMatrix:
    if not isinstance(obj, dict):
        raise MatrixFormatError("matrix file must be a JSON object")
    spec = decompose(g)
    side = obj.get("side", "R")
    if side not in ("R", "Q"):
        raise MatrixFormatError(f"side must be 'R' or 'Q', not {side!r}")
    if "elements" in obj:
        rows = _grid(obj["elements"], "elements")
        if not rows:
            raise MatrixFormatError("elements must be nonempty")
        A = Lpa(g, field)
        M = phi_matrix(g, [[A.parse(str(t)) for t in r] for r in rows])
        if side == "Q":
            M = M.to_q()
    elif "blocks" in obj:
        blocks = obj["blocks"]
        if not isinstance(blocks, list) or len(blocks) != len(spec.blocks):
            raise MatrixFormatError(f"expected {len(spec.blocks)} block matrices ({', '.join(spec.labels())})")
        mats = []
        for b, entry in zip(spec.blocks, blocks):
            grid = _grid(entry["matrix"] if isinstance(entry, dict) else entry, f"block {b.label()}")
            ring = block_ring(b.kind, field, side)
            ncols = len(grid[0]) if grid else obj.get("k", 0) * b.size
            mats.append(Mat(ring, [[ring.coerce(str(x)) for x in r] for r in grid], ncols))
        M = BlockMatrix.from_blocks(spec, field, mats, side)
    else:
        raise MatrixFormatError("matrix file needs 'blocks' or 'elements'")
    for key, val in (("n", M.n), ("k", M.k)):
        if key in obj and obj[key] != val:
            raise MatrixFormatError(f"header {key}={obj[key]} but the entries give {val}")
    return M


def presentation_from_json(g: Graph, obj: Any, field: Field = QQ) -> ModulePresentation:
    if not isinstance(obj, dict) or "n" not in obj:
        raise MatrixFormatError("presentation file must be an object with 'n' and 'relations'")
    n = obj["n"]
    if not isinstance(n, int) or n < 1:
        raise MatrixFormatError("'n' must be a positive integer")
    rel = obj.get("relations")
    if rel is None or (isinstance(rel, dict) and rel.get("elements") == []):
        return ModulePresentation.free(g, n, field)
    A = matrix_from_json(g, {**rel, "side": "R"}, field)
    return ModulePresentation(g, n, A)
