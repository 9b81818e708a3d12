"""A Rickart ring that is not a Rickart *-ring.

In ``L_K(E)`` for the graph ``u -t-> v`` with a loop ``l`` at ``v`` the
algebra is ``M_2(K[x, x^-1])``.  The idempotent

    e = [[1, 1 + x], [0, 0]]

satisfies ``e e* = diag(3 + x + x^-1, 0)``.  The matrix unit ``e11`` lies in
``eR`` but not in ``e e* R``, because ``3 + x + x^-1`` is not a unit of the
Laurent ring.  Hence ``e e* R`` is a proper submodule of ``eR``, and no
projection generates the right annihilator of ``1 - e``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .blocks import BlockMatrix, ideal_membership, is_idempotent
from .corpus import get
from .dimension import DimVector, d
from .linalg import snf
from .scalars import QQ
from .structure import decompose, phi_inv

__all__ = ["Check", "RickartReport", "rickart_example"]

VERDICT = "not_rickart_star"


@dataclass
class Check:
    name: str
    ok: bool
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class RickartReport:
    checks: list[Check]
    verdict: str | None
    dim_e: DimVector
    element: str
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        return {
            "checks": [c.to_json() for c in self.checks],
            "verdict": self.verdict,
            "d_e": str(self.dim_e),
            "e_as_element": self.element,
        }


def rickart_example() -> RickartReport:
    g = get("G_tail")
    spec = decompose(g)
    e = BlockMatrix.from_blocks(spec, QQ, [[["1", "1+x"], ["0", "0"]]])
    ee = e * e.adjoint()
    e11 = BlockMatrix.from_blocks(spec, QQ, [[["1", "0"], ["0", "0"]]])
    expected = BlockMatrix.from_blocks(spec, QQ, [[["3+x+x^-1", "0"], ["0", "0"]]])
    checks = []

    checks.append(Check("e is idempotent", is_idempotent(e), "e*e == e"))
    checks.append(Check("e is not a projection", e != e.adjoint(), f"e* = {e.adjoint().mats[0].to_json()}"))

    corner = ee.mats[0].rows[0][0]
    checks.append(
        Check(
            "e e* = diag(3+x+x^-1, 0)",
            ee == expected and str(corner) == "3+x+x^-1",
            f"e e* = {ee.mats[0].to_json()}",
        )
    )

    y = ideal_membership(e, e11)
    in_eR = y is not None and e * y == e11
    checks.append(
        Check("e11 in eR", in_eR, f"witness y = {y.mats[0].to_json()}, e y = e11" if in_eR else "no witness")
    )

    # e e* y = e11 forces (3+x+x^-1) y11 = 1; the SNF exposes the non-unit factor.
    none = ideal_membership(ee, e11) is None
    factors = snf(ee.mats[0]).factors
    nonunit = [f for f in factors if not f.is_unit()]
    width = corner.width
    cert = none and bool(nonunit) and width > 0 and not corner.is_unit()
    checks.append(
        Check(
            "e11 not in e e* R",
            cert,
            f"invariant factors {[str(f) for f in factors]}; 3+x+x^-1 has width {width}, so it is not a unit",
        )
    )

    verdict_ok = all(c.ok for c in checks)
    checks.append(
        Check(
            "verdict: not Rickart *",
            verdict_ok,
            "e e* R is a proper submodule of eR; no projection generates the right annihilator of 1-e",
        )
    )
    return RickartReport(
        checks,
        VERDICT if verdict_ok else None,
        d(e),
        str(phi_inv(g, e)),
        {"nonunit_width": width},
    )
