"""Dense exact matrices over a Euclidean entry ring.

Three entry rings are used: a field ``K``, the Laurent ring ``K[x, x^-1]``
(Euclidean for the width function) and the fraction field ``K(x)``.  The
Smith normal form is written once against the small ring protocol below and
serves all three.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import gmpy2
from gmpy2 import mpq

from .scalars import Field, LaurentPoly, RationalFunction, parse_scalar

__all__ = [
    "FieldRing",
    "LaurentRing",
    "FractionField",
    "Mat",
    "SnfResult",
    "snf",
    "rank",
    "solve",
    "inverse",
    "det",
    "nullspace",
    "column_basis",
    "orth_projection",
    "ShapeMismatch",
]


class ShapeMismatch(ValueError):
    pass


# --------------------------------------------------------------------------
# entry rings


class _Ring:
    kind = ""
    is_field = False

    def __init__(self, field: Field):
        self.field = field

    def __eq__(self, other):
        return type(self) is type(other) and self.field is other.field

    def __hash__(self):
        return hash((self.kind, self.field.tag))

    def __repr__(self):
        return f"{type(self).__name__}({self.field.tag})"

    def fmt(self, a) -> str:
        return str(a)

    def bits(self, a) -> int:
        return 0

    def primitive_unit(self, entries) -> object | None:
        return None


class FieldRing(_Ring):
    """The coefficient field itself (sink blocks)."""

    kind = "K"
    is_field = True

    @property
    def zero(self):
        return self.field.zero

    @property
    def one(self):
        return self.field.one

    def coerce(self, a):
        if isinstance(a, RationalFunction):
            if not a.is_laurent() or not a.num.is_constant():
                raise ValueError(f"{a} is not an element of {self.field.tag}")
            return a.num.constant()
        if isinstance(a, LaurentPoly):
            if not a.is_constant():
                raise ValueError(f"{a} is not an element of {self.field.tag}")
            return a.constant()
        if isinstance(a, str):
            return self.coerce(parse_scalar(a, self.field))
        return self.field(a)

    def involve(self, a):
        return a.conjugate()

    def size(self, a) -> int:
        return 0

    def divmod(self, a, b):
        return a / b, self.field.zero

    def exact_div(self, a, b):
        return a / b

    def is_unit(self, a) -> bool:
        return bool(a)

    def unit_inverse(self, a):
        return self.field.one / a

    def normalize(self, a):
        """``a = unit * normal``; returns (unit, normal)."""
        if not a:
            return self.one, a
        return a, self.one

    def to_fraction(self, a):
        return a

    def complexity(self, a) -> int:
        return 0


_MPQ = type(mpq(1))


def _coeff_bits(coeffs) -> int:
    out = 0
    for c in coeffs:
        if isinstance(c, _MPQ):
            out += c.numerator.bit_length() + c.denominator.bit_length()
        else:
            out += 1
    return out


class LaurentRing(_Ring):
    """K[x, x^-1] with the width as Euclidean size."""

    kind = "L"

    @property
    def zero(self):
        return LaurentPoly(self.field, {}, _clean=True)

    @property
    def one(self):
        return LaurentPoly(self.field, {0: self.field.one}, _clean=True)

    def coerce(self, a):
        if isinstance(a, LaurentPoly):
            return a
        if isinstance(a, RationalFunction):
            if not a.is_laurent():
                raise ValueError(f"{a} is not a Laurent polynomial")
            return a.num
        if isinstance(a, str):
            return self.coerce(parse_scalar(a, self.field))
        return LaurentPoly(self.field, {0: a})

    def involve(self, a):
        return a.involve()

    def size(self, a) -> int:
        return a.width

    def divmod(self, a, b):
        return divmod(a, b)

    def exact_div(self, a, b):
        return a.exact_div(b)

    def is_unit(self, a) -> bool:
        return a.is_unit()

    def unit_inverse(self, a):
        return a.unit_inverse()

    def normalize(self, a):
        return a.normalized()

    def to_fraction(self, a):
        return RationalFunction(a)

    def complexity(self, a) -> int:
        return a.width + len(a.terms)

    def bits(self, a) -> int:
        return _coeff_bits(a.terms.values())

    def primitive_unit(self, entries) -> object | None:
        """A constant c making ``c * entries`` integral with coprime
        coefficients (Q only); None when no rescaling is needed."""
        if self.field.tag != "QQ":
            return None
        coeffs = [c for a in entries if a for c in a.terms.values()]
        if not coeffs:
            return None
        num = den = 0
        for c in coeffs:
            num = gmpy2.gcd(num, c.numerator)
            den = gmpy2.lcm(den, c.denominator) if den else c.denominator
        if num == 1 and den == 1:
            return None
        return self.field(mpq(den, num))


class FractionField(_Ring):
    """K(x), the entry field of the Q-side Laurent blocks."""

    kind = "F"
    is_field = True

    @property
    def zero(self):
        return RationalFunction(LaurentPoly(self.field, {}, _clean=True))

    @property
    def one(self):
        return RationalFunction(LaurentPoly(self.field, {0: self.field.one}, _clean=True))

    def coerce(self, a):
        if isinstance(a, RationalFunction):
            return a
        if isinstance(a, LaurentPoly):
            return RationalFunction(a)
        if isinstance(a, str):
            return parse_scalar(a, self.field)
        return RationalFunction(LaurentPoly(self.field, {0: a}))

    def involve(self, a):
        return a.involve()

    def size(self, a) -> int:
        return 0

    def divmod(self, a, b):
        return a / b, self.zero

    def exact_div(self, a, b):
        return a / b

    def is_unit(self, a) -> bool:
        return bool(a)

    def unit_inverse(self, a):
        return a.inverse()

    def normalize(self, a):
        if not a:
            return self.one, a
        return a, self.one

    def to_fraction(self, a):
        return a

    def complexity(self, a) -> int:
        return a.complexity()


Ring = _Ring


# --------------------------------------------------------------------------
# matrices


class Mat:
    """Immutable dense matrix over an entry ring."""

    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring: _Ring, rows: Sequence[Sequence], ncols: int | None = None, *, coerce=True):
        self.ring = ring
        if coerce:
            rows = [[ring.coerce(a) for a in r] for r in rows]
        else:
            rows = [list(r) for r in rows]
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else (ncols or 0)
        if any(len(r) != self.ncols for r in rows):
            raise ShapeMismatch("ragged matrix")

    @classmethod
    def zeros(cls, ring: _Ring, m: int, n: int) -> Mat:
        z = ring.zero
        return cls(ring, [[z] * n for _ in range(m)], n, coerce=False)

    @classmethod
    def identity(cls, ring: _Ring, n: int) -> Mat:
        z, o = ring.zero, ring.one
        return cls(ring, [[o if i == j else z for j in range(n)] for i in range(n)], n, coerce=False)

    @classmethod
    def diag(cls, ring: _Ring, entries: Sequence) -> Mat:
        n = len(entries)
        z = ring.zero
        return cls(ring, [[ring.coerce(entries[i]) if i == j else z for j in range(n)] for i in range(n)], n, coerce=False)

    @classmethod
    def unit(cls, ring: _Ring, n: int, i: int, j: int, m: int | None = None) -> Mat:
        """Matrix unit E_ij (0-based) of shape n x m."""
        out = cls.zeros(ring, n, n if m is None else m)
        out.rows[i][j] = ring.one
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _same(self, other: Mat):
        if self.ring != other.ring:
            raise ShapeMismatch(f"ring mismatch {self.ring} vs {other.ring}")
        if self.shape != other.shape:
            raise ShapeMismatch(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: Mat) -> Mat:
        self._same(other)
        return Mat(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols, coerce=False)

    def __sub__(self, other: Mat) -> Mat:
        self._same(other)
        return Mat(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols, coerce=False)

    def __neg__(self) -> Mat:
        return Mat(self.ring, [[-a for a in r] for r in self.rows], self.ncols, coerce=False)

    def __mul__(self, other):
        if isinstance(other, Mat):
            if self.ring != other.ring:
                raise ShapeMismatch(f"ring mismatch {self.ring} vs {other.ring}")
            if self.ncols != other.nrows:
                raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
            z = self.ring.zero
            n = other.ncols
            orows = other.rows
            if self.ring.kind == "F":
                return self._mul_fraction(other)
            out = []
            for r in self.rows:
                acc = [None] * n
                for k, a in enumerate(r):
                    if not a:
                        continue
                    for j, b in enumerate(orows[k]):
                        if b:
                            acc[j] = a * b if acc[j] is None else acc[j] + a * b
                out.append([z if v is None else v for v in acc])
            return Mat(self.ring, out, n, coerce=False)
        c = self.ring.coerce(other)
        return Mat(self.ring, [[a * c for a in r] for r in self.rows], self.ncols, coerce=False)

    def _mul_fraction(self, other: Mat) -> Mat:
        dot = RationalFunction.dot
        fld = self.ring.field
        z = self.ring.zero
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.rows:
            nz = [k for k, a in enumerate(r) if a]
            row = []
            for col in cols:
                idx = [k for k in nz if col[k]]
                row.append(dot([r[k] for k in idx], [col[k] for k in idx], fld) if idx else z)
            out.append(row)
        return Mat(self.ring, out, other.ncols, coerce=False)

    def __rmul__(self, other):
        c = self.ring.coerce(other)
        return Mat(self.ring, [[c * a for a in r] for r in self.rows], self.ncols, coerce=False)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def is_zero(self) -> bool:
        return not any(a for r in self.rows for a in r)

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and self == Mat.identity(self.ring, self.nrows)

    def transpose(self) -> Mat:
        cols = [[r[j] for r in self.rows] for j in range(self.ncols)]
        return Mat(self.ring, cols, self.nrows, coerce=False)

    def adjoint(self) -> Mat:
        """Transpose with the entry involution applied."""
        inv = self.ring.involve
        cols = [[inv(self.rows[i][j]) for i in range(self.nrows)] for j in range(self.ncols)]
        return Mat(self.ring, cols, self.nrows, coerce=False)

    def trace(self):
        out = self.ring.zero
        for i in range(min(self.nrows, self.ncols)):
            out = out + self.rows[i][i]
        return out

    def submatrix(self, rows, cols) -> Mat:
        rows = list(rows)
        cols = list(cols)
        return Mat(self.ring, [[self.rows[i][j] for j in cols] for i in rows], len(cols), coerce=False)

    def row(self, i: int) -> Mat:
        return self.submatrix([i], range(self.ncols))

    def col(self, j: int) -> Mat:
        return self.submatrix(range(self.nrows), [j])

    @staticmethod
    def hstack(mats: Sequence[Mat]) -> Mat:
        ring = mats[0].ring
        m = mats[0].nrows
        rows = [sum((list(M.rows[i]) for M in mats), []) for i in range(m)]
        return Mat(ring, rows, sum(M.ncols for M in mats), coerce=False)

    @staticmethod
    def vstack(mats: Sequence[Mat]) -> Mat:
        ring = mats[0].ring
        rows = [list(r) for M in mats for r in M.rows]
        return Mat(ring, rows, mats[0].ncols, coerce=False)

    def map(self, ring: _Ring, f: Callable) -> Mat:
        return Mat(ring, [[f(a) for a in r] for r in self.rows], self.ncols, coerce=False)

    def to_fraction(self, ring: _Ring) -> Mat:
        return self.map(ring, self.ring.to_fraction)

    def to_json(self) -> list[list[str]]:
        return [[self.ring.fmt(a) for a in r] for r in self.rows]

    def __repr__(self):
        return f"Mat({self.to_json()})"

    def __str__(self):
        cells = self.to_json()
        if not cells:
            return "[]"
        w = max((len(c) for r in cells for c in r), default=1)
        return "\n".join("[ " + "  ".join(c.rjust(w) for c in r) + " ]" for r in cells)


# --------------------------------------------------------------------------
# Smith normal form


@dataclass
class SnfResult:
    """``U * A * V == D`` with D diagonal, d_i | d_{i+1}; inverses included.

    The transforms are None when only the diagonal was requested."""

    U: Mat | None
    D: Mat
    V: Mat | None
    Uinv: Mat | None
    Vinv: Mat | None
    rank: int

    @property
    def factors(self) -> list:
        return [self.D.rows[i][i] for i in range(self.rank)]


_SELF_CHECK = False


def set_self_check(on: bool) -> None:
    """Verify every Smith normal form (used by the test suite)."""
    global _SELF_CHECK
    _SELF_CHECK = bool(on)


def verify_snf(A: Mat, res: SnfResult) -> None:
    R = A.ring
    m, n = A.shape
    if res.U is not None:
        if res.U * A * res.V != res.D:
            raise AssertionError("SNF: U A V != D")
        if not (res.U * res.Uinv).is_identity() or not (res.V * res.Vinv).is_identity():
            raise AssertionError("SNF: transform and recorded inverse disagree")
    elif rank(A) != res.rank:
        raise AssertionError("SNF: rank differs from the rank over the fraction field")
    for i in range(m):
        for j in range(n):
            if res.D.rows[i][j] and (i != j or i >= res.rank):
                raise AssertionError("SNF: D is not diagonal of the stated rank")
    fs = res.factors
    if any(not f for f in fs):
        raise AssertionError("SNF: zero inside the invariant factors")
    for a, b in zip(fs, fs[1:]):
        if R.divmod(b, a)[1]:
            raise AssertionError(f"SNF: divisibility chain broken ({a} does not divide {b})")


def snf(A: Mat, transforms: bool = True) -> SnfResult:
    """Smith normal form; ``transforms=False`` skips U, V and their inverses,
    whose coefficients can grow far beyond those of D."""
    res = _snf(A, transforms)
    if _SELF_CHECK:
        verify_snf(A, res)
    return res


def _snf(A: Mat, transforms: bool = True) -> SnfResult:
    """Smith normal form over the entry ring of ``A``.

    Pivot: nonzero entry of minimal Euclidean size, ties broken by
    coefficient size and then by position (row major).  Over Q the pending
    rows and columns are kept primitive by constant (unit) rescaling.  Invariant factors are normalized (monic ordinary polynomials for
    the Laurent ring, 1 over a field).
    """
    R = A.ring
    m, n = A.shape
    M = [list(r) for r in A.rows]
    z, o = R.zero, R.one
    U = [[o if i == j else z for j in range(m)] for i in range(m)]
    Ui = [[o if i == j else z for j in range(m)] for i in range(m)]
    V = [[o if i == j else z for j in range(n)] for i in range(n)]
    Vi = [[o if i == j else z for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        if i == j:
            return
        M[i], M[j] = M[j], M[i]
        if not transforms:
            return
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i == j:
            return
        for r in M:
            r[i], r[j] = r[j], r[i]
        if not transforms:
            return
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(i, j, c):
        # row_i += c * row_j
        Mi, Mj = M[i], M[j]
        for k in range(n):
            if Mj[k]:
                Mi[k] = Mi[k] + c * Mj[k]
        if not transforms:
            return
        Ui_, Uj = U[i], U[j]
        for k in range(m):
            if Uj[k]:
                Ui_[k] = Ui_[k] + c * Uj[k]
        for r in Ui:  # col_j -= c * col_i
            if r[i]:
                r[j] = r[j] - c * r[i]

    def add_col(j, i, c):
        # col_j += c * col_i
        for r in M:
            if r[i]:
                r[j] = r[j] + c * r[i]
        if not transforms:
            return
        for r in V:
            if r[i]:
                r[j] = r[j] + c * r[i]
        Vi_i, Vj = Vi[i], Vi[j]  # row_i -= c * row_j
        for k in range(n):
            if Vj[k]:
                Vi_i[k] = Vi_i[k] - c * Vj[k]

    def scale_row(i, u):
        uinv = R.unit_inverse(u)
        M[i] = [a * u if a else a for a in M[i]]
        if not transforms:
            return
        U[i] = [a * u if a else a for a in U[i]]
        for r in Ui:
            if r[i]:
                r[i] = r[i] * uinv

    def scale_col(j, u):
        uinv = R.unit_inverse(u)
        for r in M:
            if r[j]:
                r[j] = r[j] * u
        if not transforms:
            return
        for r in V:
            if r[j]:
                r[j] = r[j] * u
        Vi[j] = [a * uinv if a else a for a in Vi[j]]

    def tidy(t):
        # constant rescaling (a unit) keeps coefficients from growing
        for i in range(t + 1, m):
            c = R.primitive_unit(M[i][t:])
            if c is not None:
                scale_row(i, R.coerce(c))
        for j in range(t + 1, n):
            c = R.primitive_unit([M[i][j] for i in range(t, m)])
            if c is not None:
                scale_col(j, R.coerce(c))

    def key(a):
        return (R.size(a), R.bits(a))

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = M[i][j]
                if a:
                    s = key(a)
                    if best is None or s < best[0]:
                        best = (s, i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            clean = True
            piv = M[t][t]
            for i in range(t + 1, m):
                if M[i][t]:
                    q, r = R.divmod(M[i][t], piv)
                    if q:
                        add_row(i, t, -q)
                    if r:
                        clean = False
            for j in range(t + 1, n):
                if M[t][j]:
                    q, r = R.divmod(M[t][j], piv)
                    if q:
                        add_col(j, t, -q)
                    if r:
                        clean = False
            tidy(t)
            if not clean:
                # move the smallest leftover in row/column t into the pivot
                best = None
                for i in range(t, m):
                    if M[i][t] and (best is None or key(M[i][t]) < best[0]):
                        best = (key(M[i][t]), i, t)
                for j in range(t + 1, n):
                    if M[t][j] and (best is None or key(M[t][j]) < best[0]):
                        best = (key(M[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = None
            if not R.is_field:
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if M[i][j] and R.divmod(M[i][j], piv)[1]:
                            bad = i
                            break
                    if bad is not None:
                        break
            if bad is None:
                break
            add_row(t, bad, o)
        unit, _ = R.normalize(M[t][t])
        scale_row(t, R.unit_inverse(unit))
        t += 1

    mk = lambda rows, k: Mat(R, rows, k, coerce=False) if transforms else None  # noqa: E731
    return SnfResult(mk(U, m), Mat(R, M, n, coerce=False), mk(V, n), mk(Ui, m), mk(Vi, n), t)


# --------------------------------------------------------------------------
# field linear algebra


def _echelon(rows: list[list], R: _Ring, ncols: int):
    """In-place reduced row echelon form; returns pivot columns."""
    pivots = []
    r = 0
    nr = len(rows)
    for c in range(ncols):
        if r == nr:
            break
        best = None
        for i in range(r, nr):
            a = rows[i][c]
            if a:
                cx = R.complexity(a)
                if best is None or cx < best[0]:
                    best = (cx, i)
                    if cx == 0:
                        break
        if best is None:
            continue
        i = best[1]
        rows[r], rows[i] = rows[i], rows[r]
        inv = R.unit_inverse(rows[r][c])
        rows[r] = [a * inv if a else a for a in rows[r]]
        pr = rows[r]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                ri = rows[i]
                for k in range(c, ncols):
                    if pr[k]:
                        ri[k] = ri[k] - f * pr[k]
        pivots.append(c)
        r += 1
    return pivots


def _as_field_mat(A: Mat) -> Mat:
    if A.ring.is_field:
        return A
    return A.to_fraction(FractionField(A.ring.field))


def rank(A: Mat) -> int:
    """Rank over the fraction field of the entry ring."""
    F = _as_field_mat(A)
    rows = [list(r) for r in F.rows]
    return len(_echelon(rows, F.ring, F.ncols))


def rref(A: Mat) -> tuple[Mat, list[int]]:
    F = _as_field_mat(A)
    rows = [list(r) for r in F.rows]
    piv = _echelon(rows, F.ring, F.ncols)
    return Mat(F.ring, rows, F.ncols, coerce=False), piv


def nullspace(A: Mat) -> Mat:
    """Columns spanning {v : A v = 0} over the fraction field."""
    E, piv = rref(A)
    R = E.ring
    n = E.ncols
    free = [j for j in range(n) if j not in piv]
    cols = []
    for f in free:
        v = [R.zero] * n
        v[f] = R.one
        for r, p in enumerate(piv):
            v[p] = -E.rows[r][f]
        cols.append(v)
    if not cols:
        return Mat(R, [[] for _ in range(n)], 0, coerce=False)
    return Mat(R, [list(x) for x in zip(*cols)], len(cols), coerce=False)


def column_basis(A: Mat) -> Mat:
    """Independent columns of A spanning its column space (field rings)."""
    _, piv = rref(A)
    F = _as_field_mat(A)
    return F.submatrix(range(F.nrows), piv)


def inverse(A: Mat) -> Mat:
    if A.nrows != A.ncols:
        raise ShapeMismatch("inverse of a non-square matrix")
    R = A.ring
    n = A.nrows
    if R.is_field:
        rows = [list(r) + [R.one if i == j else R.zero for j in range(n)] for i, r in enumerate(A.rows)]
        piv = _echelon(rows, R, 2 * n)
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return Mat(R, [r[n:] for r in rows], n, coerce=False)
    res = snf(A)
    if res.rank < n or not all(R.is_unit(d) for d in res.factors):
        raise ZeroDivisionError("matrix is not invertible over the entry ring")
    # A = Uinv D Vinv with D = I after normalization
    return res.V * res.U


def det(A: Mat):
    """Determinant (fraction-free Bareiss with exact division)."""
    if A.nrows != A.ncols:
        raise ShapeMismatch("determinant of a non-square matrix")
    R = A.ring
    n = A.nrows
    if n == 0:
        return R.one
    M = [list(r) for r in A.rows]
    sign = 1
    prev = R.one
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return R.zero
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = R.exact_div(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return d if sign == 1 else -d


def solve(A: Mat, B: Mat) -> Mat | None:
    """Some Y over the entry ring with ``A * Y == B``, or None."""
    if A.nrows != B.nrows:
        raise ShapeMismatch("solve: row counts differ")
    R = A.ring
    res = snf(A)
    C = res.U * B
    Z = [[R.zero] * B.ncols for _ in range(A.ncols)]
    for i in range(A.nrows):
        for j in range(B.ncols):
            c = C.rows[i][j]
            if i < res.rank:
                q, r = R.divmod(c, res.D.rows[i][i])
                if r:
                    return None
                Z[i][j] = q
            elif c:
                return None
    return res.V * Mat(R, Z, B.ncols, coerce=False)


def orth_projection(B: Mat) -> Mat:
    """Orthogonal projection onto the column space of B for the hermitian
    form sum conj(x_i) y_i.  Requires an anisotropic form."""
    Bf = column_basis(B)
    if Bf.ncols == 0:
        return Mat.zeros(Bf.ring, Bf.nrows, Bf.nrows)
    Bs = Bf.adjoint()
    return Bf * inverse(Bs * Bf) * Bs
