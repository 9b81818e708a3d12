"""Exact coefficient arithmetic.

Three involutive fields are supported: the rationals (identity involution),
the Gaussian rationals (complex conjugation) and small prime fields (identity,
used only as a source of non positive definite negatives).  On top of a field
``K`` this module provides Laurent polynomials ``K[x, x^-1]`` with the
involution ``x -> x^-1`` composed with the coefficient involution, and the
fraction field ``K(x)``.

Rationals are ``gmpy2.mpq`` values; Gaussian rationals and prime field
elements are small wrapper classes with the usual operator protocol.  Every
field element exposes ``conjugate()`` which is the field involution.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from gmpy2 import mpq

__all__ = [
    "GaussQ",
    "ModP",
    "Field",
    "QQ",
    "QQ_I",
    "PrimeField",
    "field_involve",
    "PositiveDefiniteVerdict",
    "check_positive_definite",
    "LaurentPoly",
    "laurent_gcd",
    "RationalFunction",
    "parse_scalar",
    "ScalarSyntaxError",
    "NotPositiveDefinite",
]


class NotPositiveDefinite(ValueError):
    """Raised by dimension-bearing operations over a field whose involution
    is not positive definite."""


def _q(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, str):
        return mpq(x)
    raise TypeError(f"cannot coerce {x!r} to a rational")


# --------------------------------------------------------------------------
# field element types


class GaussQ:
    """Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @staticmethod
    def _lift(other):
        if isinstance(other, GaussQ):
            return other
        if isinstance(other, (int, mpq, Fraction)):
            return GaussQ(other, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def inverse(self) -> GaussQ:
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussQ(self.re / n, -self.im / n)

    def conjugate(self) -> GaussQ:
        return GaussQ(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        im = "" if self.im == 1 else "-" if self.im == -1 else str(self.im)
        if not self.re:
            return f"{im}i"
        sign = "" if im.startswith("-") else "+"
        return f"{self.re}{sign}{im}i"


class ModP:
    """Element of the prime field F_p."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.p = p
        self.v = int(v) % p

    def _lift(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError("mixed prime fields")
            return other
        if isinstance(other, int):
            return ModP(other, self.p)
        if isinstance(other, (mpq, Fraction)):
            num, den = int(other.numerator), int(other.denominator)
            return ModP(num * pow(den, -1, self.p), self.p)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ModP(self.v + o.v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ModP(self.v - o.v, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ModP(o.v - self.v, self.p)

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ModP(self.v * o.v, self.p)

    __rmul__ = __mul__

    def inverse(self) -> ModP:
        if not self.v:
            raise ZeroDivisionError("inverse of zero")
        return ModP(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def conjugate(self) -> ModP:
        return self

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"ModP({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


def field_involve(a):
    """The field involution: identity on Q and F_p, conjugation on Q(i)."""
    return a.conjugate()


# --------------------------------------------------------------------------
# fields


class Field:
    """An involutive field.  Instances are singletons per tag."""

    tag: str = ""
    has_i: bool = False
    #: proof that sum conj(k_j) k_j = 0 forces every k_j = 0, for every n
    positive_definite_proof: bool = False

    def __call__(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def imaginary_unit(self):
        raise ScalarSyntaxError(f"'i' is not an element of {self.tag}")

    def random(self, rng, bound: int = 3):
        raise NotImplementedError

    def elements(self):
        """Enumerate all elements (finite fields only)."""
        raise TypeError(f"{self.tag} is infinite")

    def __repr__(self):
        return self.tag

    def __reduce__(self):
        return (field_from_tag, (self.tag,))


class _Rationals(Field):
    tag = "QQ"
    positive_definite_proof = True

    def __call__(self, x):
        if isinstance(x, GaussQ):
            if x.im:
                raise ValueError(f"{x} is not rational")
            return x.re
        if isinstance(x, ModP):
            raise TypeError("cannot coerce F_p element to QQ")
        return _q(x)

    def random(self, rng, bound: int = 3):
        den = rng.randint(1, 2)
        return mpq(rng.randint(-bound, bound), den)


class _GaussianRationals(Field):
    tag = "QQ_I"
    has_i = True
    positive_definite_proof = True

    def __call__(self, x):
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, ModP):
            raise TypeError("cannot coerce F_p element to QQ(i)")
        return GaussQ(x, 0)

    def imaginary_unit(self):
        return GaussQ(0, 1)

    def random(self, rng, bound: int = 3):
        return GaussQ(rng.randint(-bound, bound), rng.randint(-bound, bound))


class PrimeField(Field):
    _cache: dict[int, "PrimeField"] = {}

    def __new__(cls, p: int):
        if p in cls._cache:
            return cls._cache[p]
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        obj = super().__new__(cls)
        obj.p = p
        obj.tag = f"F{p}"
        cls._cache[p] = obj
        return obj

    def __call__(self, x):
        if isinstance(x, ModP):
            return x
        if isinstance(x, GaussQ):
            raise TypeError("cannot coerce Gaussian rational to F_p")
        if isinstance(x, (mpq, Fraction)):
            return ModP(int(x.numerator), self.p) / ModP(int(x.denominator), self.p)
        return ModP(int(x), self.p)

    def random(self, rng, bound: int = 3):
        return ModP(rng.randrange(self.p), self.p)

    def elements(self):
        return [ModP(v, self.p) for v in range(self.p)]


QQ = _Rationals()
QQ_I = _GaussianRationals()


def field_from_tag(tag: str) -> Field:
    if tag in ("QQ", "Q"):
        return QQ
    if tag in ("QQ_I", "Q(i)", "QI"):
        return QQ_I
    m = re.fullmatch(r"F_?(\d+)", tag)
    if m:
        return PrimeField(int(m.group(1)))
    raise ValueError(f"unknown field {tag!r}")


def field_of(value) -> Field:
    if isinstance(value, GaussQ):
        return QQ_I
    if isinstance(value, ModP):
        return PrimeField(value.p)
    return QQ


# --------------------------------------------------------------------------
# positive definiteness


@dataclass(frozen=True)
class PositiveDefiniteVerdict:
    field: str
    n: int
    positive_definite: bool
    proven: bool
    counterexample: tuple | None = None
    checked: int = 0

    def to_json(self) -> dict:
        out = {
            "field": self.field,
            "n": self.n,
            "positive_definite": self.positive_definite,
            "proven": self.proven,
            "checked": self.checked,
        }
        if self.counterexample is not None:
            out["counterexample"] = [str(k) for k in self.counterexample]
        return out


def check_positive_definite(field: Field, n: int, budget: int = 100_000) -> PositiveDefiniteVerdict:
    """Look for ``k_1..k_m`` (m <= n), not all zero, with sum conj(k_j) k_j = 0.

    Q and Q(i) carry a proof flag (sums of squares, resp. of squared moduli).
    Finite fields are searched exhaustively in lexicographic order until the
    budget runs out.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if field.positive_definite_proof:
        return PositiveDefiniteVerdict(field.tag, n, True, True)
    checked = 0
    elems = field.elements()
    for m in range(1, n + 1):
        for ks in itertools.product(elems, repeat=m):
            if not any(ks):
                continue
            checked += 1
            total = field.zero
            for k in ks:
                total = total + k.conjugate() * k
            if not total:
                return PositiveDefiniteVerdict(field.tag, n, False, True, tuple(ks), checked)
            if checked >= budget:
                return PositiveDefiniteVerdict(field.tag, n, True, False, None, checked)
    # the search was exhaustive for every m <= n
    return PositiveDefiniteVerdict(field.tag, n, True, True, None, checked)


def require_positive_definite(field: Field) -> None:
    if not field.positive_definite_proof:
        raise NotPositiveDefinite(
            f"field {field.tag} does not carry a positive definite involution"
        )


# --------------------------------------------------------------------------
# Laurent polynomials


def _fmt_coeff(c) -> str:
    s = str(c)
    if isinstance(c, GaussQ) and c.re and c.im:
        return f"({s})"
    return s


class LaurentPoly:
    """Sparse Laurent polynomial: exponent -> nonzero coefficient."""

    __slots__ = ("field", "terms", "_hash")

    def __init__(self, field: Field, terms: Mapping[int, object] | None = None, *, _clean=False):
        self.field = field
        if _clean:
            self.terms = terms
        else:
            clean = {}
            for k, c in (terms or {}).items():
                c = field(c)
                if c:
                    clean[int(k)] = c
            self.terms = clean
        self._hash = None

    # constructors
    @classmethod
    def const(cls, field: Field, c) -> LaurentPoly:
        return cls(field, {0: c})

    @classmethod
    def monomial(cls, field: Field, k: int, c=1) -> LaurentPoly:
        return cls(field, {k: c})

    @classmethod
    def x(cls, field: Field) -> LaurentPoly:
        return cls(field, {1: 1})

    @classmethod
    def from_coeffs(cls, field: Field, coeffs: Iterable, low: int = 0) -> LaurentPoly:
        return cls(field, {low + i: c for i, c in enumerate(coeffs)})

    # structure
    def __bool__(self):
        return bool(self.terms)

    @property
    def min_deg(self) -> int:
        return min(self.terms)

    @property
    def max_deg(self) -> int:
        return max(self.terms)

    @property
    def width(self) -> int:
        if not self.terms:
            raise ValueError("width of the zero polynomial")
        return self.max_deg - self.min_deg

    def coeff(self, k: int):
        return self.terms.get(k, self.field.zero)

    def lead(self):
        return self.terms[self.max_deg]

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant(self):
        return self.terms.get(0, self.field.zero)

    def is_unit(self) -> bool:
        return len(self.terms) == 1

    def is_ordinary(self) -> bool:
        """A polynomial in x with nonzero constant term."""
        return bool(self.terms) and self.min_deg == 0

    # arithmetic
    def _lift(self, other) -> LaurentPoly | None:
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, mpq, Fraction, GaussQ, ModP)):
            return LaurentPoly(self.field, {0: other})
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in o.terms.items():
            s = out.get(k)
            if s is None:
                out[k] = c
            else:
                s = s + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return LaurentPoly(self.field, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.field, {k: -c for k, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            if not self.terms or not other.terms:
                return LaurentPoly(self.field, {}, _clean=True)
            if len(self.terms) * len(other.terms) >= _FLINT_MUL_CUTOFF and self.field is QQ and _flint is not None:
                return _flint_mul(self, other)
            out: dict[int, object] = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    k = k1 + k2
                    s = out.get(k)
                    out[k] = c1 * c2 if s is None else s + c1 * c2
            return LaurentPoly(self.field, {k: c for k, c in out.items() if c}, _clean=True)
        if isinstance(other, (int, mpq, Fraction, GaussQ, ModP)):
            c = self.field(other)
            if not c:
                return LaurentPoly(self.field, {}, _clean=True)
            return LaurentPoly(self.field, {k: v * c for k, v in self.terms.items()}, _clean=True)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.unit_inverse() ** (-e)
        out = LaurentPoly(self.field, {0: self.field.one}, _clean=True)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def shift(self, s: int) -> LaurentPoly:
        """Multiply by x^s."""
        return LaurentPoly(self.field, {k + s: c for k, c in self.terms.items()}, _clean=True)

    def involve(self) -> LaurentPoly:
        """x -> x^-1 composed with the coefficient involution."""
        return LaurentPoly(self.field, {-k: c.conjugate() for k, c in self.terms.items()}, _clean=True)

    def unit_inverse(self) -> LaurentPoly:
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit of K[x,x^-1]")
        ((k, c),) = self.terms.items()
        return LaurentPoly(self.field, {-k: self.field.one / c}, _clean=True)

    def __divmod__(self, g: LaurentPoly):
        """Euclidean division for the width function.

        Returns ``(q, r)`` with ``self = q*g + r`` and ``r == 0`` or
        ``width(r) < width(g)``.
        """
        g = self._lift(g)
        if not g:
            raise ZeroDivisionError("Laurent division by zero")
        zero = LaurentPoly(self.field, {}, _clean=True)
        if not self.terms:
            return zero, zero
        gs, fs = g.min_deg, self.min_deg
        gd = g.max_deg - gs
        gl_inv = self.field.one / g.lead()
        # ordinary-polynomial long division of f0 = x^-fs f by g0 = x^-gs g
        rem = {k - fs: c for k, c in self.terms.items()}
        gterms = [(k - gs, c) for k, c in g.terms.items()]
        quo: dict[int, object] = {}
        while rem:
            top = max(rem)
            if top < gd:
                break
            c = rem[top] * gl_inv
            s = top - gd
            quo[s] = c
            for k, gc in gterms:
                kk = k + s
                v = rem.get(kk)
                v = -(gc * c) if v is None else v - gc * c
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        q = LaurentPoly(self.field, {k + fs - gs: c for k, c in quo.items()}, _clean=True)
        r = LaurentPoly(self.field, {k + fs: c for k, c in rem.items()}, _clean=True)
        return q, r

    def exact_div(self, g: LaurentPoly) -> LaurentPoly:
        q, r = divmod(self, g)
        if r:
            raise ArithmeticError(f"{g} does not divide {self}")
        return q

    def divides(self, f: LaurentPoly) -> bool:
        return not divmod(f, self)[1]

    def normalized(self) -> tuple[object, LaurentPoly]:
        """Split ``self = u * n`` with ``u`` a unit and ``n`` an ordinary monic
        polynomial with nonzero constant term (``n = 0`` for zero)."""
        if not self.terms:
            return LaurentPoly(self.field, {0: self.field.one}, _clean=True), self
        s = self.min_deg
        lead = self.lead()
        inv = self.field.one / lead
        n = LaurentPoly(self.field, {k - s: c * inv for k, c in self.terms.items()}, _clean=True)
        return LaurentPoly(self.field, {s: lead}, _clean=True), n

    def __call__(self, t):
        return sum((c * t**k for k, c in self.terms.items()), self.field.zero)

    # comparison / hashing
    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant())
            else:
                self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda k: (abs(k), -k)):
            c = self.terms[k]
            if k == 0:
                parts.append(str(c))
                continue
            mono = "x" if k == 1 else f"x^{k}"
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{_fmt_coeff(c)}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


# products with at least this many term pairs go through FLINT over Q
_FLINT_MUL_CUTOFF = 40


def _to_fmpq_poly(f: LaurentPoly):
    lo = f.min_deg
    dense = [0] * (f.width + 1)
    for k, c in f.terms.items():
        dense[k - lo] = _flint.fmpq(int(c.numerator), int(c.denominator))
    return _flint.fmpq_poly(dense)


def _flint_mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    lo = f.min_deg + g.min_deg
    prod = _to_fmpq_poly(f) * _to_fmpq_poly(g)
    terms = {i + lo: mpq(int(c.p), int(c.q)) for i, c in enumerate(prod.coeffs()) if c}
    return LaurentPoly(f.field, terms, _clean=True)


def laurent_gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Normalized gcd (ordinary, monic, nonzero constant term)."""
    while g:
        f, g = g, divmod(f, g)[1]
    return f.normalized()[1]


# --------------------------------------------------------------------------
# dense polynomial backends for K(x)
#
# Rational functions are stored as ``x^s * N / D`` with ``N`` and ``D``
# ordinary polynomials.  Over Q the polynomials are FLINT ``fmpq_poly``
# values (fast gcd); other fields use the small tuple-based ``_DensePoly``.


class _DensePoly:
    """Immutable dense polynomial over a field (low-to-high coefficients)."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        return isinstance(other, _DensePoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __getitem__(self, i):
        return self.c[i] if i < len(self.c) else 0

    def degree(self) -> int:
        return len(self.c) - 1

    def coeffs(self):
        return list(self.c)

    def __add__(self, o):
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        return _DensePoly([x + b[i] if i < len(b) else x for i, x in enumerate(a)])

    def __neg__(self):
        return _DensePoly([-x for x in self.c])

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, _DensePoly):
            if not self.c or not o.c:
                return _DensePoly(())
            out = [None] * (len(self.c) + len(o.c) - 1)
            for i, x in enumerate(self.c):
                if not x:
                    continue
                for j, y in enumerate(o.c):
                    v = x * y
                    out[i + j] = v if out[i + j] is None else out[i + j] + v
            zero = self.c[0] - self.c[0]
            return _DensePoly([zero if v is None else v for v in out])
        return _DensePoly([x * o for x in self.c])

    def __divmod__(self, g):
        r = list(self.c)
        dg = len(g.c) - 1
        inv = 1 / g.c[-1]
        if len(r) - 1 < dg:
            return _DensePoly(()), self
        q = [None] * (len(r) - dg)
        for k in range(len(r) - 1, dg - 1, -1):
            c = r[k] * inv
            q[k - dg] = c
            if c:
                for j, gc in enumerate(g.c):
                    r[k - dg + j] = r[k - dg + j] - c * gc
        return _DensePoly(q), _DensePoly(r[:dg])

    def __floordiv__(self, g):
        return divmod(self, g)[0]

    def gcd(self, o):
        a, b = self, o
        while b:
            a, b = b, divmod(a, b)[1]
        if not a:
            return a
        return a * (1 / a.c[-1])


class _Backend:
    """Polynomial operations for one coefficient field."""

    def __init__(self, field: Field):
        self.field = field
        self.flint = field is QQ and _flint is not None
        self.zero = self.make([])
        self.one = self.make([field.one])
        self._xpow = {}

    def make(self, coeffs):
        if self.flint:
            return _flint.fmpq_poly([_flint.fmpq(int(c.numerator), int(c.denominator)) for c in coeffs])
        return _DensePoly(coeffs)

    def coeffs(self, P) -> list:
        if self.flint:
            return [mpq(int(c.p), int(c.q)) for c in P.coeffs()]
        return list(P.c)

    def scale(self, P, c):
        if self.flint:
            return P * _flint.fmpq(int(c.numerator), int(c.denominator))
        return P * c

    def lead(self, P):
        if self.flint:
            c = P[P.degree()]
            return mpq(int(c.p), int(c.q))
        return P.c[-1]

    def const_is_zero(self, P) -> bool:
        return not P[0]

    def xpow(self, k: int):
        P = self._xpow.get(k)
        if P is None:
            P = self._xpow[k] = self.make([self.field.zero] * k + [self.field.one])
        return P

    def key(self, P):
        if self.flint:
            return tuple(str(c) for c in P.coeffs())
        return P.c


try:  # pragma: no cover - exercised implicitly
    import flint as _flint
except ImportError:  # pragma: no cover
    _flint = None

_BACKENDS: dict = {}


def _backend(field: Field) -> _Backend:
    b = _BACKENDS.get(field)
    if b is None:
        b = _BACKENDS[field] = _Backend(field)
    return b


def _split(B: _Backend, f: LaurentPoly):
    """Laurent polynomial -> (shift, ordinary polynomial)."""
    if not f.terms:
        return 0, B.zero
    lo = f.min_deg
    coeffs = [f.field.zero] * (f.max_deg - lo + 1)
    for k, c in f.terms.items():
        coeffs[k - lo] = c
    return lo, B.make(coeffs)


def _strip_x(B: _Backend, P):
    """Return (v, P / x^v) with the quotient having a nonzero constant term."""
    if not B.const_is_zero(P):
        return 0, P
    c = B.coeffs(P)
    v = 0
    while not c[v]:
        v += 1
    return v, B.make(c[v:])


# --------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """Element of K(x) in canonical form ``x^s N / D``: ``N`` and ``D``
    ordinary polynomials with nonzero constant terms (or ``N = 0``), ``D``
    monic and coprime to ``N``.

    ``num`` and ``den`` give the Laurent polynomials ``x^s N`` and ``D``.
    """

    __slots__ = ("field", "B", "s", "N", "D", "_num", "_den", "_hash")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        field = num.field
        B = _backend(field)
        s, N = _split(B, num)
        if den is None:
            D = B.one
        else:
            if not den:
                raise ZeroDivisionError("rational function with zero denominator")
            sd, D = _split(B, den)
            s -= sd
        self._set(field, B, s, N, D, reduce=den is not None)

    def _set(self, field, B, s, N, D, reduce=True):
        self.field = field
        self.B = B
        if not N:
            s, D = 0, B.one
        elif reduce:
            if D.degree() > 0:
                g = N.gcd(D)
                if g.degree() > 0:
                    N = N // g
                    D = D // g
            lc = B.lead(D)
            if lc != 1:
                inv = 1 / lc
                N = B.scale(N, inv)
                D = B.scale(D, inv)
        self.s, self.N, self.D = s, N, D
        self._num = self._den = self._hash = None

    @classmethod
    def _make(cls, field, B, s, N, D, reduce=True) -> RationalFunction:
        obj = cls.__new__(cls)
        obj._set(field, B, s, N, D, reduce)
        return obj

    @classmethod
    def canonicalize(cls, num: LaurentPoly, den: LaurentPoly) -> RationalFunction:
        return cls(num, den)

    # views
    @property
    def num(self) -> LaurentPoly:
        if self._num is None:
            terms = {self.s + i: c for i, c in enumerate(self.B.coeffs(self.N)) if c}
            self._num = LaurentPoly(self.field, terms, _clean=True)
        return self._num

    @property
    def den(self) -> LaurentPoly:
        if self._den is None:
            terms = {i: c for i, c in enumerate(self.B.coeffs(self.D)) if c}
            self._den = LaurentPoly(self.field, terms, _clean=True)
        return self._den

    def is_laurent(self) -> bool:
        return self.D.degree() == 0

    def to_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return self.num

    def is_constant(self) -> bool:
        return not self.N or (self.s == 0 and self.N.degree() == 0 and self.D.degree() == 0)

    def complexity(self) -> int:
        if not self.N:
            return 0
        return 2 * (self.N.degree() + self.D.degree()) + (1 if self.s else 0)

    def _lift(self, other):
        if type(other) is RationalFunction:
            return other
        if isinstance(other, LaurentPoly):
            return RationalFunction(other)
        if isinstance(other, (int, mpq, Fraction, GaussQ, ModP)):
            return RationalFunction(LaurentPoly(self.field, {0: other}))
        return None

    def __bool__(self):
        return bool(self.N)

    # arithmetic
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not o.N:
            return self
        if not self.N:
            return o
        B = self.B
        s = min(self.s, o.s)
        a = self.N if self.s == s else self.N * B.xpow(self.s - s)
        b = o.N if o.s == s else o.N * B.xpow(o.s - s)
        if self.D == o.D:
            num, den = a + b, self.D
        else:
            num, den = a * o.D + b * self.D, self.D * o.D
        if not num:
            return RationalFunction._make(self.field, B, 0, B.zero, B.one, False)
        v, num = _strip_x(B, num)
        return RationalFunction._make(self.field, B, s + v, num, den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._make(self.field, self.B, self.s, -self.N, self.D, False)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        B = self.B
        if not self.N or not o.N:
            return RationalFunction._make(self.field, B, 0, B.zero, B.one, False)
        n1, d1, n2, d2 = self.N, self.D, o.N, o.D
        # cross-cancel before multiplying to keep degrees small
        if d2.degree() > 0 and n1.degree() > 0:
            g = n1.gcd(d2)
            if g.degree() > 0:
                n1, d2 = n1 // g, d2 // g
        if d1.degree() > 0 and n2.degree() > 0:
            g = n2.gcd(d1)
            if g.degree() > 0:
                n2, d1 = n2 // g, d1 // g
        return RationalFunction._make(self.field, B, self.s + o.s, n1 * n2, d1 * d2, False)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if not self.N:
            raise ZeroDivisionError("inverse of zero rational function")
        B = self.B
        lc = B.lead(self.N)
        inv = 1 / lc
        return RationalFunction._make(self.field, B, -self.s, B.scale(self.D, inv), B.scale(self.N, inv), False)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = RationalFunction(LaurentPoly(self.field, {0: self.field.one}, _clean=True))
        for _ in range(e):
            out = out * self
        return out

    def involve(self) -> RationalFunction:
        """x -> x^-1 with conjugated coefficients.  Reversal keeps both
        polynomials ordinary and coprime, so only the denominator needs
        rescaling."""
        B = self.B
        if not self.N:
            return self
        rn = B.make([c.conjugate() for c in reversed(B.coeffs(self.N))])
        rd = [c.conjugate() for c in reversed(B.coeffs(self.D))]
        inv = 1 / rd[-1]
        s = -self.s - self.N.degree() + self.D.degree()
        return RationalFunction._make(self.field, B, s, B.scale(rn, inv), B.scale(B.make(rd), inv), False)

    @staticmethod
    def dot(xs, ys, field: Field) -> RationalFunction:
        """``sum x_i y_i`` with a single reduction at the end."""
        B = _backend(field)
        groups: list = []  # [D, shift, numerator]
        for a, b in zip(xs, ys):
            if not a.N or not b.N:
                continue
            sh = a.s + b.s
            N = a.N * b.N
            D = a.D * b.D if b.D.degree() else a.D
            if a.D.degree() == 0:
                D = b.D
            for g in groups:
                if g[0] == D:
                    if sh < g[1]:
                        g[2] = g[2] * B.xpow(g[1] - sh) + N
                        g[1] = sh
                    else:
                        g[2] = g[2] + (N * B.xpow(sh - g[1]) if sh > g[1] else N)
                    break
            else:
                groups.append([D, sh, N])
        groups = [g for g in groups if g[2]]
        if not groups:
            return RationalFunction._make(field, B, 0, B.zero, B.one, False)
        if len(groups) == 1:
            D, sh, N = groups[0]
        else:
            sh = min(g[1] for g in groups)
            D = groups[0][0]
            N = groups[0][2] * B.xpow(groups[0][1] - sh)
            for Dg, shg, Ng in groups[1:]:
                Ng = Ng * B.xpow(shg - sh)
                g = D.gcd(Dg)
                if g.degree() > 0:
                    N, D = N * (Dg // g) + Ng * (D // g), D * (Dg // g)
                else:
                    N, D = N * Dg + Ng * D, D * Dg
        if not N:
            return RationalFunction._make(field, B, 0, B.zero, B.one, False)
        v, N = _strip_x(B, N)
        return RationalFunction._make(field, B, sh + v, N, D)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.s == o.s and self.N == o.N and self.D == o.D

    def __hash__(self):
        if self._hash is None:
            if self.is_laurent():
                self._hash = hash(self.num)
            else:
                self._hash = hash((self.s, self.B.key(self.N), self.B.key(self.D)))
        return self._hash

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self.is_laurent():
            return str(self.num)
        num = str(self.num)
        if len(self.num.terms) > 1:
            num = f"({num})"
        return f"{num}/({self.den})"


# --------------------------------------------------------------------------
# literal parsing


class ScalarSyntaxError(ValueError):
    def __init__(self, message: str, column: int | None = None):
        self.column = column
        super().__init__(message if column is None else f"{message} (column {column})")


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)(i?)|(x|i)|(\^|\*|/|\+|-|\(|\)))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ScalarSyntaxError(f"unexpected character {text[pos:pos + 1]!r}", pos + 1)
        col = m.start() + len(m.group(0)) - len(m.group(0).lstrip()) + 1
        if m.group(1):
            out.append(("imag" if m.group(2) else "num", m.group(1), col))
        elif m.group(3):
            out.append((m.group(3), m.group(3), col))
        else:
            out.append(("op", m.group(4), col))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _ScalarParser:
    """Recursive descent over ``+ - * / ^ ( )``, numbers, ``i`` and ``x``.

    Values are accumulated as RationalFunction over the target field.
    """

    def __init__(self, text: str, field: Field):
        self.toks = _tokenize(text)
        self.i = 0
        self.field = field

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ScalarSyntaxError(f"expected {value!r}, got {t[1] or 'end of input'!r}", t[2])

    def const(self, c) -> RationalFunction:
        return RationalFunction(LaurentPoly(self.field, {0: c}))

    def parse(self) -> RationalFunction:
        v = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ScalarSyntaxError(f"unexpected {t[1]!r}", t[2])
        return v

    def expr(self):
        t = self.peek()
        neg = False
        if t[1] in ("+", "-") and t[0] == "op":
            self.take()
            neg = t[1] == "-"
        v = self.term()
        if neg:
            v = -v
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in ("*", "/"):
                self.take()
                w = self.power()
                if t[1] == "*":
                    v = v * w
                else:
                    if not w:
                        raise ScalarSyntaxError("division by zero", t[2])
                    v = v / w
            elif t[0] in ("num", "imag", "x", "i") or t[1] == "(":
                # implicit multiplication, e.g. "2x" or "3(1+x)"
                v = v * self.power()
            else:
                return v

    def power(self):
        v = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] in ("-", "+"):
                sign = -1 if self.take()[1] == "-" else 1
            t = self.peek()
            if t[1] == "(":
                self.take()
                if self.peek()[1] in ("-", "+"):
                    sign = -1 if self.take()[1] == "-" else 1
                t = self.take()
                self.expect(")")
            else:
                self.take()
            if t[0] != "num" or "/" in t[1]:
                raise ScalarSyntaxError("exponent must be an integer", t[2])
            e = sign * int(t[1])
            if e < 0 and not v:
                raise ScalarSyntaxError("negative power of zero", t[2])
            v = v**e
        return v

    def atom(self):
        t = self.take()
        kind, val, col = t
        if kind == "num":
            return self.const(self.field(mpq(val)))
        if kind == "imag":
            return self.const(self.field(mpq(val)) * self._i(col))
        if kind == "i":
            return self.const(self._i(col))
        if kind == "x":
            return RationalFunction(LaurentPoly.x(self.field))
        if val == "(":
            v = self.expr()
            self.expect(")")
            return v
        if val == "-":
            return -self.power()
        raise ScalarSyntaxError(f"unexpected {val or 'end of input'!r}", col)

    def _i(self, col):
        try:
            return self.field.imaginary_unit()
        except ScalarSyntaxError:
            raise ScalarSyntaxError(f"'i' is not an element of {self.field.tag}", col) from None


def parse_scalar(text: str, field: Field = QQ) -> RationalFunction:
    """Parse a scalar literal such as ``3/2``, ``1/2+3/4i``, ``3+x+x^-1`` or
    ``1/(1+x)`` into K(x).  Callers lower the result to K or K[x, x^-1]."""
    if not text.strip():
        raise ScalarSyntaxError("empty literal", 1)
    return _ScalarParser(text, field).parse()
