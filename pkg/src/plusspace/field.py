"""Exact arithmetic in Q and in quadratic fields Q(sqrt d).

Elements carry rational coordinates over the integral basis (1, omega) with
omega = (1 + sqrt d)/2 when d = 1 mod 4 and omega = sqrt d otherwise.  The
public base fields are Q and real quadratic fields; the same machinery is
reused internally for the 2-adic fields Q_2(sqrt 2) and Q_2(sqrt -3).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import isqrt

from .cyclotomic import CycScalar, root_of_unity


def _squarefree(d: int) -> bool:
    d = abs(d)
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Q (``d is None``) or Q(sqrt d) with its fixed integral basis."""

    kind: str
    d: int | None = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.d is not None:
                raise ValueError("rational field takes no d")
        elif self.kind in ("real_quadratic", "quadratic"):
            if self.d is None or not _squarefree(self.d):
                raise ValueError(f"d must be a squarefree integer, got {self.d}")
            if self.kind == "real_quadratic" and self.d < 2:
                raise ValueError("real quadratic field needs d >= 2")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def degree(self) -> int:
        return 1 if self.d is None else 2

    @property
    def is_real(self) -> bool:
        return self.d is None or self.d > 0

    @cached_property
    def omega_trace(self) -> Fraction:
        # omega^2 = t*omega + n0
        return Fraction(1) if self.d % 4 == 1 else Fraction(0)

    @cached_property
    def omega_sq_const(self) -> Fraction:
        return Fraction(self.d - 1, 4) if self.d % 4 == 1 else Fraction(self.d)

    # --- element constructors ----------------------------------------
    def element(self, *coords) -> "FieldElement":
        return FieldElement(self, tuple(Fraction(c) for c in coords))

    def __call__(self, x) -> "FieldElement":
        return self.coerce(x)

    def coerce(self, x) -> "FieldElement":
        if isinstance(x, FieldElement):
            if x.field != self:
                raise ValueError("element belongs to a different field")
            return x
        if isinstance(x, (int, Fraction)):
            return FieldElement(self, (Fraction(x),) + (Fraction(0),) * (self.degree - 1))
        if isinstance(x, (tuple, list)):
            if len(x) != self.degree:
                raise ValueError(f"expected {self.degree} coordinates, got {len(x)}")
            return FieldElement(self, tuple(Fraction(c) for c in x))
        if isinstance(x, str):
            return self.coerce(Fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} into the field")

    @property
    def zero(self) -> "FieldElement":
        return self.coerce(0)

    @property
    def one(self) -> "FieldElement":
        return self.coerce(1)

    @property
    def integral_basis(self) -> tuple["FieldElement", ...]:
        if self.d is None:
            return (self.one,)
        return (self.one, self.element(0, 1))

    @property
    def omega(self) -> "FieldElement":
        return self.integral_basis[-1]

    def sqrt_d(self) -> "FieldElement":
        if self.d % 4 == 1:
            return self.element(-1, 2)
        return self.element(0, 1)

    @property
    def different_gen(self) -> "FieldElement":
        if self.d is None:
            return self.one
        if self.d % 4 == 1:
            return self.sqrt_d()
        return self.sqrt_d() * 2

    def residues_mod2(self) -> list["FieldElement"]:
        """Canonical representatives of o/2o: {0,1}-coordinates."""
        if self.d is None:
            return [self.coerce(0), self.coerce(1)]
        return [self.element(a, b) for b in (0, 1) for a in (0, 1)]

    def trace_gram(self) -> list[list[Fraction]]:
        basis = self.integral_basis
        return [[(x * y).trace() for y in basis] for x in basis]

    def units_sample(self) -> list["FieldElement"]:
        """A few units: +-1 and, for Q(sqrt d), the fundamental unit when small."""
        out = [self.one, -self.one]
        if self.d is not None and self.d > 0:
            u = fundamental_unit(self)
            if u is not None:
                out += [u, -u]
        return out

    def to_json(self):
        if self.d is None:
            return {"kind": "rational"}
        return {"kind": self.kind, "d": self.d}

    def __repr__(self):
        return "Q" if self.d is None else f"Q(sqrt{self.d})"


RATIONAL = FieldSpec("rational")


@lru_cache(maxsize=None)
def real_quadratic(d: int) -> FieldSpec:
    return FieldSpec("real_quadratic", d)


@lru_cache(maxsize=None)
def quadratic(d: int) -> FieldSpec:
    """Any quadratic field; used internally for the 2-adic extensions."""
    return FieldSpec("quadratic", d)


def make_field(d: int | None = None) -> FieldSpec:
    return RATIONAL if d is None else real_quadratic(d)


class FieldElement:
    """x = sum coords[j] * basis[j], exact."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field: FieldSpec, coords: tuple):
        self.field = field
        self.coords = coords
        self._hash = None

    def _wrap(self, coords):
        return FieldElement(self.field, coords)

    def _other(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other
        return self.field.coerce(other)

    def __add__(self, other):
        try:
            other = self._other(other)
        except TypeError:
            return NotImplemented
        return self._wrap(tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(tuple(-a for a in self.coords))

    def __sub__(self, other):
        try:
            other = self._other(other)
        except TypeError:
            return NotImplemented
        return self._wrap(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._wrap(tuple(a * other for a in self.coords))
        try:
            other = self._other(other)
        except TypeError:
            return NotImplemented
        if self.field.d is None:
            return self._wrap((self.coords[0] * other.coords[0],))
        a, b = self.coords
        c, e = other.coords
        t, n0 = self.field.omega_trace, self.field.omega_sq_const
        bd = b * e
        return self._wrap((a * c + bd * n0, a * e + b * c + bd * t))

    __rmul__ = __mul__

    def conjugate(self) -> "FieldElement":
        """The nontrivial Galois conjugate (identity on Q)."""
        if self.field.d is None:
            return self
        a, b = self.coords
        return self._wrap((a + b * self.field.omega_trace, -b))

    def trace(self) -> Fraction:
        if self.field.d is None:
            return self.coords[0]
        a, b = self.coords
        return 2 * a + b * self.field.omega_trace

    def norm(self) -> Fraction:
        if self.field.d is None:
            return self.coords[0]
        a, b = self.coords
        return a * a + a * b * self.field.omega_trace - b * b * self.field.omega_sq_const

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero field element")
        if self.field.d is None:
            return self._wrap((1 / n,))
        return self.conjugate() * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._other(other).inverse()

    def __rtruediv__(self, other):
        return self._other(other) * self.inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = self.field.one
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def is_rational(self) -> bool:
        return all(not c for c in self.coords[1:])

    def rational_part(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    def pq(self) -> tuple[Fraction, Fraction]:
        """(p, q) with x = p + q sqrt d."""
        if self.field.d is None:
            return self.coords[0], Fraction(0)
        a, b = self.coords
        if self.field.d % 4 == 1:
            return a + b / 2, b / 2
        return a, b

    def sign(self, i: int = 1) -> int:
        """Exact sign of the i-th real embedding (sqrt d -> +-sqrt d)."""
        if not self.field.is_real:
            raise ValueError("sign needs a real field")
        p, q = self.pq()
        if i == 2:
            q = -q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return (q > 0) - (q < 0)
        if (p > 0) == (q > 0):
            return 1 if p > 0 else -1
        # opposite signs: compare p^2 with q^2 d
        lhs, rhs = p * p, q * q * self.field.d
        big = p if lhs > rhs else q
        return 1 if big > 0 else -1

    def embed_float(self, i: int = 1) -> float:
        p, q = self.pq()
        if self.field.d is None:
            return float(p)
        r = self.field.d ** 0.5
        return float(p) + (float(q) * r if i == 1 else -float(q) * r)

    def embeddings(self) -> tuple[float, ...]:
        return tuple(self.embed_float(i) for i in range(1, self.field.degree + 1))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.coerce(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.d, self.coords))
        return self._hash

    def sort_key(self):
        return self.coords

    def __repr__(self):
        if self.field.d is None:
            return str(self.coords[0])
        return f"({self.coords[0]} + {self.coords[1]}w)"


# ---------------------------------------------------------------------
# public operations


def trace_to_Q(x: FieldElement) -> Fraction:
    return x.trace()


def is_totally_positive(x: FieldElement, strict: bool = True) -> bool:
    signs = [x.sign(i) for i in range(1, x.field.degree + 1)]
    if strict:
        return all(s > 0 for s in signs)
    return all(s >= 0 for s in signs)


def sqrt_interval(d: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt d <= hi with hi - lo = 2^-bits."""
    s = isqrt(d << (2 * bits))
    return Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)


def embed_real(x: FieldElement, i: int, precision: int = 53) -> tuple[Fraction, Fraction]:
    """Certified rational interval of width <= 2^-precision around iota_i(x)."""
    n = x.field.degree
    if not 1 <= i <= n:
        raise ValueError(f"embedding index must be in 1..{n}")
    p, q = x.pq()
    if q == 0:
        return p, p
    if i == 2:
        q = -q
    # |q| * 2^-bits <= 2^-precision
    extra = max(0, abs(q).numerator.bit_length() - abs(q).denominator.bit_length() + 1)
    lo, hi = sqrt_interval(x.field.d, precision + extra)
    a, b = p + q * lo, p + q * hi
    return (a, b) if a <= b else (b, a)


def additive_character_finite(x: FieldElement) -> CycScalar:
    """psi_{1,f}(x) = e(-Tr(x) mod 1)."""
    t = x.trace()
    return root_of_unity(-t.numerator, t.denominator)


def different_certificate(field: FieldSpec) -> bool:
    """Check that delta * (trace dual of o) = o, exactly."""
    gram = field.trace_gram()
    delta = field.different_gen
    n = field.degree
    if n == 1:
        det = gram[0][0]
    else:
        det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]
    if abs(det) != abs(delta.norm()):
        return False
    # dual basis: coefficients of G^{-1}
    if n == 1:
        dual = [field.coerce(1 / gram[0][0])]
    else:
        inv = [[gram[1][1] / det, -gram[0][1] / det], [-gram[1][0] / det, gram[0][0] / det]]
        basis = field.integral_basis
        dual = [basis[0] * inv[j][0] + basis[1] * inv[j][1] for j in range(2)]
    scaled = [delta * y for y in dual]
    if not all(s.is_integral() for s in scaled):
        return False
    if n == 1:
        return abs(scaled[0].coords[0]) == 1
    m = [s.coords for s in scaled]
    return abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]) == 1


def fundamental_unit(field: FieldSpec, search: int = 200) -> FieldElement | None:
    """Smallest unit > 1 found by a short search over a + b omega."""
    best = None
    for b in range(1, search):
        for a in range(-search, search):
            x = field.element(a, b)
            if abs(x.norm()) == 1 and x.sign(1) > 0 and x.embed_float(1) > 1:
                if best is None or x.embed_float(1) < best.embed_float(1):
                    best = x
        if best is not None:
            return best
    return best


def in_ideal_2o(x: FieldElement) -> bool:
    return all(c.denominator == 1 and c.numerator % 2 == 0 for c in x.coords)


def in_ideal_4o(x: FieldElement) -> bool:
    return all(c.denominator == 1 and c.numerator % 4 == 0 for c in x.coords)


def in_ideal(x: FieldElement, gen: FieldElement) -> bool:
    """x in gen * o."""
    if gen.is_zero():
        return x.is_zero()
    return (x / gen).is_integral()


def lattice_coords(x: FieldElement) -> tuple[int, ...]:
    if not x.is_integral():
        raise ValueError("element is not integral")
    return tuple(int(c) for c in x.coords)


def mod2_residue(x: FieldElement) -> FieldElement:
    """Canonical representative of x mod 2o (x integral)."""
    if not x.is_integral():
        raise ValueError("element is not integral")
    return x.field.coerce(tuple(c.numerator % 2 for c in x.coords))
