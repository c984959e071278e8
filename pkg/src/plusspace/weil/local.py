"""2-adic local fields: Q_2, its unramified quadratic extension and Q_2(sqrt 2).

Elements are exact elements of a global model (Q, Q(sqrt -3), Q(sqrt 2)),
dense in the completion, so all residue computations are exact.  The additive
character is psi(x) = e(-s * {Tr(x)}_2) where {.}_2 is the 2-adic fractional
part and s is the local sign (default -1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from ..cyclotomic import ONE, CycScalar, root_of_unity, sqrt2_power
from ..field import RATIONAL, FieldElement, FieldSpec, quadratic

INF = float("inf")


class NoStabilization(ArithmeticError):
    pass


def v2(x: Fraction) -> float:
    """2-adic valuation of a rational, inf for 0."""
    x = Fraction(x)
    if not x:
        return INF
    num, den = x.numerator, x.denominator
    v = 0
    while num % 2 == 0:
        num //= 2
        v += 1
    while den % 2 == 0:
        den //= 2
        v -= 1
    return v


def frac2(x: Fraction) -> Fraction:
    """2-adic fractional part: the r in Z[1/2] cap [0,1) with x - r in Z_(2)."""
    x = Fraction(x)
    den = x.denominator
    k = 0
    while den % 2 == 0:
        den //= 2
        k += 1
    if k == 0:
        return Fraction(0)
    mod = 1 << k
    num = (x.numerator * pow(den, -1, mod)) % mod
    return Fraction(num, mod)


def _mod_int(x: Fraction, mod: int) -> int:
    """x mod `mod` for x in Z_(2), mod a power of two."""
    if mod == 1:
        return 0
    if x.denominator % 2 == 0:
        raise ValueError("element is not 2-integral")
    return (x.numerator * pow(x.denominator, -1, mod)) % mod


_SPECS = {
    # name: (global model d, q, e, c)
    "q2": (None, 2, 1, 0),
    "q4": (-3, 4, 1, 0),
    "q2sqrt2": (2, 2, 2, 3),
}


@dataclass(frozen=True)
class LocalField:
    """A supported 2-adic field with its character, delta and uniformizer."""

    name: str
    sign: int = -1

    def __post_init__(self):
        if self.name not in _SPECS:
            raise ValueError(f"unsupported local field {self.name!r}; use q2, q4 or q2sqrt2")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @cached_property
    def K(self) -> FieldSpec:
        d = _SPECS[self.name][0]
        return RATIONAL if d is None else quadratic(d)

    @property
    def q(self) -> int:
        return _SPECS[self.name][1]

    @property
    def e(self) -> int:
        return _SPECS[self.name][2]

    @property
    def c(self) -> int:
        """Index of psi: largest c with psi(p^-c) = 1."""
        return _SPECS[self.name][3]

    @property
    def degree(self) -> int:
        return self.K.degree

    @cached_property
    def varpi(self) -> FieldElement:
        return self.K.element(0, 1) if self.name == "q2sqrt2" else self.K.coerce(2)

    @cached_property
    def delta(self) -> FieldElement:
        """Fixed element of valuation c."""
        return self.K.element(0, 2) if self.name == "q2sqrt2" else self.K.one

    def __call__(self, x) -> FieldElement:
        return self.K.coerce(x)

    def varpi_pow(self, k: int) -> FieldElement:
        return _varpi_pow(self, k)

    # --- valuation and residues ----------------------------------------
    def val(self, x: FieldElement) -> float:
        if self.name == "q2":
            return v2(x.coords[0])
        a, b = x.coords
        if self.name == "q4":
            return min(v2(a), v2(b))
        return min(2 * v2(a), 2 * v2(b) + 1)

    def val_min(self, entries) -> float:
        return min((self.val(x) for x in entries), default=INF)

    def absval(self, x: FieldElement) -> Fraction:
        v = self.val(x)
        if v == INF:
            return Fraction(0)
        return Fraction(self.q) ** (-int(v))

    def sqrt_abs(self, x: FieldElement) -> CycScalar:
        """|x|^(1/2) as an exact scalar."""
        return self.q_half_power(-int(self.val(x)))

    def q_half_power(self, t: int) -> CycScalar:
        """q^(t/2)."""
        if self.q == 4:
            return CycScalar.rational(Fraction(2) ** t)
        return sqrt2_power(t)

    def is_integral(self, x: FieldElement) -> bool:
        return self.val(x) >= 0

    def residue_shape(self, n: int) -> tuple[int, ...]:
        """Moduli of the coordinates of o / p^n."""
        if n < 0:
            raise ValueError("negative residue level")
        if self.name == "q2":
            return (1 << n,)
        if self.name == "q4":
            return (1 << n, 1 << n)
        return (1 << ((n + 1) // 2), 1 << (n // 2))

    def residue_count(self, n: int) -> int:
        return self.q ** n

    def residue_index(self, x: FieldElement, n: int) -> int:
        """Index of an integral x in o / p^n (mixed radix over the coordinates)."""
        shape = self.residue_shape(n)
        idx = 0
        mult = 1
        for coord, mod in zip(x.coords, shape):
            idx += _mod_int(coord, mod) * mult
            mult *= mod
        return idx

    def residue_rep(self, idx: int, n: int) -> FieldElement:
        return _residue_reps(self, n)[idx]

    def residues(self, n: int) -> tuple[FieldElement, ...]:
        return _residue_reps(self, n)

    def units(self, n: int) -> list[FieldElement]:
        """Representatives of (o / p^n)^x."""
        return [x for x in self.residues(n) if self.val(x) == 0] if n > 0 else [self.K.one]

    # --- character ----------------------------------------------------
    def trace(self, x: FieldElement) -> Fraction:
        return x.trace()

    def psi(self, x: FieldElement) -> CycScalar:
        return _psi(self, x)

    def to_json(self):
        return {"local": self.name, "sign": self.sign}

    def __repr__(self):
        return f"LocalField({self.name}, s={self.sign})"


@lru_cache(maxsize=None)
def _varpi_pow(F: LocalField, k: int) -> FieldElement:
    return F.varpi ** k


@lru_cache(maxsize=None)
def _residue_reps(F: LocalField, n: int) -> tuple[FieldElement, ...]:
    shape = F.residue_shape(n)
    out = []
    # index = c0 + shape0 * c1, matching residue_index
    for combo in itertools.product(*(range(s) for s in reversed(shape))):
        coords = tuple(reversed(combo))
        out.append(F.K.coerce(coords) if F.degree == 2 else F.K.coerce(coords[0]))
    return tuple(out)


@lru_cache(maxsize=200000)
def _psi(F: LocalField, x: FieldElement) -> CycScalar:
    r = frac2(F.trace(x))
    if not r:
        return ONE
    return root_of_unity(-F.sign * r.numerator, r.denominator)


# ---------------------------------------------------------------------
# Weil index


@lru_cache(maxsize=None)
def _gauss_integral(F: LocalField, a: FieldElement, k: int) -> CycScalar:
    """int_{p^-k} psi(a x^2) dx as a finite sum."""
    va = int(F.val(a))
    c, e = F.c, F.e
    # psi(a(x+y)^2) = psi(a x^2) for y in p^kp
    kp = -k
    while 2 * kp + va < -c or kp + e + va - k < -c:
        kp += 1
    n = k + kp
    lead = F.varpi_pow(-k)
    total = CycScalar.rational(0)
    counts: dict = {}
    for r in F.residues(n):
        x = lead * r
        val = F.psi(a * x * x)
        counts[val] = counts.get(val, 0) + 1
    for val, cnt in counts.items():
        total = total + val * cnt
    # dx normalisation: each cell has volume q^-kp
    return total * Fraction(1, F.q ** kp) if kp >= 0 else total * (F.q ** (-kp))


def weil_index_level(F: LocalField, a: FieldElement, k: int) -> CycScalar:
    """|2 a delta|^(1/2) int_{p^-k} psi(a x^2) dx."""
    scale = F.sqrt_abs(a * 2 * F.delta)
    return scale * _gauss_integral(F, a, k)


@lru_cache(maxsize=None)
def weil_index(F: LocalField, a: FieldElement, cap: int = 40) -> CycScalar:
    """alpha_psi(a), stabilized over consecutive truncation levels."""
    if a.is_zero():
        raise ValueError("Weil index of 0")
    va = int(F.val(a))
    k = max(0, -(-(F.c + 2 * F.e + va) // 2))
    prev = weil_index_level(F, a, k)
    while k < cap:
        k += 1
        cur = weil_index_level(F, a, k)
        if cur == prev and cur.is_unit_modulus():
            return cur
        prev = cur
    raise NoStabilization(f"Weil index of {a} did not stabilize by level {cap}")


def weil_index_certificate(F: LocalField, a: FieldElement) -> dict:
    """The stabilized value together with the two agreeing levels."""
    val = weil_index(F, a)
    va = int(F.val(a))
    k = max(0, -(-(F.c + 2 * F.e + va) // 2))
    return {
        "value": val,
        "level": k,
        "agrees_next": weil_index_level(F, a, k) == weil_index_level(F, a, k + 1) == val,
        "eighth_root": val ** 8 == ONE,
    }


ARCHIMEDEAN_WEIL = {1: root_of_unity(1, 8), -1: root_of_unity(-1, 8)}


def archimedean_weil_index(a_sign: int, char_sign: int = 1) -> CycScalar:
    """alpha for R with psi(x) = e(char_sign x): exp(+-pi i/4)."""
    return ARCHIMEDEAN_WEIL[1 if a_sign * char_sign > 0 else -1]


# ---------------------------------------------------------------------
# square classes


@lru_cache(maxsize=None)
def unit_square_classes(F: LocalField) -> tuple[FieldElement, ...]:
    """Representatives of o^x / (o^x)^2, via units mod p^(2e+1) (Hensel)."""
    n = 2 * F.e + 1
    units = F.units(n)
    squares = {F.residue_index(u * u, n) for u in units}
    classes = []
    covered: set = set()
    for u in units:
        iu = F.residue_index(u, n)
        if iu in covered:
            continue
        classes.append(u)
        for s in squares:
            covered.add(F.residue_index(u * F.residue_rep(s, n), n))
    return tuple(classes)


def square_class_transversal(F: LocalField) -> tuple[FieldElement, ...]:
    """Representatives of F^x / (F^x)^2."""
    units = unit_square_classes(F)
    return tuple(units) + tuple(u * F.varpi for u in units)


def unit_transversal(F: LocalField) -> tuple[FieldElement, ...]:
    """Units modulo p^(2e+1): enough to realize every m(A) operator on S^(i)."""
    return tuple(F.units(2 * F.e + 1))
