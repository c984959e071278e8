"""Exact arithmetic in cyclotomic fields Q(zeta_N).

A :class:`CycScalar` stores an element of Q(zeta_N) as rational coefficients
on the power basis 1, zeta, ..., zeta^(phi(N)-1).  Every value is kept in a
canonical form: the order N is the smallest one whose field contains the
element, and the coefficients are reduced modulo the N-th cyclotomic
polynomial.  Two scalars are therefore equal iff their (order, coeffs) agree.

Orders that are powers of two take a fast path (reduction by
zeta^(N/2) = -1). Other orders reduce modulo Phi_N, which is computed by
iterated polynomial division and cached.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence, Union

import mpmath

Rational = Union[int, Fraction]


class OrderCapExceeded(ArithmeticError):
    """Raised when a computation needs a cyclotomic order above the cap."""


def _order_cap() -> int | None:
    raw = os.environ.get("KP_SCALAR_ORDER_CAP")
    if not raw:
        return None
    return int(raw)


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _is_two_power(n: int) -> bool:
    return n & (n - 1) == 0


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result = n
    for p in _prime_factors(n):
        result -= result // p
    return result


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    # Exact division of integer polynomials (den monic), low degree first.
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        coef = num[k + len(den) - 1]
        out[k] = coef
        if coef:
            for j, d in enumerate(den):
                num[k + j] -= coef * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact cyclotomic division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _reduce(poly: Sequence[Fraction], n: int) -> list[Fraction]:
    """Reduce a polynomial in zeta_n (any length) to phi(n) coefficients."""
    phi = euler_phi(n)
    if _is_two_power(n):
        if n == 1:
            return [sum(poly, Fraction(0))]
        out = [Fraction(0)] * phi
        for k, c in enumerate(poly):
            if c:
                k %= n
                if k >= phi:
                    out[k - phi] -= c
                else:
                    out[k] += c
        return out
    # fold exponents mod n first, then divide by Phi_n
    folded = [Fraction(0)] * n
    for k, c in enumerate(poly):
        if c:
            folded[k % n] += c
    cyc = cyclotomic_polynomial(n)
    for k in range(n - 1, phi - 1, -1):
        c = folded[k]
        if c:
            base = k - phi
            for j in range(phi):
                if cyc[j]:
                    folded[base + j] -= c * cyc[j]
            folded[k] = Fraction(0)
    return folded[:phi]


@lru_cache(maxsize=None)
def _power_in(k: int, n: int) -> tuple[Fraction, ...]:
    """Coordinates of zeta_n^k on the power basis of Q(zeta_n)."""
    poly = [Fraction(0)] * (k % n + 1)
    poly[k % n] = Fraction(1)
    return tuple(_reduce(poly, n))


def _lift(coeffs: Sequence[Fraction], n: int, target: int) -> list[Fraction]:
    """Rewrite an element of Q(zeta_n) inside Q(zeta_target), n | target."""
    if n == target:
        return list(coeffs)
    step = target // n
    poly = [Fraction(0)] * (step * len(coeffs))
    for k, c in enumerate(coeffs):
        if c:
            poly[k * step] = c
    return _reduce(poly, target)


def _solve_in_subfield(coeffs: Sequence[Fraction], n: int, sub: int):
    """Coordinates over Q(zeta_sub) of an element of Q(zeta_n), or None."""
    phi_sub = euler_phi(sub)
    cols = [_lift(_power_in(j, sub), sub, n) for j in range(phi_sub)]
    rows = len(coeffs)
    aug = [[cols[j][r] for j in range(phi_sub)] + [coeffs[r]] for r in range(rows)]
    pivots = []
    row = 0
    for col in range(phi_sub):
        piv = next((r for r in range(row, rows) if aug[r][col]), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [v * inv for v in aug[row]]
        for r in range(rows):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    if any(aug[r][-1] for r in range(row, rows)):
        return None
    sol = [Fraction(0)] * phi_sub
    for r, col in enumerate(pivots):
        sol[col] = aug[r][-1]
    return sol


def _canonical(order: int, coeffs: list[Fraction]) -> tuple[int, tuple[Fraction, ...]]:
    if not any(coeffs):
        return 1, (Fraction(0),)
    if _is_two_power(order):
        while order > 1:
            if order == 2:
                order, coeffs = 1, [coeffs[0]]
                break
            if any(coeffs[1::2]):
                break
            order //= 2
            coeffs = coeffs[0::2]
        return order, tuple(coeffs)
    shrunk = True
    while shrunk and order > 1:
        shrunk = False
        for p in _prime_factors(order):
            sub = order // p
            sol = _solve_in_subfield(coeffs, order, sub)
            if sol is not None:
                order, coeffs = sub, sol
                shrunk = True
                break
    return order, tuple(coeffs)


def _to_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected a rational number, got {type(x).__name__}")


class CycScalar:
    """An element of a cyclotomic field in canonical minimal-order form."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs: Iterable[Rational]):
        coeffs = [_to_fraction(c) for c in coeffs]
        if order < 1:
            raise ValueError("order must be positive")
        if len(coeffs) != euler_phi(order):
            coeffs = _reduce(coeffs, order)
        cap = _order_cap()
        if cap is not None and order > cap:
            raise OrderCapExceeded(f"cyclotomic order {order} exceeds cap {cap}")
        self.order, self.coeffs = _canonical(order, coeffs)
        self._hash = None

    @classmethod
    def _raw(cls, order: int, coeffs: tuple) -> "CycScalar":
        # trusted constructor for values already in canonical form
        obj = cls.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, x: Rational) -> "CycScalar":
        return cls._raw(1, (_to_fraction(x),))

    # --- coercion -----------------------------------------------------
    @staticmethod
    def coerce(x) -> "CycScalar":
        if isinstance(x, CycScalar):
            return x
        return CycScalar.rational(x)

    def _common(self, other: "CycScalar"):
        n = _lcm(self.order, other.order)
        cap = _order_cap()
        if cap is not None and n > cap:
            raise OrderCapExceeded(f"cyclotomic order {n} exceeds cap {cap}")
        return n, _lift(self.coeffs, self.order, n), _lift(other.coeffs, other.order, n)

    # --- ring operations ---------------------------------------------
    def __add__(self, other):
        try:
            other = CycScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if other.order == 1 and not other.coeffs[0]:
            return self
        if self.order == 1 and not self.coeffs[0]:
            return other
        n, a, b = self._common(other)
        return CycScalar(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycScalar._raw(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        try:
            other = CycScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return CycScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            other = CycScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if other.order == 1:
            c = other.coeffs[0]
            if c == 1:
                return self
            if not c:
                return ZERO
            return CycScalar._raw(self.order, tuple(x * c for x in self.coeffs))
        if self.order == 1:
            return other * self
        n, a, b = self._common(other)
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CycScalar(n, _reduce(prod, n))

    __rmul__ = __mul__

    def galois(self, k: int) -> "CycScalar":
        """Image under the automorphism zeta -> zeta^k, gcd(k, N) = 1."""
        n = self.order
        if gcd(k, n) != 1:
            raise ValueError("Galois exponent must be coprime to the order")
        poly = [Fraction(0)] * n
        for j, c in enumerate(self.coeffs):
            if c:
                poly[(j * k) % n] += c
        return CycScalar(n, _reduce(poly, n))

    def conjugate(self) -> "CycScalar":
        return self if self.order <= 2 else self.galois(-1)

    def norm_to_Q(self) -> Fraction:
        """Field norm from Q(zeta_N) down to Q."""
        prod = self
        for k in range(2, self.order):
            if gcd(k, self.order) == 1:
                prod = prod * self.galois(k)
        if prod.order != 1:
            raise ArithmeticError("norm is not rational")
        return prod.coeffs[0]

    def inverse(self) -> "CycScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        if self.order == 1:
            return CycScalar._raw(1, (1 / self.coeffs[0],))
        # z^{-1} = prod_{k != 1} sigma_k(z) / N(z)
        rest = ONE
        for k in range(2, self.order):
            if gcd(k, self.order) == 1:
                rest = rest * self.galois(k)
        nrm = (self * rest)
        return rest * (1 / nrm.coeffs[0])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * CycScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return CycScalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = ONE
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # --- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return self.order == 1 and not self.coeffs[0]

    def is_rational(self) -> bool:
        return self.order == 1

    def abs2(self) -> "CycScalar":
        """z * conj(z), a totally real element."""
        return self * self.conjugate()

    def is_unit_modulus(self) -> bool:
        return self.abs2() == ONE

    def root_order(self) -> int | None:
        """Multiplicative order if this is a root of unity, else None."""
        if not self.is_unit_modulus():
            return None
        n = self.order if self.order % 2 == 0 else 2 * self.order
        for d in sorted(k for k in range(1, n + 1) if n % k == 0):
            if self ** d == ONE:
                return d
        return None

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.order == 1 and self.coeffs[0] == other
        if not isinstance(other, CycScalar):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.coeffs))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.order == 1:
            return f"CycScalar({self.coeffs[0]})"
        terms = [f"{c}*z{self.order}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "CycScalar(" + " + ".join(terms) + ")"

    # --- embeddings ---------------------------------------------------
    def to_complex(self, precision: int = 53) -> "ComplexBox":
        """Certified box containing the image under zeta_N -> e(1/N)."""
        return _to_complex(self, precision)

    def __complex__(self):
        if self.order == 1:
            return complex(float(self.coeffs[0]))
        import cmath

        z = cmath.exp(2j * cmath.pi / self.order)
        return complex(sum(float(c) * z ** k for k, c in enumerate(self.coeffs)))


class ComplexBox:
    """A rectangle [re_lo, re_hi] x [im_lo, im_hi] with mpmath endpoints."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    @property
    def center(self) -> complex:
        return complex(float(self.re.mid), float(self.im.mid))

    @property
    def radius(self) -> float:
        return float(mpmath.mpf(max(self.re.delta.b, self.im.delta.b))) / 2

    def contains(self, z: complex) -> bool:
        return z.real in self.re and z.imag in self.im

    def __repr__(self):
        return f"ComplexBox(re={self.re}, im={self.im})"


def _to_complex(z: CycScalar, precision: int) -> ComplexBox:
    iv = mpmath.iv
    work = precision + 20 + z.order.bit_length()
    saved = iv.prec
    try:
        while True:
            iv.prec = work
            re = iv.mpf(0)
            im = iv.mpf(0)
            tau = 2 * iv.pi / z.order
            for k, c in enumerate(z.coeffs):
                if c:
                    cc = iv.mpf(c.numerator) / c.denominator
                    re += cc * iv.cos(tau * k)
                    im += cc * iv.sin(tau * k)
            if max(re.delta, im.delta) <= mpmath.mpf(2) ** (-precision):
                return ComplexBox(re, im)
            work += 32
    finally:
        iv.prec = saved


ZERO = CycScalar._raw(1, (Fraction(0),))
ONE = CycScalar._raw(1, (Fraction(1),))


def root_of_unity(num: int, den: int) -> CycScalar:
    """e(num/den) as an exact cyclotomic scalar."""
    if den < 1:
        raise ValueError("den must be positive")
    g = gcd(num, den)
    num, den = (num // g) % (den // g), den // g
    if den == 1:
        return ONE
    return CycScalar(den, _power_in(num, den))


def conjugate(z: CycScalar) -> CycScalar:
    return z.conjugate()


def to_complex(z: CycScalar, precision: int = 53) -> ComplexBox:
    return z.to_complex(precision)


def is_unit_modulus(z: CycScalar) -> bool:
    return z.is_unit_modulus()


SQRT2 = root_of_unity(1, 8) + root_of_unity(-1, 8)
INV_SQRT2 = SQRT2 * Fraction(1, 2)


def sqrt2_power(t: int) -> CycScalar:
    """Exact 2^(t/2)."""
    whole = Fraction(2) ** (t // 2)
    return SQRT2 * whole if t % 2 else CycScalar.rational(whole)
