"""Truncated Fourier expansions and the coefficient-level correspondence maps.

Four containers are used:

* :class:`FourierExpansion`: a finite map from symmetric matrices T to
  scalars, representing sum c(T) e(Tr tr(T z)).  Keys may be arbitrary
  symmetric matrices (needed for quarter exponents and for transformed
  expansions).
* :class:`PlusExpansion`: half-integral, totally PSD keys, with a weight and
  a unit ``eta`` obeying the norm condition N(eta)^m = (-1)^(m * sum k).
* :class:`JacobiExpansion`: a finite map on invariant pairs (T, lambda) with
  T = 4N - r r^t and lambda = r mod 2.  The raw coefficient f(N, r) of an
  index-one Jacobi form only depends on this pair, so storing it there makes
  the elliptic shift invariance structural.
* :class:`SplitFamily`: the components h_lambda, lambda in (o/2o)^m.

Truncation is always by Tr_{F/Q}(tr T) <= trace_bound; coefficients beyond
the bound are never invented.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import floor, isqrt
from typing import Iterable, Mapping, Sequence

from .cyclotomic import ZERO, CycScalar, sqrt2_power
from .field import (
    FieldElement,
    FieldSpec,
    additive_character_finite,
    embed_real,
    mod2_residue,
)
from .symmat import (
    HalfIntMatrix,
    NotHalfIntegral,
    SymMatrix,
    congruence,
    det,
    in_4L_dual,
    is_totally_psd,
    mat_inverse,
    outer,
    plus_support_witness,
    residue_vectors,
)


class NotPlusSupported(ValueError):
    def __init__(self, T):
        super().__init__(f"coefficient at T={T} violates the plus-space congruence")
        self.T = T


class DuplicateWitness(ValueError):
    def __init__(self, T, lams):
        super().__init__(f"T={T} occurs with several residues {lams}")
        self.T = T
        self.lams = lams


class UnsupportedDeterminant(ValueError):
    pass


class InvalidExpansion(ValueError):
    pass


class TruncationError(LookupError):
    pass


def _scalar(c) -> CycScalar:
    return CycScalar.coerce(c)


def _clean(items: Iterable) -> dict:
    out = {}
    for key, c in items:
        c = _scalar(c)
        if not c.is_zero():
            out[key] = c
    return out


def _norm_condition(field: FieldSpec, eta: FieldElement, m: int, weight: Sequence[int]) -> bool:
    return eta.norm() ** m == (-1) ** (m * sum(weight))


class FourierExpansion:
    """sum_T c(T) e(Tr tr(T z)), truncated at Tr tr T <= trace_bound."""

    kind = "fourier"

    def __init__(self, field: FieldSpec, m: int, weight: Sequence[int], coeffs: Mapping,
                 trace_bound, eta=-1):
        self.field = field
        self.m = m
        self.weight = tuple(int(k) for k in weight)
        self.eta = field.coerce(eta)
        self.trace_bound = Fraction(trace_bound)
        if len(self.weight) != field.degree:
            raise InvalidExpansion(f"weight needs {field.degree} components")
        data = _clean(coeffs.items())
        for key in data:
            self._check_key(key)
        self.coeffs = dict(sorted(data.items(), key=lambda kv: kv[0].sort_key()))

    def _check_key(self, key):
        if not isinstance(key, SymMatrix) or key.m != self.m or key.field != self.field:
            raise InvalidExpansion(f"bad key {key!r}")
        if key.total_trace() > self.trace_bound:
            raise InvalidExpansion(f"key {key} lies beyond the trace bound")

    def coefficient(self, T) -> CycScalar:
        if T.total_trace() > self.trace_bound:
            raise TruncationError(f"T={T} is beyond the trace bound {self.trace_bound}")
        return self.coeffs.get(T, ZERO)

    def keys(self):
        return list(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def _meta(self):
        return (type(self), self.field, self.m, self.weight, self.eta, self.trace_bound)

    def __eq__(self, other):
        if not isinstance(other, FourierExpansion):
            return NotImplemented
        return self._meta() == other._meta() and self.coeffs == other.coeffs

    def __repr__(self):
        return f"{type(self).__name__}(m={self.m}, weight={self.weight}, terms={len(self.coeffs)})"


class PlusExpansion(FourierExpansion):
    """A truncated half-integral weight form: keys in L_m*, totally PSD."""

    kind = "plus"

    def __init__(self, field, m, weight, coeffs, trace_bound, eta=-1):
        super().__init__(field, m, weight, coeffs, trace_bound, eta)
        if any(k < 1 for k in self.weight):
            raise InvalidExpansion("weights must be positive")
        if abs(self.eta.norm()) != 1 or not self.eta.is_integral():
            raise InvalidExpansion("eta must be a unit")
        if not _norm_condition(field, self.eta, m, self.weight):
            raise InvalidExpansion("eta violates N(eta)^m = (-1)^(m * sum k)")

    def _check_key(self, key):
        super()._check_key(key)
        if not isinstance(key, HalfIntMatrix):
            raise InvalidExpansion(f"key {key} is not half-integral")
        if not is_totally_psd(key):
            raise InvalidExpansion(f"key {key} is not totally positive semidefinite")


def _lam_key(lam) -> tuple:
    return tuple(x.coords for x in lam)


class JacobiExpansion:
    """Index-one Jacobi coefficients on invariant keys (T, lambda)."""

    kind = "jacobi"

    def __init__(self, field: FieldSpec, m: int, weight: Sequence[int], coeffs: Mapping,
                 trace_bound, eta=-1, check: bool = True):
        self.field = field
        self.m = m
        self.weight = tuple(int(k) for k in weight)
        self.eta = field.coerce(eta)
        self.trace_bound = Fraction(trace_bound)
        data = _clean(((T, tuple(lam)), c) for (T, lam), c in coeffs.items())
        if check:
            for T, lam in data:
                _check_jacobi_key(field, m, T, lam, self.trace_bound)
        self.coeffs = dict(sorted(data.items(), key=lambda kv: (kv[0][0].sort_key(), _lam_key(kv[0][1]))))

    def __len__(self):
        return len(self.coeffs)

    def _meta(self):
        return (self.field, self.m, self.weight, self.eta, self.trace_bound)

    def __eq__(self, other):
        if not isinstance(other, JacobiExpansion):
            return NotImplemented
        return self._meta() == other._meta() and self.coeffs == other.coeffs

    def __repr__(self):
        return f"JacobiExpansion(m={self.m}, weight={self.weight}, terms={len(self.coeffs)})"


def _check_jacobi_key(field, m, T, lam, bound):
    if not isinstance(T, HalfIntMatrix) or T.m != m:
        raise InvalidExpansion(f"Jacobi key {T} is not an m x m half-integral matrix")
    if len(lam) != m or any(mod2_residue(x) != x for x in lam):
        raise InvalidExpansion(f"residue vector {lam} is not canonical")
    if not is_totally_psd(T):
        raise InvalidExpansion(f"Jacobi key {T} is not totally PSD")
    if not in_4L_dual(T + SymMatrix(field, outer(lam))):
        raise InvalidExpansion(f"key ({T}, {lam}) violates T = -lambda lambda^t mod 4L*")
    if T.total_trace() > bound:
        raise InvalidExpansion(f"key {T} lies beyond the trace bound")


class SplitFamily:
    """Components h_lambda(z) = sum c(T) q^(T/4) indexed by residue vectors."""

    kind = "family"

    def __init__(self, field: FieldSpec, m: int, weight: Sequence[int], components: Mapping,
                 trace_bound, eta=-1):
        self.field = field
        self.m = m
        self.weight = tuple(int(k) for k in weight)
        self.eta = field.coerce(eta)
        self.trace_bound = Fraction(trace_bound)
        comps = {}
        for lam in residue_vectors(field, m):
            comps[lam] = {}
        for lam, coeffs in components.items():
            lam = tuple(field.coerce(x) for x in lam)
            if lam not in comps:
                raise InvalidExpansion(f"{lam} is not a canonical residue vector")
            data = _clean(coeffs.items())
            for T in data:
                if not isinstance(T, HalfIntMatrix):
                    raise InvalidExpansion(f"component key {T} is not half-integral")
                defect = T.scale(self.eta.inverse()) - SymMatrix(field, outer(lam))
                if not in_4L_dual(defect):
                    raise InvalidExpansion(f"key {T} does not belong to component {lam}")
                if T.total_trace() > self.trace_bound:
                    raise InvalidExpansion(f"key {T} lies beyond the trace bound")
            comps[lam] = dict(sorted(data.items(), key=lambda kv: kv[0].sort_key()))
        self.components = comps

    def component(self, lam) -> dict:
        return self.components[tuple(lam)]

    def component_expansion(self, lam) -> FourierExpansion:
        """h_lambda as an expansion with the quarter exponents T/4."""
        coeffs = {T.scale(Fraction(1, 4)): c for T, c in self.component(lam).items()}
        return FourierExpansion(self.field, self.m, self.weight, coeffs, self.trace_bound / 4, self.eta)

    def is_empty(self) -> bool:
        return not any(self.components.values())

    def __eq__(self, other):
        if not isinstance(other, SplitFamily):
            return NotImplemented
        return (self.field, self.m, self.weight, self.eta, self.trace_bound, self.components) == (
            other.field, other.m, other.weight, other.eta, other.trace_bound, other.components)


# ---------------------------------------------------------------------
# key normalisation


def _vector(field, r) -> tuple[FieldElement, ...]:
    return tuple(field.coerce(x) for x in r)


def normalize_jacobi_key(N: SymMatrix, r: Sequence) -> tuple[HalfIntMatrix, tuple]:
    """(N, r) -> (T, lambda) with T = 4N - r r^t and lambda = r mod 2."""
    field = N.field
    if not N.is_half_integral():
        raise NotHalfIntegral(f"N={N} is not half-integral")
    r = _vector(field, r)
    if len(r) != N.m or not all(x.is_integral() for x in r):
        raise ValueError("r must be an integral vector of length m")
    T = HalfIntMatrix(field, (N.scale(4) - SymMatrix(field, outer(r))).rows)
    return T, tuple(mod2_residue(x) for x in r)


def denormalize_jacobi_key(T: SymMatrix, lam: Sequence) -> tuple[HalfIntMatrix, tuple]:
    """Inverse of normalize_jacobi_key with r the canonical lift of lambda."""
    field = T.field
    lam = _vector(field, lam)
    N = (T + SymMatrix(field, outer(lam))).scale(Fraction(1, 4))
    if not N.is_half_integral():
        raise NotHalfIntegral(f"T={T} is not congruent to -lambda lambda^t mod 4L*")
    return HalfIntMatrix(field, N.rows), lam


# ---------------------------------------------------------------------
# the correspondence


def split_plus(h: PlusExpansion) -> SplitFamily:
    comps: dict = {lam: {} for lam in residue_vectors(h.field, h.m)}
    for T, c in h.coeffs.items():
        lam = plus_support_witness(T, h.eta)
        if lam is None:
            raise NotPlusSupported(T)
        comps[lam][T] = c
    return SplitFamily(h.field, h.m, h.weight, comps, h.trace_bound, h.eta)


def reassemble(family: SplitFamily) -> PlusExpansion:
    """h(z) = sum_lambda h_lambda(4z)."""
    coeffs = {}
    for comp in family.components.values():
        coeffs.update(comp)
    return PlusExpansion(family.field, family.m, family.weight, coeffs, family.trace_bound, family.eta)


def _require_minus_one(eta: FieldElement):
    if eta != -1:
        raise ValueError("the Jacobi correspondence is implemented for eta = -1")


def jacobi_of_plus(h: PlusExpansion) -> JacobiExpansion:
    """f(T, lambda) := c(T) with lambda the plus witness of T."""
    _require_minus_one(h.eta)
    coeffs = {}
    for T, c in h.coeffs.items():
        lam = plus_support_witness(T, h.eta)
        if lam is None:
            raise NotPlusSupported(T)
        coeffs[(T, lam)] = c
    weight = tuple(k + 1 for k in h.weight)
    return JacobiExpansion(h.field, h.m, weight, coeffs, h.trace_bound, h.eta)


def plus_of_jacobi(G: JacobiExpansion) -> PlusExpansion:
    """c(T) := f(T, lambda(T)); refuses keys sharing T with different lambda."""
    _require_minus_one(G.eta)
    coeffs: dict = {}
    seen: dict = {}
    for (T, lam), c in G.coeffs.items():
        if T in seen:
            raise DuplicateWitness(T, [seen[T], lam])
        seen[T] = lam
        coeffs[T] = c
    weight = tuple(k - 1 for k in G.weight)
    return PlusExpansion(G.field, G.m, weight, coeffs, G.trace_bound, G.eta)


# ---------------------------------------------------------------------
# theta series


class ThetaMonomial:
    """One term e(Tr(x^t z x + 2 x^t w)) of theta_lambda, x = p + lambda/2."""

    __slots__ = ("p", "x", "r", "exponent")

    def __init__(self, p, x, r, exponent):
        self.p = p
        self.x = x
        self.r = r
        self.exponent = exponent

    def __repr__(self):
        return f"ThetaMonomial(p={self.p}, exponent={self.exponent}, r={self.r})"


def _coordinate_values(field: FieldSpec, shift: FieldElement, bound: Fraction) -> list[FieldElement]:
    """x in shift + o with Tr(x^2) <= bound (x^2 is totally nonnegative)."""
    out = []
    if field.d is None:
        s = shift.coords[0]
        lim = isqrt(floor(bound)) + 2
        for a in range(-lim - 1, lim + 1):
            x = field.coerce(s + a)
            if (x * x).trace() <= bound:
                out.append(x)
        return out
    d = field.d
    s0, s1 = shift.coords
    t = field.omega_trace
    # x = P + Q sqrt d, Tr(x^2) = 2(P^2 + d Q^2)
    plim = isqrt(floor(bound / 2)) + 2
    qlim = isqrt(floor(bound / (2 * d))) + 2
    # Q = (s1 + b)/2 (t=1) or s1 + b; P = s0 + a + (s1 + b) t / 2
    blim = 2 * qlim + 2 if t else qlim + 1
    for b in range(-blim, blim + 1):
        cb = s1 + b
        center = -(s0 + cb * t / 2)
        for a in range(floor(center) - plim - 1, floor(center) + plim + 2):
            x = field.element(s0 + a, cb)
            if (x * x).trace() <= bound:
                out.append(x)
    return out


@lru_cache(maxsize=64)
def coset_vectors(field: FieldSpec, m: int, shift: tuple, bound: Fraction) -> tuple:
    """All x in shift + o^m with Tr tr(x x^t) <= bound, canonical order."""
    bound = Fraction(bound)
    per = [sorted(((x, (x * x).trace()) for x in _coordinate_values(field, s, bound)),
                  key=lambda v: v[0].coords) for s in shift]
    out = []

    def rec(k, remaining, acc):
        if k == m:
            out.append(tuple(acc))
            return
        for x, tr in per[k]:
            if tr <= remaining:
                acc.append(x)
                rec(k + 1, remaining - tr, acc)
                acc.pop()

    rec(0, bound, [])
    return tuple(out)


def theta_coeffs(field: FieldSpec, m: int, lam: Sequence, bound) -> list[ThetaMonomial]:
    """Monomials of theta_lambda with Tr tr((p + lambda/2)(p + lambda/2)^t) <= bound."""
    bound = Fraction(bound)
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    lam = _vector(field, lam)
    shift = tuple(x * Fraction(1, 2) for x in lam)
    out = []
    for x in coset_vectors(field, m, shift, bound):
        p = tuple(a - s for a, s in zip(x, shift))
        r = tuple(a * 2 for a in x)
        out.append(ThetaMonomial(p, x, r, SymMatrix(field, outer(x))))
    return out


def compose_theta(family: SplitFamily, theta_bound=None) -> JacobiExpansion:
    """Coefficients of sum_lambda h_lambda(z) theta_lambda(z, w), on invariant keys.

    Every product monomial c(T) q^(T/4) * e(x^t z x + 2 x^t w) is formed as a raw
    key (N, r) = (T/4 + x x^t, 2x) and normalized; all raw keys landing on one
    invariant key must carry the same coefficient.
    """
    _require_minus_one(family.eta)
    field, m = family.field, family.m
    if theta_bound is None:
        theta_bound = Fraction(m * field.degree)
    coeffs: dict = {}
    for lam, comp in family.components.items():
        if not comp:
            continue
        monos = theta_coeffs(field, m, lam, theta_bound)
        if not monos:
            raise AssertionError(f"theta window for {lam} is empty")
        for T, c in comp.items():
            quarter = T.scale(Fraction(1, 4))
            for mono in monos:
                N = quarter + mono.exponent
                key = normalize_jacobi_key(N, mono.r)
                prev = coeffs.get(key)
                if prev is not None and prev != c:
                    raise AssertionError(f"inconsistent raw coefficients at {key}")
                coeffs[key] = c
    weight = tuple(k + 1 for k in family.weight)
    return JacobiExpansion(field, m, weight, coeffs, family.trace_bound, family.eta)


# ---------------------------------------------------------------------
# coefficient operators


def rho_usharp(h: PlusExpansion, S: SymMatrix) -> PlusExpansion:
    """c(T) -> c(T) psi_{1,f}(tr(T S))."""
    out = {}
    for T, c in h.coeffs.items():
        tr = h.field.zero
        for j in range(h.m):
            for k in range(h.m):
                tr = tr + T.rows[j][k] * S.rows[k][j]
        out[T] = c * additive_character_finite(tr)
    return type(h)(h.field, h.m, h.weight, out, h.trace_bound, h.eta)


def sqrt_in_field(x: FieldElement) -> FieldElement | None:
    """Some u with u^2 = x, or None."""
    field = x.field
    if x.is_zero():
        return field.zero
    p, q = x.pq()
    if field.d is None:
        r = _rational_sqrt(p)
        return None if r is None else field.coerce(r)
    d = field.d
    sq = field.sqrt_d()
    if q == 0:
        r = _rational_sqrt(p)
        if r is not None:
            return field.coerce(r)
        s = _rational_sqrt(p / d)
        return None if s is None else sq * s
    disc = _rational_sqrt(p * p - d * q * q)
    if disc is None:
        return None
    for r2 in ((p + disc) / 2, (p - disc) / 2):
        r = _rational_sqrt(r2)
        if r:
            u = field.coerce(r) + sq * (q / (2 * r))
            if u * u == x:
                return u
    return None


def _rational_sqrt(x: Fraction) -> Fraction | None:
    x = Fraction(x)
    if x < 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def half_power_scalar(det_a: FieldElement, weight: Sequence[int]) -> CycScalar:
    """prod_j iota_j(det A)^(-k_j - 1/2) as an exact scalar.

    Needs det A = 2^t u^2 totally positive with either u rational or a parallel
    weight, so that the product over embeddings is rational times a power of sqrt 2.
    """
    field = det_a.field
    if not all(det_a.sign(i) > 0 for i in range(1, field.degree + 1)):
        raise UnsupportedDeterminant("det(A) must be totally positive")
    n = field.degree
    for t in (0, 1):
        u = sqrt_in_field(det_a * Fraction(1, 2 ** t))
        if u is None:
            continue
        # prod_j 2^(-t(k_j + 1/2)) |iota_j(u)|^(-2k_j - 1)
        two_exp = -t * (2 * sum(weight) + n)  # in units of 1/2
        scale = sqrt2_power(two_exp)
        if u.is_rational():
            val = abs(u.rational_part()) ** (-sum(2 * k + 1 for k in weight))
        elif len(set(weight)) == 1:
            val = abs(u.norm()) ** (-(2 * weight[0] + 1))
        else:
            continue
        return scale * val
    raise UnsupportedDeterminant(f"det(A)={det_a} is not of the form 2^t u^2 with a usable u")


def _lambda_max_upper(A) -> Fraction:
    """Rational upper bound for the largest eigenvalue of A^t A in every embedding.

    Uses lambda_max(A^t A) <= ||A||_1 ||A||_inf, which is sharp for diagonal A.
    """
    field = A[0][0].field
    m = len(A)
    best = Fraction(0)
    for i in range(1, field.degree + 1):
        mags = [[max(abs(v) for v in embed_real(x, i, 40)) for x in row] for row in A]
        row_sum = max(sum(row) for row in mags)
        col_sum = max(sum(mags[j][k] for j in range(m)) for k in range(m))
        best = max(best, row_sum * col_sum)
    return best


def rho_mA(h: PlusExpansion, A: Sequence[Sequence], k: Sequence[int] | None = None) -> FourierExpansion:
    """c'(T') = det(A)^(-k-1/2) c(A^t T' A); keys T' = A^-t T A^-1."""
    field = h.field
    A = [[field.coerce(x) for x in row] for row in A]
    weight = tuple(k) if k is not None else h.weight
    scale = half_power_scalar(det(A), weight)
    ainv = mat_inverse(A)
    lam = _lambda_max_upper(A)
    # Tr tr(A^t T' A) <= lam * Tr tr(T') for T' >= 0
    new_bound = h.trace_bound / lam
    out = {}
    for T, c in h.coeffs.items():
        Tp = congruence(T, ainv)
        if Tp.total_trace() <= new_bound:
            out[Tp] = c * scale
    return FourierExpansion(field, h.m, h.weight, out, new_bound, h.eta)
