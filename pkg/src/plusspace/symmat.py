"""Symmetric matrices over the base field.

``SymMatrix`` is any symmetric matrix with entries in F; ``HalfIntMatrix``
adds the half-integrality constraint (diagonal in o, off-diagonal in o/2),
i.e. membership in the lattice L_m*.  The module also provides exact total
positivity tests, the plus-space congruence predicate and a complete, exact
enumeration of totally positive semidefinite half-integral matrices of
bounded trace.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import floor, isqrt
from typing import Iterable, Sequence

from .field import FieldElement, FieldSpec, in_ideal_2o, in_ideal_4o


class NotHalfIntegral(ValueError):
    pass


def _is_half_integral_entry(x: FieldElement) -> bool:
    return (x * 2).is_integral()


class SymMatrix:
    """An m x m symmetric matrix over F (immutable, hashable)."""

    __slots__ = ("field", "m", "rows", "_hash")

    def __init__(self, field: FieldSpec, rows: Sequence[Sequence]):
        self.field = field
        self.rows = tuple(tuple(field.coerce(x) for x in row) for row in rows)
        self.m = len(self.rows)
        if any(len(r) != self.m for r in self.rows):
            raise ValueError("matrix must be square")
        for j in range(self.m):
            for k in range(j + 1, self.m):
                if self.rows[j][k] != self.rows[k][j]:
                    raise ValueError("matrix must be symmetric")
        self._check()
        self._hash = None

    def _check(self):
        pass

    @classmethod
    def zero(cls, field: FieldSpec, m: int):
        return cls(field, [[0] * m for _ in range(m)])

    @classmethod
    def scalar(cls, field: FieldSpec, m: int, x):
        return cls(field, [[x if j == k else 0 for k in range(m)] for j in range(m)])

    def __getitem__(self, jk):
        j, k = jk
        return self.rows[j][k]

    def entries(self) -> Iterable[FieldElement]:
        for row in self.rows:
            yield from row

    def sort_key(self):
        return tuple(x.coords for x in self.entries())

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.sort_key())
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({[list(r) for r in self.rows]})"

    # --- algebra -------------------------------------------------------
    def _new(self, rows, cls=None):
        cls = cls or SymMatrix
        return cls(self.field, rows)

    def __add__(self, other: "SymMatrix"):
        return as_best(self.field, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "SymMatrix"):
        return as_best(self.field, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return as_best(self.field, [[-a for a in r] for r in self.rows])

    def scale(self, c) -> "SymMatrix":
        c = self.field.coerce(c)
        return as_best(self.field, [[a * c for a in r] for r in self.rows])

    def trace(self) -> FieldElement:
        out = self.field.zero
        for j in range(self.m):
            out = out + self.rows[j][j]
        return out

    def total_trace(self) -> Fraction:
        """Tr_{F/Q}(tr T)."""
        return self.trace().trace()

    def to_lists(self) -> list[list[FieldElement]]:
        return [list(r) for r in self.rows]

    def is_half_integral(self) -> bool:
        return all(self.rows[j][j].is_integral() for j in range(self.m)) and all(
            _is_half_integral_entry(self.rows[j][k]) for j in range(self.m) for k in range(j + 1, self.m)
        )


class HalfIntMatrix(SymMatrix):
    """Element of L_m*: integral diagonal, half-integral off-diagonal."""

    __slots__ = ()

    def _check(self):
        if not self.is_half_integral():
            raise NotHalfIntegral(f"matrix is not half-integral: {self.rows}")


def as_best(field: FieldSpec, rows) -> SymMatrix:
    """HalfIntMatrix when the entries allow it, plain SymMatrix otherwise."""
    s = SymMatrix(field, rows)
    if s.is_half_integral():
        return HalfIntMatrix(field, s.rows)
    return s


def half_int(field: FieldSpec, rows) -> HalfIntMatrix:
    return HalfIntMatrix(field, rows)


# ---------------------------------------------------------------------
# plain matrix helpers over F


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(1, k)), a[i][0] * b[0][j]) for j in range(m)] for i in range(n)]


def transpose(a):
    return [list(r) for r in zip(*a)]


def det(a) -> FieldElement:
    """Determinant by cofactor expansion (small sizes)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    out = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det(minor)
        if j % 2:
            term = -term
        out = term if out is None else out + term
    return out


def mat_inverse(a):
    """Inverse over a field by Gauss-Jordan elimination."""
    n = len(a)
    one = a[0][0].field.one if isinstance(a[0][0], FieldElement) else None
    aug = [list(a[i]) + [one if i == j else one * 0 for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def congruence(t: SymMatrix, a) -> SymMatrix:
    """ᵗA T A as a symmetric matrix."""
    rows = mat_mul(mat_mul(transpose(a), t.to_lists()), a)
    return as_best(t.field, rows)


# ---------------------------------------------------------------------
# positivity


def _principal_minors(rows, strict: bool):
    m = len(rows)
    if strict:
        for k in range(1, m + 1):
            yield [r[:k] for r in rows[:k]]
        return
    for k in range(1, m + 1):
        for idx in itertools.combinations(range(m), k):
            yield [[rows[i][j] for j in idx] for i in idx]


def is_totally_psd(t: SymMatrix, strict: bool = False) -> bool:
    """Every real embedding is PSD (or PD when strict), decided exactly."""
    rows = t.to_lists()
    n = t.field.degree
    for minor in _principal_minors(rows, strict):
        dm = det(minor)
        for i in range(1, n + 1):
            s = dm.sign(i)
            if s < 0 or (strict and s == 0):
                return False
    return True


# ---------------------------------------------------------------------
# plus-space predicate


def in_4L_dual(x: SymMatrix) -> bool:
    """x in 4 L_m*: diagonal in 4o, off-diagonal in 2o."""
    m = x.m
    for j in range(m):
        if not in_ideal_4o(x.rows[j][j]):
            return False
        for k in range(j + 1, m):
            if not in_ideal_2o(x.rows[j][k]):
                return False
    return True


@lru_cache(maxsize=None)
def residue_vectors(field: FieldSpec, m: int) -> tuple[tuple[FieldElement, ...], ...]:
    """Canonical representatives of (o/2o)^m in canonical order."""
    reps = field.residues_mod2()
    return tuple(itertools.product(reps, repeat=m))


def outer(lam: Sequence[FieldElement]) -> list[list[FieldElement]]:
    return [[a * b for b in lam] for a in lam]


@lru_cache(maxsize=None)
def _square_roots_mod4(field: FieldSpec, x: FieldElement) -> tuple[FieldElement, ...]:
    """Residues r in o/2o with x - r^2 in 4o."""
    return tuple(r for r in field.residues_mod2() if in_ideal_4o(x - r * r))


def plus_witnesses(t: SymMatrix, eta=-1) -> list[tuple[FieldElement, ...]]:
    """All lambda in (o/2o)^m with eta^{-1}T - lambda lambda^t in 4L_m*."""
    if not t.is_half_integral():
        raise NotHalfIntegral("plus predicate needs T in L_m*")
    field = t.field
    einv = field.coerce(eta).inverse()
    m = t.m
    u = [[t.rows[j][k] * einv for k in range(m)] for j in range(m)]
    # the diagonal condition only sees one coordinate at a time
    per_coord = [_square_roots_mod4(field, u[j][j]) for j in range(m)]
    out = []
    for lam in itertools.product(*per_coord):
        if all(in_ideal_2o(u[j][k] - lam[j] * lam[k]) for j in range(m) for k in range(j + 1, m)):
            out.append(tuple(lam))
    return out


def plus_support_witness(t: SymMatrix, eta=-1):
    """The residue vector lambda witnessing the plus condition, or None."""
    found = plus_witnesses(t, eta)
    if len(found) > 1:
        raise AssertionError(f"plus witness not unique for {t}: {found}")
    return found[0] if found else None


# ---------------------------------------------------------------------
# enumeration


def _isqrt_ceil_frac(x: Fraction) -> int:
    # smallest integer s >= sqrt(x) for x >= 0
    if x <= 0:
        return 0
    s = isqrt(floor(x))
    while Fraction(s * s) < x:
        s += 1
    return s


@lru_cache(maxsize=None)
def totally_nonneg_integers(field: FieldSpec, bound: Fraction) -> tuple[FieldElement, ...]:
    """Totally nonnegative x in o with Tr(x) <= bound, canonical order."""
    bound = Fraction(bound)
    if bound < 0:
        return ()
    if field.d is None:
        return tuple(field.coerce(a) for a in range(0, floor(bound) + 1))
    d, t = field.d, field.omega_trace
    # x = p + q sqrt d, 0 <= Tr = 2p <= bound and |q| sqrt d <= p
    qmax_sq = (bound / 2) ** 2 / d
    qmax = _isqrt_ceil_frac(qmax_sq)
    # q = b/2 (d = 1 mod 4) or q = b
    bmax = 2 * qmax if t else qmax
    out = []
    for b in range(-bmax, bmax + 1):
        # 2p = 2a + b t must lie in [0, bound]
        lo = -(b * t) / 2
        hi = (bound - b * t) / 2
        for a in range(_ceil(lo), floor(hi) + 1):
            x = field.element(a, b)
            if x.trace() <= bound and x.sign(1) >= 0 and x.sign(2) >= 0:
                out.append(x)
    out.sort(key=lambda x: x.coords)
    return tuple(out)


def _ceil(x: Fraction) -> int:
    return -floor(-x)


def _surd4(x: FieldElement) -> tuple[int, int]:
    """Integers (P, Q) with 4x = P + Q sqrt d (x in o/2)."""
    p, q = x.pq()
    return int(4 * p), int(4 * q)


def _surd_sign(p: int, q: int, d: int) -> int:
    if q == 0 or d == 0:
        return (p > 0) - (p < 0)
    if p == 0 or (p > 0) == (q > 0):
        return 1 if q > 0 else -1
    big = p if p * p > q * q * d else q
    return 1 if big > 0 else -1


def _offdiag_candidates(field: FieldSpec, tjj: FieldElement, tkk: FieldElement) -> list[FieldElement]:
    """All y in o/2 with iota(tjj) iota(tkk) - iota(y)^2 >= 0 for every real embedding."""
    d = field.d or 0
    pj, qj = _surd4(tjj)
    pk, qk = _surd4(tkk)
    # 16 tjj tkk = A + B sqrt d
    big_a = pj * pk + d * qj * qk
    big_b = pj * qk + pk * qj
    # |iota(4y)| <= sqrt(16 * Tr tjj * Tr tkk)
    mag = 16 * tjj.trace() * tkk.trace()
    lim = _isqrt_ceil_frac(mag)
    out = []
    if field.d is None:
        for p in range(-lim, lim + 1):
            if p % 2 == 0 and big_a - p * p >= 0:
                out.append(field.coerce(Fraction(p, 4)))
        return out
    t1 = field.d % 4 == 1
    qlim = _isqrt_ceil_frac(Fraction(mag) / d)
    for q in range(-qlim, qlim + 1):
        if not t1 and q % 2:
            continue
        for p in range(-lim, lim + 1):
            if (p - q) % 2 if t1 else p % 2:
                continue
            # 16 (tjj tkk - y^2) = (A - p^2 - d q^2) + (B - 2 p q) sqrt d
            c0 = big_a - p * p - d * q * q
            c1 = big_b - 2 * p * q
            if _surd_sign(c0, c1, d) >= 0 and _surd_sign(c0, -c1, d) >= 0:
                out.append(_from_surd4(field, p, q))
    return out


def _from_surd4(field: FieldSpec, p: int, q: int) -> FieldElement:
    # 4y = p + q sqrt d
    if field.d % 4 == 1:
        # sqrt d = 2 omega - 1: y = (p - q)/4 + (q/2) omega
        return field.element(Fraction(p - q, 4), Fraction(q, 2))
    return field.element(Fraction(p, 4), Fraction(q, 4))


@lru_cache(maxsize=None)
def enumerate_psd(field: FieldSpec, m: int, bound, plus_eta=None) -> tuple[HalfIntMatrix, ...]:
    """All totally PSD T in L_m* with Tr(tr T) <= bound, in canonical order.

    With plus_eta set, only the plus-supported T for that eta are returned.
    """
    bound = Fraction(bound)
    if bound < 0:
        return ()
    diag_pool = totally_nonneg_integers(field, bound)
    if plus_eta is not None:
        einv = field.coerce(plus_eta).inverse()
        diag_pool = tuple(x for x in diag_pool if _square_roots_mod4(field, x * einv))
    out = []

    def diagonals(k, remaining):
        if k == 0:
            yield ()
            return
        for x in diag_pool:
            tr = x.trace()
            if tr <= remaining:
                for rest in diagonals(k - 1, remaining - tr):
                    yield (x,) + rest

    pairs = [(j, k) for j in range(m) for k in range(j + 1, m)]
    for diag in diagonals(m, bound):
        options = []
        for j, k in pairs:
            # |iota(y)|^2 <= iota(t_jj) iota(t_kk) <= (Tr t_jj)(Tr t_kk)
            options.append(_offdiag_candidates(field, diag[j], diag[k]))
        for offs in itertools.product(*options):
            rows = [[field.zero] * m for _ in range(m)]
            for j in range(m):
                rows[j][j] = diag[j]
            for (j, k), y in zip(pairs, offs):
                rows[j][k] = rows[k][j] = y
            t = HalfIntMatrix(field, rows)
            if plus_eta is not None and not plus_witnesses(t, plus_eta):
                continue
            if m <= 2 or is_totally_psd(t):
                out.append(t)
    out.sort(key=lambda t: t.sort_key())
    return tuple(out)
