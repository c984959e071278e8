"""Schwartz functions on (p^-a)^m / (p^b)^m and the basic Weil operators.

A function on the grid (a, b) is supported in (p^-a)^m and invariant under
(p^b)^m; its cells are X = varpi^-a * r with r in (o / p^(a+b))^m.  Values are
kept sparse and exact.  Every operator picks the smallest grid on which its
output is still exactly representable, so callers never size windows by hand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..cyclotomic import ONE, ZERO, CycScalar
from ..field import FieldElement
from .local import INF, LocalField, weil_index


class NotRepresentable(ValueError):
    """The function does not live on the requested grid."""


@dataclass(frozen=True)
class Grid:
    F: LocalField
    m: int
    a: int
    b: int

    def __post_init__(self):
        if self.a + self.b < 0:
            raise ValueError(f"empty grid ({self.a}, {self.b})")

    @property
    def n(self) -> int:
        return self.a + self.b

    @property
    def side(self) -> int:
        return self.F.q ** self.n

    @property
    def size(self) -> int:
        return self.side ** self.m

    @property
    def cell_volume(self) -> Fraction:
        return Fraction(self.F.q) ** (-self.b * self.m)

    def cells(self):
        return itertools.product(range(self.side), repeat=self.m)

    def point(self, cell) -> tuple[FieldElement, ...]:
        return _grid_point(self, tuple(cell))

    def coord(self, r: int) -> FieldElement:
        return _grid_coord(self, r)

    def locate_coord(self, x: FieldElement):
        if self.F.val(x) < -self.a:
            return None
        return self.F.residue_index(x * self.F.varpi_pow(self.a), self.n)

    def locate(self, X):
        out = []
        for x in X:
            r = self.locate_coord(x)
            if r is None:
                return None
            out.append(r)
        return tuple(out)

    def offsets(self, finer_b: int):
        """Representatives of (p^b / p^finer_b)^m."""
        lead = self.F.varpi_pow(self.b)
        reps = [lead * r for r in self.F.residues(finer_b - self.b)]
        return itertools.product(reps, repeat=self.m)


@lru_cache(maxsize=None)
def _grid_coord(grid: Grid, r: int) -> FieldElement:
    return grid.F.varpi_pow(-grid.a) * grid.F.residue_rep(r, grid.n)


@lru_cache(maxsize=None)
def _grid_point(grid: Grid, cell: tuple) -> tuple:
    return tuple(_grid_coord(grid, r) for r in cell)


class LocalFunction:
    """Sparse exact function on a grid; absent cells are zero."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: dict):
        self.grid = grid
        self.values = {c: v for c, v in values.items() if not v.is_zero()}

    @property
    def F(self):
        return self.grid.F

    @property
    def m(self):
        return self.grid.m

    def eval(self, X) -> CycScalar:
        cell = self.grid.locate(X)
        if cell is None:
            return ZERO
        return self.values.get(cell, ZERO)

    def is_zero(self) -> bool:
        return not self.values

    def scale(self, c) -> "LocalFunction":
        c = CycScalar.coerce(c)
        return LocalFunction(self.grid, {k: v * c for k, v in self.values.items()})

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other: "LocalFunction") -> "LocalFunction":
        f, g = common_grid(self, other)
        vals = dict(f.values)
        for k, v in g.values.items():
            vals[k] = vals.get(k, ZERO) + v
        return LocalFunction(f.grid, vals)

    def __sub__(self, other):
        return self + (-other)

    def regrid(self, a: int, b: int) -> "LocalFunction":
        """Exact re-expression on the grid (a, b); NotRepresentable otherwise."""
        src = self.grid
        if (a, b) == (src.a, src.b):
            return self
        dst = Grid(src.F, src.m, a, b)
        out: dict = {}
        if b >= src.b:
            offs = list(src.offsets(b)) if b > src.b else [tuple(src.F.K.zero for _ in range(src.m))]
            for cell, v in self.values.items():
                X = src.point(cell)
                for Y in offs:
                    tc = dst.locate(tuple(x + y for x, y in zip(X, Y)))
                    if tc is None:
                        raise NotRepresentable(f"support exceeds p^-{a}")
                    out[tc] = v
            return LocalFunction(dst, out)
        # coarsening: every touched coarse cell must be full and constant
        per_cell = src.F.q ** (src.m * (src.b - b))
        groups: dict = {}
        for cell, v in self.values.items():
            tc = dst.locate(src.point(cell))
            if tc is None:
                raise NotRepresentable(f"support exceeds p^-{a}")
            groups.setdefault(tc, []).append(v)
        for tc, vs in groups.items():
            if len(vs) != per_cell or any(v != vs[0] for v in vs):
                raise NotRepresentable(f"not invariant under p^{b}")
            out[tc] = vs[0]
        return LocalFunction(dst, out)

    def coeffs_on(self, a: int, b: int) -> dict:
        return self.regrid(a, b).values

    def inner(self, other: "LocalFunction") -> CycScalar:
        """(f, g) = int f conj(g) dX."""
        f, g = common_grid(self, other)
        total = ZERO
        for k, v in f.values.items():
            w = g.values.get(k)
            if w is not None:
                total = total + v * w.conjugate()
        return total * f.grid.cell_volume

    def __repr__(self):
        return f"LocalFunction(grid=({self.grid.a},{self.grid.b}), nnz={len(self.values)})"


def common_grid(f: LocalFunction, g: LocalFunction):
    a = max(f.grid.a, g.grid.a)
    b = max(f.grid.b, g.grid.b)
    return f.regrid(a, b), g.regrid(a, b)


def functions_equal(f: LocalFunction, g: LocalFunction) -> bool:
    f2, g2 = common_grid(f, g)
    return f2.values == g2.values


def proportionality(f: LocalFunction, g: LocalFunction):
    """The xi with f = xi * g, or None."""
    f2, g2 = common_grid(f, g)
    if f2.values.keys() != g2.values.keys():
        return None
    xi = None
    for k, v in g2.values.items():
        r = f2.values[k] / v
        if xi is None:
            xi = r
        elif r != xi:
            return None
    return xi


def indicator(F: LocalField, m: int, a: int, b: int, cell=None) -> LocalFunction:
    """Indicator of one grid cell (the origin cell by default)."""
    cell = tuple(cell) if cell is not None else (0,) * m
    return LocalFunction(Grid(F, m, a, b), {cell: ONE})


def phi0(F: LocalField, m: int) -> LocalFunction:
    """Characteristic function of o^m."""
    return indicator(F, m, 0, 0)


def phi_level(F: LocalField, m: int, i: int, lam) -> LocalFunction:
    """Characteristic function of lam/2 + (p^-i)^m, lam a residue tuple mod p^(e-i)."""
    # lam/2 = varpi^-e * (varpi^e / 2) * lam and varpi^e = 2 in all models
    return indicator(F, m, F.e, -i, lam)


def level_indices(F: LocalField, m: int, i: int):
    return list(itertools.product(range(F.q ** (F.e - i)), repeat=m))


# ---------------------------------------------------------------------
# helpers on small matrices over the local model


def _vmin(F, M) -> float:
    return min((F.val(x) for row in M for x in row), default=INF)


def _vdiag(F, M) -> float:
    return min((F.val(M[j][j]) for j in range(len(M))), default=INF)


def _voff(F, M) -> float:
    return min((F.val(M[j][k]) for j in range(len(M)) for k in range(len(M)) if j != k), default=INF)


def quad_form(X, B) -> FieldElement:
    m = len(X)
    total = X[0] * 0
    for j in range(m):
        for k in range(m):
            if not B[j][k].is_zero():
                total = total + X[j] * B[j][k] * X[k]
    return total


def bilinear(X, Y) -> FieldElement:
    total = X[0] * 0
    for x, y in zip(X, Y):
        total = total + x * y
    return total


def _apply_transpose(A, X):
    m = len(X)
    return tuple(sum((A[t][j] * X[t] for t in range(1, m)), A[0][j] * X[0]) for j in range(m))


def _ceil_half(x: float) -> float:
    if x == INF or x == -INF:
        return x
    return -((-int(x)) // 2)


# ---------------------------------------------------------------------
# operators


def usharp(f: LocalFunction, B) -> LocalFunction:
    """Multiplication by psi(tX B X)."""
    F, g = f.F, f.grid
    vm, vd, vo = _vmin(F, B), _vdiag(F, B), _voff(F, B)
    if vm == INF:
        return f
    c, e = F.c, F.e
    need = max(g.b, g.a - c - e - vm, _ceil_half(-c - vd), _ceil_half(-c - e - vo))
    h = f.regrid(g.a, int(need))
    out = {}
    for cell, v in h.values.items():
        X = h.grid.point(cell)
        out[cell] = v * F.psi(quad_form(X, B))
    return LocalFunction(h.grid, out)


def det_local(A) -> FieldElement:
    m = len(A)
    if m == 1:
        return A[0][0]
    if m == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    total = A[0][0] * 0
    for j in range(m):
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        term = A[0][j] * det_local(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def inverse_local(A):
    from ..symmat import mat_inverse

    return mat_inverse(A)


def ma_scalar(F: LocalField, A) -> CycScalar:
    d = det_local(A)
    return weil_index(F, F.K.one) / weil_index(F, d) * F.sqrt_abs(d)


def ma(f: LocalFunction, A, kappa: CycScalar | None = None) -> LocalFunction:
    """kappa * Phi(tA X), kappa = alpha(1)/alpha(det A) |det A|^(1/2) by default."""
    F, g = f.F, f.grid
    if kappa is None:
        kappa = ma_scalar(F, A)
    Ainv = inverse_local(A)
    a2 = int(g.a - _vmin(F, Ainv))
    b2 = int(g.b - _vmin(F, A))
    dst = Grid(F, g.m, a2, b2)
    out = {}
    for tc in dst.cells():
        v = f.eval(_apply_transpose(A, dst.point(tc)))
        if not v.is_zero():
            out[tc] = v * kappa
    return LocalFunction(dst, out)


def _fourier_sum(f: LocalFunction, dst: Grid, pair_scale: FieldElement, kappa: CycScalar) -> LocalFunction:
    """kappa * vol * sum_Y f(Y) psi(pair_scale tY X) on the target grid."""
    F = f.F
    src = f.grid
    items = [(src.point(c), v) for c, v in f.values.items()]
    out = {}
    scale = kappa * src.cell_volume
    for tc in dst.cells():
        X = dst.point(tc)
        Xs = tuple(x * pair_scale for x in X)
        acc: dict = {}
        for Y, v in items:
            ph = F.psi(bilinear(Y, Xs))
            acc[ph] = acc.get(ph, ZERO) + v
        total = ZERO
        for ph, v in acc.items():
            total = total + ph * v
        if not total.is_zero():
            out[tc] = total * scale
    return LocalFunction(dst, out)


def fourier(f: LocalFunction) -> LocalFunction:
    """hat Phi(X) = |delta|^(m/2) int Phi(Y) psi(tY X) dY."""
    F, g = f.F, f.grid
    dst = Grid(F, g.m, g.b + F.c, g.a - F.c)
    kappa = F.q_half_power(-F.c * g.m)
    return _fourier_sum(f, dst, F.K.one, kappa)


def w_scalar(F: LocalField, m: int) -> CycScalar:
    return weil_index(F, F.K.one) ** (-m) * F.q_half_power(-F.e * m)


def w_op(f: LocalFunction) -> LocalFunction:
    """alpha(1)^-m |2|^(m/2) hat Phi(-2X)."""
    F, g = f.F, f.grid
    dst = Grid(F, g.m, g.b + F.c + F.e, g.a - F.c - F.e)
    kappa = w_scalar(F, g.m) * F.q_half_power(-F.c * g.m)
    return _fourier_sum(f, dst, F.K.coerce(-2), kappa)


def w_inverse(f: LocalFunction) -> LocalFunction:
    """Inverse of w_op: alpha(1)^m |2|^(m/2) |delta|^(m/2) int G(U) psi(2 tU Y) dU."""
    F, g = f.F, f.grid
    dst = Grid(F, g.m, g.b + F.c + F.e, g.a - F.c - F.e)
    kappa = weil_index(F, F.K.one) ** g.m * F.q_half_power(-(F.e + F.c) * g.m)
    return _fourier_sum(f, dst, F.K.coerce(2), kappa)


def ma_inverse(f: LocalFunction, A) -> LocalFunction:
    """Exact inverse of ma(., A)."""
    F = f.F
    d = det_local(A)
    kappa = weil_index(F, d) / weil_index(F, F.K.one) / F.sqrt_abs(d)
    return ma(f, inverse_local(A), kappa)
