"""Exact matrices of the Weil representation on windows and on level spaces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..cyclotomic import ONE, ZERO, CycScalar
from .local import LocalField
from .schwartz import (Grid, LocalFunction, NotRepresentable, bilinear, indicator, level_indices,
                       phi0, phi_level, quad_form)
from .words import (MA, WScaled, apply_word, in_group, inverse_word, require_group, scalar_matrix,
                    word_matrix)


class WindowTooSmall(ValueError):
    def __init__(self, a, b, detail=""):
        super().__init__(f"window ({a}, {b}) too small{': ' + detail if detail else ''}")
        self.a, self.b = a, b


class InvarianceViolation(AssertionError):
    pass


class NotEigenvector(AssertionError):
    pass


@dataclass(frozen=True)
class RepMatrix:
    """Square matrix of exact scalars; rows[j][k] is the coefficient of basis j in image of basis k."""

    rows: tuple
    tag: str = ""

    @property
    def size(self) -> int:
        return len(self.rows)

    @staticmethod
    def identity(n: int, tag: str = "") -> "RepMatrix":
        return RepMatrix(tuple(tuple(ONE if j == k else ZERO for k in range(n)) for j in range(n)), tag)

    def __matmul__(self, other: "RepMatrix") -> "RepMatrix":
        cols = list(zip(*other.rows))
        out = []
        for row in self.rows:
            out.append(tuple(_dot(row, col) for col in cols))
        return RepMatrix(tuple(out), self.tag)

    def conj_transpose(self) -> "RepMatrix":
        return RepMatrix(tuple(tuple(x.conjugate() for x in col) for col in zip(*self.rows)), self.tag)

    def is_identity(self) -> bool:
        return self.rows == RepMatrix.identity(self.size).rows

    def is_unitary(self) -> bool:
        return (self @ self.conj_transpose()).is_identity()

    def scalar_value(self):
        """c if the matrix is c * identity, else None."""
        c = self.rows[0][0]
        for j, row in enumerate(self.rows):
            for k, x in enumerate(row):
                if x != (c if j == k else ZERO):
                    return None
        return c

    def is_diagonal(self) -> bool:
        return all(x.is_zero() for j, row in enumerate(self.rows) for k, x in enumerate(row) if j != k)

    def proportional_to(self, other: "RepMatrix"):
        """xi with self = xi * other entrywise, or None."""
        xi = None
        for ra, rb in zip(self.rows, other.rows):
            for x, y in zip(ra, rb):
                if y.is_zero():
                    if not x.is_zero():
                        return None
                    continue
                r = x / y
                if xi is None:
                    xi = r
                elif r != xi:
                    return None
        return xi

    def scale(self, c) -> "RepMatrix":
        c = CycScalar.coerce(c)
        return RepMatrix(tuple(tuple(x * c for x in row) for row in self.rows), self.tag)

    def key(self):
        return self.rows

    def to_json(self):
        from ..serialize import scalar_json

        return {"tag": self.tag, "rows": [[scalar_json(x) for x in row] for row in self.rows]}


def _dot(row, col) -> CycScalar:
    total = ZERO
    for x, y in zip(row, col):
        if not x.is_zero() and not y.is_zero():
            total = total + x * y
    return total


# ---------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class WindowSpace:
    F: LocalField
    m: int
    a: int
    b: int

    @property
    def grid(self) -> Grid:
        return Grid(self.F, self.m, self.a, self.b)

    @property
    def dim(self) -> int:
        return self.grid.size

    def basis(self):
        return list(self.grid.cells())

    @staticmethod
    def self_dual(F: LocalField, m: int, b: int | None = None) -> "WindowSpace":
        """The window stable under w: a = b + c + e."""
        b = F.e + 1 if b is None else b
        return WindowSpace(F, m, b + F.c + F.e, b)

    @staticmethod
    def default(F: LocalField, m: int) -> "WindowSpace":
        return WindowSpace(F, m, F.e + 2, F.e + 2)


def op_matrix(word, space: WindowSpace) -> RepMatrix:
    """Matrix of a word on the delta basis of a window (the window must be stable)."""
    word = _as_word(word)
    cells = space.basis()
    index = {c: j for j, c in enumerate(cells)}
    cols = []
    for c in cells:
        f = apply_word(word, indicator(space.F, space.m, space.a, space.b, c))
        try:
            g = f.regrid(space.a, space.b)
        except NotRepresentable as exc:
            raise WindowTooSmall(space.a, space.b, str(exc)) from None
        col = [ZERO] * len(cells)
        for k, v in g.values.items():
            col[index[k]] = v
        cols.append(col)
    return RepMatrix(tuple(zip(*cols)), f"window({space.a},{space.b})")


def _as_word(word) -> tuple:
    if isinstance(word, (list, tuple)):
        return tuple(word)
    return (word,)


# ---------------------------------------------------------------------
# level spaces


def level_basis(F: LocalField, m: int, i: int) -> list[LocalFunction]:
    return [phi_level(F, m, i, lam) for lam in level_indices(F, m, i)]


def level_coords(f: LocalFunction, i: int) -> list[CycScalar]:
    """Coordinates in the Phi_lambda^(i) basis; InvarianceViolation if f is not in S^(i)."""
    F, m = f.F, f.m
    try:
        g = f.regrid(F.e, -i)
    except NotRepresentable as exc:
        raise InvarianceViolation(f"image leaves S^({i}): {exc}") from None
    return [g.values.get(lam, ZERO) for lam in level_indices(F, m, i)]


def level_matrix(word, F: LocalField, m: int, i: int, check: bool = True) -> RepMatrix:
    word = _as_word(word)
    if check:
        require_group(F, m, word, "level", i)
    cols = [level_coords(apply_word(word, f), i) for f in level_basis(F, m, i)]
    return RepMatrix(tuple(zip(*cols)) if cols else (), f"level{i}")


def usharp_level_eigen(F: LocalField, m: int, i: int, B) -> list[CycScalar]:
    """psi(varpi^(2i) tlam B lam / (4 delta)) for u#(delta^-1 varpi^(2i) B)."""
    scale = F.varpi_pow(2 * i) * (F.delta * 4).inverse()
    out = []
    for lam in level_indices(F, m, i):
        vec = tuple(F.residue_rep(r, F.e - i) for r in lam)
        out.append(F.psi(quad_form(vec, B) * scale))
    return out


def uflat_gauss_matrix(F: LocalField, m: int, i: int, S) -> RepMatrix:
    """Entry (mu, lam): q^(m(i-e)) sum_nu psi(varpi^i tnu lam/2d - varpi^2i tnu S nu/4d - varpi^i tnu mu/2d)."""
    idx = level_indices(F, m, i)
    n = F.e - i
    vecs = {lam: tuple(F.residue_rep(r, n) for r in lam) for lam in idx}
    lin = F.varpi_pow(i) * (F.delta * 2).inverse()
    quad = F.varpi_pow(2 * i) * (F.delta * 4).inverse()
    norm = CycScalar.rational(Fraction(F.q) ** (m * (i - F.e)))
    rows = []
    for mu in idx:
        row = []
        for lam in idx:
            total = ZERO
            for nu in idx:
                v = vecs[nu]
                arg = bilinear(v, vecs[lam]) * lin - quad_form(v, S) * quad - bilinear(v, vecs[mu]) * lin
                total = total + F.psi(arg)
            row.append(total * norm)
        rows.append(tuple(row))
    return RepMatrix(tuple(rows), f"gauss{i}")


def fourier_formula(F: LocalField, m: int, i: int, lam) -> LocalFunction:
    """|delta varpi^-2i|^(m/2) psi(tX lam/2) Phi_0(delta varpi^-i X) on its natural grid."""
    # support: delta varpi^-i X integral <=> X in p^(i-c); invariant under p^(e-c)
    grid = Grid(F, m, F.c - i, F.e - F.c)
    lamv = tuple(F.residue_rep(r, F.e - i) for r in lam)
    half = F.K.coerce(2).inverse()
    scale = F.q_half_power(-m * (F.c - 2 * i))
    vals = {}
    for cell in grid.cells():
        X = grid.point(cell)
        vals[cell] = F.psi(bilinear(X, lamv) * half) * scale
    return LocalFunction(grid, vals)


# ---------------------------------------------------------------------
# characters


def _eigen_scalar(f: LocalFunction, base: LocalFunction) -> CycScalar:
    g = f.regrid(base.grid.a, base.grid.b) if _fits(f, base) else None
    if g is None or set(g.values) != set(base.values):
        raise NotEigenvector("image is not a multiple of the base vector")
    ((cell, v0),) = base.values.items()
    return g.values[cell] / v0


def _fits(f, base) -> bool:
    try:
        f.regrid(base.grid.a, base.grid.b)
        return True
    except NotRepresentable:
        return False


def epsilon_char(word, F: LocalField, m: int, check: bool = False) -> CycScalar:
    """epsilon(gamma) with omega(gamma) Phi_0 = epsilon(gamma)^-1 Phi_0, gamma in Gamma_0(4)."""
    word = _as_word(word)
    require_group(F, m, word, "gamma0_4")
    base = phi0(F, m)
    return _eigen_scalar(apply_word(word, base), base).inverse()


def epsilon_check(word, F: LocalField, m: int) -> CycScalar:
    """The companion character on Gamma^(e), via Phi_0^(e) = char of (p^-e)^m."""
    word = _as_word(word)
    require_group(F, m, word, "level", F.e)
    base = phi_level(F, m, F.e, (0,) * m)
    return _eigen_scalar(apply_word(word, base), base).inverse()


def conj_by_m2(F: LocalField, m: int, word) -> tuple:
    """m(2I)^-1 word m(2I)."""
    t = MA(scalar_matrix(F, m, 2))
    return inverse_word((t,)) + tuple(word) + (t,)


def check_char_relation(word, F: LocalField, m: int) -> bool:
    word = _as_word(word)
    require_group(F, m, word, "level", F.e)
    return epsilon_char(conj_by_m2(F, m, word), F, m) == epsilon_check(word, F, m)


# ---------------------------------------------------------------------
# matrix coefficients e^K and E^K


def ek_value(word, F: LocalField, m: int) -> CycScalar:
    """q^(me) (Phi_0, omega(g) Phi_0) if g lies in Gamma, else 0."""
    word = _as_word(word)
    if not in_group(F, word_matrix(F, m, word), "gamma"):
        return ZERO
    f0 = phi0(F, m)
    return f0.inner(apply_word(word, f0)) * (F.q ** (m * F.e))


def conj_by_w2delta(F: LocalField, m: int, word) -> tuple:
    """w_{2 delta I}^-1 word w_{2 delta I}."""
    t = WScaled(F.delta * 2)
    return inverse_word((t,)) + tuple(word) + (t,)


def big_ek_value(word, F: LocalField, m: int) -> CycScalar:
    return ek_value(conj_by_w2delta(F, m, _as_word(word)), F, m)


def big_ek_direct(word, F: LocalField, m: int) -> CycScalar:
    """q^(me) (Phi_0, omega(g) Phi_0) for g in the conjugated group."""
    word = _as_word(word)
    require_group(F, m, word, "conjugated")
    f0 = phi0(F, m)
    return f0.inner(apply_word(word, f0)) * (F.q ** (m * F.e))


def ek_on_matrix(M: RepMatrix, F: LocalField, m: int) -> CycScalar:
    """e^K from a level-0 matrix: q^(me) conj(M[0][0])."""
    return M.rows[0][0].conjugate() * (F.q ** (m * F.e))
