"""Generator tokens, words, their symplectic matrices and group membership.

A word is a tuple of tokens read as a product t1 t2 ... tk; acting on a
function, the rightmost token is applied first.  The metaplectic lift of each
token is fixed by its operator (u-flat is defined by conjugating u-sharp with
w), so no cocycle is ever computed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ..field import FieldElement
from ..symmat import mat_inverse, transpose
from .local import INF, LocalField, unit_transversal
from .schwartz import LocalFunction, ma, ma_inverse, usharp, w_inverse, w_op


class NotInGroup(ValueError):
    pass


def _freeze(M) -> tuple:
    return tuple(tuple(row) for row in M)


def _identity(F: LocalField, m: int):
    return [[F.K.one if j == k else F.K.zero for k in range(m)] for j in range(m)]


def _scalar_matrix(F: LocalField, m: int, c) -> tuple:
    c = F.K.coerce(c)
    return _freeze([[c if j == k else F.K.zero for k in range(m)] for j in range(m)])


def _neg(M):
    return [[-x for x in row] for row in M]


def _mat_scale(M, c):
    return [[x * c for x in row] for row in M]


@dataclass(frozen=True)
class USharp:
    B: tuple

    def to_json(self):
        return {"op": "usharp", "B": _mat_json(self.B)}


@dataclass(frozen=True)
class MA:
    A: tuple

    def to_json(self):
        return {"op": "ma", "A": _mat_json(self.A)}


@dataclass(frozen=True)
class W:
    def to_json(self):
        return {"op": "w"}


@dataclass(frozen=True)
class WScaled:
    """w_{cI} = w m(cI)."""

    c: FieldElement

    def to_json(self):
        return {"op": "wscaled", "c": _elt_json(self.c)}


@dataclass(frozen=True)
class UFlat:
    S: tuple

    def to_json(self):
        return {"op": "uflat", "S": _mat_json(self.S)}


@dataclass(frozen=True)
class Inv:
    token: object

    def to_json(self):
        return {"op": "inv", "of": self.token.to_json()}


def _elt_json(x: FieldElement):
    if x.field.degree == 1:
        return str(x.coords[0])
    return [str(c) for c in x.coords]


def _mat_json(M):
    return [[_elt_json(x) for x in row] for row in M]


def inverse_token(t):
    if isinstance(t, Inv):
        return t.token
    if isinstance(t, USharp):
        return USharp(_freeze(_neg(t.B)))
    return Inv(t)


def inverse_word(word) -> tuple:
    return tuple(inverse_token(t) for t in reversed(word))


# ---------------------------------------------------------------------
# action


def apply_token(t, f: LocalFunction) -> LocalFunction:
    F, m = f.F, f.m
    if isinstance(t, USharp):
        return usharp(f, t.B)
    if isinstance(t, MA):
        return ma(f, t.A)
    if isinstance(t, W):
        return w_op(f)
    if isinstance(t, WScaled):
        return w_op(ma(f, _scalar_matrix(F, m, t.c)))
    if isinstance(t, UFlat):
        return w_inverse(usharp(w_op(f), _neg(t.S)))
    if isinstance(t, Inv):
        s = t.token
        if isinstance(s, MA):
            return ma_inverse(f, s.A)
        if isinstance(s, W):
            return w_inverse(f)
        if isinstance(s, WScaled):
            return ma_inverse(w_inverse(f), _scalar_matrix(F, m, s.c))
        if isinstance(s, UFlat):
            return w_inverse(usharp(w_op(f), s.S))
        return apply_token(inverse_token(s), f)
    raise TypeError(f"unknown token {t!r}")


def apply_word(word, f: LocalFunction) -> LocalFunction:
    for t in reversed(tuple(word)):
        f = apply_token(t, f)
    return f


# ---------------------------------------------------------------------
# symplectic matrices


def _block(a, b, c, d):
    return [ra + rb for ra, rb in zip(a, b)] + [rc + rd for rc, rd in zip(c, d)]


def _mul(X, Y):
    n, k = len(X), len(Y)
    return [[sum((X[i][t] * Y[t][j] for t in range(1, k)), X[i][0] * Y[0][j]) for j in range(len(Y[0]))]
            for i in range(n)]


def token_matrix(F: LocalField, m: int, t):
    I = _identity(F, m)
    Z = [[F.K.zero] * m for _ in range(m)]
    if isinstance(t, USharp):
        return _block(I, [list(r) for r in t.B], Z, I)
    if isinstance(t, MA):
        A = [list(r) for r in t.A]
        return _block(A, Z, Z, transpose(mat_inverse(A)))
    if isinstance(t, W):
        return _block(Z, _neg(I), I, Z)
    if isinstance(t, WScaled):
        c = F.K.coerce(t.c)
        return _block(Z, _mat_scale(I, -c.inverse()), _mat_scale(I, c), Z)
    if isinstance(t, UFlat):
        return _block(I, Z, [list(r) for r in t.S], I)
    if isinstance(t, Inv):
        return symplectic_inverse(token_matrix(F, m, t.token))
    raise TypeError(f"unknown token {t!r}")


def symplectic_inverse(g):
    m = len(g) // 2
    a = [row[:m] for row in g[:m]]
    b = [row[m:] for row in g[:m]]
    c = [row[:m] for row in g[m:]]
    d = [row[m:] for row in g[m:]]
    return _block(transpose(d), _neg(transpose(b)), _neg(transpose(c)), transpose(a))


def word_matrix(F: LocalField, m: int, word):
    g = _block(_identity(F, m), [[F.K.zero] * m for _ in range(m)],
               [[F.K.zero] * m for _ in range(m)], _identity(F, m))
    for t in word:
        g = _mul(g, token_matrix(F, m, t))
    return g


def is_symplectic(g) -> bool:
    m = len(g) // 2
    zero = g[0][0] * 0
    one = zero + 1
    J = [[zero] * (2 * m) for _ in range(2 * m)]
    for j in range(m):
        J[j][m + j] = one
        J[m + j][j] = -one
    lhs = _mul(_mul(transpose(g), J), g)
    return all(lhs[r][s] == J[r][s] for r in range(2 * m) for s in range(2 * m))


# (beta, gamma) exponents of Gamma[p^beta, p^gamma]; a, d always integral
def group_exponents(F: LocalField, group: str, i: int = 0) -> tuple[int, int]:
    c, e = F.c, F.e
    table = {
        "gamma": (-c, c),
        "gamma0_4": (-c, 2 * e + c),
        "level": (2 * i - c, c),
        "conjugated": (-2 * e - c, 2 * e + c),
    }
    if group not in table:
        raise ValueError(f"unknown group {group!r}")
    return table[group]


def in_group(F: LocalField, g, group: str, i: int = 0) -> bool:
    beta, gamma = group_exponents(F, group, i)
    m = len(g) // 2

    def vmin(rows, cols):
        return min((F.val(g[r][s]) for r in rows for s in cols), default=INF)

    top, bot = range(m), range(m, 2 * m)
    return (vmin(top, top) >= 0 and vmin(bot, bot) >= 0 and vmin(top, bot) >= beta
            and vmin(bot, top) >= gamma and is_symplectic(g))


def require_group(F, m, word, group, i=0):
    if not in_group(F, word_matrix(F, m, word), group, i):
        label = group if group != "level" else f"level {i}"
        raise NotInGroup(f"word is not in the {label} group")


# ---------------------------------------------------------------------
# generators


def _elementary(F: LocalField, m: int, j: int, k: int, x) -> tuple:
    M = _identity(F, m)
    M[j][k] = F.K.coerce(x)
    return _freeze(M)


def _sym_unit(F: LocalField, m: int, j: int, k: int, x) -> tuple:
    M = [[F.K.zero] * m for _ in range(m)]
    x = F.K.coerce(x)
    M[j][k] = x
    M[k][j] = x
    return _freeze(M)


def additive_basis(F: LocalField) -> list[FieldElement]:
    return [F.K.coerce(1)] if F.degree == 1 else [F.K.element(1, 0), F.K.element(0, 1)]


def _unit_generators(F: LocalField) -> list[FieldElement]:
    """Units mod p^(2e+1) other than 1; they generate the unit group there."""
    return [u for u in unit_transversal(F) if u != F.K.one]


def gl_generators(F: LocalField, m: int) -> list[MA]:
    gens = []
    for u in _unit_generators(F):
        M = _identity(F, m)
        M[0][0] = u
        gens.append(MA(_freeze(M)))
    for j in range(m):
        for k in range(m):
            if j != k:
                for x in additive_basis(F):
                    gens.append(MA(_elementary(F, m, j, k, x)))
    return gens


def sym_basis(F: LocalField, m: int) -> list[tuple]:
    out = []
    for j in range(m):
        for k in range(j, m):
            for x in additive_basis(F):
                out.append(_sym_unit(F, m, j, k, x))
    return out


def _scale_sym(S, c):
    return _freeze([[x * c for x in row] for row in S])


def group_generators(F: LocalField, m: int, group: str, i: int = 0) -> list:
    """Generators of Gamma[p^beta, p^gamma]: m(A), u#(B), uflat(C)."""
    beta, gamma = group_exponents(F, group, i)
    # p^beta = delta^-1 varpi^(beta + c), p^gamma = delta varpi^(gamma - c)
    bscale = F.delta.inverse() * F.varpi_pow(beta + F.c)
    cscale = F.delta * F.varpi_pow(gamma - F.c)
    gens: list = list(gl_generators(F, m))
    gens += [USharp(_scale_sym(E, bscale)) for E in sym_basis(F, m)]
    gens += [UFlat(_scale_sym(E, cscale)) for E in sym_basis(F, m)]
    return gens


def random_word(F: LocalField, m: int, group: str, rng: random.Random, i: int = 0,
                length: int = 4, height: int = 3) -> tuple:
    """Seeded random word in the generators with random integral parameters."""
    beta, gamma = group_exponents(F, group, i)
    bscale = F.delta.inverse() * F.varpi_pow(beta + F.c)
    cscale = F.delta * F.varpi_pow(gamma - F.c)
    word = []
    for _ in range(rng.randint(1, length)):
        kind = rng.choice(("m", "u", "l"))
        if kind == "m":
            word.append(random_gl_token(F, m, rng, height))
        else:
            S = random_integral_sym(F, m, rng, height)
            word.append(USharp(_scale_sym(S, bscale)) if kind == "u" else UFlat(_scale_sym(S, cscale)))
    return tuple(word)


def random_integral(F: LocalField, rng: random.Random, height: int) -> FieldElement:
    return F.K.coerce(tuple(rng.randint(-height, height) for _ in range(F.degree)))


def random_integral_sym(F: LocalField, m: int, rng: random.Random, height: int) -> tuple:
    M = [[F.K.zero] * m for _ in range(m)]
    for j in range(m):
        for k in range(j, m):
            M[j][k] = M[k][j] = random_integral(F, rng, height)
    return _freeze(M)


def random_gl_token(F: LocalField, m: int, rng: random.Random, height: int) -> MA:
    M = _identity(F, m)
    M[0][0] = rng.choice(unit_transversal(F))
    if m > 1:
        j, k = rng.sample(range(m), 2)
        E = _elementary(F, m, j, k, random_integral(F, rng, height))
        M = _mul(M, [list(r) for r in E])
    return MA(_freeze(M))


def scaled_sym(F: LocalField, S, c) -> tuple:
    return _scale_sym(S, F.K.coerce(c))


def scalar_matrix(F: LocalField, m: int, c) -> tuple:
    return _scalar_matrix(F, m, c)


def parse_token(F: LocalField, obj: dict):
    """Inverse of token.to_json."""
    op = obj.get("op")

    def elt(x):
        if isinstance(x, list):
            return F.K.coerce(tuple(Fraction(c) for c in x))
        return F.K.coerce(Fraction(str(x)))

    def mat(rows):
        return _freeze([[elt(x) for x in row] for row in rows])

    if op == "usharp":
        return USharp(mat(obj["B"]))
    if op == "ma":
        return MA(mat(obj["A"]))
    if op == "w":
        return W()
    if op == "wscaled":
        return WScaled(elt(obj["c"]))
    if op == "uflat":
        return UFlat(mat(obj["S"]))
    if op == "inv":
        return Inv(parse_token(F, obj["of"]))
    raise ValueError(f"unknown op {op!r}")
